import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from clt.errors import ContractViolation


class MetricsReader:
    """Utility for reading the JSON-lines metrics stream written during training."""

    def __init__(self, metrics_path: str):
        self.metrics_path = metrics_path
        if not Path(metrics_path).is_file():
            raise ContractViolation(f"metrics stream not found: {metrics_path}")

    def _parse_line(self, line: str) -> Optional[Dict[str, Any]]:
        """Parse a single line; partial or foreign lines are skipped."""
        try:
            entry = json.loads(line.strip())
        except (json.JSONDecodeError, ValueError):
            return None
        return entry if isinstance(entry, dict) else None

    def get_all_records(self, limit: Optional[int] = None) -> List[Dict[str, Any]]:
        records = []
        with open(self.metrics_path, 'r', encoding='utf-8') as f:
            for line in f:
                entry = self._parse_line(line)
                if entry:
                    records.append(entry)
                    if limit and len(records) >= limit:
                        break
        return records

    def filter_records(self, **filters) -> List[Dict[str, Any]]:
        """
        Records matching every key/value pair (e.g. run_id='abc', fold=0, stage='full').

        None-valued filters are ignored.
        """
        active = {k: v for k, v in filters.items() if v is not None}
        return [r for r in self.get_all_records() if all(r.get(k) == v for k, v in active.items())]

    def to_frame(self, **filters) -> pd.DataFrame:
        return pd.DataFrame(self.filter_records(**filters))

    def summarize_runs(self, **filters) -> pd.DataFrame:
        """
        One row per (run_id, model_kind, direction, fold, lambda_) with the epoch
        count, the best dev accuracy and the earliest epoch reaching it.
        """
        frame = self.to_frame(**filters)
        if frame.empty:
            return frame
        keys = [k for k in ('run_id', 'model_kind', 'direction', 'mechanisms', 'fold', 'lambda_') if k in frame]
        full = frame[frame['stage'] == 'full'] if 'stage' in frame else frame
        rows = []
        for group_key, group in full.groupby(keys, dropna=False, sort=True):
            group_key = group_key if isinstance(group_key, tuple) else (group_key,)
            row = dict(zip(keys, group_key))
            row['epochs'] = len(group)
            scored = group.dropna(subset=['dev_accuracy']) if 'dev_accuracy' in group else group.iloc[0:0]
            if len(scored):
                best = scored.loc[scored['dev_accuracy'].idxmax()]
                row['best_epoch'] = int(best['epoch'])
                row['best_dev_accuracy'] = float(best['dev_accuracy'])
            if 'total' in group:
                row['final_loss'] = float(group.sort_values('epoch')['total'].iloc[-1])
            rows.append(row)
        return pd.DataFrame(rows)
