"""Plain-text result tables built with pandas."""

from typing import Dict, Mapping, Sequence

import pandas as pd

from clt.config import REPORT_DECIMALS
from clt.evaluation.report import MetricsReport
from clt.training import ABLATION_VARIANTS

DIRECTION_LABELS = {"long2short": "L>S", "short2long": "S>L"}


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return "-"
    return f"{value:.{REPORT_DECIMALS}f}"


def results_frame(reports: Sequence[MetricsReport]) -> pd.DataFrame:
    """One row per model, (direction, metric) columns; RMSE columns only for 5-class runs."""
    rows: Dict[str, Dict] = {}
    fine_grained = any(r.num_classes == 5 for r in reports)
    for r in reports:
        label = r.model_kind if r.mechanisms in ("-", "JT+PR+SP") else f"{r.model_kind} ({r.mechanisms})"
        row = rows.setdefault(label, {})
        direction = DIRECTION_LABELS.get(r.direction, r.direction)
        row[(direction, "Acc")] = r.accuracy
        if fine_grained:
            row[(direction, "RMSE")] = r.rmse
        row[(direction, "TL")] = r.transfer_loss
    frame = pd.DataFrame.from_dict(rows, orient="index")
    frame.columns = pd.MultiIndex.from_tuples(list(frame.columns))
    return frame


def ablation_frame(reports: Mapping[str, Sequence[MetricsReport]]) -> pd.DataFrame:
    """Rows in ablation order ("-", JT, PR, SP, All), one accuracy column per direction."""
    rows = {}
    for variant in ABLATION_VARIANTS:
        if variant not in reports:
            continue
        rows[variant] = {DIRECTION_LABELS.get(r.direction, r.direction): r.accuracy for r in reports[variant]}
    return pd.DataFrame.from_dict(rows, orient="index")


def folds_frame(report: MetricsReport) -> pd.DataFrame:
    frame = pd.DataFrame([f.model_dump() for f in report.folds]).set_index("fold")
    mean = frame.mean(numeric_only=True).rename("mean")
    return pd.concat([frame, mean.to_frame().T])


def length_frame(report: MetricsReport) -> pd.DataFrame:
    return pd.DataFrame(
        [{"length": f"{b.low}-{b.high}", "count": b.count, "accuracy": b.accuracy} for b in report.length_buckets]
    ).set_index("length")


def render(frame: pd.DataFrame) -> str:
    return frame.to_string(float_format=_fmt, na_rep="-")


def render_report(report: MetricsReport) -> str:
    """Summary block, per-fold table and per-length table for one report."""
    lines = [
        f"model: {report.model_kind}   direction: {report.direction}   mechanisms: {report.mechanisms}",
        f"classes: {report.num_classes}   lambda: {report.lambda_}   seed: {report.seed}",
        "",
        render(results_frame([report])),
        "",
        f"in-channel accuracy: {_fmt(report.in_channel_accuracy)}   "
        f"transfer ratio: {_fmt(report.transfer_ratio)}",
        "",
        "per fold:",
        render(folds_frame(report)),
        "",
        "per length:",
        render(length_frame(report)),
    ]
    return "\n".join(lines) + "\n"
