#!/usr/bin/env python3
"""
Seeded synthetic transfer suite.

This script:
1. Generates short/long synthetic corpora for every seed
2. Runs the cross-validated transfer protocol for CNN, BaggedCNN and LeTraNets in both directions
3. Runs the LeTraNets ablation rows ("-", JT, PR, SP, All) unless --skip-ablation is given
4. Writes every MetricsReport plus summary tables under --output-dir
5. Checks the length gap, the model ordering and the ablation ordering, averaged over seeds

Usage examples:
  python scripts/run_synthetic_suite.py --output-dir runs/suite
  python scripts/run_synthetic_suite.py --seeds 0 --n-short 400 --n-long 400 --skip-ablation
"""

import argparse
import sys
import time
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv

# Add the repository root to the Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from clt.config.seeding import derive_seed
from clt.datasets import FoldPlan, SyntheticConfig, gen_synthetic, random_embeddings
from clt.evaluation import MetricsReport, ablation_frame, render, results_frame, run_transfer_protocol
from clt.models import ModelDims
from clt.textproc import build_vocab
from clt.training import ABLATION_VARIANTS, DIRECTIONS, LONG_TO_SHORT, TrainConfig
from clt.utils.logging.logging_config import attach_metrics_stream, detach_metrics_stream, setup_logging_from_env

KINDS = ("cnn", "baggedcnn", "letranets")


def run_seed(seed: int, args: argparse.Namespace, out_dir: Path) -> List[dict]:
    """All protocol runs for one seed; returns one summary row per report."""
    short, long, unlabeled = gen_synthetic(SyntheticConfig(n_short=args.n_short, n_long=args.n_long,
                                                           n_unlabeled=args.n_unlabeled, seed=seed))
    rows = []
    for direction in DIRECTIONS:
        source = long if direction == LONG_TO_SHORT else short
        vocab = build_vocab([inst.tokens for inst in source.instances] + unlabeled, min_count=args.min_count)
        dims = ModelDims(vocab_size=len(vocab), num_classes=2, embedding_dim=args.embedding_dim,
                         maps=args.maps, attention_dim=args.attention_dim)
        embeddings = random_embeddings(len(vocab), args.embedding_dim, seed=derive_seed(seed, "embeddings"))
        cfg = TrainConfig(direction=direction, max_epochs=args.epochs, seed=seed)
        plan = FoldPlan(k=args.folds, seed=derive_seed(seed, "folds"))
        baseline_cache: Dict[int, np.ndarray] = {}

        runs: List[Tuple[str, str, TrainConfig]] = [(kind, "All" if kind == "letranets" else "-", cfg)
                                                    for kind in KINDS]
        if not args.skip_ablation:
            runs += [("letranets", v, cfg.ablation(v)) for v in ABLATION_VARIANTS if v != "All"]

        for kind, variant, run_cfg in runs:
            start = time.perf_counter()
            report = run_transfer_protocol(kind, short, long, run_cfg, vocab, embeddings, plan=plan,
                                           lambda_grid=args.lambda_grid, dims=dims, workers=args.workers,
                                           baseline_cache=baseline_cache, run_id=f"seed{seed}")
            stem = f"{kind}_{direction}" + ("" if kind != "letranets" else f"_{variant.lower().strip('-') or 'none'}")
            report.save(out_dir / f"seed{seed}" / f"{stem}.json")
            print(f"  seed {seed} {direction:10} {kind:9} {variant:4} accuracy {report.accuracy:.4f} "
                  f"TL {report.transfer_loss:6.2f} ({time.perf_counter() - start:.0f}s)")
            rows.append({'seed': seed, 'direction': direction, 'model_kind': kind, 'variant': variant,
                         'report': report})
    return rows


def check(label: str, passed: bool, detail: str) -> bool:
    print(f"{'✓' if passed else '✗'} {label}: {detail}")
    return passed


def evaluate(frame: pd.DataFrame) -> bool:
    """Acceptance checks over seed-averaged results."""
    main_runs = frame[frame['variant'].isin(["-", "All"])]
    means = main_runs.groupby(['direction', 'model_kind'])[['accuracy', 'in_channel_accuracy', 'transfer_loss']].mean()
    ok = True
    for direction in DIRECTIONS:
        cnn, bagged, letra = (means.loc[(direction, k)] for k in KINDS)
        ok &= check(f"{direction} in-channel accuracy", cnn['in_channel_accuracy'] >= 0.95,
                    f"{cnn['in_channel_accuracy']:.4f} (need >= 0.95)")
        ok &= check(f"{direction} CNN transfer loss", cnn['transfer_loss'] > 0.0,
                    f"{cnn['transfer_loss']:.2f} (need > 0)")
        ok &= check(f"{direction} LeTraNets transfer loss", letra['transfer_loss'] < cnn['transfer_loss'],
                    f"{letra['transfer_loss']:.2f} vs CNN {cnn['transfer_loss']:.2f}")
        ordered = letra['accuracy'] >= bagged['accuracy'] >= cnn['accuracy']
        ok &= check(f"{direction} model ordering", ordered and letra['accuracy'] - cnn['accuracy'] >= 0.02,
                    f"LeTraNets {letra['accuracy']:.4f} >= BaggedCNN {bagged['accuracy']:.4f} "
                    f">= CNN {cnn['accuracy']:.4f}")

    ablation = frame[frame['model_kind'] == "letranets"].groupby(['direction', 'variant'])['accuracy'].mean()
    for direction in DIRECTIONS:
        variants = ablation.loc[direction]
        singles = [v for v in ("JT", "PR", "SP") if v in variants.index]
        if singles:
            best_single = max(variants[v] for v in singles)
            ok &= check(f"{direction} ablation ordering", variants["All"] >= best_single,
                        f"All {variants['All']:.4f} vs best single mechanism {best_single:.4f}")
    return ok


def length_curve(frame: pd.DataFrame) -> bool:
    """A CNN trained on short texts should do no better on the longest targets than on the shortest."""
    ok = True
    for row in frame[(frame['model_kind'] == "cnn") & (frame['direction'] != LONG_TO_SHORT)].itertuples():
        scored = [b for b in row.report.length_buckets if b.accuracy is not None]
        ok &= check(f"seed {row.seed} CNN length curve", scored[-1].accuracy <= scored[0].accuracy,
                    f"longest {scored[-1].accuracy:.4f} vs shortest {scored[0].accuracy:.4f}")
    return ok


def main():
    """Main entry point"""
    parser = argparse.ArgumentParser(description='Run the seeded synthetic cross length transfer suite')
    parser.add_argument('--output-dir', default='runs/synthetic_suite')
    parser.add_argument('--seeds', default='0,1,2', help='comma-separated root seeds')
    parser.add_argument('--n-short', type=int, default=2000)
    parser.add_argument('--n-long', type=int, default=2000)
    parser.add_argument('--n-unlabeled', type=int, default=0)
    parser.add_argument('--folds', type=int, default=5)
    parser.add_argument('--epochs', type=int, default=10)
    parser.add_argument('--embedding-dim', type=int, default=50,
                        help='smaller than the 300-d default to keep the suite within CPU minutes')
    parser.add_argument('--maps', type=int, default=50)
    parser.add_argument('--attention-dim', type=int, default=50)
    parser.add_argument('--min-count', type=int, default=1)
    parser.add_argument('--lambda-grid', default='0.01,0.1,1.0')
    parser.add_argument('--workers', type=int, default=1)
    parser.add_argument('--skip-ablation', action='store_true', help='only the three main models')
    args = parser.parse_args()
    args.lambda_grid = [float(v) for v in args.lambda_grid.split(',')]

    load_dotenv()
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    setup_logging_from_env(log_dir=str(out_dir))
    handler = attach_metrics_stream(str(out_dir / "metrics.jsonl"))

    started = time.perf_counter()
    rows = []
    try:
        print("Starting synthetic transfer suite...")
        for seed in (int(s) for s in args.seeds.split(',')):
            rows.extend(run_seed(seed, args, out_dir))
    except Exception as e:
        print(f"✗ Error: {e}")
        return 1
    finally:
        detach_metrics_stream(handler)

    frame = pd.DataFrame([{**{k: v for k, v in r.items() if k != 'report'},
                           'accuracy': r['report'].accuracy,
                           'in_channel_accuracy': r['report'].in_channel_accuracy,
                           'transfer_loss': r['report'].transfer_loss,
                           'report': r['report']} for r in rows])

    reports: List[MetricsReport] = [r['report'] for r in rows if r['variant'] in ("-", "All")]
    summary = render(results_frame(reports))
    tables = [summary]
    if not args.skip_ablation:
        by_variant: Dict[str, List[MetricsReport]] = {}
        for r in rows:
            if r['model_kind'] == "letranets" and r['seed'] == rows[0]['seed']:
                by_variant.setdefault(r['variant'], []).append(r['report'])
        tables.append(render(ablation_frame(by_variant)))
    (out_dir / "summary.txt").write_text("\n\n".join(tables) + "\n", encoding='utf-8')
    print("\n" + "\n\n".join(tables) + "\n")

    passed = evaluate(frame) & length_curve(frame)
    elapsed = time.perf_counter() - started
    if passed:
        print(f"\n✓ Synthetic suite passed in {elapsed / 60:.1f} min")
        return 0
    print(f"\n⚠ Synthetic suite finished with failed checks in {elapsed / 60:.1f} min")
    return 1


if __name__ == "__main__":
    sys.exit(main())
