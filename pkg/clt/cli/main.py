#!/usr/bin/env python3
"""
Command-line entry point.

Usage examples:
  python -m clt synth --output-dir data/synth --n-short 2000 --n-long 2000
  python -m clt transfer --model letranets --direction long2short \
      --source data/synth/long.tsv --target data/synth/short.tsv --output-dir runs/l2s
  python -m clt transfer --model letranets --ablate jt,pr,sp --config run.json
  python -m clt gradcheck --tolerance 1e-4
  python -m clt report runs/l2s/metrics.jsonl runs/l2s/report.json

Exit codes: 0 ok, 1 check failed, 2 configuration or input error, 3 training diverged.
"""

import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from clt.config import (
    EXIT_CONFIG_ERROR,
    EXIT_DIVERGED,
    GRADCHECK_PROBES,
    GRADCHECK_TOLERANCE,
)
from clt.config.settings import load_run_config
from clt.errors import CltError, ConfigError, TrainingDivergedError
from clt.utils.logging.component_loggers import get_cli_logger
from clt.utils.logging.logging_config import setup_logging_from_env

logger = get_cli_logger(__name__)

# (flag, RunConfig key, type, help)
RUN_FLAGS = (
    ("--model", "model", str, "cnn | baggedcnn | letranets"),
    ("--direction", "direction", str, "long2short | short2long"),
    ("--source", "source", str, "source-channel corpus (label<TAB>text)"),
    ("--target", "target", str, "target-channel corpus"),
    ("--unlabeled", "unlabeled", str, "extra raw texts for the vocabulary, one per line"),
    ("--embeddings", "embeddings", str, "pretrained vectors in text format"),
    ("--checkpoint", "checkpoint", str, "model checkpoint to write (train) or read (eval)"),
    ("--vocab", "vocab", str, "vocabulary JSON saved next to a checkpoint"),
    ("--output-dir", "output_dir", str, "directory for reports, logs and manifests"),
    ("--num-classes", "num_classes", int, "2 (polarity) or 5 (fine-grained)"),
    ("--label-base", "label_base", int, "1 when corpus labels are 1..5"),
    ("--embedding-dim", "embedding_dim", int, None),
    ("--widths", "widths", str, "comma-separated filter widths"),
    ("--maps", "maps", int, "feature maps per width"),
    ("--attention-dim", "attention_dim", int, None),
    ("--min-count", "min_count", int, None),
    ("--lambda", "lambda_", float, "prediction regularization weight"),
    ("--lambda-grid", "lambda_grid", str, "comma-separated lambda values to tune over"),
    ("--batch-size", "batch_size", int, None),
    ("--epochs", "max_epochs", int, "maximum training epochs"),
    ("--patience", "patience", int, "early-stopping patience in epochs"),
    ("--pretrain-epochs", "pretrain_epochs", int, "epochs per stepwise-pretraining stage"),
    ("--dropout", "dropout", float, None),
    ("--seed", "seed", int, "root seed"),
    ("--pooling", "pooling", str, "attention | mean"),
    ("--segment-mode", "segment_mode", str, "sentence | chunk"),
    ("--chunk-size", "chunk_size", int, None),
    ("--pseudo-long-k", "pseudo_long_k", str, "low,high texts per pseudo-long"),
    ("--folds", "folds", int, None),
    ("--tuning-folds", "tuning_folds", int, "folds used to tune lambda"),
    ("--bucket-edges", "bucket_edges", str, "comma-separated length bucket edges"),
    ("--ablate", "ablate", str, "comma-separated mechanisms, e.g. jt,pr,sp"),
    ("--workers", "workers", int, "folds trained in parallel"),
    ("--formats", "report_formats", str, "comma-separated report formats: json,text"),
)

SWITCH_FLAGS = (
    ("--no-jt", "joint_training", "disable joint training"),
    ("--no-pr", "prediction_regularization", "disable prediction regularization"),
    ("--no-sp", "stepwise_pretraining", "disable stepwise pretraining"),
    ("--freeze-embeddings", "train_embeddings", "keep word vectors fixed"),
)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help='JSON file of configuration keys')
    for flag, key, kind, help_text in RUN_FLAGS:
        parser.add_argument(flag, dest=key, type=kind, default=None, help=help_text)
    for flag, key, help_text in SWITCH_FLAGS:
        parser.add_argument(flag, dest=key, action='store_const', const=False, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='clt', description='Cross length transfer for sentiment classification')
    sub = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (
        ('transfer', 'cross-validated in-channel / out-channel transfer protocol'),
        ('train', 'train one model and save a checkpoint'),
        ('eval', 'evaluate a checkpoint on a target corpus'),
    ):
        _add_run_flags(sub.add_parser(name, help=help_text))

    synth = sub.add_parser('synth', help='generate synthetic short/long corpora')
    synth.add_argument('--output-dir', required=True)
    synth.add_argument('--n-short', type=int)
    synth.add_argument('--n-long', type=int)
    synth.add_argument('--n-unlabeled', type=int)
    synth.add_argument('--vocab-size', type=int, help='neutral filler words')
    synth.add_argument('--num-classes', type=int)
    synth.add_argument('--lexicon-size', type=int, help='words per polarity')
    synth.add_argument('--injection-rate', type=float)
    synth.add_argument('--noise-rate', type=float)
    synth.add_argument('--short-length', help='low,high tokens per short text')
    synth.add_argument('--segments-per-long', help='low,high short texts per long text')
    synth.add_argument('--seed', type=int)

    gc = sub.add_parser('gradcheck', help='finite-difference check of every training loss')
    gc.add_argument('--tolerance', type=float, default=GRADCHECK_TOLERANCE)
    gc.add_argument('--probes', type=int, default=GRADCHECK_PROBES, help='coordinates probed per loss')
    gc.add_argument('--lambda', dest='lambda_', type=float, default=0.1)
    gc.add_argument('--dropout', type=float, default=0.0, help='must stay 0')

    report = sub.add_parser('report', help='summarise metrics streams or saved reports')
    report.add_argument('paths', nargs='+', help='metrics.jsonl streams and/or report JSON files')
    report.add_argument('--run-id', help='restrict a metrics stream to one run')
    return parser


def _pair(value: Optional[str]):
    if value is None:
        return None
    parts = [int(p) for p in value.split(',')]
    if len(parts) != 2:
        raise ConfigError(f"expected low,high but got {value!r}")
    return tuple(parts)


def _run(args: argparse.Namespace) -> int:
    from clt.cli import commands

    if args.command in ('transfer', 'train', 'eval'):
        overrides = {key: getattr(args, key) for _, key, _, _ in RUN_FLAGS}
        overrides.update({key: getattr(args, key) for _, key, _ in SWITCH_FLAGS})
        cfg = load_run_config(args.config, overrides)
        return {'transfer': commands.cmd_transfer, 'train': commands.cmd_train,
                'eval': commands.cmd_eval}[args.command](cfg)

    if args.command == 'synth':
        settings = {
            'n_short': args.n_short, 'n_long': args.n_long, 'n_unlabeled': args.n_unlabeled,
            'vocab_size': args.vocab_size, 'num_classes': args.num_classes,
            'positive_lexicon_size': args.lexicon_size, 'negative_lexicon_size': args.lexicon_size,
            'injection_rate': args.injection_rate, 'noise_rate': args.noise_rate,
            'short_length': _pair(args.short_length), 'segments_per_long': _pair(args.segments_per_long),
            'seed': args.seed,
        }
        return commands.cmd_synth(settings, args.output_dir)

    if args.command == 'gradcheck':
        return commands.cmd_gradcheck(args.tolerance, args.probes, args.lambda_, args.dropout)

    return commands.cmd_report(args.paths, args.run_id)


def main(argv: List[str] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    setup_logging_from_env(log_dir=getattr(args, 'output_dir', None))

    try:
        return _run(args)
    except TrainingDivergedError as e:
        logger.error(f"Training diverged: {e}", extra={'action': 'diverged'})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (CltError, ValidationError, ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}", extra={'action': 'config_error'})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
