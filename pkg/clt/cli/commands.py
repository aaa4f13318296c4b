"""
Subcommand implementations.

Each `cmd_*` returns a process exit code. Library exceptions propagate to
`clt.cli.main`, which maps them onto the documented codes.
"""

from pathlib import Path
from typing import Dict, List

import numpy as np
from pydantic import ValidationError

from clt.config import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    REPORT_FILENAME,
    REPORT_TABLE_FILENAME,
)
from clt.config.seeding import derive_seed
from clt.config.settings import RunConfig
from clt.datasets import FoldPlan, SyntheticConfig, gen_synthetic, write_corpus, write_unlabeled
from clt.errors import ConfigError
from clt.evaluation import (
    MetricsReport,
    accuracy,
    ablation_frame,
    error_rate,
    per_length_report,
    predict_all,
    render,
    render_report,
    results_frame,
    rmse,
    run_transfer_protocol,
)
from clt.models import LeTraNets, load_checkpoint, save_checkpoint
from clt.textproc import Vocabulary
from clt.training import check_all_losses, gold_labels, prepare_bags, train
from clt.utils.file_handlers import require_readable
from clt.utils.logging.component_loggers import get_cli_logger, log_function_calls, log_training_event
from clt.utils.logging.metrics_reader import MetricsReader
from clt.cli.workspace import (
    build_run_embeddings,
    build_run_vocab,
    channels_for,
    load_corpora,
    load_input_corpus,
    metrics_stream,
    new_run_id,
    run_dims,
    write_json,
    write_manifest,
)

logger = get_cli_logger(__name__)


def _output_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(report: MetricsReport, out_dir: Path, cfg: RunConfig, stem: str = "report") -> List[Path]:
    written = []
    if "json" in cfg.report_formats:
        name = REPORT_FILENAME if stem == "report" else f"{stem}.json"
        written.append(report.save(out_dir / name))
    if "text" in cfg.report_formats:
        name = REPORT_TABLE_FILENAME if stem == "report" else f"{stem}.txt"
        path = out_dir / name
        path.write_text(render_report(report), encoding='utf-8')
        written.append(path)
    return written


@log_function_calls(logger, component='cli')
def cmd_transfer(cfg: RunConfig) -> int:
    """Cross-validated transfer protocol; with `ablate` set, one report per ablation row."""
    short, long = load_corpora(cfg)
    source = long if channels_for(cfg.direction)[0] == long.channel else short
    vocab = build_run_vocab(cfg, source)
    embeddings = build_run_embeddings(cfg, vocab)
    dims = run_dims(cfg, vocab)
    out_dir = _output_dir(cfg)
    run_id = new_run_id()
    write_manifest(out_dir, "transfer", cfg, run_id, [cfg.source, cfg.target, cfg.unlabeled, cfg.embeddings])
    vocab.save(str(out_dir / "vocab.json"))

    plan = FoldPlan(k=cfg.folds, seed=derive_seed(cfg.seed, "folds"), dev_fraction=cfg.dev_fraction)
    train_cfg = cfg.train_config()
    protocol_args = dict(vocab=vocab, embeddings=embeddings, plan=plan, lambda_grid=cfg.lambda_grid,
                         tuning_folds=cfg.tuning_folds, dims=dims, bucket_edges=cfg.bucket_edges,
                         workers=cfg.workers, run_id=run_id)

    with metrics_stream(out_dir):
        variants = cfg.ablation_variants() if cfg.model == LeTraNets.kind else []
        if not variants:
            report = run_transfer_protocol(cfg.model, short, long, train_cfg, **protocol_args)
            _write_report(report, out_dir, cfg)
            print(render(results_frame([report])))
            return EXIT_OK

        baseline_cache: Dict[int, np.ndarray] = {}
        reports = {}
        for variant in variants:
            log_training_event(logger, f"Ablation row {variant}", action="ablation_variant", run_id=run_id)
            report = run_transfer_protocol(cfg.model, short, long, train_cfg.ablation(variant),
                                           baseline_cache=baseline_cache, **protocol_args)
            stem = "report_" + ("none" if variant == "-" else variant.lower())
            _write_report(report, out_dir, cfg, stem=stem)
            reports[variant] = [report]

    table = render(ablation_frame(reports))
    (out_dir / "ablation.txt").write_text(table + "\n", encoding='utf-8')
    print(table)
    return EXIT_OK


@log_function_calls(logger, component='cli')
def cmd_train(cfg: RunConfig) -> int:
    """Train one model on the whole source corpus (dev split held out) and save a checkpoint."""
    source_channel = channels_for(cfg.direction)[0]
    source = load_input_corpus(cfg.source, source_channel, cfg)
    vocab = build_run_vocab(cfg, source)
    embeddings = build_run_embeddings(cfg, vocab)
    out_dir = _output_dir(cfg)
    run_id = new_run_id()
    write_manifest(out_dir, "train", cfg, run_id, [cfg.source, cfg.unlabeled, cfg.embeddings])

    order = np.random.default_rng(derive_seed(cfg.seed, "train_dev")).permutation(len(source))
    n_dev = int(round(cfg.dev_fraction * len(source)))
    dev, rest = source.subset(np.sort(order[:n_dev])), source.subset(np.sort(order[n_dev:]))

    with metrics_stream(out_dir):
        result = train(cfg.model, rest, cfg.train_config(), vocab, embeddings, dev_corpus=dev,
                       dims=run_dims(cfg, vocab), run_id=run_id)

    checkpoint = Path(cfg.checkpoint) if cfg.checkpoint else out_dir / "model.ckpt"
    save_checkpoint(result.model, checkpoint)
    vocab.save(str(out_dir / "vocab.json"))
    write_json(out_dir / "history.json", result.history.to_dict())
    print(f"saved {result.model.kind} checkpoint to {checkpoint} "
          f"(selected epoch {result.history.selected_epoch}, dev accuracy {result.history.best_dev_accuracy})")
    return EXIT_OK


@log_function_calls(logger, component='cli')
def cmd_eval(cfg: RunConfig) -> int:
    """Score a saved checkpoint on the target corpus, overall and per length bucket."""
    require_readable(cfg.checkpoint, "checkpoint")
    vocab_path = cfg.vocab or str(Path(cfg.checkpoint).parent / "vocab.json")
    require_readable(vocab_path, "vocabulary")
    model = load_checkpoint(cfg.checkpoint)
    vocab = Vocabulary.load(vocab_path)
    if len(vocab) != model.dims.vocab_size:
        raise ConfigError(f"vocabulary {vocab_path} has {len(vocab)} entries, checkpoint expects {model.dims.vocab_size}")

    target = load_input_corpus(cfg.target, channels_for(cfg.direction)[1], cfg)
    bags = prepare_bags(target, vocab, cfg.train_config().segmenter)
    preds, golds = predict_all(model, bags), gold_labels(bags)
    buckets = per_length_report(model, bags, cfg.bucket_edges, cfg.num_buckets)
    payload = {
        'model_kind': model.kind,
        'direction': cfg.direction,
        'count': len(bags),
        'accuracy': accuracy(preds, golds),
        'error': error_rate(preds, golds),
        'rmse': rmse(preds + 1, golds + 1, model.dims.num_classes) if model.dims.num_classes == 5 else None,
        'length_buckets': [b.model_dump() for b in buckets],
    }
    out_dir = _output_dir(cfg)
    write_manifest(out_dir, "eval", cfg, new_run_id(), [cfg.checkpoint, vocab_path, cfg.target])
    write_json(out_dir / "eval.json", payload)
    print(f"{model.kind} on {cfg.target}: accuracy {payload['accuracy']:.4f} over {len(bags)} texts")
    return EXIT_OK


def cmd_synth(settings: dict, output_dir: str) -> int:
    """Write deterministic synthetic short/long corpora (and an unlabeled pool) as TSV files."""
    try:
        syn_cfg = SyntheticConfig(**{k: v for k, v in settings.items() if v is not None})
    except ValidationError as e:
        raise ConfigError(f"invalid synthetic configuration: {e}")
    short, long, unlabeled = gen_synthetic(syn_cfg)
    out = Path(output_dir)
    n_short = write_corpus(short, str(out / "short.tsv"))
    n_long = write_corpus(long, str(out / "long.tsv"))
    if unlabeled:
        write_unlabeled(unlabeled, str(out / "unlabeled.txt"))
    (out / "synthetic_config.json").write_text(syn_cfg.model_dump_json(indent=2) + "\n", encoding='utf-8')

    print(f"short: {n_short} texts, labels {short.label_histogram()}, mean length {short.mean_length:.1f}")
    print(f"long:  {n_long} texts, labels {long.label_histogram()}, mean length {long.mean_length:.1f}")
    return EXIT_OK


def cmd_gradcheck(tolerance: float, probes: int, lambda_: float, dropout: float) -> int:
    """Finite-difference check of every model's loss in both directions on the bundled fixture."""
    if dropout > 0.0:
        print("refusing to run: gradient checks need dropout disabled (the loss must be deterministic)")
        return EXIT_CONFIG_ERROR
    checks = check_all_losses(lambda_=lambda_, dropout=dropout, probe_count=probes, tolerance=tolerance)
    failed = False
    for check in checks:
        err = check.result.max_relative_error
        status = "ok" if err < tolerance else "FAILED"
        print(f"{check.label:24} max relative error {err:.3e}  {status}")
        if err >= tolerance:
            failed = True
            for name in check.result.offending(tolerance):
                print(f"    offending parameter: {name}")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_report(paths: List[str], run_id: str = None) -> int:
    """Summarise a metrics stream, or render saved reports side by side."""
    for p in paths:
        require_readable(p, "report input")
    streams = [p for p in paths if p.endswith(".jsonl")]
    reports = [MetricsReport.load(p) for p in paths if not p.endswith(".jsonl")]
    for p in streams:
        summary = MetricsReader(p).summarize_runs(run_id=run_id)
        print(f"{p}:")
        print(summary.to_string(index=False) if not summary.empty else "  (no records)")
    if reports:
        print(render(results_frame(reports)))
    return EXIT_OK
