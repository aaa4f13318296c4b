from clt.evaluation.metrics import accuracy, error_rate, rmse, transfer_loss, transfer_ratio
from clt.evaluation.report import FoldResult, LengthBucket, MetricsReport, decile_edges, length_buckets
from clt.evaluation.protocol import (
    FoldPredictions,
    assemble_report,
    per_length_report,
    predict_all,
    run_transfer_protocol,
)
from clt.evaluation.tables import (
    ablation_frame,
    folds_frame,
    length_frame,
    render,
    render_report,
    results_frame,
)

__all__ = [
    "accuracy", "error_rate", "rmse", "transfer_loss", "transfer_ratio",
    "FoldResult", "LengthBucket", "MetricsReport", "decile_edges", "length_buckets",
    "FoldPredictions", "assemble_report", "per_length_report", "predict_all", "run_transfer_protocol",
    "ablation_frame", "folds_frame", "length_frame", "render", "render_report", "results_frame",
]
