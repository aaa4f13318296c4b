import json

import pytest

from clt.config.seeding import derive_rng, derive_seed
from clt.config.settings import RunConfig, environment_overrides, load_run_config
from clt.errors import ConfigError


def test_derive_seed_is_stable_and_purpose_specific():
    assert derive_seed(13, "shuffle", 0, 1) == derive_seed(13, "shuffle", 0, 1)
    seeds = {derive_seed(13, "shuffle", 0, e) for e in range(50)}
    assert len(seeds) == 50
    assert derive_seed(13, "init") != derive_seed(14, "init")
    assert derive_seed(13, "dropout", 2) != derive_seed(13, "shuffle", 2)
    assert 0 <= derive_seed(13, "x") < 2 ** 64


def test_derive_rng_streams_repeat():
    a = derive_rng(7, "pseudo_long", 3).integers(1000, size=5)
    b = derive_rng(7, "pseudo_long", 3).integers(1000, size=5)
    assert a.tolist() == b.tolist()


def write_config(tmp_path, payload):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_defaults():
    cfg = load_run_config(environ={})
    assert cfg.model == "letranets"
    assert cfg.lambda_grid == [0.01, 0.1, 1.0]
    assert cfg.train_config().mechanisms == "JT+PR+SP"


def test_precedence(tmp_path):
    path = write_config(tmp_path, {"lambda_": 0.3, "batch_size": 8, "seed": 1})
    cfg = load_run_config(path, overrides={"seed": 99, "batch_size": None},
                          environ={"CLT_BATCH_SIZE": "16", "CLT_SEED": "5"})
    assert cfg.lambda_ == 0.3
    assert cfg.batch_size == 16
    assert cfg.seed == 99


def test_lambda_environment_variable():
    assert environment_overrides({"CLT_LAMBDA": "0.5", "CLT_LOG_LEVEL": "DEBUG"}) == {"lambda_": 0.5}
    assert load_run_config(environ={"CLT_MODEL": "cnn"}).model == "cnn"


def test_unknown_key_in_file(tmp_path):
    with pytest.raises(ConfigError, match="learning_rate"):
        load_run_config(write_config(tmp_path, {"learning_rate": 0.1}), environ={})


def test_unknown_override():
    with pytest.raises(ConfigError):
        load_run_config(overrides={"colour": "blue"}, environ={})


@pytest.mark.parametrize("payload", [
    {"num_classes": 3},
    {"lambda_": -1.0},
    {"ablate": "jt,xx"},
    {"pseudo_long_k": "5,2"},
    {"folds": 1},
    {"report_formats": "json,pdf"},
])
def test_invalid_values(tmp_path, payload):
    with pytest.raises(ConfigError):
        load_run_config(write_config(tmp_path, payload), environ={})


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(str(tmp_path / "absent.json"), environ={})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(str(bad), environ={})


def test_comma_separated_lists():
    cfg = load_run_config(overrides={"widths": "2,3", "lambda_grid": "0.1, 1", "bucket_edges": "0,10,100",
                                     "pseudo_long_k": "2,4", "ablate": "SP,jt"}, environ={})
    assert cfg.widths == (2, 3)
    assert cfg.lambda_grid == [0.1, 1.0]
    assert cfg.bucket_edges == [0, 10, 100]
    assert cfg.pseudo_long_k == (2, 4)
    assert cfg.ablate == ["jt", "sp"]


def test_ablation_variants():
    assert RunConfig().ablation_variants() == []
    assert RunConfig(ablate=["pr", "jt"]).ablation_variants() == ["-", "JT", "PR", "All"]


def test_train_config_mirrors_run_config():
    cfg = RunConfig(direction="short2long", lambda_=0.7, stepwise_pretraining=False, chunk_size=12)
    train_cfg = cfg.train_config()
    assert train_cfg.direction == "short2long"
    assert train_cfg.lambda_ == 0.7
    assert train_cfg.mechanisms == "JT+PR"
    assert train_cfg.segmenter.chunk_size == 12


def test_snapshot_is_json_ready():
    snap = RunConfig(widths=(3, 4)).snapshot()
    assert snap["widths"] == [3, 4]
    json.dumps(snap)
