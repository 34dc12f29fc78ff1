"""Config defaults, JSON loading, CLI overrides."""

import json

import pytest

from sketchsynth.cli import build_parser, config_from_args
from sketchsynth.config import EngineConfig, config_from_dict, load_config
from sketchsynth.errors import IoFailure, MalformedDocument


def test_defaults():
    cfg = EngineConfig()
    assert cfg.sample_rate == 48000
    assert cfg.backend == "internal"
    assert cfg.mapper.variant == "knn_idw"
    assert cfg.osc_out.address == "/rave/latent"


def test_load_config_file(tmp_path):
    doc = {
        "sample_rate": 44100,
        "ws_port": 9100,
        "osc_in_port": 9101,
        "osc_out": {"host": "10.0.0.2", "port": 7001, "address": "/latent"},
        "backend": "osc",
        "mapper": {"variant": "mlp", "max_iters": 500},
        "encoder_checkpoint": "enc.json",
        "dataset_path": "ds.jsonl",
        "seed": 7,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    cfg = load_config(str(path))
    assert cfg.sample_rate == 44100
    assert cfg.osc_out.host == "10.0.0.2"
    assert cfg.mapper.variant == "mlp"
    assert cfg.mapper.max_iters == 500
    assert cfg.mapper.k == 4  # untouched default
    assert cfg.seed == 7


def test_unknown_keys_rejected():
    with pytest.raises(MalformedDocument):
        config_from_dict({"sample_rte": 48000})
    with pytest.raises(MalformedDocument):
        config_from_dict({"mapper": {"kk": 3}})


def test_bad_backend_rejected():
    with pytest.raises(ValueError):
        config_from_dict({"backend": "alsa"})


def test_missing_config_file():
    with pytest.raises(IoFailure):
        load_config("/nonexistent/config.json")


def test_cli_overrides(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"ws_port": 9100, "seed": 1}))
    args = build_parser().parse_args([
        "--config", str(path),
        "--backend", "osc",
        "--osc-out", "192.168.1.5:9200",
        "--seed", "42",
        "--encoder", "enc.json",
    ])
    cfg = config_from_args(args)
    assert cfg.ws_port == 9100  # from file
    assert cfg.backend == "osc"  # overridden
    assert cfg.osc_out.host == "192.168.1.5" and cfg.osc_out.port == 9200
    assert cfg.seed == 42
    assert cfg.encoder_checkpoint == "enc.json"


def test_cli_bad_osc_out():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--osc-out", "nonsense"])
