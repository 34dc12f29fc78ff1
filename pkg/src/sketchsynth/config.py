"""Engine configuration: dataclass defaults plus a strict JSON loader."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import IoFailure, MalformedDocument
from .mapper import MapperConfig


@dataclass(frozen=True)
class OscOutConfig:
    host: str = "127.0.0.1"
    port: int = 9000
    address: str = "/rave/latent"


@dataclass(frozen=True)
class EngineConfig:
    sample_rate: int = 48000
    ws_port: int = 8765
    osc_in_port: int = 9001
    osc_out: OscOutConfig = field(default_factory=OscOutConfig)
    backend: str = "internal"  # "internal" | "osc"
    mapper: MapperConfig = field(default_factory=MapperConfig)
    encoder_checkpoint: str | None = None
    dataset_path: str | None = None
    seed: int = 42

    def __post_init__(self):
        if self.backend not in ("internal", "osc"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.sample_rate not in (44100, 48000):
            raise ValueError(f"unsupported sample_rate {self.sample_rate}")


_MAPPER_KEYS = {
    "variant", "k", "power", "epsilon", "target_loss", "max_iters",
    "learning_rate", "seed",
}
_TOP_KEYS = {
    "sample_rate", "ws_port", "osc_in_port", "osc_out", "backend", "mapper",
    "encoder_checkpoint", "dataset_path", "seed",
}


def config_from_dict(doc: dict) -> EngineConfig:
    """Strict: unknown keys are errors, so typos fail loudly."""
    if not isinstance(doc, dict):
        raise MalformedDocument("config root must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise MalformedDocument(f"unknown config keys: {sorted(unknown)}")
    cfg = EngineConfig()
    try:
        if "osc_out" in doc:
            osc_doc = doc["osc_out"]
            bad = set(osc_doc) - {"host", "port", "address"}
            if bad:
                raise MalformedDocument(f"unknown osc_out keys: {sorted(bad)}")
            cfg = replace(cfg, osc_out=OscOutConfig(
                host=str(osc_doc.get("host", cfg.osc_out.host)),
                port=int(osc_doc.get("port", cfg.osc_out.port)),
                address=str(osc_doc.get("address", cfg.osc_out.address)),
            ))
        if "mapper" in doc:
            m_doc = doc["mapper"]
            bad = set(m_doc) - _MAPPER_KEYS
            if bad:
                raise MalformedDocument(f"unknown mapper keys: {sorted(bad)}")
            defaults = MapperConfig()
            cfg = replace(cfg, mapper=MapperConfig(
                variant=str(m_doc.get("variant", defaults.variant)),
                k=int(m_doc.get("k", defaults.k)),
                power=float(m_doc.get("power", defaults.power)),
                epsilon=float(m_doc.get("epsilon", defaults.epsilon)),
                target_loss=float(m_doc.get("target_loss", defaults.target_loss)),
                max_iters=int(m_doc.get("max_iters", defaults.max_iters)),
                learning_rate=float(m_doc.get("learning_rate", defaults.learning_rate)),
                seed=int(m_doc.get("seed", defaults.seed)),
            ))
        cfg = replace(
            cfg,
            sample_rate=int(doc.get("sample_rate", cfg.sample_rate)),
            ws_port=int(doc.get("ws_port", cfg.ws_port)),
            osc_in_port=int(doc.get("osc_in_port", cfg.osc_in_port)),
            backend=str(doc.get("backend", cfg.backend)),
            encoder_checkpoint=doc.get("encoder_checkpoint"),
            dataset_path=doc.get("dataset_path"),
            seed=int(doc.get("seed", cfg.seed)),
        )
    except (TypeError, ValueError) as exc:
        raise MalformedDocument(f"config values invalid: {exc}") from exc
    return cfg


def load_config(path: str) -> EngineConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)
