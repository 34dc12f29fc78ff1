"""Interactive mapping from sketch latents (32-d) to audio latents (16-d).

The user supplies a handful of paired examples; `train` turns the store
into a model and `map_latent` evaluates it. Two variants:

* k-nearest-neighbour inverse-distance weighting (default) — predictable
  with very few examples, exact at the stored points;
* a small MLP (32-64-16, tanh throughout) for smoother interpolation,
  trained with the same Adam engine as the sketch encoder.

Both produce 16 finite values in [-1, 1] for any valid query. Duplicate
stored inputs with conflicting targets resolve to their mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import nn
from .errors import (
    DimensionMismatch,
    EmptyStore,
    MalformedDocument,
    UnsupportedVersion,
)

SKETCH_DIM = 32
AUDIO_DIM = 16
MLP_LAYER_DIMS = (32, 64, 16)
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainingExample:
    """One user-recorded pair: sketch latent in, audio latent out."""

    input: tuple[float, ...]
    target: tuple[float, ...]
    created_at: str = ""


@dataclass(frozen=True)
class ExampleStore:
    """Append-only example list; cleared as a whole between passes."""

    examples: tuple[TrainingExample, ...] = ()

    def __len__(self) -> int:
        return len(self.examples)


def _check_example(ex: TrainingExample) -> None:
    if len(ex.input) != SKETCH_DIM:
        raise DimensionMismatch(f"example input has {len(ex.input)} dims, want {SKETCH_DIM}")
    if len(ex.target) != AUDIO_DIM:
        raise DimensionMismatch(f"example target has {len(ex.target)} dims, want {AUDIO_DIM}")


def add_example(store: ExampleStore, ex: TrainingExample) -> ExampleStore:
    """Append one example (duplicates kept; resolved at query time)."""
    _check_example(ex)
    return ExampleStore(store.examples + (ex,))


def clear_store(store: ExampleStore) -> ExampleStore:
    return ExampleStore()


@dataclass(frozen=True)
class MapperConfig:
    variant: str = "knn_idw"  # "knn_idw" | "mlp"
    k: int = 4
    power: float = 2.0
    epsilon: float = 1e-9
    target_loss: float = 1e-3
    max_iters: int = 2000
    learning_rate: float = 1e-2
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("knn_idw", "mlp"):
            raise ValueError(f"unknown mapper variant {self.variant!r}")
        if self.k < 1 or self.power <= 0 or self.epsilon <= 0:
            raise ValueError("knn settings must satisfy k >= 1, power > 0, epsilon > 0")


def _query_vector(z) -> np.ndarray:
    q = np.asarray(z, dtype=np.float64).reshape(-1)
    if q.shape != (SKETCH_DIM,):
        raise DimensionMismatch(f"query has {q.size} dims, want {SKETCH_DIM}")
    return q


@dataclass(frozen=True)
class KnnIdwMapper:
    """Inverse-distance-weighted k-NN over a snapshot of the store."""

    k: int
    power: float
    epsilon: float
    examples: tuple[TrainingExample, ...]

    def map_latent(self, z) -> np.ndarray:
        q = _query_vector(z)
        inputs = np.array([ex.input for ex in self.examples])
        targets = np.array([ex.target for ex in self.examples])
        dists = np.linalg.norm(inputs - q, axis=1)
        exact = dists < self.epsilon
        if np.any(exact):
            out = targets[exact].mean(axis=0)
        else:
            order = np.argsort(dists, kind="stable")[: self.k]
            weights = 1.0 / dists[order] ** self.power
            total = weights.sum()
            if total > 0.0 and np.isfinite(total):
                out = (weights[:, np.newaxis] * targets[order]).sum(axis=0) / total
            else:
                # all weights under/overflowed (extreme power setting):
                # degrade to the unweighted neighbour mean
                out = targets[order].mean(axis=0)
        return np.clip(out, -1.0, 1.0)


@dataclass(eq=False)
class MlpMapper:
    """32-64-16 tanh network; output activation keeps values in [-1, 1]."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    layer_dims: tuple[int, ...] = MLP_LAYER_DIMS
    activations: tuple[str, ...] = ("tanh", "tanh")

    def map_latent(self, z) -> np.ndarray:
        q = _query_vector(z)
        outs = nn.forward(self.weights, self.biases, self.activations, q[np.newaxis, :])
        return outs[-1][0]


MapperModel = KnnIdwMapper | MlpMapper


def train(store: ExampleStore, config: MapperConfig = MapperConfig()) -> tuple[MapperModel, float]:
    """Build a mapper from the store; returns (model, final training MSE).

    knn_idw snapshots the examples (no optimisation, loss reported as 0).
    mlp runs seeded full-batch Adam until the loss reaches
    config.target_loss or config.max_iters steps have been taken.
    """
    if len(store) == 0:
        raise EmptyStore("cannot train a mapper with no examples")
    for ex in store.examples:
        _check_example(ex)
    if config.variant == "knn_idw":
        model = KnnIdwMapper(
            k=config.k, power=config.power, epsilon=config.epsilon,
            examples=store.examples,
        )
        return model, 0.0
    x = np.array([ex.input for ex in store.examples])
    t = np.array([ex.target for ex in store.examples])
    rng = np.random.default_rng(config.seed)
    weights, biases = nn.init_layers(MLP_LAYER_DIMS, 0.5, rng)
    model = MlpMapper(weights=weights, biases=biases)
    optimizer = nn.Adam(learning_rate=config.learning_rate)
    loss = float("inf")
    for _ in range(config.max_iters):
        loss, grad_w, grad_b = nn.backprop_mse(
            model.weights, model.biases, model.activations, x, t
        )
        if loss <= config.target_loss:
            break
        optimizer.step(model.weights + model.biases, grad_w + grad_b)
    else:
        loss = nn.mse_loss(
            nn.forward(model.weights, model.biases, model.activations, x)[-1], t
        )
    return model, float(loss)


def save_mapper(model: MapperModel) -> bytes:
    """Serialise to a version-tagged JSON document (UTF-8 bytes)."""
    if isinstance(model, KnnIdwMapper):
        doc = {
            "format_version": CHECKPOINT_VERSION,
            "variant": "knn_idw",
            "k": model.k,
            "power": model.power,
            "epsilon": model.epsilon,
            "examples": [
                {"input": list(ex.input), "target": list(ex.target),
                 "created_at": ex.created_at}
                for ex in model.examples
            ],
        }
    elif isinstance(model, MlpMapper):
        doc = {
            "format_version": CHECKPOINT_VERSION,
            "variant": "mlp",
            "layer_dims": list(model.layer_dims),
            "activations": list(model.activations),
            "weights": [w.reshape(-1).tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
        }
    else:
        raise TypeError(f"not a mapper model: {type(model).__name__}")
    return json.dumps(doc).encode("utf-8")


def load_mapper(data: bytes) -> MapperModel:
    """Inverse of save_mapper; map outputs round-trip exactly."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocument(f"mapper document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("mapper document root must be an object")
    version = doc.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise UnsupportedVersion(f"mapper format_version {version!r}")
    variant = doc.get("variant")
    try:
        if variant == "knn_idw":
            examples = tuple(
                TrainingExample(
                    input=tuple(float(v) for v in ex["input"]),
                    target=tuple(float(v) for v in ex["target"]),
                    created_at=str(ex.get("created_at", "")),
                )
                for ex in doc["examples"]
            )
            model = KnnIdwMapper(
                k=int(doc["k"]), power=float(doc["power"]),
                epsilon=float(doc["epsilon"]), examples=examples,
            )
        elif variant == "mlp":
            dims = tuple(int(d) for d in doc["layer_dims"])
            model = MlpMapper(
                weights=[
                    np.asarray(flat, dtype=np.float64).reshape(dims[i], dims[i + 1])
                    for i, flat in enumerate(doc["weights"])
                ],
                biases=[np.asarray(b, dtype=np.float64) for b in doc["biases"]],
                layer_dims=dims,
                activations=tuple(str(a) for a in doc["activations"]),
            )
        else:
            raise MalformedDocument(f"unknown mapper variant {variant!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"mapper fields invalid: {exc}") from exc
    if isinstance(model, KnnIdwMapper):
        if not model.examples:
            raise MalformedDocument("knn_idw mapper requires a non-empty snapshot")
        for ex in model.examples:
            _check_example(ex)
    return model


def store_to_jsonl(store: ExampleStore) -> str:
    """One {"input": [...], "target": [...], "created_at": ...} object per line."""
    return "".join(
        json.dumps(
            {"input": list(ex.input), "target": list(ex.target),
             "created_at": ex.created_at}
        ) + "\n"
        for ex in store.examples
    )


def store_from_jsonl(text: str) -> ExampleStore:
    store = ExampleStore()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            ex = TrainingExample(
                input=tuple(float(v) for v in obj["input"]),
                target=tuple(float(v) for v in obj["target"]),
                created_at=str(obj.get("created_at", "")),
            )
            store = add_example(store, ex)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MalformedDocument(f"example line {lineno} invalid: {exc}") from exc
    return store
