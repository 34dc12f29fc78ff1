"""Sketch autoencoder: unsupervised feature learner over rasterised sketches.

A plain deterministic autoencoder, default shape 4096-256-32-256-4096
(64x64 rasters in, 32-dim bottleneck). Hidden and bottleneck layers are
tanh — so sketch latents are bounded in [-1, 1] — and the output layer
is sigmoid to match pixel range. Training is mini-batch Adam on mean
squared reconstruction error, bit-reproducible from the seed.

The encoder half is everything up to the bottleneck (middle entry of
layer_dims); the decoder half is the rest. Checkpoints are JSON with
row-major weight arrays, format_version 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import nn
from .errors import (
    DimensionMismatch,
    EmptyCorpus,
    IoFailure,
    MalformedDocument,
    NonFiniteInput,
    UnsupportedVersion,
)
from .sketch import Raster

DEFAULT_LAYER_DIMS = (4096, 256, 32, 256, 4096)
SKETCH_LATENT_DIM = 32
CHECKPOINT_VERSION = 1


@dataclass
class Hyperparams:
    """Training knobs; everything randomized is derived from `seed`."""

    learning_rate: float = 1e-3
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    init_scale: float = 0.05

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass(eq=False)
class AutoencoderModel:
    """Dense autoencoder parameters plus per-layer activation names."""

    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activations: tuple[str, ...] = field(default=())

    def __post_init__(self):
        dims = tuple(self.layer_dims)
        if len(dims) < 3 or len(dims) % 2 == 0:
            raise DimensionMismatch(
                f"layer_dims must have odd length >= 3, got {dims}"
            )
        if not self.activations:
            self.activations = ("tanh",) * (len(dims) - 2) + ("sigmoid",)
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[i], dims[i + 1]) or b.shape != (dims[i + 1],):
                raise DimensionMismatch(
                    f"layer {i}: weight {w.shape} / bias {b.shape} "
                    f"does not match dims {dims[i]}x{dims[i + 1]}"
                )
        self.layer_dims = dims

    @property
    def bottleneck_index(self) -> int:
        return len(self.layer_dims) // 2

    @property
    def latent_dim(self) -> int:
        return self.layer_dims[self.bottleneck_index]

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def resolution(self) -> int:
        return math.isqrt(self.input_dim)


def new_model(
    layer_dims=DEFAULT_LAYER_DIMS, seed: int = 0, init_scale: float = 0.05
) -> AutoencoderModel:
    """Freshly initialised model: uniform +-init_scale weights, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = nn.init_layers(layer_dims, init_scale, rng)
    return AutoencoderModel(tuple(layer_dims), weights, biases)


def _corpus_matrix(corpus: list[Raster], input_dim: int) -> np.ndarray:
    resolutions = {r.resolution for r in corpus}
    if len(resolutions) != 1:
        raise DimensionMismatch(f"corpus mixes resolutions {sorted(resolutions)}")
    (res,) = resolutions
    if res * res != input_dim:
        raise DimensionMismatch(
            f"raster {res}x{res} does not match input layer dim {input_dim}"
        )
    return np.stack([r.flat() for r in corpus])


def train_autoencoder(
    corpus: list[Raster], hp: Hyperparams, layer_dims=None
) -> tuple[AutoencoderModel, list[float]]:
    """Mini-batch Adam on reconstruction MSE; returns the model and one
    mean-epoch-loss entry per epoch.

    `layer_dims` defaults to (R*R, 256, 32, 256, R*R) for the corpus
    resolution R. Shuffling and init both come from hp.seed, so two runs
    with the same inputs produce bitwise-identical loss histories.
    """
    if not corpus:
        raise EmptyCorpus("cannot train on an empty corpus")
    if layer_dims is None:
        res = corpus[0].resolution
        layer_dims = (res * res, 256, SKETCH_LATENT_DIM, 256, res * res)
    model = new_model(layer_dims, seed=hp.seed, init_scale=hp.init_scale)
    x_all = _corpus_matrix(corpus, model.input_dim)
    n = x_all.shape[0]
    rng = np.random.default_rng(hp.seed)
    optimizer = nn.Adam(learning_rate=hp.learning_rate)
    params = model.weights + model.biases
    loss_history: list[float] = []
    for _epoch in range(hp.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, hp.batch_size):
            batch = x_all[order[start:start + hp.batch_size]]
            loss, grad_w, grad_b = nn.backprop_mse(
                model.weights, model.biases, model.activations, batch, batch
            )
            optimizer.step(params, grad_w + grad_b)
            loss_sum += loss * batch.shape[0]
        loss_history.append(loss_sum / n)
    return model, loss_history


def compute_gradients(
    model: AutoencoderModel, batch: list[Raster]
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Exact analytic gradients of mean-squared reconstruction loss.

    Returns (weight_grads, bias_grads) in layer order.
    """
    if not batch:
        raise EmptyCorpus("gradient batch is empty")
    x = _corpus_matrix(batch, model.input_dim)
    _, grad_w, grad_b = nn.backprop_mse(
        model.weights, model.biases, model.activations, x, x
    )
    return grad_w, grad_b


def encode(model: AutoencoderModel, raster: Raster) -> np.ndarray:
    """Bottleneck vector for one raster; tanh-bounded in [-1, 1]."""
    if raster.resolution * raster.resolution != model.input_dim:
        raise DimensionMismatch(
            f"raster {raster.resolution}^2 != input dim {model.input_dim}"
        )
    k = model.bottleneck_index
    outs = nn.forward(
        model.weights[:k], model.biases[:k], model.activations[:k],
        raster.flat()[np.newaxis, :],
    )
    return outs[-1][0]


def decode(model: AutoencoderModel, latent: np.ndarray) -> Raster:
    """Reconstruction for one latent vector; sigmoid-bounded pixels."""
    z = np.asarray(latent, dtype=np.float64)
    if z.shape != (model.latent_dim,):
        raise DimensionMismatch(f"latent shape {z.shape} != ({model.latent_dim},)")
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("latent contains non-finite values")
    k = model.bottleneck_index
    outs = nn.forward(
        model.weights[k:], model.biases[k:], model.activations[k:],
        z[np.newaxis, :],
    )
    res = model.resolution
    return Raster(resolution=res, pixels=outs[-1][0].reshape(res, res))


def save_model(model: AutoencoderModel, path: str) -> None:
    """Write the JSON checkpoint (format_version 1, row-major arrays)."""
    doc = {
        "format_version": CHECKPOINT_VERSION,
        "layer_dims": list(model.layer_dims),
        "activations": list(model.activations),
        "weights": [w.reshape(-1).tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
    except OSError as exc:
        raise IoFailure(f"cannot write checkpoint {path}: {exc}") from exc


def load_model(path: str) -> AutoencoderModel:
    """Read a checkpoint written by save_model."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read checkpoint {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"checkpoint {path} is not valid JSON: {exc}") from exc
    return model_from_document(doc)


def model_from_document(doc) -> AutoencoderModel:
    if not isinstance(doc, dict):
        raise MalformedDocument("checkpoint root must be an object")
    version = doc.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise UnsupportedVersion(f"checkpoint format_version {version!r}")
    try:
        dims = tuple(int(d) for d in doc["layer_dims"])
        activations = tuple(str(a) for a in doc["activations"])
        weights = [
            np.asarray(flat, dtype=np.float64).reshape(dims[i], dims[i + 1])
            for i, flat in enumerate(doc["weights"])
        ]
        biases = [np.asarray(b, dtype=np.float64) for b in doc["biases"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"checkpoint fields invalid: {exc}") from exc
    if len(weights) != len(dims) - 1 or len(biases) != len(dims) - 1:
        raise MalformedDocument("checkpoint layer count does not match layer_dims")
    model = AutoencoderModel(dims, weights, biases, activations)
    for w, b in zip(model.weights, model.biases):
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise MalformedDocument("checkpoint contains non-finite parameters")
    return model
