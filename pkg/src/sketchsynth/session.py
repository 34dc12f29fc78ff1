"""Session state machine: record examples, train the mapper, run the map.

`handle_command` and `handle_sketch_event` are pure transition functions
(state, input) -> (state, effects). All I/O — sockets, audio, files —
happens at the edges, driven by the returned effects, so the whole
workflow is unit-testable and a logged input sequence replays to the
same final state bit for bit.

Workflow, mirroring the two-panel interface: set or randomise the
current audio latent, hit record and draw sketches that depict the
current sound (one training example is captured per completed stroke,
pairing the encoded canvas with the latent at that instant), train, then
hit run and drive the synth by drawing.

Training is executed synchronously inside the Train transition: the
mapper fit is seeded and desk-scale, so the Training mode is transient
and never observable between inputs; failure leaves the old mapper in
place and surfaces as a Rejected effect.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import autoencoder, mapper, rng
from .errors import IoFailure, MalformedDocument, UnsupportedVersion
from .mapper import ExampleStore, MapperConfig, MapperModel, TrainingExample
from .sketch import Point, Raster, SketchFrame, make_point, rasterize

AUDIO_DIM = 16
SESSION_FORMAT_VERSION = 1
ZERO_LATENT = (0.0,) * AUDIO_DIM


class SessionMode(enum.Enum):
    IDLE = "idle"
    RECORDING = "recording"
    TRAINING = "training"
    RUNNING = "running"


# --- commands and sketch events ------------------------------------------

@dataclass(frozen=True)
class Record:
    pass


@dataclass(frozen=True)
class StopRecord:
    pass


@dataclass(frozen=True)
class Randomise:
    pass


@dataclass(frozen=True)
class SetLatentDim:
    dim: int
    value: float


@dataclass(frozen=True)
class Train:
    pass


@dataclass(frozen=True)
class Run:
    pass


@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class Clear:
    pass


@dataclass(frozen=True)
class Save:
    path: str


@dataclass(frozen=True)
class Load:
    path: str


Command = Record | StopRecord | Randomise | SetLatentDim | Train | Run | Stop | Clear | Save | Load


@dataclass(frozen=True)
class StrokeBegin:
    x: float
    y: float
    t: float


@dataclass(frozen=True)
class StrokePoint:
    x: float
    y: float
    t: float


@dataclass(frozen=True)
class StrokeEnd:
    t: float
    #: optional wall-clock stamp applied at the network edge; when absent,
    #: created_at falls back to a deterministic rendering of `t`
    at: str | None = None


@dataclass(frozen=True)
class CanvasClear:
    pass


SketchEvent = StrokeBegin | StrokePoint | StrokeEnd | CanvasClear


# --- effects ---------------------------------------------------------------

@dataclass(frozen=True)
class LatentUpdate:
    latent: tuple[float, ...]
    source: str  # "sketch" | "randomise" | "manual" | "load"


@dataclass(frozen=True)
class Snapshot:
    mode: SessionMode
    latent: tuple[float, ...]
    example_count: int


@dataclass(frozen=True)
class ExampleAdded:
    count: int


@dataclass(frozen=True)
class Rejected:
    reason: str


@dataclass(frozen=True)
class Trained:
    loss: float


@dataclass(frozen=True)
class SaveSession:
    path: str


@dataclass(frozen=True)
class LoadSession:
    path: str


Effect = LatentUpdate | Snapshot | ExampleAdded | Rejected | Trained | SaveSession | LoadSession


# --- state -----------------------------------------------------------------

@dataclass(frozen=True)
class EncoderRef:
    """Where the session's encoder came from, for reproducible reload."""

    checkpoint: str | None = None
    seed: int = 0
    layer_dims: tuple[int, ...] = autoencoder.DEFAULT_LAYER_DIMS


@dataclass(frozen=True)
class SessionState:
    mode: SessionMode
    current_latent: tuple[float, ...]
    store: ExampleStore
    encoder: autoencoder.AutoencoderModel
    encoder_ref: EncoderRef
    mapper_model: MapperModel | None
    mapper_config: MapperConfig
    rng_state: int
    frame: SketchFrame = field(default_factory=SketchFrame)
    open_stroke: tuple[Point, ...] | None = None


def build_encoder(ref: EncoderRef) -> autoencoder.AutoencoderModel:
    if ref.checkpoint is not None:
        return autoencoder.load_model(ref.checkpoint)
    return autoencoder.new_model(ref.layer_dims, seed=ref.seed)


def new_session(
    encoder_ref: EncoderRef = EncoderRef(),
    mapper_config: MapperConfig = MapperConfig(),
    seed: int = 0,
    store: ExampleStore = ExampleStore(),
    encoder: autoencoder.AutoencoderModel | None = None,
) -> SessionState:
    return SessionState(
        mode=SessionMode.IDLE,
        current_latent=ZERO_LATENT,
        store=store,
        encoder=encoder if encoder is not None else build_encoder(encoder_ref),
        encoder_ref=encoder_ref,
        mapper_model=None,
        mapper_config=mapper_config,
        rng_state=seed & rng.MASK64,
    )


def randomize_latent(rng_state: int) -> tuple[tuple[float, ...], int]:
    """16 independent uniform draws in [-1, 1] from the splitmix64 stream."""
    return rng.bipolar_vector(rng_state, AUDIO_DIM)


def _snapshot(state: SessionState) -> Snapshot:
    return Snapshot(
        mode=state.mode,
        latent=state.current_latent,
        example_count=len(state.store),
    )


def handle_command(
    state: SessionState, cmd: Command
) -> tuple[SessionState, list[Effect]]:
    """Apply one command; invalid (mode, command) pairs reject, never raise."""
    mode = state.mode

    if isinstance(cmd, Record):
        if mode is not SessionMode.IDLE:
            return state, [Rejected(f"record not allowed in {mode.value}")]
        state = replace(state, mode=SessionMode.RECORDING)
        return state, [_snapshot(state)]

    if isinstance(cmd, StopRecord):
        if mode is not SessionMode.RECORDING:
            return state, [Rejected(f"stop_record not allowed in {mode.value}")]
        state = replace(state, mode=SessionMode.IDLE)
        return state, [_snapshot(state)]

    if isinstance(cmd, Randomise):
        latent, rng_state = randomize_latent(state.rng_state)
        state = replace(state, current_latent=latent, rng_state=rng_state)
        return state, [LatentUpdate(latent, "randomise"), _snapshot(state)]

    if isinstance(cmd, SetLatentDim):
        if not (0 <= cmd.dim < AUDIO_DIM):
            return state, [Rejected(f"latent dim {cmd.dim} outside 0..{AUDIO_DIM - 1}")]
        value = float(cmd.value)
        if not (np.isfinite(value) and -1.0 <= value <= 1.0):
            return state, [Rejected(f"latent value {cmd.value} outside [-1, 1]")]
        latent = list(state.current_latent)
        latent[cmd.dim] = value
        state = replace(state, current_latent=tuple(latent))
        return state, [LatentUpdate(state.current_latent, "manual"), _snapshot(state)]

    if isinstance(cmd, Train):
        if mode is not SessionMode.IDLE:
            return state, [Rejected(f"train not allowed in {mode.value}")]
        if len(state.store) == 0:
            return state, [Rejected("no training examples recorded")]
        # transient TRAINING phase: the fit is deterministic and desk-scale,
        # so it completes within this transition and lands back in IDLE
        model, loss = mapper.train(state.store, state.mapper_config)
        state = replace(state, mode=SessionMode.IDLE, mapper_model=model)
        return state, [Trained(loss), _snapshot(state)]

    if isinstance(cmd, Run):
        if mode is not SessionMode.IDLE:
            return state, [Rejected(f"run not allowed in {mode.value}")]
        if state.mapper_model is None:
            return state, [Rejected("no mapper: train before running")]
        state = replace(state, mode=SessionMode.RUNNING)
        return state, [_snapshot(state)]

    if isinstance(cmd, Stop):
        if mode is not SessionMode.RUNNING:
            return state, [Rejected(f"stop not allowed in {mode.value}")]
        state = replace(state, mode=SessionMode.IDLE)
        return state, [_snapshot(state)]

    if isinstance(cmd, Clear):
        state = replace(state, store=ExampleStore())
        return state, [_snapshot(state)]

    if isinstance(cmd, Save):
        return state, [SaveSession(cmd.path)]

    if isinstance(cmd, Load):
        return state, [LoadSession(cmd.path)]

    return state, [Rejected(f"unknown command {type(cmd).__name__}")]


def _created_at(ev: StrokeEnd) -> str:
    if ev.at is not None:
        return ev.at
    stamp = datetime.fromtimestamp(ev.t / 1000.0, tz=timezone.utc)
    return stamp.isoformat(timespec="milliseconds")


def handle_sketch_event(
    state: SessionState, ev: SketchEvent
) -> tuple[SessionState, list[Effect]]:
    """Accumulate strokes; on StrokeEnd, feed the pipeline per mode."""
    if isinstance(ev, StrokeBegin):
        if state.open_stroke is not None:
            return state, [Rejected("stroke_begin while a stroke is open")]
        if not (np.isfinite(ev.x) and np.isfinite(ev.y) and np.isfinite(ev.t)):
            return state, [Rejected("non-finite stroke coordinates")]
        return replace(state, open_stroke=(make_point(ev.x, ev.y, ev.t),)), []

    if isinstance(ev, StrokePoint):
        if state.open_stroke is None:
            return state, [Rejected("stroke_point with no open stroke")]
        if not (np.isfinite(ev.x) and np.isfinite(ev.y) and np.isfinite(ev.t)):
            return state, [Rejected("non-finite stroke coordinates")]
        if ev.t < state.open_stroke[-1][2]:
            return state, [Rejected("stroke timestamps must be non-decreasing")]
        point = make_point(ev.x, ev.y, ev.t)
        return replace(state, open_stroke=state.open_stroke + (point,)), []

    if isinstance(ev, StrokeEnd):
        if state.open_stroke is None:
            return state, [Rejected("stroke_end with no open stroke")]
        frame = state.frame.with_stroke(state.open_stroke)
        state = replace(state, frame=frame, open_stroke=None)

        if state.mode is SessionMode.RECORDING:
            raster = sketch_to_raster(state, frame)
            latent = autoencoder.encode(state.encoder, raster)
            example = TrainingExample(
                input=tuple(float(v) for v in latent),
                target=state.current_latent,
                created_at=_created_at(ev),
            )
            state = replace(state, store=mapper.add_example(state.store, example))
            return state, [ExampleAdded(len(state.store)), _snapshot(state)]

        if state.mode is SessionMode.RUNNING:
            raster = sketch_to_raster(state, frame)
            latent = autoencoder.encode(state.encoder, raster)
            mapped = state.mapper_model.map_latent(latent)
            out = tuple(float(v) for v in mapped)
            state = replace(state, current_latent=out)
            return state, [LatentUpdate(out, "sketch"), _snapshot(state)]

        return state, []

    if isinstance(ev, CanvasClear):
        return replace(state, frame=SketchFrame(), open_stroke=None), []

    return state, [Rejected(f"unknown sketch event {type(ev).__name__}")]


def sketch_to_raster(state: SessionState, frame: SketchFrame) -> Raster:
    return rasterize(frame, state.encoder.resolution)


# --- persistence -----------------------------------------------------------

def save_session(state: SessionState, path: str) -> None:
    """Write the session directory: manifest, example JSONL, mapper checkpoint.

    The encoder is saved by reference (checkpoint path or seeded recipe),
    not by value.
    """
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
        manifest = {
            "format_version": SESSION_FORMAT_VERSION,
            "current_latent": list(state.current_latent),
            "rng_state": state.rng_state,
            "encoder": {
                "checkpoint": state.encoder_ref.checkpoint,
                "seed": state.encoder_ref.seed,
                "layer_dims": list(state.encoder_ref.layer_dims),
            },
            "mapper_config": {
                "variant": state.mapper_config.variant,
                "k": state.mapper_config.k,
                "power": state.mapper_config.power,
                "epsilon": state.mapper_config.epsilon,
                "target_loss": state.mapper_config.target_loss,
                "max_iters": state.mapper_config.max_iters,
                "learning_rate": state.mapper_config.learning_rate,
                "seed": state.mapper_config.seed,
            },
            "has_mapper": state.mapper_model is not None,
        }
        (root / "session.json").write_text(
            json.dumps(manifest, indent=2), encoding="utf-8"
        )
        (root / "examples.jsonl").write_text(
            mapper.store_to_jsonl(state.store), encoding="utf-8"
        )
        if state.mapper_model is not None:
            (root / "mapper.json").write_bytes(mapper.save_mapper(state.mapper_model))
    except OSError as exc:
        raise IoFailure(f"cannot save session to {path}: {exc}") from exc


def load_session(path: str) -> SessionState:
    """Rebuild a session saved by save_session; mode resets to IDLE."""
    root = Path(path)
    try:
        manifest = json.loads((root / "session.json").read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read session manifest in {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"session manifest is not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise MalformedDocument("session manifest root must be an object")
    version = manifest.get("format_version")
    if version != SESSION_FORMAT_VERSION:
        raise UnsupportedVersion(f"session format_version {version!r}")
    try:
        latent = tuple(float(v) for v in manifest["current_latent"])
        if len(latent) != AUDIO_DIM:
            raise ValueError(f"latent has {len(latent)} dims")
        rng_state = int(manifest["rng_state"])
        enc = manifest["encoder"]
        encoder_ref = EncoderRef(
            checkpoint=enc["checkpoint"],
            seed=int(enc["seed"]),
            layer_dims=tuple(int(d) for d in enc["layer_dims"]),
        )
        mc = manifest["mapper_config"]
        mapper_config = MapperConfig(
            variant=str(mc["variant"]), k=int(mc["k"]), power=float(mc["power"]),
            epsilon=float(mc["epsilon"]), target_loss=float(mc["target_loss"]),
            max_iters=int(mc["max_iters"]),
            learning_rate=float(mc["learning_rate"]), seed=int(mc["seed"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"session manifest fields invalid: {exc}") from exc
    try:
        store = mapper.store_from_jsonl(
            (root / "examples.jsonl").read_text(encoding="utf-8")
        )
    except OSError as exc:
        raise IoFailure(f"cannot read session examples in {path}: {exc}") from exc
    mapper_model = None
    if manifest.get("has_mapper"):
        try:
            mapper_model = mapper.load_mapper((root / "mapper.json").read_bytes())
        except OSError as exc:
            raise IoFailure(f"cannot read mapper checkpoint in {path}: {exc}") from exc
    return SessionState(
        mode=SessionMode.IDLE,
        current_latent=latent,
        store=store,
        encoder=build_encoder(encoder_ref),
        encoder_ref=encoder_ref,
        mapper_model=mapper_model,
        mapper_config=mapper_config,
        rng_state=rng_state,
    )
