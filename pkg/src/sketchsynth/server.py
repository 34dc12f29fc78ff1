"""Network edges and the engine event loop.

One asyncio task owns the SessionState; every input — WebSocket frame,
OSC datagram, offline script step — is translated into a Command or
SketchEvent and serialised through a single queue, so the pure
transition functions see a total order. Effects produced by each
transition are executed here: snapshots fan out to every UI client,
latent updates go to the audio backend (a latest-value parameter cell
for the internal synth, or one OSC datagram per update in external
mode), and save/load effects touch the filesystem.

The module also hosts the offline render path used by CI: a scripted
session (randomise every quarter second) rendered block-by-block
through the internal backend into a WAV file, fully determined by the
config seed.
"""

from __future__ import annotations

import asyncio
import json
import logging
import socket
import threading

import websockets

from . import mapper as mapper_mod
from . import osc, session, synth
from .config import EngineConfig
from .errors import SketchSynthError
from .mapper import ExampleStore
from .session import (
    CanvasClear,
    Clear,
    Command,
    ExampleAdded,
    LatentUpdate,
    LoadSession,
    Randomise,
    Record,
    Rejected,
    Run,
    SaveSession,
    SessionState,
    SetLatentDim,
    SketchEvent,
    Snapshot,
    Stop,
    StopRecord,
    StrokeBegin,
    StrokeEnd,
    StrokePoint,
    Train,
    Trained,
)

log = logging.getLogger("sketchsynth.engine")

COMMAND_NAMES: dict[str, type] = {
    "record": Record,
    "stop_record": StopRecord,
    "randomise": Randomise,
    "train": Train,
    "run": Run,
    "stop": Stop,
    "clear": Clear,
}

RANDOMISE_PERIOD_S = 0.25
OFFLINE_BLOCK_FRAMES = 512


class LatestValueCell:
    """Single-slot handoff: writers replace, the reader takes the newest.

    This is the only contact point between the control loop and the
    audio side; no queue can back up and the reader never blocks beyond
    one tiny critical section.
    """

    def __init__(self, value):
        self._value = value
        self._lock = threading.Lock()

    def store(self, value) -> None:
        with self._lock:
            self._value = value

    def load(self):
        with self._lock:
            return self._value


def parse_ws_frame(text: str) -> Command | SketchEvent:
    """One UI JSON frame -> one engine input; raises ValueError on junk."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("frame must be a JSON object")
    kind = doc.get("type")
    try:
        if kind == "stroke_begin":
            return StrokeBegin(float(doc["x"]), float(doc["y"]), float(doc["t"]))
        if kind == "stroke_point":
            return StrokePoint(float(doc["x"]), float(doc["y"]), float(doc["t"]))
        if kind == "stroke_end":
            return StrokeEnd(float(doc["t"]))
        if kind == "canvas_clear":
            return CanvasClear()
        if kind == "command":
            name = doc.get("name")
            if name not in COMMAND_NAMES:
                raise ValueError(f"unknown command name {name!r}")
            return COMMAND_NAMES[name]()
        if kind == "set_latent":
            return SetLatentDim(int(doc["dim"]), float(doc["value"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"frame fields invalid: {exc}") from exc
    raise ValueError(f"unknown frame type {kind!r}")


def snapshot_frame(snap: Snapshot) -> str:
    return json.dumps({
        "type": "state",
        "mode": snap.mode.value,
        "latent": list(snap.latent),
        "example_count": snap.example_count,
    })


def osc_packet_to_input(packet: osc.OscPacket) -> Command | SketchEvent | None:
    """Map the OSC control surface onto engine inputs; None = not ours."""
    if not isinstance(packet, osc.OscMessage):
        return None
    if packet.address.startswith("/cmd/"):
        name = packet.address[len("/cmd/"):]
        cls = COMMAND_NAMES.get(name)
        return cls() if cls is not None else None
    if packet.address == "/latent/set" and len(packet.args) == 2:
        dim, value = packet.args
        if isinstance(dim, int) and isinstance(value, float):
            return SetLatentDim(dim, value)
    return None


class _OscInbound(asyncio.DatagramProtocol):
    def __init__(self, engine: "EngineServer"):
        self.engine = engine

    def datagram_received(self, data: bytes, addr) -> None:
        try:
            packet = osc.decode_packet(data)
        except osc.OscError as exc:
            log.warning("dropping undecodable OSC datagram from %s: %s", addr, exc)
            return
        item = osc_packet_to_input(packet)
        if item is None:
            log.warning("ignoring OSC packet with unmapped address from %s", addr)
            return
        self.engine.submit(item)


class EngineServer:
    """Owns the state, the input queue, and all adapters."""

    def __init__(self, config: EngineConfig, state: SessionState):
        self.config = config
        self.state = state
        self.inputs: asyncio.Queue = asyncio.Queue()
        self.clients: set = set()
        self.params_cell = LatestValueCell(
            synth.latent_to_params(state.current_latent)
        )
        self._osc_out_transport = None
        self._loop: asyncio.AbstractEventLoop | None = None
        self._stop: asyncio.Event | None = None
        self.ws_port: int | None = None
        self.osc_in_port: int | None = None

    # -- input intake (any thread) --------------------------------------

    def submit(self, item: Command | SketchEvent, reply_to=None) -> None:
        if self._loop is None:
            raise RuntimeError("engine loop is not running")
        self._loop.call_soon_threadsafe(self.inputs.put_nowait, (item, reply_to))

    def shutdown(self) -> None:
        """Thread-safe: ask the serve() coroutine to wind down."""
        if self._loop is not None and self._stop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)

    # -- effect execution ------------------------------------------------

    async def _broadcast(self, text: str) -> None:
        for client in list(self.clients):
            try:
                await client.send(text)
            except Exception:
                self.clients.discard(client)

    async def _apply_effects(self, effects, reply_to) -> None:
        for effect in effects:
            if isinstance(effect, Snapshot):
                await self._broadcast(snapshot_frame(effect))
            elif isinstance(effect, LatentUpdate):
                self._push_latent(effect.latent)
            elif isinstance(effect, Rejected):
                frame = json.dumps({"type": "rejected", "reason": effect.reason})
                if reply_to is not None:
                    try:
                        await reply_to.send(frame)
                    except Exception:
                        self.clients.discard(reply_to)
                else:
                    await self._broadcast(frame)
            elif isinstance(effect, Trained):
                await self._broadcast(json.dumps({"type": "trained", "loss": effect.loss}))
            elif isinstance(effect, ExampleAdded):
                pass  # example_count rides along in the snapshot that follows
            elif isinstance(effect, SaveSession):
                await self._save(effect.path, reply_to)
            elif isinstance(effect, LoadSession):
                await self._load(effect.path, reply_to)

    def _push_latent(self, latent) -> None:
        if self.config.backend == "osc":
            message = synth.emit_latent_osc(latent, self.config.osc_out.address)
            if self._osc_out_transport is not None:
                self._osc_out_transport.sendto(
                    osc.encode_message(message),
                    (self.config.osc_out.host, self.config.osc_out.port),
                )
        else:
            self.params_cell.store(synth.latent_to_params(latent))

    async def _save(self, path: str, reply_to) -> None:
        try:
            session.save_session(self.state, path)
        except SketchSynthError as exc:
            await self._apply_effects([Rejected(f"save failed: {exc}")], reply_to)

    async def _load(self, path: str, reply_to) -> None:
        try:
            self.state = session.load_session(path)
        except SketchSynthError as exc:
            await self._apply_effects([Rejected(f"load failed: {exc}")], reply_to)
            return
        snap = Snapshot(
            mode=self.state.mode,
            latent=self.state.current_latent,
            example_count=len(self.state.store),
        )
        await self._apply_effects(
            [LatentUpdate(self.state.current_latent, "load"), snap], reply_to
        )

    # -- main loop ---------------------------------------------------------

    async def _consume(self) -> None:
        while True:
            item, reply_to = await self.inputs.get()
            if isinstance(item, (StrokeBegin, StrokePoint, StrokeEnd, CanvasClear)):
                self.state, effects = session.handle_sketch_event(self.state, item)
            else:
                self.state, effects = session.handle_command(self.state, item)
            await self._apply_effects(effects, reply_to)

    async def _ws_handler(self, websocket) -> None:
        self.clients.add(websocket)
        try:
            await websocket.send(snapshot_frame(Snapshot(
                mode=self.state.mode,
                latent=self.state.current_latent,
                example_count=len(self.state.store),
            )))
            async for message in websocket:
                try:
                    item = parse_ws_frame(message)
                except ValueError as exc:
                    await websocket.send(
                        json.dumps({"type": "rejected", "reason": str(exc)})
                    )
                    continue
                await self.inputs.put((item, websocket))
        finally:
            self.clients.discard(websocket)

    async def serve(self, ready: asyncio.Event | None = None) -> None:
        """Run until cancelled. Ports 0 pick free ports (see ws_port /
        osc_in_port attributes once `ready` is set)."""
        self._loop = asyncio.get_running_loop()
        self._stop = asyncio.Event()
        udp_transport, _ = await self._loop.create_datagram_endpoint(
            lambda: _OscInbound(self),
            local_addr=("127.0.0.1", self.config.osc_in_port),
        )
        self.osc_in_port = udp_transport.get_extra_info("sockname")[1]
        out_transport, _ = await self._loop.create_datagram_endpoint(
            lambda: asyncio.DatagramProtocol(), family=socket.AF_INET
        )
        self._osc_out_transport = out_transport
        consumer = asyncio.create_task(self._consume())
        try:
            async with websockets.serve(
                self._ws_handler, "127.0.0.1", self.config.ws_port
            ) as server:
                self.ws_port = next(iter(server.sockets)).getsockname()[1]
                if ready is not None:
                    ready.set()
                await self._stop.wait()
        finally:
            consumer.cancel()
            udp_transport.close()
            out_transport.close()


def build_initial_state(config: EngineConfig) -> SessionState:
    """Session state per config: encoder from checkpoint or seeded recipe,
    example store preloaded from dataset_path when given."""
    encoder_ref = session.EncoderRef(
        checkpoint=config.encoder_checkpoint, seed=config.seed
    )
    store = ExampleStore()
    if config.dataset_path:
        with open(config.dataset_path, "r", encoding="utf-8") as fh:
            store = mapper_mod.store_from_jsonl(fh.read())
    return session.new_session(
        encoder_ref=encoder_ref,
        mapper_config=config.mapper,
        seed=config.seed,
        store=store,
    )


def run_server(config: EngineConfig) -> None:
    state = build_initial_state(config)
    engine = EngineServer(config, state)
    asyncio.run(engine.serve())


def render_offline(
    config: EngineConfig, duration_s: float, out_path: str
) -> list[synth.AudioBlock]:
    """Deterministic scripted render: starting from the config seed, the
    session latent is randomised at t=0 and every 0.25 s; each block is
    synthesised from the latest latent. Writes a 16-bit mono WAV."""
    state = build_initial_state(config)
    sample_rate = config.sample_rate
    total = int(round(duration_s * sample_rate))
    if total < 1:
        raise ValueError(f"duration {duration_s}s renders no frames")
    period = int(round(RANDOMISE_PERIOD_S * sample_rate))
    synth_state = synth.initial_state(config.seed)
    params = synth.latent_to_params(state.current_latent)
    blocks: list[synth.AudioBlock] = []
    position = 0
    next_randomise = 0
    while position < total:
        if position >= next_randomise:
            state, _effects = session.handle_command(state, Randomise())
            params = synth.latent_to_params(state.current_latent)
            next_randomise += period
        nframes = min(OFFLINE_BLOCK_FRAMES, total - position, next_randomise - position)
        block, synth_state = synth.render(synth_state, params, nframes, sample_rate)
        blocks.append(block)
        position += nframes
    synth.write_wav(out_path, blocks)
    return blocks
