"""Deterministic 16-parameter additive synth and the latent-to-synth bridge.

The built-in backend realises "the latent is the control surface" with
exactly one scalar parameter per audio-latent dimension: amplitude,
pitch, eight harmonic levels, filter cutoff, vibrato rate and depth,
noise mix, and two reserved controls. It exists so the whole pipeline is
runnable and testable without an external neural synthesizer; external
rigs receive the same latents over OSC instead.

Rendering is block-based and *bitwise* reproducible: rendering N frames
in one call equals rendering them in any sequence of consecutive calls.
That works because every piece of per-sample state evolves in exact
arithmetic — oscillator and vibrato phases are 64-bit fixed-point
accumulators (one full turn = 2^64, so integer wrap-around is the phase
wrap), the noise source is a counter-indexed splitmix64 stream, and the
one-pole filter recurrence runs sample-sequentially in C via
scipy.signal.lfilter with its one-sample memory carried across calls.
"""

from __future__ import annotations

import math
import wave
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import rng as rng_mod
from .errors import (
    DimensionMismatch,
    InvalidFrameCount,
    NonFiniteInput,
    UnsupportedSampleRate,
)
from .osc import OscMessage, validate_address

AUDIO_DIM = 16
SUPPORTED_SAMPLE_RATES = (44100, 48000)
HARMONIC_COUNT = 8

PITCH_MIN_HZ = 55.0
PITCH_MAX_HZ = 880.0
LPF_MIN_HZ = 100.0
LPF_MAX_HZ = 12000.0
VIBRATO_MAX_HZ = 8.0
VIBRATO_MAX_DEPTH = 0.05

DEFAULT_LATENT_ADDRESS = "/rave/latent"

_TURN = 2.0 ** 64  # one full oscillator cycle in fixed-point units
_PHASE_TO_RADIANS = 2.0 * math.pi / _TURN


@dataclass(frozen=True)
class SynthParams:
    """One scalar control per latent dimension (16 total)."""

    master_amp: float = 0.0
    pitch_hz: float = 220.0
    harmonic_amps: tuple[float, ...] = (1.0,) + (0.0,) * 7
    lpf_cutoff_hz: float = 6050.0
    vibrato_rate_hz: float = 0.0
    vibrato_depth: float = 0.0
    noise_mix: float = 0.0
    reserved: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        checks = (
            (0.0 <= self.master_amp <= 1.0, "master_amp", (0, 1)),
            (PITCH_MIN_HZ <= self.pitch_hz <= PITCH_MAX_HZ, "pitch_hz",
             (PITCH_MIN_HZ, PITCH_MAX_HZ)),
            (LPF_MIN_HZ <= self.lpf_cutoff_hz <= LPF_MAX_HZ, "lpf_cutoff_hz",
             (LPF_MIN_HZ, LPF_MAX_HZ)),
            (0.0 <= self.vibrato_rate_hz <= VIBRATO_MAX_HZ, "vibrato_rate_hz",
             (0, VIBRATO_MAX_HZ)),
            (0.0 <= self.vibrato_depth <= VIBRATO_MAX_DEPTH, "vibrato_depth",
             (0, VIBRATO_MAX_DEPTH)),
            (0.0 <= self.noise_mix <= 1.0, "noise_mix", (0, 1)),
        )
        for ok, name, bounds in checks:
            if not ok:
                raise ValueError(f"{name}={getattr(self, name)} outside {bounds}")
        if len(self.harmonic_amps) != HARMONIC_COUNT or not all(
            0.0 <= a <= 1.0 for a in self.harmonic_amps
        ):
            raise ValueError(f"harmonic_amps must be {HARMONIC_COUNT} values in [0, 1]")
        if len(self.reserved) != 2 or not all(0.0 <= r <= 1.0 for r in self.reserved):
            raise ValueError("reserved must be 2 values in [0, 1]")


@dataclass(frozen=True)
class SynthState:
    """Everything the render carries between blocks.

    Phase accumulators are unsigned 64-bit fixed point (full turn =
    2^64); the `phases`/`vibrato_phase` properties expose the radian
    view, always in [0, 2*pi).
    """

    phase_acc: tuple[int, ...] = (0,) * HARMONIC_COUNT
    vibrato_acc: int = 0
    lpf_y: float = 0.0
    noise_seed: int = 0
    noise_count: int = 0

    @property
    def phases(self) -> tuple[float, ...]:
        return tuple(p * _PHASE_TO_RADIANS for p in self.phase_acc)

    @property
    def vibrato_phase(self) -> float:
        return self.vibrato_acc * _PHASE_TO_RADIANS


def initial_state(noise_seed: int = 0) -> SynthState:
    return SynthState(noise_seed=noise_seed & rng_mod.MASK64)


def _unit(v: float) -> float:
    """[-1, 1] -> [0, 1] affine."""
    return (v + 1.0) / 2.0


def latent_to_params(z) -> SynthParams:
    """Deterministic, continuous, per-dimension-monotone latent decoding.

    dim 0: master amplitude (negative half clamps to silence); dim 1:
    pitch, exponential between 55 and 880 Hz; dims 2-9: harmonic levels;
    dim 10: filter cutoff; dim 11/12: vibrato rate/depth; dim 13: noise
    mix; dims 14-15: reserved.
    """
    vec = np.asarray(z, dtype=np.float64).reshape(-1)
    if vec.shape != (AUDIO_DIM,):
        raise DimensionMismatch(f"audio latent has {vec.size} dims, want {AUDIO_DIM}")
    if not np.all(np.isfinite(vec)):
        raise NonFiniteInput("audio latent contains non-finite values")
    v = np.clip(vec, -1.0, 1.0)
    return SynthParams(
        master_amp=float(np.clip(v[0], 0.0, 1.0)),
        pitch_hz=float(PITCH_MIN_HZ * (PITCH_MAX_HZ / PITCH_MIN_HZ) ** _unit(v[1])),
        harmonic_amps=tuple(_unit(float(x)) for x in v[2:10]),
        lpf_cutoff_hz=float(LPF_MIN_HZ + _unit(v[10]) * (LPF_MAX_HZ - LPF_MIN_HZ)),
        vibrato_rate_hz=float(_unit(v[11]) * VIBRATO_MAX_HZ),
        vibrato_depth=float(_unit(v[12]) * VIBRATO_MAX_DEPTH),
        noise_mix=float(_unit(v[13])),
        reserved=(_unit(float(v[14])), _unit(float(v[15]))),
    )


@dataclass(frozen=True)
class AudioBlock:
    sample_rate: int
    samples: np.ndarray  # mono float64 in [-1, 1]


def render(
    state: SynthState, params: SynthParams, nframes: int, sample_rate: int
) -> tuple[AudioBlock, SynthState]:
    """Render one block; returns the audio and the advanced state.

    Pipeline: 8 harmonics of pitch_hz (vibrato as sinusoidal pitch
    modulation), normalised so the additive sum stays within [-1, 1],
    mixed with seeded noise, one-pole low-passed, scaled by master_amp.
    """
    if nframes < 1:
        raise InvalidFrameCount(f"nframes must be >= 1, got {nframes}")
    if sample_rate not in SUPPORTED_SAMPLE_RATES:
        raise UnsupportedSampleRate(f"{sample_rate} not in {SUPPORTED_SAMPLE_RATES}")

    n = np.arange(nframes, dtype=np.uint64)
    with np.errstate(over="ignore"):
        # vibrato phase advances every sample whether audible or not
        vib_inc = np.uint64(params.vibrato_rate_hz / sample_rate * _TURN)
        vib_acc = np.uint64(state.vibrato_acc) + (n + np.uint64(1)) * vib_inc
        vib = np.sin(vib_acc.astype(np.float64) * _PHASE_TO_RADIANS)
        freq = params.pitch_hz * (1.0 + params.vibrato_depth * vib)

        # fundamental increments, fixed-point; integer cumsum wraps mod 2^64,
        # which is exactly the phase wrap — and is associative, so any block
        # split reproduces the same accumulator values bit for bit
        base_inc = (freq * (_TURN / sample_rate)).astype(np.uint64)
        base_cum = np.cumsum(base_inc, dtype=np.uint64)

        mix = np.zeros(nframes, dtype=np.float64)
        new_phase_acc = []
        for k in range(HARMONIC_COUNT):
            mult = np.uint64(k + 1)
            acc_k = np.uint64(state.phase_acc[k]) + mult * base_cum
            amp = params.harmonic_amps[k]
            if amp != 0.0:
                mix += amp * np.sin(acc_k.astype(np.float64) * _PHASE_TO_RADIANS)
            new_phase_acc.append(int(acc_k[-1]))
        level = sum(params.harmonic_amps)
        if level > 1.0:
            mix /= level

        noise_idx = np.uint64(state.noise_count) + np.uint64(1) + n
        noise = rng_mod.bipolar_at(state.noise_seed, noise_idx)

    signal = (1.0 - params.noise_mix) * mix + params.noise_mix * noise

    alpha = 1.0 - math.exp(-2.0 * math.pi * params.lpf_cutoff_hz / sample_rate)
    filtered, _ = lfilter(
        [alpha], [1.0, alpha - 1.0], signal, zi=[(1.0 - alpha) * state.lpf_y]
    )

    out = params.master_amp * filtered
    np.clip(out, -1.0, 1.0, out=out)

    new_state = SynthState(
        phase_acc=tuple(new_phase_acc),
        vibrato_acc=int(vib_acc[-1]),
        lpf_y=float(filtered[-1]),
        noise_seed=state.noise_seed,
        noise_count=(state.noise_count + nframes) & rng_mod.MASK64,
    )
    return AudioBlock(sample_rate=sample_rate, samples=out), new_state


def emit_latent_osc(z, address: str = DEFAULT_LATENT_ADDRESS) -> OscMessage:
    """Package an audio latent as one OSC message: 16 float args in order."""
    vec = np.asarray(z, dtype=np.float64).reshape(-1)
    if vec.shape != (AUDIO_DIM,):
        raise DimensionMismatch(f"audio latent has {vec.size} dims, want {AUDIO_DIM}")
    validate_address(address)
    return OscMessage(address=address, args=tuple(float(v) for v in vec))


def samples_to_pcm16(samples: np.ndarray) -> bytes:
    """Float [-1, 1] to little-endian int16 bytes (rint, half-to-even)."""
    clipped = np.clip(samples, -1.0, 1.0)
    ints = np.rint(clipped * 32767.0).astype("<i2")
    return ints.tobytes()


def write_wav(path: str, blocks: list[AudioBlock]) -> None:
    """Mono 16-bit PCM RIFF file from consecutive blocks (same rate)."""
    if not blocks:
        raise InvalidFrameCount("no audio to write")
    rates = {b.sample_rate for b in blocks}
    if len(rates) != 1:
        raise UnsupportedSampleRate(f"blocks mix sample rates {sorted(rates)}")
    with wave.open(path, "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(blocks[0].sample_rate)
        for block in blocks:
            fh.writeframes(samples_to_pcm16(block.samples))
