"""Seeded 64-bit splitmix-style random stream.

All randomness that must be reproducible from a config seed goes through
this one generator so that a session can be replayed bit-for-bit. The
stream is the classic splitmix64 counter generator:

    state_{n} = (state_{n-1} + 0x9E3779B97F4A7C15) mod 2^64
    output_n  = mix64(state_n)

where mix64 is

    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    z = z ^ (z >> 31)

A seed initialises state directly (state_0 = seed mod 2^64). Uniform
doubles in [0, 1) take the top 53 bits of the output: (z >> 11) * 2^-53.
Bipolar draws map that onto [-1, 1) via 2u - 1.

Because the n-th output is a pure function of (seed, n), the stream can
also be evaluated in vectorised form (`mix64_array`), which the synth
noise source uses to stay sample-accurate across arbitrary block splits.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB
_DOUBLE_SCALE = 2.0 ** -53


def mix64(state: int) -> int:
    """Finalising mix of one 64-bit state word."""
    z = state & MASK64
    z = ((z ^ (z >> 30)) * _MULT1) & MASK64
    z = ((z ^ (z >> 27)) * _MULT2) & MASK64
    return z ^ (z >> 31)


def next_u64(state: int) -> tuple[int, int]:
    """Advance the stream one step; returns (output, new_state)."""
    state = (state + GAMMA) & MASK64
    return mix64(state), state


def next_unit(state: int) -> tuple[float, int]:
    """One uniform double in [0, 1)."""
    z, state = next_u64(state)
    return (z >> 11) * _DOUBLE_SCALE, state


def next_bipolar(state: int) -> tuple[float, int]:
    """One uniform double in [-1, 1)."""
    u, state = next_unit(state)
    return 2.0 * u - 1.0, state


def bipolar_vector(state: int, n: int) -> tuple[tuple[float, ...], int]:
    """n sequential bipolar draws; returns (values, new_state)."""
    out = []
    for _ in range(n):
        v, state = next_bipolar(state)
        out.append(v)
    return tuple(out), state


def mix64_array(states: np.ndarray) -> np.ndarray:
    """Vectorised mix64 over a uint64 array (wrapping arithmetic)."""
    z = states.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT2)
        z = z ^ (z >> np.uint64(31))
    return z


def bipolar_at(seed: int, indices: np.ndarray) -> np.ndarray:
    """Stream outputs at absolute draw indices (1-based), as doubles in [-1, 1).

    `bipolar_at(seed, [1, 2, ...])` equals repeated `next_bipolar` calls
    starting from `state = seed`; the vectorised form lets block-based
    consumers resume mid-stream without replaying earlier draws.
    """
    idx = indices.astype(np.uint64, copy=False)
    with np.errstate(over="ignore"):
        states = np.uint64(seed & MASK64) + idx * np.uint64(GAMMA)
    z = mix64_array(states)
    u = (z >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE
    return 2.0 * u - 1.0
