#!/usr/bin/env python3
"""Desk-scale end-to-end demo, no sockets or UI.

Builds a session with a seeded encoder, records a handful of sketch /
latent pairs (randomising the synth latent before each), trains the
mapper, switches to run mode, and renders the audio produced by three
fresh sketches to a WAV file.
"""

import argparse

import numpy as np

from sketchsynth import session, synth
from sketchsynth.session import (
    CanvasClear,
    Randomise,
    Record,
    Run,
    StopRecord,
    StrokeBegin,
    StrokeEnd,
    StrokePoint,
    Train,
    handle_command,
    handle_sketch_event,
)


def scribble(state, rng, t0):
    state, _ = handle_sketch_event(state, CanvasClear())
    x, y = rng.uniform(0.1, 0.9, 2)
    state, _ = handle_sketch_event(state, StrokeBegin(float(x), float(y), t0))
    for i in range(6):
        x, y = np.clip([x + rng.uniform(-0.2, 0.2), y + rng.uniform(-0.2, 0.2)], 0, 1)
        state, _ = handle_sketch_event(
            state, StrokePoint(float(x), float(y), t0 + 10.0 * (i + 1)))
    return handle_sketch_event(state, StrokeEnd(t0 + 80.0))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_wav", help="output WAV path")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--examples", type=int, default=6)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    state = session.new_session(seed=args.seed)
    print(f"encoder: {state.encoder.layer_dims}, resolution {state.encoder.resolution}")

    state, _ = handle_command(state, Record())
    t = 0.0
    for i in range(args.examples):
        state, _ = handle_command(state, Randomise())
        state, _ = scribble(state, rng, t)
        t += 100.0
    state, _ = handle_command(state, StopRecord())
    print(f"recorded {len(state.store)} examples")

    state, effects = handle_command(state, Train())
    print(f"trained mapper: {effects[0]}")
    state, _ = handle_command(state, Run())

    blocks = []
    synth_state = synth.initial_state(args.seed)
    for i in range(3):
        state, effects = scribble(state, rng, t)
        t += 100.0
        params = synth.latent_to_params(state.current_latent)
        block, synth_state = synth.render(synth_state, params, 24000, 48000)
        blocks.append(block)
        print(f"sketch {i + 1}: amp={params.master_amp:.2f} "
              f"pitch={params.pitch_hz:.1f} Hz noise={params.noise_mix:.2f}")
    synth.write_wav(args.out_wav, blocks)
    print(f"wrote {args.out_wav}")


if __name__ == "__main__":
    main()
