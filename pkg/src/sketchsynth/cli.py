"""Command-line entry point for the session engine.

Live mode serves the WebSocket UI protocol and the OSC/UDP control
surface; `--render-wav` switches to the deterministic offline render
used by CI and golden-file tests.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import EngineConfig, OscOutConfig, load_config
from .server import render_offline, run_server


def _parse_host_port(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {value!r}")
    return host, int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engine",
        description="Sketch-to-sound session engine (record / train / run over "
                    "WebSocket and OSC).",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--backend", choices=["internal", "osc"],
                        help="audio backend: built-in synth or OSC forwarding")
    parser.add_argument("--ws-port", type=int, help="WebSocket port for the UI")
    parser.add_argument("--osc-in-port", type=int, help="UDP port for inbound OSC")
    parser.add_argument("--osc-out", type=_parse_host_port, metavar="HOST:PORT",
                        help="destination for outbound latent OSC")
    parser.add_argument("--dataset", help="example store JSONL to preload")
    parser.add_argument("--encoder", help="autoencoder checkpoint JSON")
    parser.add_argument("--seed", type=int, help="session seed")
    parser.add_argument("--render-wav", metavar="PATH",
                        help="offline mode: render a scripted session to a WAV")
    parser.add_argument("--duration", type=float, default=1.0,
                        help="offline render length in seconds (default 1.0)")
    return parser


def config_from_args(args: argparse.Namespace) -> EngineConfig:
    config = load_config(args.config) if args.config else EngineConfig()
    if args.backend is not None:
        config = replace(config, backend=args.backend)
    if args.ws_port is not None:
        config = replace(config, ws_port=args.ws_port)
    if args.osc_in_port is not None:
        config = replace(config, osc_in_port=args.osc_in_port)
    if args.osc_out is not None:
        host, port = args.osc_out
        config = replace(config, osc_out=OscOutConfig(
            host=host, port=port, address=config.osc_out.address,
        ))
    if args.dataset is not None:
        config = replace(config, dataset_path=args.dataset)
    if args.encoder is not None:
        config = replace(config, encoder_checkpoint=args.encoder)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    if args.render_wav:
        blocks = render_offline(config, args.duration, args.render_wav)
        frames = sum(len(b.samples) for b in blocks)
        print(f"wrote {frames} frames at {config.sample_rate} Hz to {args.render_wav}")
        return 0
    print(f"engine: ws port {config.ws_port}, osc in {config.osc_in_port}, "
          f"backend {config.backend}", file=sys.stderr)
    run_server(config)
    return 0


if __name__ == "__main__":
    sys.exit(main())
