#!/usr/bin/env python3
"""Train the sketch autoencoder on a raster corpus and save a checkpoint."""

import argparse

from sketchsynth.autoencoder import Hyperparams, save_model, train_autoencoder
from sketchsynth.corpus import read_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("manifest", help="corpus manifest.txt from make_corpus.py")
    parser.add_argument("checkpoint", help="output checkpoint JSON path")
    parser.add_argument("--epochs", type=int, default=50)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--learning-rate", type=float, default=1e-3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rasters = read_corpus(args.manifest)
    hp = Hyperparams(
        learning_rate=args.learning_rate, epochs=args.epochs,
        batch_size=args.batch_size, seed=args.seed,
    )
    model, history = train_autoencoder(rasters, hp)
    save_model(model, args.checkpoint)
    print(f"trained on {len(rasters)} rasters: "
          f"loss {history[0]:.5f} -> {history[-1]:.5f} over {len(history)} epochs")
    print(f"checkpoint: {args.checkpoint}")


if __name__ == "__main__":
    main()
