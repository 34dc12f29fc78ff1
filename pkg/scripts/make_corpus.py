#!/usr/bin/env python3
"""Generate a synthetic sketch corpus (PGM files + manifest).

Stands in for the recording step where the artist draws a full spread of
the shapes they intend to perform with.
"""

import argparse

from sketchsynth.corpus import synthetic_corpus, write_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", help="directory for PGM files and manifest.txt")
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--resolution", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rasters = synthetic_corpus(args.count, resolution=args.resolution, seed=args.seed)
    manifest = write_corpus(rasters, args.outdir)
    print(f"wrote {len(rasters)} rasters ({args.resolution}x{args.resolution}) "
          f"-> {manifest}")


if __name__ == "__main__":
    main()
