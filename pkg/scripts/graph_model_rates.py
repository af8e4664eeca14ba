"""Compare the graph-model prediction with the measured shortened-square
dimension, broken down by subset size and by where I is drawn from."""

import argparse
from collections import Counter

import numpy as np

from grslab.distinguisher import PRESETS
from grslab.graph_model import sample_prediction


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", default="desk", choices=sorted(PRESETS))
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", default="columns", choices=["columns", "rows"])
    args = ap.parse_args()
    for pool in ("all", "J1"):
        seeds = np.random.SeedSequence(args.seed).spawn(args.trials)
        samples = [sample_prediction(PRESETS[args.preset], np.random.default_rng(s), pool=pool,
                                     count=args.count) for s in seeds]
        hits = sum(s.match for s in samples)
        gaps = Counter((s.a, s.predicted - s.measured) for s in samples if not s.match)
        under = sum(s.predicted < s.measured for s in samples)
        print(f"pool={pool}\tmatch={hits}/{args.trials}\tunder_predicted={under}\tgaps(a,diff)={dict(gaps)}")


if __name__ == "__main__":
    main()
