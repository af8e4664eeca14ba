"""How often the square-code classifier recovers the degree-2 rows exactly,
as a function of the number of shortened trials per position."""

import argparse
import time

from grslab.attack import classify_positions
from grslab.bbcrs import keygen
from grslab.codes import code_dual
from grslab.distinguisher import PRESETS, feasibility


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", default="desk", choices=sorted(PRESETS))
    ap.add_argument("--keys", type=int, default=50)
    ap.add_argument("--seed", type=int, default=40000)
    ap.add_argument("--s-max", type=int, nargs="+", default=[2, 5, 10, 20])
    args = ap.parse_args()
    p = PRESETS[args.preset]
    sizes = tuple(feasibility(p.n, p.k, p.m).feasible_a_range)
    keys = [keygen(p, s) for s in range(args.seed, args.seed + args.keys)]
    print("s_max\texact\tseconds")
    for s_max in args.s_max:
        t0 = time.perf_counter()
        exact = sum(classify_positions(code_dual(pk.code()), s_max, i, sizes).J2 == sk.J2
                    for i, (sk, pk) in enumerate(keys))
        print(f"{s_max}\t{exact}/{args.keys}\t{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
