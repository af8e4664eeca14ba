"""Run the full key-recovery attack on a batch of fresh keys and print one
TSV row per key plus a success rate."""

import argparse
import time

from grslab.attack import AttackError, complete_attack
from grslab.bbcrs import keygen
from grslab.distinguisher import PRESETS


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", default="desk", choices=sorted(PRESETS))
    ap.add_argument("--keys", type=int, default=20)
    ap.add_argument("--seed", type=int, default=50000)
    ap.add_argument("--s-max", type=int, default=20)
    args = ap.parse_args()
    p = PRESETS[args.preset]
    print("seed\tJ2\teliminations\tstatus\tseconds")
    ok = 0
    for s in range(args.seed, args.seed + args.keys):
        sk, pk = keygen(p, s)
        t0 = time.perf_counter()
        try:
            tr = complete_attack(pk.code(), args.s_max, s, m=p.m, G_pub=pk.G_pub, t_pub=pk.t_pub)
            status = f"ok {tr.challenges_ok}/50"
            ok += tr.challenges_ok == 50
            elim = len(tr.eliminations)
        except AttackError as exc:
            status, elim = f"fail:{exc.stage}", -1
        print(f"{s}\t{len(sk.J2)}\t{elim}\t{status}\t{time.perf_counter() - t0:.2f}")
    print(f"# success\t{ok}/{args.keys}")


if __name__ == "__main__":
    main()
