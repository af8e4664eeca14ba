"""Command-line front end: key lifecycle, attack, distinguisher audits, the
graph simulator and a desk-scale benchmark.

Exit codes: 0 success, 2 parameter error, 3 format error, 4 attack-stage
failure, 5 decryption failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .attack import AttackError, complete_attack, dump_transcript, shortened_trial
from .bbcrs import (
    BbcrsParams,
    DecryptionError,
    FormatError,
    ParameterError,
    decrypt,
    dump_public_key,
    dump_secret_key,
    dump_vector,
    encrypt,
    keygen,
    load_public_key,
    load_secret_key,
    load_vector,
    parse_density,
)
from .codes import code_dual
from .distinguisher import PRESETS, feasibility, feasibility_for, random_code_square_dim
from .graph_model import sample_prediction

EXIT_OK, EXIT_PARAM, EXIT_FORMAT, EXIT_ATTACK, EXIT_DECRYPT = 0, 2, 3, 4, 5
SEED_ENV = "GRSLAB_SEED"


@dataclass(frozen=True)
class CliConfig:
    command: str
    params: BbcrsParams | None
    seed: int
    jobs: int = 1


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ParameterError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return int(np.random.SeedSequence().entropy % (1 << 63))


def params_from(args) -> BbcrsParams:
    if getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise ParameterError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        return PRESETS[args.preset]
    missing = [f for f in ("q", "n", "k", "m") if getattr(args, f) is None]
    if missing:
        raise ParameterError("missing parameters: " + ", ".join("--" + f for f in missing)
                             + " (or use --preset)")
    return BbcrsParams(args.q, args.n, args.k, parse_density(args.m), args.z, args.construction)


def child_seeds(seed: int, count: int) -> list[int]:
    return [int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def run_parallel(fn, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _read_public(path) -> "object":
    with open(path) as fh:
        return load_public_key(fh)


# --------------------------------------------------------------------------
# commands


def cmd_keygen(args, out) -> int:
    p = params_from(args)
    seed = resolve_seed(args.seed)
    sk, pk = keygen(p, seed)
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "secret.key", "w") as fh:
        dump_secret_key(sk, fh)
    with open(d / "public.key", "w") as fh:
        dump_public_key(pk, fh)
    print(f"seed={seed}", file=out)
    print(f"|J2|={len(sk.J2)}", file=out)
    print(f"t_pub={p.t_pub}", file=out)
    for line in feasibility_for(p).lines():
        print(line, file=out)
    return EXIT_OK


def cmd_encrypt(args, out) -> int:
    pk = _read_public(args.public)
    p = pk.params
    seed = resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    if args.message:
        with open(args.message) as fh:
            msg = load_vector("MESSAGE", fh, p.k)
    else:
        msg = rng.integers(0, p.q, size=p.k)
        if args.message_out:
            with open(args.message_out, "w") as fh:
                dump_vector("MESSAGE", p.k, msg, fh)
    c = encrypt(pk, msg, rng)
    with open(args.out, "w") as fh:
        dump_vector("CIPHERTEXT", p.n, c, fh)
    print(f"seed={seed}", file=out)
    return EXIT_OK


def cmd_decrypt(args, out) -> int:
    with open(args.secret) as fh:
        sk = load_secret_key(fh)
    G_pub = _read_public(args.public).G_pub if args.public else None
    with open(args.ciphertext) as fh:
        c = load_vector("CIPHERTEXT", fh, sk.params.n)
    msg = decrypt(sk, c, G_pub)
    if args.out:
        with open(args.out, "w") as fh:
            dump_vector("MESSAGE", sk.params.k, msg, fh)
    else:
        print(" ".join(map(str, msg)), file=out)
    return EXIT_OK


def cmd_attack(args, out) -> int:
    pk = _read_public(args.public)
    seed = resolve_seed(args.seed)
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    print(f"seed={seed}", file=out)
    try:
        tr = complete_attack(pk.code(), args.s_max, seed, m=pk.params.m, G_pub=pk.G_pub,
                             t_pub=pk.t_pub, challenges=args.challenges)
    except AttackError as exc:
        if exc.transcript is not None:
            exc.transcript.note(f"seed={seed}")
            with open(d / "transcript.txt", "w") as fh:
                dump_transcript(exc.transcript, fh)
        raise
    tr.note(f"seed={seed}")
    with open(d / "transcript.txt", "w") as fh:
        dump_transcript(tr, fh)
    with open(d / "recovered.key", "w") as fh:
        dump_secret_key(tr.recovered_key, fh)
    print(f"eliminations={len(tr.eliminations)} challenges_ok={tr.challenges_ok}", file=out)
    for i1, i2, al in tr.eliminations:
        print(f"eliminate\t{i1}\t{i2}\t{al}", file=out)
    print("attack succeeded", file=out)
    return EXIT_OK


def _distinguish_one(job):
    pk, size, seed = job
    rng = np.random.default_rng(seed)
    C = code_dual(pk.code())
    I = sorted(rng.choice(C.n, size=size, replace=False).tolist())
    res = shortened_trial(C, I)
    s = C.k - size
    return size, res.dim, random_code_square_dim(s, C.n - size), int(res.distinguishable)


def cmd_distinguish(args, out) -> int:
    seed = resolve_seed(args.seed)
    if args.public:
        pk = _read_public(args.public)
    else:
        pk = keygen(params_from(args), seed)[1]
    p = pk.params
    sizes = [args.size] if args.size is not None else list(feasibility_for(p).feasible_a_range)
    if not sizes:
        raise ParameterError("no feasible shortening size; pass --size")
    rng = np.random.default_rng(seed)
    jobs = [(pk, int(rng.choice(sizes)), s) for s in child_seeds(seed, args.trials)]
    rows = run_parallel(_distinguish_one, jobs, args.jobs)
    print(f"# seed={seed}", file=out)
    print("trial\tsize\tsquare_dim\trandom_dim\tfired", file=out)
    for t, (a, dim, ref, fired) in enumerate(rows):
        print(f"{t}\t{a}\t{dim}\t{ref}\t{fired}", file=out)
    if rows:
        print(f"# fired {sum(r[3] for r in rows)}/{len(rows)}", file=out)
    return EXIT_OK


def cmd_params(args, out) -> int:
    if args.list:
        for name, p in PRESETS.items():
            rep = feasibility_for(p)
            print(f"{name}\tq={p.q}\tn={p.n}\tk={p.k}\tm={p.m.numerator}/{p.m.denominator}"
                  f"\tsatisfies_eq12={str(rep.satisfies_eq12).lower()}", file=out)
        return EXIT_OK
    if args.preset:
        p = params_from(args)
        rep = feasibility_for(p)
    else:
        missing = [f for f in ("n", "k", "m") if getattr(args, f) is None]
        if missing:
            raise ParameterError("missing " + ", ".join("--" + f for f in missing))
        rep = feasibility(args.n, args.k, parse_density(args.m))
    for line in rep.lines():
        print(line, file=out)
    return EXIT_OK


def _graph_one(job):
    p, seed, pool, count = job
    s = sample_prediction(p, seed, pool=pool, count=count)
    return s.a, s.predicted, s.measured, int(s.match)


def cmd_simulate_graph(args, out) -> int:
    p = params_from(args)
    seed = resolve_seed(args.seed)
    jobs = [(p, s, args.pool, args.count) for s in child_seeds(seed, args.trials)]
    rows = run_parallel(_graph_one, jobs, args.jobs)
    print(f"# seed={seed}", file=out)
    print("size\tpredicted\tmeasured\tmatch", file=out)
    for r in rows:
        print("\t".join(map(str, r)), file=out)
    if rows:
        rate = sum(r[3] for r in rows) / len(rows)
        print(f"# match_rate\t{rate:.4f}", file=out)
    return EXIT_OK


BENCH_STEPS = ("keygen", "distinguish", "classify", "eliminate", "strip", "fallback", "reconstruct", "verify")


def _bench_one(job):
    p, seed, s_max, challenges = job
    t0 = time.perf_counter()
    sk, pk = keygen(p, seed)
    t_key = time.perf_counter() - t0
    times = dict.fromkeys(BENCH_STEPS, 0.0)
    times["keygen"] = t_key
    try:
        tr = complete_attack(pk.code(), s_max, seed + 1, m=p.m, G_pub=pk.G_pub,
                             t_pub=pk.t_pub, challenges=challenges)
        ok, elim, stage = 1, len(tr.eliminations), "ok"
    except AttackError as exc:
        tr = exc.transcript
        ok, elim, stage = 0, len(tr.eliminations) if tr else 0, exc.stage
    if tr is not None:
        times.update(tr.timings)
    return seed, len(sk.J2), elim, ok, stage, [times[s] for s in BENCH_STEPS]


def cmd_bench(args, out) -> int:
    p = params_from(args)
    seed = resolve_seed(args.seed)
    jobs = [(p, s, args.s_max, args.challenges) for s in child_seeds(seed, args.trials)]
    rows = run_parallel(_bench_one, jobs, args.jobs)
    print(f"# seed={seed} q={p.q} n={p.n} k={p.k} m={p.m.numerator}/{p.m.denominator}", file=out)
    print("key_seed\tJ2\teliminations\tsuccess\tstage\t" + "\t".join(f"t_{s}" for s in BENCH_STEPS)
          + "\tt_total", file=out)
    for key_seed, j2, elim, ok, stage, ts in rows:
        cells = [str(key_seed), str(j2), str(elim), str(ok), stage] + [f"{t:.3f}" for t in ts]
        print("\t".join(cells) + f"\t{sum(ts):.3f}", file=out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_params(sp, seed=True):
    g = sp.add_argument_group("parameters")
    g.add_argument("--preset", choices=sorted(PRESETS))
    g.add_argument("--q", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--m", help="row-weight density as num/den, e.g. 23/20")
    g.add_argument("--z", type=int, default=1)
    g.add_argument("--construction", choices=("A", "B"), default="A")
    if seed:
        sp.add_argument("--seed", type=int, help=f"RNG seed (falls back to ${SEED_ENV})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grslab", description=" ".join(__doc__.split("\n\n")[0].split()))
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("keygen", help="generate a keypair")
    _add_params(sp)
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_keygen)

    sp = sub.add_parser("encrypt", help="encrypt a message file (or a random message)")
    sp.add_argument("--public", required=True)
    sp.add_argument("--message")
    sp.add_argument("--message-out", help="where to store the random message")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    sp.add_argument("--secret", required=True)
    sp.add_argument("--public", help="published key (default: recomputed from the secret key)")
    sp.add_argument("--ciphertext", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_decrypt)

    sp = sub.add_parser("attack", help="recover an equivalent secret key from a public key")
    sp.add_argument("--public", required=True)
    sp.add_argument("--s-max", type=int, default=20)
    sp.add_argument("--challenges", type=int, default=50)
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("distinguish", help="shortened-dual square dimensions")
    _add_params(sp)
    sp.add_argument("--public")
    sp.add_argument("--size", type=int, help="shortening size (default: feasible range)")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_distinguish)

    sp = sub.add_parser("params", help="feasibility report")
    _add_params(sp, seed=False)
    sp.add_argument("--list", action="store_true", help="list presets")
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("simulate-graph", help="graph-model prediction vs measured dimension")
    _add_params(sp)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--pool", choices=("all", "J1"), default="all")
    sp.add_argument("--count", choices=("columns", "rows"), default="columns")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_simulate_graph)

    sp = sub.add_parser("bench", help="time the attack steps on fresh keys")
    _add_params(sp)
    sp.add_argument("--trials", type=int, default=3)
    sp.add_argument("--s-max", type=int, default=20)
    sp.add_argument("--challenges", type=int, default=50)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 0) < 0 or getattr(args, "jobs", 1) < 1:
        print("error: --trials must be >= 0 and --jobs >= 1", file=sys.stderr)
        return EXIT_PARAM
    try:
        return args.func(args, out)
    except AttackError as exc:
        print(f"attack failed at stage {exc.stage}: {exc.message}", file=sys.stderr)
        return EXIT_ATTACK
    except DecryptionError as exc:
        print(f"decryption failed: {exc}", file=sys.stderr)
        return EXIT_DECRYPT
    except (FormatError, OSError) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ValueError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
