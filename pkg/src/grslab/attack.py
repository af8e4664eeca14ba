"""Key recovery against the sparse-plus-rank-one GRS masking.

The attack works on C = dual of the public code. Step 1 finds the degree-2
positions (puncturing them lowers the dimension of squares of shortened
copies of C). Step 2 turns them into degree-1 positions by column operations
C -> C D(alpha, i1, i2). Step 3 strips the remaining rank-one perturbation and
recovers a GRS description, from which an equivalent secret key follows.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, TextIO

import numpy as np

from .bbcrs import BbcrsParams, BbcrsSecretKey, decrypt_with, random_error
from .codes import (
    GrsCode,
    LinearCode,
    code_dual,
    puncture,
    shorten_generator,
    vandermonde,
)
from .distinguisher import feasibility
from .field_linalg import (
    identity,
    inverse,
    is_invertible,
    kernel,
    solve_linear,
    span,
)
from .recovery import RecoveryError, rank_one_strip

STAGES = ("distinguish", "classify", "associate", "eliminate", "fallback", "strip", "reconstruct", "verify")


class AttackError(RuntimeError):
    def __init__(self, stage: str, message: str, transcript=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
        self.transcript = transcript


@dataclass(frozen=True)
class PositionClassification:
    J1: frozenset[int]
    J2: frozenset[int]

    def __post_init__(self):
        if self.J1 & self.J2:
            raise ValueError("J1 and J2 overlap")

    @property
    def n(self) -> int:
        return len(self.J1) + len(self.J2)


# --------------------------------------------------------------------------
# detection primitives


def _square_parity(Gs: np.ndarray, q: int) -> tuple[int, np.ndarray]:
    """(dim of the square of <Gs>, parity-check matrix of that square)."""
    iu, ju = np.triu_indices(Gs.shape[0])
    P = Gs[iu] * Gs[ju] % q
    H = kernel(P, q).basis
    return Gs.shape[1] - H.shape[0], H


# Minimum codimension of the square for each signal to count. Columns of the
# parity-check matrix at degree-1 positions lie on a rational normal curve, so
# a chance incidence with a fixed rank-r subspace has probability about
# q^-(codim - r - 1); these thresholds keep it at q^-3 or below.
ZERO_MIN_CODIM = 2
PARALLEL_MIN_CODIM = 5
RANK2_MIN_CODIM = 6


@dataclass(frozen=True)
class TrialResult:
    distinguishable: bool
    dim: int
    codim: int
    zero: frozenset[int]  # e_j lies in the square: puncturing j alone drops the dimension
    clustered: frozenset[int]  # j lies in a set of positions whose columns have rank deficiency

    @property
    def flagged(self) -> frozenset[int]:
        return (self.zero if self.codim >= ZERO_MIN_CODIM else frozenset()) | self.clustered


def _directions(cols: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalise nonzero rows by their first nonzero entry; return (labels,
    class sizes) of equal directions."""
    lead = cols[np.arange(len(cols)), np.argmax(cols != 0, axis=1)]
    inv = np.array([pow(int(v), q - 2, q) for v in lead], dtype=np.int64)
    _, labels, counts = np.unique(cols * inv[:, None] % q, axis=0, return_inverse=True, return_counts=True)
    return labels.ravel(), counts


def _rank_deficient_columns(H: np.ndarray, q: int) -> set[int]:
    """Indices of nonzero columns of H lying in a set of rank r <= 2 with more
    than r members, subject to the significance thresholds."""
    c = H.shape[0]
    idx = np.flatnonzero(np.any(H, axis=0))
    out: set[int] = set()
    if len(idx) < 2 or c < PARALLEL_MIN_CODIM:
        return out
    cols = H[:, idx].T % q
    labels, counts = _directions(cols, q)
    out |= {int(idx[t]) for t in range(len(idx)) if counts[labels[t]] > 1}
    if c < RANK2_MIN_CODIM:
        return out
    # one representative per direction; in the quotient by column t, two
    # representatives sharing a direction span a plane with t
    reps = np.unique(labels, return_index=True)[1]
    R = cols[reps]
    members = [np.flatnonzero(labels == labels[r]) for r in reps]
    for t in range(len(R)):
        h = R[t]
        p = int(np.flatnonzero(h)[0])
        proj = (R - np.outer(R[:, p] * pow(int(h[p]), q - 2, q) % q, h)) % q
        proj = np.delete(proj, p, axis=1)
        live = np.flatnonzero(np.any(proj, axis=1))
        if len(live) < 2:
            continue
        lab, cnt = _directions(proj[live], q)
        hit = [live[u] for u in range(len(live)) if cnt[lab[u]] > 1]
        if hit:
            for r in [t, *hit]:
                out |= {int(idx[m]) for m in members[r]}
    return out


def shortened_trial(C: LinearCode, I: Iterable[int]) -> TrialResult:
    """Shorten C at I, square, and read off which positions behave as degree 2.

    With H a parity-check matrix of the square S, dim Pu_X(S) = dim S - |X| +
    rank H[:, X]. A zero column j is a single-position drop. Several rows
    sharing one column can contribute linearly dependent directions to S;
    then no single puncturing drops the dimension, but their columns of H
    span less than their number, which the cluster search detects.
    """
    q, n = C.q, C.n
    I = sorted(set(I))
    keep = [j for j in range(n) if j not in set(I)]
    Gs = shorten_generator(C.generator, I, q)
    s = Gs.shape[0]
    if s == 0:
        return TrialResult(False, 0, len(keep), frozenset(), frozenset())
    d, H = _square_parity(Gs, q)
    length = len(keep)
    dist = d < min(length, s * (s + 1) // 2)
    if H.shape[0] == 0:
        return TrialResult(dist, d, 0, frozenset(keep), frozenset())
    zero = frozenset(keep[j] for j in np.flatnonzero(~np.any(H, axis=0)))
    clustered = frozenset(keep[j] for j in _rank_deficient_columns(H, q))
    return TrialResult(dist, d, length - d, zero, clustered)


def _draw(rng, pool: list[int], size: int) -> list[int]:
    return rng.choice(pool, size=size, replace=False).tolist()


def _distinguishing_trial(C: LinearCode, sizes, rng, exclude=(), forced=(), pool=None,
                          tries: int = 5) -> TrialResult | None:
    """Shorten at a random I (``forced`` inside, ``exclude`` outside) on which
    the distinguisher fires; None if none is found within ``tries`` draws."""
    base = list(range(C.n)) if pool is None else list(pool)
    skip = set(exclude) | set(forced)
    base = [j for j in base if j not in skip]
    for _ in range(tries):
        a = int(rng.choice(sizes)) - len(forced)
        if a < 0 or a > len(base):
            return None
        res = shortened_trial(C, list(forced) + _draw(rng, base, a))
        if res.distinguishable:
            return res
    return None


# A flag must repeat on two independent subsets before it counts: chance
# coincidences in the parity-check matrix (probability about q^-codim per
# position) do not repeat, structural ones do.
CONFIRMATIONS = 2


def is_degree2_position(C: LinearCode, i: int, s_max: int, feasible_a, rng, avoid: Iterable[int] = ()) -> bool:
    """True once a distinguishing I (i not in I) has flagged i on CONFIRMATIONS
    occasions; False ("probably not") after s_max trials. Positions in
    ``avoid`` are never shortened."""
    rng = np.random.default_rng(rng)
    if not 0 <= i < C.n:
        raise IndexError(f"position {i} out of range")
    sizes = list(feasible_a)
    hits = 0
    for _ in range(s_max):
        res = _distinguishing_trial(C, sizes, rng, exclude=(i, *avoid))
        if res is not None and i in res.flagged:
            hits += 1
            if hits >= CONFIRMATIONS:
                return True
    return False


def classify_positions(C: LinearCode, s_max: int, rng, feasible_a=None) -> PositionClassification:
    """J2 = positions flagged on at least CONFIRMATIONS of s_max distinguishing
    subsets I."""
    rng = np.random.default_rng(rng)
    n = C.n
    sizes = list(feasible_a) if feasible_a is not None else scan_subset_sizes(C, rng)
    hits: Counter = Counter()
    if sizes:
        for _ in range(s_max):
            res = _distinguishing_trial(C, sizes, rng)
            if res is not None:
                hits.update(res.flagged)
    J2 = frozenset(j for j, h in hits.items() if h >= CONFIRMATIONS)
    return PositionClassification(frozenset(range(n)) - J2, J2)


def associated_degree2(C: LinearCode, i1: int, J1, J2, s_max: int, rng, feasible_a) -> frozenset[int]:
    """Positions of J2 that look degree-1 once i1 is shortened: shorten at
    {i1} together with random degree-1 positions, and discard every i2 that
    is still flagged."""
    rng = np.random.default_rng(rng)
    undecided = set(J2)
    hits: Counter = Counter()
    pool = [j for j in J1 if j != i1]
    sizes = list(feasible_a)
    done = 0
    for _ in range(s_max):
        if not undecided:
            break
        res = _distinguishing_trial(C, sizes, rng, forced=(i1,), pool=pool)
        if res is None:
            continue
        done += 1
        hits.update(res.flagged & undecided)
        undecided = {j for j in undecided if hits[j] < CONFIRMATIONS}
    return frozenset(undecided) if done else frozenset()


def elimination_matrix(n: int, alpha: int, i1: int, i2: int, q: int) -> np.ndarray:
    """Identity plus alpha at (i1, i2): column i2 += alpha * column i1."""
    D = identity(n)
    D[i1, i2] = alpha % q
    return D


def apply_elimination(C: LinearCode, alpha: int, i1: int, i2: int) -> LinearCode:
    q = C.q
    G = C.generator.copy()
    G[:, i2] = (G[:, i2] + alpha * G[:, i1]) % q
    return LinearCode.from_generator(G, q)


def eliminate_degree2(C: LinearCode, i1: int, i2: int, s_max: int, rng, feasible_a) -> tuple[LinearCode, int]:
    """First alpha in 1..q-1 (ascending) for which i2 stops looking degree-2 in
    C D(alpha, i1, i2). i1 stays unshortened during the test: shortening it
    removes the shared column and would hide i2 for every alpha."""
    rng = np.random.default_rng(rng)
    for alpha in range(1, C.q):
        Cn = apply_elimination(C, alpha, i1, i2)
        if not is_degree2_position(Cn, i2, s_max, feasible_a, rng, avoid=(i1,)):
            return Cn, alpha
    raise AttackError("eliminate", f"position {i1} is not associated to {i2}")


def scan_subset_sizes(C: LinearCode, rng, trials: int = 3) -> tuple[int, ...]:
    """Shortening sizes where the distinguisher fires, scanning downward from
    dim C - 1; the first contiguous block of firing sizes is returned."""
    rng = np.random.default_rng(rng)
    found: list[int] = []
    for a in range(C.k - 1, 0, -1):
        hits = sum(shortened_trial(C, _draw(rng, list(range(C.n)), a)).distinguishable for _ in range(trials))
        if 2 * hits >= trials:
            found.append(a)
        elif found:
            break
    return tuple(sorted(found))


# --------------------------------------------------------------------------
# transcript


@dataclass
class AttackTranscript:
    """C_pub^perp T_tilde = GRS(u, v) (Pi_tilde + R_tilde)^T with R_tilde = a^T b."""

    q: int
    n: int
    k: int
    classification: PositionClassification | None = None
    subset_sizes: tuple[int, ...] = ()
    eliminations: list[tuple[int, int, int]] = field(default_factory=list)
    T_tilde: np.ndarray | None = None
    u: tuple[int, ...] = ()
    v: tuple[int, ...] = ()
    Pi_tilde: np.ndarray | None = None
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    punctured_set: frozenset[int] = frozenset()
    log: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    recovered_key: BbcrsSecretKey | None = None
    challenges_ok: int = 0

    @property
    def R_tilde(self) -> np.ndarray:
        return np.outer(self.a, self.b) % self.q

    def note(self, line: str):
        self.log.append(line)

    def composition(self) -> np.ndarray:
        """Generator of GRS(u, v) (Pi_tilde + R_tilde)^T T_tilde^-1."""
        q = self.q
        G = GrsCode(q, self.u, self.v, self.n - self.k).generator_matrix()
        K = (self.Pi_tilde + self.R_tilde).T % q
        return G @ K % q @ inverse(self.T_tilde, q) % q

    def verify(self, C_dual: LinearCode) -> bool:
        return span(self.composition(), self.q, self.n) == C_dual.space

    def decrypt(self, ciphertext) -> np.ndarray:
        if self.recovered_key is None:
            raise AttackError("reconstruct", "no recovered key")
        sk = self.recovered_key
        return decrypt_with(sk.grs, sk.Q, sk.beta, sk.S, self._G_pub, sk.params.t_pub, ciphertext)

    _G_pub: np.ndarray | None = None


def _triples(M: np.ndarray) -> list[str]:
    return [f"{i} {j} {int(M[i, j])}" for i, j in zip(*np.nonzero(M))]


def dump_transcript(tr: AttackTranscript, fh: TextIO):
    fh.write(f"GRSLAB-TRANSCRIPT v1 q={tr.q} n={tr.n} k={tr.k}\n")
    for line in tr.log:
        fh.write(f"# {line}\n")
    for name, sec in tr.timings.items():
        fh.write(f"# time {name} {sec:.3f}s\n")
    cls = tr.classification
    fh.write("SUBSET-SIZES\n" + " ".join(map(str, tr.subset_sizes)) + "\n")
    if cls is not None:
        fh.write("J2\n" + " ".join(map(str, sorted(cls.J2))) + "\n")
    fh.write("ELIMINATIONS\n")
    for i1, i2, al in tr.eliminations:
        fh.write(f"{i1} {i2} {al}\n")
    fh.write("PUNCTURED\n" + " ".join(map(str, sorted(tr.punctured_set))) + "\n")
    if tr.T_tilde is not None:
        fh.write("T-TILDE\n" + "\n".join(_triples(tr.T_tilde)) + "\n")
    if tr.u:
        fh.write("SUPPORT\n" + " ".join(map(str, tr.u)) + "\n")
        fh.write("MULTIPLIER\n" + " ".join(map(str, tr.v)) + "\n")
    if tr.Pi_tilde is not None:
        fh.write("PI-TILDE\n" + "\n".join(_triples(tr.Pi_tilde)) + "\n")
        fh.write("R-A\n" + " ".join(map(str, tr.a)) + "\n")
        fh.write("R-B\n" + " ".join(map(str, tr.b)) + "\n")
    fh.write(f"CHALLENGES-OK\n{tr.challenges_ok}\n")


# --------------------------------------------------------------------------
# fallback for degree-2 positions that no degree-1 position helps eliminate


def _coefficients(grs: GrsCode, g: np.ndarray) -> np.ndarray:
    q = grs.q
    V = vandermonde(grs.x, grs.k, q) * np.asarray(grs.y) % q
    return solve_linear(V.T, g, q)


def fallback_remaining_degree2(C: LinearCode, J2_remaining, tr: AttackTranscript, rng=None):
    """Puncture the leftover degree-2 positions, recover the punctured code's
    structure, then describe each punctured column as A P(x1) + B P(x2) plus a
    multiple of the hidden functional, with x1, x2 unused support points.
    Returns (grs, Pi, a, b) describing C itself."""
    q, n, kap = C.q, C.n, C.k
    P = sorted(J2_remaining)
    if not P:
        return None
    keep = [j for j in range(n) if j not in set(P)]
    Cp = puncture(C, P)
    if Cp.k != kap:
        raise AttackError("fallback", "degree-1 positions contain no information set: unrecoverable configuration")
    try:
        st = rank_one_strip(Cp, rng)
    except RecoveryError as exc:
        raise AttackError("fallback", f"punctured code has no rank-one GRS structure ({exc})") from exc
    G2, a2, b2 = st.grs, st.a, st.b
    # express each basis codeword of C through the punctured parametrisation
    denom = pow((1 + int(a2 @ b2)) % q, q - 2, q)
    F, tau = [], []
    for row in C.generator:
        c = row[keep]
        g = (c - (int(c @ b2) * denom % q) * a2) % q
        coeffs = _coefficients(G2, g)
        if coeffs is None:
            raise AttackError("fallback", "punctured codeword outside the recovered code")
        F.append(coeffs)
        tau.append(int(g @ b2) % q)
    F = np.array(F, dtype=np.int64)
    tau = np.array(tau, dtype=np.int64)
    used = set(G2.x)
    # candidate points: unused field elements and the point at infinity, whose
    # evaluation is the leading coefficient
    cands: list[int | None] = [z for z in range(q) if z not in used] + [None]
    pows = np.array([[pow(z, e, q) if z is not None else int(e == kap - 1) for z in cands]
                     for e in range(kap)], dtype=np.int64)
    ev = F @ pows % q  # kap x len(cands)
    columns: dict[int, tuple[list[tuple[int | None, int]], int]] = {}
    for p in P:
        target = C.generator[:, p]
        sol = None
        for s in range(len(cands)):
            x = solve_linear(np.stack([ev[:, s], tau], axis=1), target, q)
            if x is not None:
                sol = [(cands[s], int(x[0]))], int(x[1])
                break
        for s in range(len(cands)) if sol is None else ():
            for t in range(s + 1, len(cands)):
                x = solve_linear(np.stack([ev[:, s], ev[:, t], tau], axis=1), target, q)
                if x is not None:
                    sol = [(cands[s], int(x[0])), (cands[t], int(x[1]))], int(x[2])
                    break
            if sol is not None:
                break
        if sol is None:
            raise AttackError("fallback", f"column {p} is not a combination of two evaluations")
        columns[p] = sol
        tr.note(f"fallback column {p}: points {[('inf' if z is None else z) for z, _ in sol[0]]}")
    points = sorted({z for terms, _ in columns.values() for z, _ in terms}, key=lambda z: (z is None, z))
    if len(points) != len(P):
        raise AttackError("fallback", f"{len(points)} new support points for {len(P)} punctured positions")
    slot = dict(zip(points, P))
    x = np.zeros(n, dtype=np.int64)
    y = np.ones(n, dtype=np.int64)
    x[keep] = G2.x
    y[keep] = G2.y
    for z, p in slot.items():
        x[p] = 0 if z is None else z
    if None in slot:
        # move infinity to 0 via x -> 1/(x - w); finite multipliers pick up (x - w)^(kap-1)
        finite = set(G2.x) | {z for z in points if z is not None}
        w = next(z for z in range(q) if z not in finite)
        inf_pos = slot[None]
        for i in range(n):
            if i == inf_pos:
                continue
            d = (int(x[i]) - w) % q
            y[i] = y[i] * pow(d, kap - 1, q) % q
            x[i] = pow(d, q - 2, q)
        x[inf_pos] = 0
        y[inf_pos] = 1
    Pi = np.zeros((n, n), dtype=np.int64)
    Pi[keep, keep] = 1
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    a[keep] = a2
    b[keep] = b2
    for p, (terms, m) in columns.items():
        for z, coef in terms:
            Pi[p, slot[z]] = coef % q
        a[p] = m % q
    grs = GrsCode(q, tuple(int(v) for v in x), tuple(int(v) for v in y), kap)
    return grs, Pi, a, b


# --------------------------------------------------------------------------
# driver


def _subset_sizes(C: LinearCode, n: int, k: int, m, rng, tr: AttackTranscript) -> tuple[int, ...]:
    if m is not None:
        rep = feasibility(n, k, m)
        sizes = tuple(a for a in rep.feasible_a_range if a < C.k)
        if sizes:
            tr.note(f"subset sizes from feasibility: {sizes}")
            return sizes
        tr.note("feasibility interval empty; scanning subset sizes")
    sizes = scan_subset_sizes(C, rng)
    tr.note(f"subset sizes from scan: {sizes}")
    return sizes


def complete_attack(C_pub: LinearCode, s_max: int = 20, rng=None, *, m=None, G_pub=None,
                    t_pub: int | None = None, challenges: int = 50) -> AttackTranscript:
    """Recover an equivalent secret key from the public code. ``m`` is the public
    density (used for subset sizes and t_pub); ``G_pub`` the published generator
    the recovered key must invert (default: canonical generator of C_pub).
    Failures raise AttackError carrying the partial transcript."""
    tr = AttackTranscript(C_pub.q, C_pub.n, C_pub.k)
    try:
        return _run_attack(tr, C_pub, s_max, rng, m, G_pub, t_pub, challenges)
    except AttackError as exc:
        exc.transcript = tr
        tr.note(f"failed at stage {exc.stage}: {exc.message}")
        raise


def _run_attack(tr: AttackTranscript, C_pub: LinearCode, s_max: int, rng, m, G_pub,
                t_pub: int | None, challenges: int) -> AttackTranscript:
    rng = np.random.default_rng(rng)
    q, n, k = C_pub.q, C_pub.n, C_pub.k
    G_pub = C_pub.generator if G_pub is None else np.asarray(G_pub, dtype=np.int64) % q
    C = code_dual(C_pub)
    clock = time.perf_counter()

    def lap(name: str):
        nonlocal clock
        now = time.perf_counter()
        tr.timings[name] = now - clock
        clock = now

    # step 0: distinguisher
    sizes = _subset_sizes(C, n, k, m, rng, tr)
    tr.subset_sizes = sizes
    fired = 0
    if sizes:
        for _ in range(5):
            fired += shortened_trial(C, _draw(rng, list(range(n)), int(rng.choice(sizes)))).distinguishable
    tr.note(f"distinguisher fired on {fired}/5 subsets")
    if not fired:
        raise AttackError("distinguish", "not distinguishable")
    lap("distinguish")

    # step 1: classification
    if s_max < 1:
        raise AttackError("classify", "no classification trials (s_max < 1)")
    cls = classify_positions(C, s_max, rng, sizes)
    expected = None if m is None else int((Fraction(m) - 1) * n)
    for _ in range(2):
        if expected is None or len(cls.J2) >= expected:
            break
        more = classify_positions(C, s_max, rng, sizes)
        J2 = cls.J2 | more.J2
        cls = PositionClassification(frozenset(range(n)) - J2, J2)
    tr.classification = cls
    tr.note(f"classified |J2|={len(cls.J2)}: {sorted(cls.J2)}")
    lap("classify")

    # step 2: associate and eliminate, keeping C' = C T_tilde
    J1, J2 = set(cls.J1), set(cls.J2)
    M = identity(n)
    Ccur = C
    queue = sorted(J1)
    for sweep in range(2):
        while queue and J2:
            i1 = queue.pop(0)
            assoc = associated_degree2(Ccur, i1, J1, J2, s_max, rng, sizes)
            for i2 in sorted(assoc):
                try:
                    Cn, alpha = eliminate_degree2(Ccur, i1, i2, s_max, rng, sizes)
                except AttackError as exc:
                    tr.note(f"elimination ({i1},{i2}) failed: {exc.message}")
                    continue
                M = M @ elimination_matrix(n, alpha, i1, i2, q) % q
                Ccur = Cn
                J2.discard(i2)
                J1.add(i2)
                queue.append(i2)
                tr.eliminations.append((i1, i2, alpha))
                tr.note(f"eliminated {i2} via {i1} with alpha={alpha}")
                if span(C.generator @ M % q, q, n) != Ccur.space:
                    raise AttackError("eliminate", "loop invariant C' = C T_tilde violated")
        if not J2 or sweep:
            break
        queue = sorted(J1)
    tr.T_tilde = M
    lap("eliminate")

    # step 3: structure recovery
    if J2:
        tr.punctured_set = frozenset(J2)
        tr.note(f"fallback on remaining degree-2 positions {sorted(J2)}")
        grs, Pi, a, b = fallback_remaining_degree2(Ccur, J2, tr, rng)
        lap("fallback")
    else:
        try:
            st = rank_one_strip(Ccur, rng)
        except RecoveryError as exc:
            raise AttackError("strip", str(exc)) from exc
        grs, Pi, a, b = st.grs, identity(n), st.a, st.b
        lap("strip")
    tr.u, tr.v, tr.Pi_tilde, tr.a, tr.b = grs.x, grs.y, Pi, a % q, b % q
    if not tr.verify(C):
        raise AttackError("reconstruct", "recovered description does not compose to the public dual")

    # equivalent secret key: Q = T_tilde^-T (Pi + a^T b)
    Minv_T = inverse(M, q).T
    Qh = Minv_T @ ((Pi + tr.R_tilde) % q) % q
    if not is_invertible(Qh, q):
        raise AttackError("reconstruct", "recovered masking matrix is singular")
    That = Minv_T @ Pi % q
    alpha_h = a @ inverse(M, q) % q
    sec = grs.dual()
    W = sec.generator_matrix() @ inverse(Qh, q) % q
    rows = [solve_linear(G_pub.T, r, q) for r in W]
    if any(r is None for r in rows):
        raise AttackError("reconstruct", "recovered code does not match the public generator")
    S = np.array(rows, dtype=np.int64)
    if m is None:
        m = Fraction(n + len(cls.J2), n)
    params = BbcrsParams(q, n, k, Fraction(m))
    w = np.count_nonzero(That, axis=1)
    J2h = frozenset(int(i) for i in np.flatnonzero(w == 2))
    sk = BbcrsSecretKey(params, sec, S, That, alpha_h, b % q, frozenset(range(n)) - J2h, J2h)
    tr.recovered_key = sk
    tr._G_pub = G_pub
    lap("reconstruct")

    # challenge decryptions
    tp = params.t_pub if t_pub is None else t_pub
    ok = 0
    for _ in range(challenges):
        msg = rng.integers(0, q, size=k)
        c = (msg @ G_pub + random_error(n, tp, q, rng)) % q
        try:
            ok += bool(np.array_equal(decrypt_with(sec, sk.Q, sk.beta, S, G_pub, tp, c), msg))
        except RuntimeError:
            pass
    tr.challenges_ok = ok
    tr.note(f"challenge decryptions: {ok}/{challenges}")
    lap("verify")
    if ok != challenges:
        raise AttackError("verify", f"recovered key decrypted {ok}/{challenges} challenges")
    return tr
