"""Structure recovery for GRS-like codes: support recovery (Sidelnikov-Shestakov
style), multiplier recovery, lifting a GRS subcode through its square, and
stripping a rank-one perturbation c = p + <p, b> a."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import (
    GrsCode,
    LinearCode,
    code_dual,
    grs_expand,
    shorten,
    shorten_generator,
    square_code,
    square_dim,
)
from .field_linalg import (
    SubspaceBasis,
    kernel,
    orthogonal,
    solve_linear,
    span,
    subspace_sum,
)

INF = (1, 0)


class RecoveryError(RuntimeError):
    """The code does not have the expected algebraic structure."""


# --------------------------------------------------------------------------
# projective line helpers; a point is (num, den) normalised to den in {0, 1}


def _pnorm(num: int, den: int, q: int) -> tuple[int, int]:
    num, den = num % q, den % q
    if den == 0:
        if num == 0:
            raise RecoveryError("degenerate projective point")
        return INF
    return num * pow(den, q - 2, q) % q, 1


def _cross_normaliser(r1, r2, r3, q: int):
    """Moebius map sending r1 -> 0, r2 -> 1, r3 -> inf (all finite, distinct)."""
    if len({r1, r2, r3}) < 3:
        raise RecoveryError("anchor images collide")
    a, b = (r2 - r3) % q, (r2 - r1) % q

    def f(z: int):
        return _pnorm((z - r1) * a, (z - r3) * b, q)

    return f


# --------------------------------------------------------------------------
# support recovery


def _ratio_round(G: np.ndarray, positions: list[int], anchors: tuple[int, int, int],
                 q: int, rng) -> dict[int, tuple[int, int]]:
    """G generates a 2-dim GRS code on ``positions``. Returns normalised
    projective coordinates for every position."""
    if G.shape[0] != 2:
        raise RecoveryError(f"shortened code has dimension {G.shape[0]}, expected 2")
    for _ in range(64):
        lam = rng.integers(0, q, size=2)
        c = lam @ G % q
        if np.all(c):
            break
    else:
        raise RecoveryError("no full-support codeword in a 2-dim shortened code")
    other = G[1] if np.any((G[0] * c[0] - c * G[0][0]) % q) else G[0]
    if not np.any((other * c[0] - c * other[0]) % q):
        raise RecoveryError("2-dim code generated by proportional vectors")
    inv = np.array([pow(int(v), q - 2, q) for v in c], dtype=np.int64)
    ratio = other * inv % q
    idx = {p: t for t, p in enumerate(positions)}
    f = _cross_normaliser(*(int(ratio[idx[a]]) for a in anchors), q)
    return {p: f(int(ratio[idx[p]])) for p in positions}


def projective_support(C: LinearCode, anchors: tuple[int, int, int] | None = None,
                       rng=None, positions: list[int] | None = None) -> dict[int, tuple[int, int]]:
    """Support of a GRS code up to the Moebius map fixed by sending the three
    anchors to 0, 1, inf. ``positions`` labels the coordinates of C (default
    0..n-1); anchors are given as labels."""
    rng = np.random.default_rng(rng)
    q, n = C.q, C.n
    labels = list(range(n)) if positions is None else list(positions)
    if anchors is None:
        anchors = tuple(labels[:3])
    k = C.k
    D = C if 2 * k <= n else code_dual(C)
    kd = D.k
    if kd < 2 or n < 4:
        raise RecoveryError("support is not determined by a code of this dimension")
    loc = {lab: t for t, lab in enumerate(labels)}
    anchor_idx = [loc[a] for a in anchors]
    pts: dict[int, tuple[int, int]] = {}
    free = [t for t in range(n) if t not in anchor_idx]
    pending = set(free)
    rounds = 0
    while pending or rounds == 0:
        rounds += 1
        if rounds > 4 * n:
            raise RecoveryError("support recovery did not converge")
        # shorten at kd - 2 positions that are already placed, when possible
        pool = [t for t in free if t not in pending]
        if len(pool) < kd - 2:
            pool = free
        S = set(rng.choice(pool, size=kd - 2, replace=False).tolist()) if kd > 2 else set()
        keep = [t for t in range(n) if t not in S]
        Gs = shorten_generator(D.generator, sorted(S), q)
        got = _ratio_round(Gs, [labels[t] for t in keep], anchors, q, rng)
        for lab, pt in got.items():
            if lab in pts and pts[lab] != pt:
                raise RecoveryError("inconsistent support estimates across shortenings")
            pts[lab] = pt
        pending -= set(keep)
    if len(set(pts.values())) != len(pts):
        raise RecoveryError("recovered support points collide")
    return pts


def affine_support(pts: dict[int, tuple[int, int]], q: int) -> dict[int, int]:
    """Move a free point of the projective line to infinity."""
    finite = {p[0] for p in pts.values() if p != INF}
    if len(pts) > q:
        raise RecoveryError("more support points than field elements")
    if INF not in pts.values():
        return {lab: p[0] for lab, p in pts.items()}
    z = next(v for v in range(q) if v not in finite)
    return {lab: 0 if p == INF else pow((p[0] - z) % q, q - 2, q) for lab, p in pts.items()}


def recover_multipliers(C: LinearCode, x, k: int) -> tuple[int, ...] | None:
    """y with C inside GRS_k(x, y), via the reciprocals z = 1/y:
    sum_i h_i c_i z_i = 0 for h in the dual of GRS_k(x, 1) and c in C."""
    q, n = C.q, C.n
    if k >= n:
        return None
    H = GrsCode(q, tuple(x), (1,) * n, k).dual().generator_matrix()
    rows = (H[:, None, :] * C.generator[None, :, :] % q).reshape(-1, n)
    K = kernel(rows, q)
    for z in K.basis:
        if np.all(z):
            return tuple(int(pow(int(v), q - 2, q)) for v in z)
    if K.dim > 1:
        # a full-support combination exists generically; try random ones
        rng = np.random.default_rng(0)
        for _ in range(32):
            z = rng.integers(0, q, size=K.dim) @ K.basis % q
            if np.all(z):
                return tuple(int(pow(int(v), q - 2, q)) for v in z)
    return None


def sidelnikov_shestakov(C: LinearCode, rng=None) -> GrsCode:
    """A GRS representation (x, y, k) of C, or RecoveryError."""
    q, n, k = C.q, C.n, C.k
    if not 1 <= k < n:
        raise RecoveryError("need 1 <= dim < length")
    if n > q:
        raise RecoveryError("length exceeds field size")
    if min(k, n - k) == 1:
        x = tuple(range(n))
    else:
        x_map = affine_support(projective_support(C, rng=rng), q)
        x = tuple(x_map[i] for i in range(n))
    y = recover_multipliers(C, x, k)
    if y is None:
        raise RecoveryError("no multiplier vector fits the recovered support")
    G = GrsCode(q, x, y, k)
    if grs_expand(G) != C:
        raise RecoveryError("recovered GRS code differs from the input")
    return G


# --------------------------------------------------------------------------
# lifting a codimension <= 1 subcode of a GRS code


def _support_from_squares(B: LinearCode, k: int, rng) -> dict[int, int]:
    """Support of the GRS_k code containing B, read off squares of B or of
    shortenings of B when 2k - 1 >= n."""
    q, n = B.q, B.n
    # the square (dim 2k' - 1) must leave a dual of dim >= 2
    j = max(0, 2 * k - n + 1)
    if j == 0:
        sq = square_code(B)
        if sq.k != 2 * k - 1:
            raise RecoveryError(f"square has dim {sq.k}, expected {2 * k - 1}")
        return affine_support(projective_support(sq, rng=rng), q)
    perm = rng.permutation(n).tolist()
    anchors = tuple(perm[:3])
    rest = perm[3:]
    if len(rest) < 2 * j:
        raise RecoveryError("code too short to lift through shortened squares")
    pts: dict[int, tuple[int, int]] = {}
    for J in (rest[:j], rest[j : 2 * j]):
        keep = [t for t in range(n) if t not in set(J)]
        sq = square_code(shorten(B, J))
        if sq.k != 2 * (k - j) - 1:
            raise RecoveryError(f"shortened square has dim {sq.k}, expected {2 * (k - j) - 1}")
        got = projective_support(sq, anchors=anchors, rng=rng, positions=keep)
        for lab, pt in got.items():
            if lab in pts and pts[lab] != pt:
                raise RecoveryError("inconsistent support across shortened squares")
            pts[lab] = pt
    if len(pts) != n:
        raise RecoveryError("shortened squares did not cover every position")
    return affine_support(pts, q)


def wieschebrink_lift(B: LinearCode, k: int | None = None, rng=None) -> GrsCode:
    """The GRS_k code containing B (dim B >= k - 1). By default k is read off
    dim B^2 = 2k - 1."""
    rng = np.random.default_rng(rng)
    q, n = B.q, B.n
    if k is None:
        d = square_dim(B.generator, q)
        if d % 2 == 0 or d >= n:
            raise RecoveryError(f"square dimension {d} is not that of a GRS square")
        k = (d + 1) // 2
    if B.k < k - 1 or B.k > k:
        raise RecoveryError("subcode has the wrong dimension")
    x_map = _support_from_squares(B, k, rng)
    x = tuple(x_map[i] for i in range(n))
    y = recover_multipliers(B, x, k)
    if y is None:
        raise RecoveryError("no multiplier vector fits the recovered support")
    G = GrsCode(q, x, y, k)
    if not grs_expand(G).contains_code(B):
        raise RecoveryError("lifted GRS code does not contain the subcode")
    return G


# --------------------------------------------------------------------------
# rank-one stripping


@dataclass(frozen=True, eq=False)
class StrippedCode:
    """C = {g + <g, b> a : g in grs}."""

    grs: GrsCode
    a: np.ndarray
    b: np.ndarray

    def synthesize(self) -> LinearCode:
        q = self.grs.q
        G = self.grs.generator_matrix()
        return LinearCode.from_generator((G + np.outer(G @ self.b % q, self.a)) % q, q)


def _relation_functional(Bs: np.ndarray, cols: list[int], q: int) -> SubspaceBasis:
    """Functionals l on the shortened code with B_phi(l, column_j) = 0 for
    every quadratic relation phi and every chosen column j."""
    kp = Bs.shape[0]
    iu, ju = np.triu_indices(kp)
    P = Bs[iu] * Bs[ju] % q
    Lam = kernel(P.T, q).basis
    if Lam.shape[0] == 0:
        return SubspaceBasis.full(kp, q)
    Eu = np.zeros((len(iu), kp), dtype=np.int64)
    Eu[np.arange(len(iu)), iu] = 1
    Ev = np.zeros((len(iu), kp), dtype=np.int64)
    Ev[np.arange(len(iu)), ju] = 1
    blocks = []
    for j in cols:
        col = Bs[:, j]
        blocks.append(((Lam * col[ju]) % q) @ Eu + ((Lam * col[iu]) % q) @ Ev)
    return kernel(np.concatenate(blocks) % q, q)


def _hidden_kernel(C: LinearCode, I: list[int], rng) -> np.ndarray | None:
    """Codewords of C vanishing on I and on the hidden functional, as
    full-length vectors; None when this shortening does not isolate it."""
    q, n = C.q, C.n
    keep = [t for t in range(n) if t not in set(I)]
    Bs = shorten_generator(C.generator, I, q)
    kp = Bs.shape[0]
    if kp < 3 or square_dim(Bs, q) >= len(keep):
        return None
    order = rng.permutation(len(keep)).tolist()
    for m in (3, 4, 6):
        L = _relation_functional(Bs, order[:m], q)
        if L.dim == 1:
            break
        if L.dim == 0:
            return None
    else:
        return None
    Z = kernel(L.basis, q).basis
    V = Z @ Bs % q
    ext = np.zeros((V.shape[0], n), dtype=np.int64)
    ext[:, keep] = V
    return ext


def rank_one_strip(C: LinearCode, rng=None, max_shortenings: int = 40) -> StrippedCode:
    """Write C as {g + <g, b> a : g in GRS}.

    Shortened copies of C satisfy many quadratic relations; a functional that
    pairs with a coordinate form to zero under all of them is (up to scale)
    the hidden map g -> <g, b>. Its kernels, summed over several shortenings,
    give B = C meet G, whose square reveals G.
    """
    rng = np.random.default_rng(rng)
    q, n, kap = C.q, C.n, C.k
    # an unperturbed GRS code needs no stripping; the recovery checks itself
    try:
        G = sidelnikov_shestakov(C, rng)
        return StrippedCode(G, np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))
    except RecoveryError:
        pass
    # smallest shortening whose square is expected to stay below full length
    a_s = max(1, (3 * kap - 1 - n) // 2 + 1)
    if kap - a_s < 3:
        raise RecoveryError("code too small for rank-one stripping")
    B = SubspaceBasis.zero(n, q)
    tries = 0
    for tries in range(max_shortenings):
        a = a_s + (tries % 2)
        I = sorted(rng.choice(n, size=a, replace=False).tolist())
        ext = _hidden_kernel(C, I, rng)
        if ext is None:
            continue
        B = subspace_sum(B, span(ext, q, n))
        if B.dim >= kap - 1:
            break
    if B.dim != kap - 1:
        raise RecoveryError(f"hidden subcode has dim {B.dim}, expected {kap - 1}")
    Bc = LinearCode(B)
    G = wieschebrink_lift(Bc, kap, rng)
    Gc = grs_expand(G)
    if not Gc.contains_code(Bc) or Gc == C:
        raise RecoveryError("lifted code is inconsistent with C")
    # g1 in G outside B, w in C outside G; a = w - g1 and <., b> = 1 on g1, 0 on B
    g1 = next(g for g in Gc.generator if not B.contains(g))
    w = next(c for c in C.generator if not Gc.space.contains(c))
    a = (w - g1) % q
    M = np.concatenate([B.basis, g1.reshape(1, -1)])
    rhs = np.zeros(M.shape[0], dtype=np.int64)
    rhs[-1] = 1
    b = solve_linear(M, rhs, q)
    if b is None:
        raise RecoveryError("no functional matches the hidden map")
    if (1 + int(a @ b)) % q == 0:
        h = next(h for h in orthogonal(Gc.space).basis if int(a @ h) % q)
        b = (b + h) % q
    out = StrippedCode(G, a, b)
    if out.synthesize() != C:
        raise RecoveryError("re-synthesised code differs from C")
    return out
