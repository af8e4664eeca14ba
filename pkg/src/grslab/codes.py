"""Linear codes over GF(q): GRS codes, duals, star products, shortening,
puncturing and a Berlekamp-Welch decoder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .field_linalg import (
    PrimeField,
    SubspaceBasis,
    inv_vec,
    inverse,
    kernel,
    orthogonal,
    rank,
    solve_linear,
    span,
)


class CodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinearCode:
    space: SubspaceBasis

    @property
    def q(self) -> int:
        return self.space.q

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def k(self) -> int:
        return self.space.dim

    @property
    def generator(self) -> np.ndarray:
        return self.space.basis

    def __eq__(self, other):
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.space == other.space

    def __hash__(self):
        return hash(self.space)

    def __repr__(self):
        return f"LinearCode([{self.n}, {self.k}]_{self.q})"

    def __contains__(self, v) -> bool:
        return self.space.contains(np.asarray(v).reshape(1, -1))

    def contains_code(self, other: LinearCode) -> bool:
        return self.space.contains(other.generator)

    def encode(self, msg) -> np.ndarray:
        return np.asarray(msg, dtype=np.int64) @ self.generator % self.q

    @classmethod
    def from_generator(cls, G, q: int, n: int | None = None) -> LinearCode:
        G = np.asarray(G, dtype=np.int64)
        if n is None:
            n = G.shape[-1]
        return cls(span(G.reshape(-1, n) if G.size else np.zeros((0, n), np.int64), q, n))


@dataclass(frozen=True)
class GrsCode:
    """GRS_k(x, y) = {(y_1 p(x_1), ..., y_n p(x_n)) : deg p < k}."""

    q: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    k: int

    def __post_init__(self):
        PrimeField(self.q)
        n = len(self.x)
        if len(self.y) != n:
            raise CodeError("support and multiplier lengths differ")
        if not 1 <= self.k < n <= self.q:
            raise CodeError(f"need 1 <= k < n <= q, got k={self.k}, n={n}, q={self.q}")
        if len(set(v % self.q for v in self.x)) != n:
            raise CodeError("support entries must be pairwise distinct")
        if any(v % self.q == 0 for v in self.y):
            raise CodeError("multipliers must be nonzero")

    @property
    def n(self) -> int:
        return len(self.x)

    def generator_matrix(self) -> np.ndarray:
        return grs_generator(self.x, self.y, self.k, self.q)

    def encode(self, coeffs) -> np.ndarray:
        """Evaluate the polynomial with the given k coefficients (low first)."""
        return np.asarray(coeffs, dtype=np.int64) @ self.generator_matrix() % self.q

    def dual(self) -> GrsCode:
        """GRS_{n-k}(x, y') with y'_i = 1 / (y_i prod_{j != i} (x_i - x_j))."""
        q = self.q
        x = np.asarray(self.x, dtype=np.int64)
        w = []
        for i in range(self.n):
            d = 1
            for j in range(self.n):
                if j != i:
                    d = d * (int(x[i]) - int(x[j])) % q
            w.append(d * self.y[i] % q)
        return GrsCode(q, self.x, tuple(int(v) for v in inv_vec(np.array(w), q)), self.n - self.k)

    def square(self) -> GrsCode:
        y2 = tuple(v * v % self.q for v in self.y)
        return GrsCode(self.q, self.x, y2, min(2 * self.k - 1, self.n - 1))


def vandermonde(x, k: int, q: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64) % q
    V = np.ones((k, len(x)), dtype=np.int64)
    for i in range(1, k):
        V[i] = V[i - 1] * x % q
    return V


def grs_generator(x, y, k: int, q: int) -> np.ndarray:
    return vandermonde(x, k, q) * (np.asarray(y, dtype=np.int64) % q) % q


def grs_expand(G: GrsCode) -> LinearCode:
    return LinearCode(span(G.generator_matrix(), G.q))


def code_dual(C: LinearCode) -> LinearCode:
    return LinearCode(orthogonal(C.space))


def _pair_products(A: np.ndarray, B: np.ndarray | None, q: int) -> np.ndarray:
    if B is None:
        k = A.shape[0]
        iu, ju = np.triu_indices(k)
        return A[iu] * A[ju] % q
    return (A[:, None, :] * B[None, :, :] % q).reshape(-1, A.shape[1])


def star_product(A: LinearCode, B: LinearCode) -> LinearCode:
    if A.n != B.n or A.q != B.q:
        raise CodeError("star product needs codes of equal length over the same field")
    if A.k == 0 or B.k == 0:
        return zero_code(A.n, A.q)
    if A == B:
        return square_code(A)
    return LinearCode(span(_pair_products(A.generator, B.generator, A.q), A.q, A.n))


def square_code(A: LinearCode) -> LinearCode:
    if A.k == 0:
        return zero_code(A.n, A.q)
    S = LinearCode(span(_pair_products(A.generator, None, A.q), A.q, A.n))
    assert S.k <= min(A.n, A.k * (A.k + 1) // 2)
    return S


def square_dim(G: np.ndarray, q: int) -> int:
    """dim of the square of the row space of G (rows assumed independent)."""
    if G.shape[0] == 0:
        return 0
    return rank(_pair_products(np.asarray(G, dtype=np.int64), None, q), q)


def _positions(I: Iterable[int], n: int) -> list[int]:
    I = sorted(set(int(i) for i in I))
    if I and (I[0] < 0 or I[-1] >= n):
        raise CodeError(f"position out of range for length {n}: {I}")
    return I


def shorten_generator(G: np.ndarray, I: Sequence[int], q: int) -> np.ndarray:
    """Generator (rows independent, not canonical) of Sh_I(<G>), length n-|I|."""
    n = G.shape[1]
    I = _positions(I, n)
    keep = [j for j in range(n) if j not in set(I)]
    if not I:
        return G.copy()
    # codewords x G with (x G)_I = 0
    K = kernel(G[:, I].T, q)
    if K.dim == 0:
        return np.zeros((0, len(keep)), dtype=np.int64)
    return K.basis @ G[:, keep] % q


def shorten(C: LinearCode, I: Iterable[int]) -> LinearCode:
    I = _positions(I, C.n)
    return LinearCode(span(shorten_generator(C.generator, I, C.q), C.q, C.n - len(I)))


def puncture(C: LinearCode, I: Iterable[int]) -> LinearCode:
    I = set(_positions(I, C.n))
    keep = [j for j in range(C.n) if j not in I]
    return LinearCode(span(C.generator[:, keep], C.q, len(keep)))


def zero_code(n: int, q: int) -> LinearCode:
    return LinearCode(SubspaceBasis.zero(n, q))


def full_code(n: int, q: int) -> LinearCode:
    return LinearCode(SubspaceBasis.full(n, q))


def random_code(n: int, k: int, q: int, seed=None) -> LinearCode:
    if not 0 <= k <= n:
        raise CodeError("need 0 <= k <= n")
    rng = np.random.default_rng(seed)
    while True:
        G = rng.integers(0, q, size=(k, n))
        C = LinearCode(span(G, q, n))
        if C.k == k:
            return C


# --------------------------------------------------------------------------
# polynomials (coefficient arrays, low degree first)


def poly_trim(p: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(p)
    return p[: nz[-1] + 1] if nz.size else p[:0]


def poly_divmod(num: np.ndarray, den: np.ndarray, q: int):
    num = poly_trim(np.asarray(num, dtype=np.int64) % q).copy()
    den = poly_trim(np.asarray(den, dtype=np.int64) % q)
    if den.size == 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(int(den[-1]), q - 2, q)
    dd = den.size - 1
    if num.size <= dd:
        return np.zeros(0, dtype=np.int64), num
    quo = np.zeros(num.size - dd, dtype=np.int64)
    for i in range(num.size - 1, dd - 1, -1):
        c = num[i] * inv_lead % q
        if c:
            quo[i - dd] = c
            num[i - dd : i + 1] = (num[i - dd : i + 1] - c * den) % q
    return poly_trim(quo), poly_trim(num[:dd])


def poly_eval(p, pts, q: int) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.int64) % q
    out = np.zeros_like(pts)
    for c in reversed(list(np.asarray(p, dtype=np.int64))):
        out = (out * pts + c) % q
    return out


def bw_decode(G: GrsCode, received, t: int) -> np.ndarray | None:
    """Berlekamp-Welch: the codeword within distance t of ``received``, or
    None. One linear solve with a monic error locator of degree t."""
    q, n, k = G.q, G.n, G.k
    if t < 0 or 2 * t > n - k:
        raise CodeError(f"error budget t={t} exceeds unique decoding radius")
    r = np.asarray(received, dtype=np.int64) % q
    x = np.asarray(G.x, dtype=np.int64)
    s = r * inv_vec(np.asarray(G.y), q) % q
    # N(x_i) - s_i E(x_i) = 0 with E monic of degree t, deg N < k + t
    Vn = vandermonde(x, k + t, q).T
    Ve = vandermonde(x, t + 1, q).T
    M = np.concatenate([Vn, -(s[:, None] * Ve[:, :t]) % q], axis=1)
    rhs = s * Ve[:, t] % q
    sol = solve_linear(M, rhs, q)
    if sol is None:
        return None
    N = sol[: k + t]
    E = np.concatenate([sol[k + t :], [1]])
    P, rem = poly_divmod(N, E, q)
    if rem.size or P.size > k:
        return None
    c = poly_eval(P, x, q) * np.asarray(G.y) % q
    if np.count_nonzero((c - r) % q) > t:
        return None
    return c


class PencilDecoder:
    """Berlekamp-Welch specialised to received words r0 - s*d for many s.

    The numerator block of the key equation is eliminated once (left kernel
    H of the Vandermonde of degree k+t), leaving an (n-k-t) x t system in the
    monic error locator that is affine in s. N is then interpolated on the
    first k+t support points with a precomputed inverse Vandermonde."""

    def __init__(self, G: GrsCode, t: int):
        q, n, k = G.q, G.n, G.k
        if t < 0 or 2 * t > n - k:
            raise CodeError(f"error budget t={t} exceeds unique decoding radius")
        self.G, self.q, self.t, self.k = G, q, t, k
        self.x = np.asarray(G.x, dtype=np.int64)
        self.y = np.asarray(G.y, dtype=np.int64)
        self.inv_y = inv_vec(self.y, q)
        Vn = vandermonde(self.x, k + t, q).T
        self.H = kernel(Vn.T, q).basis
        self.Ve = vandermonde(self.x, t + 1, q).T
        self.Vn_inv = inverse(Vn[: k + t], q)

    def _block(self, r):
        q = self.q
        return self.H @ ((r * self.inv_y % q)[:, None] * self.Ve % q) % q

    def decode_family(self, r0, d, shifts: Iterable[int]):
        """Yield (s, codeword) for every s whose word r0 - s*d decodes."""
        q, t, k = self.q, self.t, self.k
        r0 = np.asarray(r0, dtype=np.int64) % q
        d = np.asarray(d, dtype=np.int64) % q
        A0, A1 = self._block(r0), self._block(d)
        for s in shifts:
            r = (r0 - s * d) % q
            A = (A0 - s * A1) % q
            if A.shape[0]:
                sol = solve_linear(A[:, :t], -A[:, t] % q, q)
                if sol is None:
                    continue
            else:
                sol = np.zeros(t, dtype=np.int64)
            E = np.concatenate([sol, [1]])
            m = self.Vn_inv.shape[0]
            Nvals = (r[:m] * self.inv_y[:m] % q) * (self.Ve[:m] @ E % q) % q
            N = self.Vn_inv @ Nvals % q
            P, rem = poly_divmod(N, E, q)
            if rem.size or P.size > k:
                continue
            c = poly_eval(P, self.x, q) * self.y % q
            if np.count_nonzero((c - r) % q) <= t:
                yield s, c

    def decode(self, r):
        for _, c in self.decode_family(r, np.zeros_like(np.asarray(r)), [0]):
            return c
        return None


def hamming_weight(v) -> int:
    return int(np.count_nonzero(np.asarray(v)))
