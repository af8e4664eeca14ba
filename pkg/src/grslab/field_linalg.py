"""Prime-field arithmetic and exact subspace algebra over GF(q).

Matrices are plain ``numpy`` int64 arrays with entries reduced to ``[0, q)``.
Every product of two reduced entries stays far below 2**63 for the moduli
used here, so accumulating a row of products before reducing is safe as long
as ``q * q * cols < 2**63``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(q: int) -> bool:
    """Deterministic Miller-Rabin, exact for q < 3.3e24."""
    if q < 2:
        return False
    for p in _MR_BASES:
        if q % p == 0:
            return q == p
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if self.q < 3 or self.q % 2 == 0 or not is_prime(self.q):
            raise FieldError(f"q={self.q} is not an odd prime")
        if self.q * self.q >= 2**40:
            # keeps q*q*cols inside int64 for any realistic matrix width
            raise FieldError(f"q={self.q} too large for int64 accumulation")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(self, int(value) % self.q)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return pow(a, self.q - 2, self.q)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.q

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)


@dataclass(frozen=True)
class FieldElement:
    """Scalar wrapper with operator overloading; the linear algebra below
    works on raw int arrays instead."""

    field: PrimeField = field(repr=False)
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("mixing elements of different fields")
            return other.value
        return int(other) % self.field.q

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._coerce(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._coerce(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(self.field, pow(self.value, e, self.field.q))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.value))

    def __int__(self):
        return self.value


# --------------------------------------------------------------------------
# dense matrices


def as_matrix(M, q: int, cols: int | None = None) -> np.ndarray:
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else np.zeros((0, cols or 0), dtype=np.int64)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return A % q


def matmul(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % q


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def inv_vec(v: np.ndarray, q: int) -> np.ndarray:
    """Entrywise inverse; raises on zero entries."""
    v = np.asarray(v, dtype=np.int64) % q
    if np.any(v == 0):
        raise ZeroDivisionError("vector has a zero entry")
    return np.array([pow(int(x), q - 2, q) for x in v], dtype=np.int64)


def _row_reduce(A: np.ndarray, q: int, ncols: int | None = None):
    """In-place Gauss-Jordan; returns (rank, pivots). Pivots searched only in
    the first ``ncols`` columns (row operations still span the full width)."""
    rows, cols = A.shape
    ncols = cols if ncols is None else ncols
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        inv = pow(int(A[r, c]), q - 2, q)
        if inv != 1:
            A[r] = A[r] * inv % q
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % q
        pivots.append(c)
        r += 1
    return r, pivots


def rank(M, q: int) -> int:
    A = as_matrix(M, q)
    if A.size == 0:
        return 0
    # eliminate along the shorter side
    if A.shape[0] > A.shape[1]:
        A = A.T.copy()
    return _row_reduce(A, q)[0]


def inverse(M, q: int) -> np.ndarray:
    A = as_matrix(M, q)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([A, identity(n)], axis=1)
    r, _ = _row_reduce(aug, q, ncols=n)
    if r < n:
        raise ZeroDivisionError("matrix is singular")
    return aug[:, n:].copy()


def is_invertible(M, q: int) -> bool:
    A = as_matrix(M, q)
    return A.shape[0] == A.shape[1] and rank(A, q) == A.shape[0]


# --------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Row space stored in reduced row-echelon form (canonical)."""

    q: int
    n: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    def __post_init__(self):
        self.basis.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return (
            self.q == other.q
            and self.n == other.n
            and self.basis.shape == other.basis.shape
            and bool(np.array_equal(self.basis, other.basis))
        )

    def __hash__(self):
        return hash((self.q, self.n, self.basis.tobytes()))

    def __repr__(self):
        return f"SubspaceBasis(q={self.q}, n={self.n}, dim={self.dim})"

    def contains(self, vectors) -> bool:
        V = as_matrix(vectors, self.q, self.n)
        if V.shape[0] == 0:
            return True
        return not reduce_against(self, V).any()

    def coordinates(self, v) -> np.ndarray | None:
        """Coefficients x with x @ basis == v, or None if v is outside."""
        v = np.asarray(v, dtype=np.int64) % self.q
        x = v[list(self.pivots)] if self.dim else np.zeros(0, dtype=np.int64)
        if not np.array_equal(x @ self.basis % self.q, v):
            return None
        return x

    @classmethod
    def zero(cls, n: int, q: int) -> SubspaceBasis:
        return cls(q, n, np.zeros((0, n), dtype=np.int64), ())

    @classmethod
    def full(cls, n: int, q: int) -> SubspaceBasis:
        return cls(q, n, identity(n), tuple(range(n)))


def rref(M, q: int, cols: int | None = None) -> tuple[SubspaceBasis, int, tuple[int, ...]]:
    A = as_matrix(M, q, cols)
    n = A.shape[1]
    r, piv = _row_reduce(A, q)
    basis = SubspaceBasis(q, n, A[:r].copy(), tuple(piv))
    return basis, r, basis.pivots


def span(M, q: int, n: int | None = None) -> SubspaceBasis:
    return rref(M, q, n)[0]


def reduce_against(S: SubspaceBasis, V: np.ndarray) -> np.ndarray:
    """Residues of rows of V after clearing S's pivot columns."""
    V = np.array(V, dtype=np.int64) % S.q
    if S.dim:
        V = (V - V[:, list(S.pivots)] @ S.basis) % S.q
    return V


def kernel(M, q: int, cols: int | None = None) -> SubspaceBasis:
    """Right kernel {x : M x^T = 0}, as a row space."""
    A = as_matrix(M, q, cols)
    n = A.shape[1]
    R, r, piv = rref(A, q)
    free = [c for c in range(n) if c not in set(piv)]
    if not free:
        return SubspaceBasis.zero(n, q)
    K = np.zeros((len(free), n), dtype=np.int64)
    B = R.basis
    for t, f in enumerate(free):
        K[t, f] = 1
        if r:
            K[t, list(piv)] = -B[:, f] % q
    return span(K, q)


def subspace_sum(A: SubspaceBasis, B: SubspaceBasis) -> SubspaceBasis:
    _check_same(A, B)
    return span(np.concatenate([A.basis, B.basis]), A.q, A.n)


def subspace_intersection(A: SubspaceBasis, B: SubspaceBasis) -> SubspaceBasis:
    _check_same(A, B)
    if A.dim == 0 or B.dim == 0:
        return SubspaceBasis.zero(A.n, A.q)
    # x A = y B  <=>  (x, -y) in left kernel of [A; B]
    stacked = np.concatenate([A.basis, B.basis]).T
    K = kernel(stacked, A.q)
    if K.dim == 0:
        return SubspaceBasis.zero(A.n, A.q)
    coeffs = K.basis[:, : A.dim]
    return span(coeffs @ A.basis % A.q, A.q, A.n)


def orthogonal(S: SubspaceBasis) -> SubspaceBasis:
    """Dual with respect to the standard inner product."""
    if S.dim == 0:
        return SubspaceBasis.full(S.n, S.q)
    return kernel(S.basis, S.q)


def solve_linear(M, rhs, q: int) -> np.ndarray | None:
    """Some x with M x = rhs, or None when inconsistent."""
    A = as_matrix(M, q)
    b = np.asarray(rhs, dtype=np.int64).reshape(-1) % q
    if b.shape[0] != A.shape[0]:
        raise ValueError("rhs length does not match the number of rows")
    n = A.shape[1]
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    r, piv = _row_reduce(aug, q, ncols=n)
    if np.any(aug[r:, n]):
        return None
    x = np.zeros(n, dtype=np.int64)
    if r:
        x[list(piv)] = aug[:r, n]
    return x


def _check_same(A: SubspaceBasis, B: SubspaceBasis):
    if A.n != B.n or A.q != B.q:
        raise ValueError(f"ambient mismatch: ({A.n}, {A.q}) vs ({B.n}, {B.q})")
