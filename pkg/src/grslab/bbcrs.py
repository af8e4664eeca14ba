"""The BBCRS McEliece variant: G_pub = S^-1 G_sec (T + R)^-1 with T sparse of
average row weight m in (1, 2] and R = alpha^T beta of rank one."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

import numpy as np

from .codes import GrsCode, LinearCode, PencilDecoder, bw_decode, hamming_weight, vandermonde
from .field_linalg import PrimeField, inverse, is_invertible, matmul, rank, solve_linear

MAX_RESAMPLE = 100


class ParameterError(ValueError):
    pass


class FormatError(ValueError):
    pass


class DecryptionError(RuntimeError):
    pass


def parse_density(m) -> Fraction:
    if isinstance(m, Fraction):
        return m
    if isinstance(m, str):
        if "/" not in m:
            raise ParameterError(f"density must be given as num/den, got {m!r}")
        num, den = m.split("/", 1)
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"bad density {m!r}") from exc
    if isinstance(m, int):
        return Fraction(m)
    raise ParameterError("density must be an exact rational")


@dataclass(frozen=True)
class BbcrsParams:
    q: int
    n: int
    k: int
    m: Fraction
    z: int = 1
    construction: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "m", parse_density(self.m))
        try:
            PrimeField(self.q)
        except ValueError as exc:
            raise ParameterError(str(exc)) from exc
        if not 1 <= self.k < self.n <= self.q:
            raise ParameterError(f"need 1 <= k < n <= q, got q={self.q} n={self.n} k={self.k}")
        if not 1 < self.m <= 2:
            raise ParameterError(f"density m={self.m} must satisfy 1 < m <= 2")
        if self.z != 1:
            raise ParameterError("only rank-one R (z=1) is supported")
        if self.construction not in ("A", "B"):
            raise ParameterError(f"unknown T construction {self.construction!r}")

    @property
    def t(self) -> int:
        return (self.n - self.k) // 2

    @property
    def n_degree2(self) -> int:
        """floor((m - 1) n): number of weight-2 rows of T."""
        return int((self.m - 1) * self.n)

    @property
    def delta_t(self) -> int:
        t = self.t
        return t - int(Fraction(t) / self.m)

    @property
    def t_pub(self) -> int:
        return int(Fraction(self.n - self.k) / (2 * self.m))

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def header(self) -> str:
        return (
            f"BBCRS v1 q={self.q} n={self.n} k={self.k} z={self.z} "
            f"m={self.m.numerator}/{self.m.denominator}"
        )


@dataclass(frozen=True, eq=False)
class BbcrsSecretKey:
    params: BbcrsParams
    grs: GrsCode  # secret code C_sec, dimension k
    S: np.ndarray
    T: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    J1: frozenset[int] = field(default_factory=frozenset)
    J2: frozenset[int] = field(default_factory=frozenset)

    @property
    def R(self) -> np.ndarray:
        return np.outer(self.alpha, self.beta) % self.params.q

    @property
    def Q(self) -> np.ndarray:
        return (self.T + self.R) % self.params.q

    def public_generator(self) -> np.ndarray:
        q = self.params.q
        return matmul(matmul(inverse(self.S, q), self.grs.generator_matrix(), q), inverse(self.Q, q), q)

    def public_key(self) -> BbcrsPublicKey:
        return BbcrsPublicKey(self.params, self.public_generator())

    def columns_of(self, i: int) -> tuple[int, ...]:
        """j(i): nonzero columns of row i of T."""
        return tuple(int(j) for j in np.flatnonzero(self.T[i]))


@dataclass(frozen=True, eq=False)
class BbcrsPublicKey:
    params: BbcrsParams
    G_pub: np.ndarray

    @property
    def t_pub(self) -> int:
        return self.params.t_pub

    def code(self) -> LinearCode:
        return LinearCode.from_generator(self.G_pub, self.params.q)


# --------------------------------------------------------------------------
# sparse matrix T


def _scaled_permutation(n: int, q: int, rng) -> tuple[np.ndarray, np.ndarray]:
    perm = rng.permutation(n)
    T = np.zeros((n, n), dtype=np.int64)
    T[np.arange(n), perm] = rng.integers(1, q, size=n)
    return T, perm


def build_T_construction_A(params: BbcrsParams, rng) -> tuple[np.ndarray, frozenset, frozenset]:
    """Scaled permutation plus one extra entry in each of floor((m-1)n) rows,
    all extra entries placed in a random column set of size delta_t."""
    rng = np.random.default_rng(rng)
    n, q = params.n, params.q
    ell, dt = params.n_degree2, params.delta_t
    if ell > 0 and dt == 0:
        raise ParameterError("delta_t = 0: no column available for the second entries")
    for _ in range(MAX_RESAMPLE):
        T, perm = _scaled_permutation(n, q, rng)
        cols = rng.choice(n, size=dt, replace=False) if dt else np.zeros(0, dtype=np.int64)
        J2 = rng.choice(n, size=ell, replace=False) if ell else np.zeros(0, dtype=np.int64)
        ok = True
        for i in J2:
            choices = [int(j) for j in cols if j != perm[i]]
            if not choices:
                ok = False
                break
            T[i, choices[rng.integers(len(choices))]] = rng.integers(1, q)
        if ok:
            J2s = frozenset(int(i) for i in J2)
            return T, frozenset(range(n)) - J2s, J2s
    raise ParameterError("could not place second entries (delta_t too small)")


def build_T_construction_B(params: BbcrsParams, rng) -> tuple[np.ndarray, frozenset, frozenset]:
    """T = D1 P1 + D2 P2 with non-overlapping supports; D2 has floor((m-1)n)
    nonzero diagonal entries. Row and column weights are at most 2."""
    rng = np.random.default_rng(rng)
    n, q = params.n, params.q
    ell = params.n_degree2
    for _ in range(MAX_RESAMPLE):
        T, perm1 = _scaled_permutation(n, q, rng)
        perm2 = rng.permutation(n)
        J2 = rng.choice(n, size=ell, replace=False) if ell else np.zeros(0, dtype=np.int64)
        if np.any(perm1[J2] == perm2[J2]):
            continue
        T[J2, perm2[J2]] = rng.integers(1, q, size=len(J2))
        J2s = frozenset(int(i) for i in J2)
        return T, frozenset(range(n)) - J2s, J2s
    raise ParameterError("construction B: overlapping supports after max resampling")


def degree1_information_set(grs: GrsCode, T: np.ndarray, J1) -> bool:
    """Do the degree-1 positions carry an information set of C_sec^perp T^T?"""
    q = grs.q
    D = matmul(grs.dual().generator_matrix(), T.T, q)
    cols = sorted(J1)
    return rank(D[:, cols], q) == D.shape[0]


def keygen(params: BbcrsParams, seed=None, *, T=None, require_information_set: bool = True):
    """Returns (secret_key, public_key).

    ``T`` may be supplied (rows of weight 1 or 2) to build adversarial keys.
    ``require_information_set=False`` allows densities beyond 1 + R, used for
    negative controls only.
    """
    rng = np.random.default_rng(seed)
    q, n, k = params.q, params.n, params.k
    if require_information_set and params.m > 1 + params.rate:
        raise ParameterError(
            f"m={params.m} > 1 + R: degree-1 positions cannot hold an information set"
        )
    builder = build_T_construction_A if params.construction == "A" else build_T_construction_B
    for _ in range(MAX_RESAMPLE):
        x = tuple(int(v) for v in rng.choice(q, size=n, replace=False))
        y = tuple(int(v) for v in rng.integers(1, q, size=n))
        grs = GrsCode(q, x, y, k)
        if T is None:
            Tm, J1, J2 = builder(params, rng)
        else:
            Tm = np.asarray(T, dtype=np.int64) % q
            weights = np.count_nonzero(Tm, axis=1)
            if np.any((weights < 1) | (weights > 2)):
                raise ParameterError("supplied T must have rows of weight 1 or 2")
            J2 = frozenset(int(i) for i in np.flatnonzero(weights == 2))
            J1 = frozenset(range(n)) - J2
        if not is_invertible(Tm, q):
            continue
        if require_information_set and not degree1_information_set(grs, Tm, J1):
            continue
        alpha = rng.integers(1, q, size=n)
        beta = rng.integers(1, q, size=n)
        if not is_invertible((Tm + np.outer(alpha, beta)) % q, q):
            continue
        S = rng.integers(0, q, size=(k, k))
        if not is_invertible(S, q):
            continue
        sk = BbcrsSecretKey(params, grs, S % q, Tm, alpha, beta, J1, J2)
        return sk, sk.public_key()
    raise ParameterError("key generation failed after max resampling")


# --------------------------------------------------------------------------
# encryption / decryption


def random_error(n: int, weight: int, q: int, rng) -> np.ndarray:
    e = np.zeros(n, dtype=np.int64)
    pos = rng.choice(n, size=weight, replace=False)
    e[pos] = rng.integers(1, q, size=weight)
    return e


def encrypt(pk: BbcrsPublicKey, message, rng=None, *, weight: int | None = None, return_error=False):
    """c = m G_pub + e with wt(e) = weight (default t_pub)."""
    rng = np.random.default_rng(rng)
    q, n, k = pk.params.q, pk.params.n, pk.params.k
    msg = np.asarray(message, dtype=np.int64) % q
    if msg.shape != (k,):
        raise ValueError(f"message must have length {k}")
    w = pk.t_pub if weight is None else weight
    if not 0 <= w <= n:
        raise ValueError("bad error weight")
    e = random_error(n, w, q, rng)
    c = (msg @ pk.G_pub + e) % q
    return (c, e) if return_error else c


def decode_message(grs: GrsCode, received, t: int) -> np.ndarray | None:
    """Coefficient vector (length grs.k) of the decoded polynomial, or None."""
    c = bw_decode(grs, received, t)
    if c is None:
        return None
    q = grs.q
    # c = coeffs @ V * y, solve for coeffs
    V = vandermonde(grs.x, grs.k, q) * np.asarray(grs.y) % q
    return solve_linear(V.T, c, q)


def decrypt_with(grs: GrsCode, Q: np.ndarray, beta: np.ndarray, S: np.ndarray, G_pub: np.ndarray,
                 t_pub: int, ciphertext) -> np.ndarray:
    """Generic decryption given a GRS code with C_pub = S^-1 grs Q^-1 and
    Q = T + alpha^T beta. Tries every guess s*beta of e R."""
    q = grs.q
    c = np.asarray(ciphertext, dtype=np.int64) % q
    if c.shape != (G_pub.shape[1],):
        raise DecryptionError("ciphertext has the wrong length")
    t = (grs.n - grs.k) // 2
    V = vandermonde(grs.x, grs.k, q) * np.asarray(grs.y) % q
    dec = PencilDecoder(grs, t)
    for _, word in dec.decode_family(c @ Q % q, beta, range(q)):
        coeffs = solve_linear(V.T, word, q)
        msg = coeffs @ S % q
        if hamming_weight((c - msg @ G_pub) % q) <= t_pub:
            return msg
    raise DecryptionError("no guess of e*R decodes to a consistent message")


def decrypt(sk: BbcrsSecretKey, ciphertext, G_pub: np.ndarray | None = None) -> np.ndarray:
    G_pub = sk.public_generator() if G_pub is None else G_pub
    return decrypt_with(sk.grs, sk.Q, sk.beta, sk.S, G_pub, sk.params.t_pub, ciphertext)


# --------------------------------------------------------------------------
# text serialization


def _row(v) -> str:
    return " ".join(str(int(a)) for a in np.asarray(v).reshape(-1))


def parse_header(line: str) -> BbcrsParams:
    parts = line.split()
    if len(parts) < 2 or parts[0] != "BBCRS" or parts[1] != "v1":
        raise FormatError(f"bad header line: {line!r}")
    fields = {}
    for p in parts[2:]:
        if "=" not in p:
            raise FormatError(f"bad header field {p!r}")
        key, val = p.split("=", 1)
        fields[key] = val
    try:
        return BbcrsParams(int(fields["q"]), int(fields["n"]), int(fields["k"]),
                           parse_density(fields["m"]), int(fields.get("z", 1)),
                           fields.get("construction", "A"))
    except KeyError as exc:
        raise FormatError(f"header missing field {exc}") from exc


def _sections(lines: list[str], names: set[str]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    current = None
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln in names:
            current = ln
            out[current] = []
        elif current is None:
            raise FormatError(f"data outside a section: {ln!r}")
        else:
            out[current].append(ln)
    return out


def _ints(line: str, expect: int | None = None) -> list[int]:
    try:
        vals = [int(v) for v in line.split()]
    except ValueError as exc:
        raise FormatError(f"non-integer data: {line!r}") from exc
    if expect is not None and len(vals) != expect:
        raise FormatError(f"expected {expect} integers, got {len(vals)}")
    return vals


def dump_public_key(pk: BbcrsPublicKey, fh: TextIO):
    fh.write(pk.params.header() + "\n")
    fh.write("GPUB\n")
    for r in pk.G_pub:
        fh.write(_row(r) + "\n")


def load_public_key(fh: TextIO) -> BbcrsPublicKey:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty key file")
    params = parse_header(lines[0])
    sec = _sections(lines[1:], {"GPUB"})
    if "GPUB" not in sec:
        raise FormatError("public key lacks GPUB section")
    rows = [_ints(ln, params.n) for ln in sec["GPUB"]]
    if len(rows) != params.k:
        raise FormatError(f"GPUB has {len(rows)} rows, expected {params.k}")
    return BbcrsPublicKey(params, np.array(rows, dtype=np.int64) % params.q)


_SK_SECTIONS = {"GSEC-X", "GSEC-Y", "S", "T", "ALPHA", "BETA"}


def dump_secret_key(sk: BbcrsSecretKey, fh: TextIO):
    p = sk.params
    fh.write(p.header() + "\n")
    fh.write("GSEC-X\n" + _row(sk.grs.x) + "\n")
    fh.write("GSEC-Y\n" + _row(sk.grs.y) + "\n")
    fh.write("S\n")
    for r in sk.S:
        fh.write(_row(r) + "\n")
    fh.write("T\n")
    for i, j in zip(*np.nonzero(sk.T)):
        fh.write(f"{i} {j} {int(sk.T[i, j])}\n")
    fh.write("ALPHA\n" + _row(sk.alpha) + "\n")
    fh.write("BETA\n" + _row(sk.beta) + "\n")


def load_secret_key(fh: TextIO) -> BbcrsSecretKey:
    lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty key file")
    p = parse_header(lines[0])
    sec = _sections(lines[1:], _SK_SECTIONS)
    missing = _SK_SECTIONS - sec.keys()
    if missing:
        raise FormatError(f"secret key lacks sections {sorted(missing)}")
    for name in ("GSEC-X", "GSEC-Y", "ALPHA", "BETA"):
        if len(sec[name]) != 1:
            raise FormatError(f"section {name} must be a single line")
    x = _ints(sec["GSEC-X"][0], p.n)
    y = _ints(sec["GSEC-Y"][0], p.n)
    S = np.array([_ints(ln, p.k) for ln in sec["S"]], dtype=np.int64)
    if S.shape != (p.k, p.k):
        raise FormatError("S must be k x k")
    T = np.zeros((p.n, p.n), dtype=np.int64)
    for ln in sec["T"]:
        i, j, v = _ints(ln, 3)
        if not (0 <= i < p.n and 0 <= j < p.n):
            raise FormatError(f"T entry out of range: {ln!r}")
        T[i, j] = v % p.q
    alpha = np.array(_ints(sec["ALPHA"][0], p.n), dtype=np.int64) % p.q
    beta = np.array(_ints(sec["BETA"][0], p.n), dtype=np.int64) % p.q
    try:
        grs = GrsCode(p.q, tuple(v % p.q for v in x), tuple(v % p.q for v in y), p.k)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    w = np.count_nonzero(T, axis=1)
    J2 = frozenset(int(i) for i in np.flatnonzero(w == 2))
    return BbcrsSecretKey(p, grs, S % p.q, T, alpha, beta, frozenset(range(p.n)) - J2, J2)


def dump_vector(kind: str, n: int, v, fh: TextIO):
    fh.write(f"BBCRS-{kind} v1 n={n}\n{_row(v)}\n")


def load_vector(kind: str, fh: TextIO, n: int | None = None) -> np.ndarray:
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith(f"BBCRS-{kind} v1 n="):
        raise FormatError(f"malformed {kind} file")
    try:
        declared = int(lines[0].split("n=", 1)[1])
    except ValueError as exc:
        raise FormatError("bad length field") from exc
    if n is not None and declared != n:
        raise FormatError(f"{kind} length {declared} does not match key length {n}")
    return np.array(_ints(lines[1], declared), dtype=np.int64)
