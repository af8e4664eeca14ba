"""Square-code distinguisher on shortened duals and the feasibility calculus
for the shortening size a = |I|."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .bbcrs import BbcrsParams
from .codes import LinearCode, random_code, shorten_generator, square_dim


def sq_dim_shortened(C: LinearCode, I: Iterable[int]) -> int:
    return square_dim(shorten_generator(C.generator, sorted(I), C.q), C.q)


def random_code_square_dim(s: int, length: int) -> int:
    """Expected dim of the square of a random s-dim code of the given length."""
    return min(length, s * (s + 1) // 2)


def is_distinguishable(C: LinearCode, I: Iterable[int], n: int | None = None, k: int | None = None) -> bool:
    """True iff dim Sh_I(C)^2 < min(n - |I|, binom(n - k - |I| + 1, 2)).

    ``C`` plays the role of a public dual, so its dimension is n - k. The
    zero code is never declared distinguishable.
    """
    I = sorted(set(I))
    n = C.n if n is None else n
    k = n - C.k if k is None else k
    s = n - k - len(I)
    if s <= 0:
        return False
    d = sq_dim_shortened(C, I)
    if d == 0:
        return False
    return d < min(n - len(I), math.comb(s + 1, 2))


def _geq_sqrt(lhs: Fraction, rad: Fraction) -> bool:
    """Exact test lhs >= sqrt(rad), rad >= 0."""
    return lhs >= 0 and lhs * lhs >= rad


@dataclass(frozen=True)
class FeasibilityReport:
    n: int
    k: int
    m: Fraction
    a_min: float
    a_0: float
    a_1: float
    delta: Fraction
    m_0: float
    feasible_a_range: tuple[int, ...]
    satisfies_eq12: bool
    satisfies_m_le_1_plus_R: bool

    def lines(self) -> list[str]:
        rng = f"{{{', '.join(map(str, self.feasible_a_range))}}}" if self.feasible_a_range else "{}"
        return [
            f"n={self.n} k={self.k} m={self.m.numerator}/{self.m.denominator}",
            f"a_min={self.a_min:.4f}",
            f"delta={self.delta}",
            f"a_0={self.a_0:.4f} a_1={self.a_1:.4f}",
            f"m_0={self.m_0:.4f}",
            f"feasible_a_range={rng}",
            f"satisfies_eq12={str(self.satisfies_eq12).lower()}",
            f"satisfies_m_le_1_plus_R={str(self.satisfies_m_le_1_plus_R).lower()}",
        ]


def feasibility(n: int, k: int, m) -> FeasibilityReport:
    """Evaluate the shortening-size constraints exactly.

    a must satisfy a >= ((1+m)n - 3k)/2 (the shortened dual's square must be
    below n - a) and a <= a_0 (still below the random-code value). The density
    ceiling m_0 is where the two meet. Comparisons involving square roots are
    squared after a sign check so no float rounding can flip a boundary case.
    """
    m = Fraction(m)
    R = Fraction(k, n)
    a_min = ((1 + m) * n - 3 * k) / 2
    delta = 8 * (m - 1) * n + 25
    # a <= n - k - 5/2 - sqrt(delta)/2  <=>  2(n-k) - 5 - 2a >= sqrt(delta)
    lo = max(0, math.ceil(a_min))
    feas = tuple(
        a for a in range(lo, n - k)
        if _geq_sqrt(Fraction(2 * (n - k) - 5 - 2 * a), delta)
    )
    rad = 8 * R / n + Fraction(1, n * n)
    eq12 = _geq_sqrt(1 + R - Fraction(1, n) - m, rad)
    sq = math.sqrt(delta)
    return FeasibilityReport(
        n=n, k=k, m=m,
        a_min=float(a_min),
        a_0=float(n - k) - 2.5 - sq / 2,
        a_1=float(n - k) - 2.5 + sq / 2,
        delta=delta,
        m_0=float(1 + R - Fraction(1, n)) - math.sqrt(rad),
        feasible_a_range=feas,
        satisfies_eq12=eq12,
        satisfies_m_le_1_plus_R=m <= 1 + R,
    )


def feasibility_for(params: BbcrsParams) -> FeasibilityReport:
    return feasibility(params.n, params.k, params.m)


def prop4_bound(n: int, k: int, a: int, n_degree2: int) -> int:
    """Upper bound on dim Sh_I(C_pub^perp)^2 for I inside the degree-1 rows."""
    return 3 * (n - k) - 3 * a - 1 + n_degree2


def random_square_baseline(n: int, k: int, q: int, trials: int, seed=None) -> Counter:
    rng = np.random.default_rng(seed)
    hist: Counter = Counter()
    for _ in range(trials):
        C = random_code(n, k, q, rng)
        hist[square_dim(C.generator, q)] += 1
    return hist


# Full-size parameter sets attacked in the literature (q = 347 / 547, z = 1).
PRESETS: dict[str, BbcrsParams] = {
    f"bbcrs-{n}-{k}": BbcrsParams(q, n, k, Fraction(m))
    for q, n, k, m in [
        (347, 346, 180, "1471/1000"),
        (347, 346, 188, "1448/1000"),
        (347, 346, 204, "1402/1000"),
        (347, 346, 228, "1332/1000"),
        (347, 346, 252, "1263/1000"),
        (347, 346, 268, "1217/1000"),
        (347, 346, 284, "1171/1000"),
        (547, 546, 324, "1401/1000"),
        (547, 546, 340, "1372/1000"),
        (547, 546, 364, "1328/1000"),
        (547, 546, 388, "1284/1000"),
        (547, 546, 412, "1240/1000"),
        (547, 546, 428, "1211/1000"),
    ]
}
PRESETS["desk"] = BbcrsParams(53, 48, 26, Fraction(23, 20))
