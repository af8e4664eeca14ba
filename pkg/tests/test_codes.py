import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grslab.codes import (
    CodeError,
    GrsCode,
    LinearCode,
    PencilDecoder,
    bw_decode,
    code_dual,
    full_code,
    grs_expand,
    puncture,
    random_code,
    shorten,
    square_code,
    square_dim,
    star_product,
    zero_code,
)
from grslab.recovery import recover_multipliers

from oracles import grs_rows, has_word_of_weight_at_most, rank_mod, square_dim as oracle_square_dim


@st.composite
def grs_codes(draw, qs=(13, 31, 53), max_n=20):
    q = draw(st.sampled_from(qs))
    n = draw(st.integers(3, min(q, max_n)))
    k = draw(st.integers(1, n - 1))
    x = draw(st.permutations(range(q)))[:n]
    y = draw(st.lists(st.integers(1, q - 1), min_size=n, max_size=n))
    return GrsCode(q, tuple(x), tuple(y), k)


def random_grs(q, n, k, rng):
    x = tuple(int(v) for v in rng.choice(q, size=n, replace=False))
    y = tuple(int(v) for v in rng.integers(1, q, size=n))
    return GrsCode(q, x, y, k)


def test_grs_validation():
    with pytest.raises(CodeError):
        GrsCode(7, (0, 0, 1), (1, 1, 1), 1)
    with pytest.raises(CodeError):
        GrsCode(7, (0, 1, 2), (1, 0, 1), 1)


def test_small_grs_examples():
    C = grs_expand(GrsCode(7, (0, 1, 2), (1, 1, 1), 1))
    assert C.k == 1 and [1, 1, 1] in C
    C = grs_expand(GrsCode(7, (0, 1, 2, 3, 4), (1,) * 5, 2))
    assert [0, 1, 2, 3, 4] in C and [1] * 5 in C


def test_grs_is_mds_brute_force():
    rng = np.random.default_rng(3)
    G = random_grs(53, 10, 4, rng)
    rows = grs_rows(G.x, G.y, 4, 53)
    assert grs_expand(G).k == 4 == rank_mod(rows, 53)
    # no nonzero word of weight <= n - k, so d = n - k + 1 = 7
    assert not has_word_of_weight_at_most(rows, 53, 6)
    assert has_word_of_weight_at_most(rows, 53, 7)


@given(grs_codes())
def test_generator_matches_evaluation_oracle(G):
    assert grs_expand(G) == LinearCode.from_generator(grs_rows(G.x, G.y, G.k, G.q), G.q)


@given(grs_codes())
def test_dual_is_grs_and_orthogonal(G):
    D = G.dual()
    assert not np.any(G.generator_matrix() @ D.generator_matrix().T % G.q)
    assert grs_expand(D) == code_dual(grs_expand(G))


def test_dual_multipliers_recovered_independently():
    rng = np.random.default_rng(4)
    G = random_grs(53, 12, 5, rng)
    Cd = code_dual(grs_expand(G))
    y = recover_multipliers(Cd, G.x, 7)
    assert y is not None and grs_expand(GrsCode(53, G.x, y, 7)) == Cd


@given(st.integers(0, 10_000))
def test_dual_involution(seed):
    C = random_code(9, 4, 13, seed)
    assert code_dual(code_dual(C)) == C
    assert code_dual(full_code(5, 13)).k == 0


@given(grs_codes())
def test_square_law(G):
    assert square_code(grs_expand(G)).k == min(G.n, 2 * G.k - 1)
    if 2 * G.k - 1 < G.n:
        assert grs_expand(G.square()) == square_code(grs_expand(G))


def test_star_product_examples():
    q = 13
    rng = np.random.default_rng(5)
    A = random_code(8, 3, q, rng)
    ones = LinearCode.from_generator([[1] * 8], q)
    assert star_product(A, ones) == A
    v = rng.integers(1, q, size=8)
    sq = square_code(LinearCode.from_generator([v], q))
    assert sq == LinearCode.from_generator([v * v % q], q)
    assert square_code(zero_code(8, q)).k == 0
    G = random_grs(13, 9, 3, rng)
    assert square_code(grs_expand(G)).k == 5


def test_square_dim_against_oracle():
    rng = np.random.default_rng(6)
    for _ in range(5):
        C = random_code(30, 6, 53, rng)
        assert square_dim(C.generator, 53) == oracle_square_dim(C.generator.tolist(), 53)


def test_random_code_extremes():
    assert random_code(6, 0, 13, 0).k == 0
    assert random_code(6, 6, 13, 0).k == 6


@given(grs_codes(max_n=14), st.data())
def test_shorten_and_puncture_grs(G, data):
    n, k = G.n, G.k
    C = grs_expand(G)
    I = data.draw(st.sets(st.integers(0, n - 1), max_size=n - 2))
    keep = [i for i in range(n) if i not in I]
    if len(I) < k:
        # Sh_I GRS_k(x, y) = GRS_{k-|I|}(x', y' prod (X - x_i))
        assert shorten(C, I).k == k - len(I)
    if len(I) < k and len(keep) > k:
        xs = tuple(G.x[i] for i in keep)
        assert grs_expand(GrsCode(G.q, xs, tuple(G.y[i] for i in keep), k)).contains_code(shorten(C, I))
    if len(I) < n - k:
        P = puncture(C, I)
        assert P == grs_expand(GrsCode(G.q, tuple(G.x[i] for i in keep), tuple(G.y[i] for i in keep), k))


@given(st.integers(0, 10_000))
def test_shortened_inside_punctured(seed):
    C = random_code(12, 6, 13, seed)
    I = [1, 4, 7]
    assert puncture(C, I).contains_code(shorten(C, I))
    assert shorten(full_code(6, 13), [2]) == full_code(5, 13)
    assert puncture(C, []) == C


@given(st.integers(0, 10_000))
def test_puncture_square_inequality(seed):
    rng = np.random.default_rng(seed)
    C = random_code(15, 4, 13, rng)
    I = rng.choice(15, size=3, replace=False).tolist()
    assert square_code(C).k <= square_code(puncture(C, I)).k + len(I)


def test_bw_decode_roundtrip_desk_size():
    q, n, k = 53, 48, 26
    rng = np.random.default_rng(7)
    G = random_grs(q, n, k, rng)
    t = (n - k) // 2
    dec = PencilDecoder(G, t)
    for _ in range(200):
        c = G.encode(rng.integers(0, q, size=k))
        e = np.zeros(n, dtype=np.int64)
        pos = rng.choice(n, size=t, replace=False)
        e[pos] = rng.integers(1, q, size=t)
        r = (c + e) % q
        assert np.array_equal(bw_decode(G, r, t), c)
        assert np.array_equal(dec.decode(r), c)
    assert np.array_equal(bw_decode(G, c, t), c)


@given(grs_codes(max_n=16), st.integers(0, 10_000))
def test_pencil_decoder_agrees_with_bw(G, seed):
    rng = np.random.default_rng(seed)
    t = (G.n - G.k) // 2
    r0 = rng.integers(0, G.q, size=G.n)
    d = rng.integers(0, G.q, size=G.n)
    got = {s: c.tolist() for s, c in PencilDecoder(G, t).decode_family(r0, d, range(G.q))}
    for s in range(G.q):
        ref = bw_decode(G, (r0 - s * d) % G.q, t)
        assert (None if ref is None else ref.tolist()) == got.get(s)


def test_beyond_radius_is_flagged():
    q, n, k = 53, 20, 8
    rng = np.random.default_rng(8)
    G = random_grs(q, n, k, rng)
    t = (n - k) // 2
    for _ in range(50):
        c = G.encode(rng.integers(0, q, size=k))
        e = np.zeros(n, dtype=np.int64)
        e[rng.choice(n, size=t + 1, replace=False)] = rng.integers(1, q, size=t + 1)
        out = bw_decode(G, (c + e) % q, t)
        # either no answer or a codeword within distance t of r, never c itself
        if out is not None:
            assert np.count_nonzero((out - (c + e)) % q) <= t
            assert not np.array_equal(out, c)
