import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grslab.bbcrs import (
    BbcrsParams,
    DecryptionError,
    FormatError,
    ParameterError,
    build_T_construction_A,
    build_T_construction_B,
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
from grslab.codes import code_dual, grs_expand
from grslab.field_linalg import rank, span

DESK = BbcrsParams(53, 48, 26, Fraction(23, 20))


def test_desk_derived_quantities():
    assert DESK.n_degree2 == 7
    assert DESK.t == 11
    assert DESK.delta_t == 2
    assert DESK.t_pub == 9


def test_parameter_validation():
    with pytest.raises(ParameterError):
        BbcrsParams(53, 48, 26, Fraction(1))
    with pytest.raises(ParameterError):
        BbcrsParams(53, 60, 26, Fraction(23, 20))
    with pytest.raises(ParameterError):
        BbcrsParams(51, 48, 26, Fraction(23, 20))
    with pytest.raises(ParameterError):
        parse_density("1.15")
    assert parse_density("23/20") == Fraction(23, 20)


@pytest.mark.parametrize("seed", range(100))
def test_construction_A_row_weights(seed):
    T, J1, J2 = build_T_construction_A(DESK, seed)
    w = np.count_nonzero(T, axis=1)
    assert set(w) <= {1, 2}
    assert abs(w.mean() - float(DESK.m)) <= 1 / DESK.n
    assert frozenset(np.flatnonzero(w == 2).tolist()) == J2 and len(J2) == 7
    # all extra entries land in delta_t columns
    assert np.count_nonzero(np.count_nonzero(T, axis=0) >= 2) <= DESK.delta_t


@pytest.mark.parametrize("seed", range(100))
def test_construction_B_supports(seed):
    p = BbcrsParams(53, 48, 26, Fraction(23, 20), construction="B")
    T, J1, J2 = build_T_construction_B(p, seed)
    assert np.count_nonzero(T, axis=0).max() <= 2
    assert set(np.count_nonzero(T, axis=1)) <= {1, 2}
    assert len(J2) == 7


def test_m_to_one_gives_permutation():
    p = BbcrsParams(53, 48, 26, Fraction(49, 48))
    assert p.n_degree2 == 1
    p0 = BbcrsParams(53, 48, 26, Fraction(1047, 1046))
    T, _, J2 = build_T_construction_A(p0, 0)
    assert J2 == frozenset() and np.count_nonzero(T) == 48


def test_keygen_dual_relation():
    sk, pk = keygen(DESK, 1)
    q = DESK.q
    assert rank(pk.G_pub, q) == 26
    lhs = code_dual(pk.code())
    rhs = span(grs_expand(sk.grs.dual()).generator @ sk.Q.T % q, q, DESK.n)
    assert lhs.space == rhs
    assert len(sk.J2) == 7


def test_encrypt_weight_and_zero_error():
    sk, pk = keygen(DESK, 2)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        _, e = encrypt(pk, rng.integers(0, 53, size=26), rng, return_error=True)
        assert np.count_nonzero(e) == pk.t_pub
    m = rng.integers(0, 53, size=26)
    c = encrypt(pk, m, rng, weight=0)
    assert c.tolist() in pk.code()
    assert np.array_equal(decrypt(sk, c), m)


def test_decrypt_roundtrip_200():
    sk, pk = keygen(DESK, 3)
    rng = np.random.default_rng(1)
    for _ in range(200):
        m = rng.integers(0, 53, size=26)
        assert np.array_equal(decrypt(sk, encrypt(pk, m, rng), pk.G_pub), m)


def test_heavy_corruption_fails_structurally():
    sk, pk = keygen(DESK, 4)
    rng = np.random.default_rng(2)
    m = rng.integers(0, 53, size=26)
    c = encrypt(pk, m, rng, weight=24)
    with pytest.raises(DecryptionError):
        decrypt(sk, c, pk.G_pub)


@settings(max_examples=5)
@given(st.integers(0, 2**32 - 1))
def test_serialization_roundtrip(seed):
    sk, pk = keygen(DESK, seed)
    buf = io.StringIO()
    dump_secret_key(sk, buf)
    sk2 = load_secret_key(io.StringIO(buf.getvalue()))
    assert np.array_equal(sk2.public_generator(), pk.G_pub)
    assert sk2.J2 == sk.J2
    buf = io.StringIO()
    dump_public_key(pk, buf)
    assert np.array_equal(load_public_key(io.StringIO(buf.getvalue())).G_pub, pk.G_pub)
    buf = io.StringIO()
    dump_vector("CIPHERTEXT", 48, np.arange(48), buf)
    assert load_vector("CIPHERTEXT", io.StringIO(buf.getvalue()), 48).tolist() == list(range(48))


def test_malformed_files():
    with pytest.raises(FormatError):
        load_public_key(io.StringIO(""))
    with pytest.raises(FormatError):
        load_public_key(io.StringIO("BBCRS v1 q=53 n=48 k=26 z=1 m=23/20\nGPUB\n1 2 3\n"))
    with pytest.raises(FormatError):
        load_vector("CIPHERTEXT", io.StringIO("BBCRS-CIPHERTEXT v1 n=48\n1 2\n"), 48)
