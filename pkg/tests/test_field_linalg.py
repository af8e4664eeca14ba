import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grslab.field_linalg import (
    FieldError,
    PrimeField,
    SubspaceBasis,
    identity,
    inverse,
    is_prime,
    kernel,
    rank,
    rref,
    solve_linear,
    span,
    subspace_intersection,
    subspace_sum,
)

from oracles import rank_mod

PRIMES = [2, 3, 5, 7, 13, 31, 53]


def matrices(max_rows=8, max_cols=10):
    @st.composite
    def build(draw):
        q = draw(st.sampled_from(PRIMES))
        r = draw(st.integers(0, max_rows))
        c = draw(st.integers(1, max_cols))
        vals = draw(st.lists(st.integers(0, q - 1), min_size=r * c, max_size=r * c))
        return q, np.array(vals, dtype=np.int64).reshape(r, c)

    return build()


def test_scalar_arithmetic():
    F = PrimeField(7)
    assert F.inv(3) == 5
    assert F.add(4, 5) == 2
    with pytest.raises(ZeroDivisionError):
        PrimeField(53).inv(0)


def test_non_prime_rejected():
    with pytest.raises(FieldError):
        PrimeField(51)
    assert [p for p in range(60) if is_prime(p)][-3:] == [47, 53, 59]


def test_rref_small_cases():
    B, r, piv = rref(identity(3), 5)
    assert r == 3 and np.array_equal(B.basis, identity(3)) and piv == (0, 1, 2)
    B, r, _ = rref([[2, 4, 1], [2, 4, 1]], 5)
    assert r == 1 and B.basis.shape == (1, 3)


def test_random_rank_against_oracle():
    rng = np.random.default_rng(0)
    M = rng.integers(0, 53, size=(10, 20))
    assert rank(M, 53) == rank_mod(M.tolist(), 53) == rank_mod(M.tolist(), 53, shuffle_seed=1)


@given(matrices())
def test_rank_matches_oracle(qm):
    q, M = qm
    assert rank(M, q) == rank_mod(M.tolist(), q, shuffle_seed=7)


@given(matrices())
def test_rref_is_canonical(qm):
    q, M = qm
    rng = np.random.default_rng(M.size)
    if M.shape[0]:
        # row operations must not change the canonical form
        P = rng.integers(0, q, size=(M.shape[0], M.shape[0]))
        while rank(P, q) < M.shape[0]:
            P = rng.integers(0, q, size=P.shape)
        assert span(P @ M % q, q, M.shape[1]) == span(M, q, M.shape[1])


def test_kernel_examples():
    assert kernel(identity(4), 7).dim == 0
    assert kernel(np.zeros((1, 4), dtype=np.int64), 7).dim == 4
    rng = np.random.default_rng(1)
    M = rng.integers(0, 31, size=(5, 12))
    K = kernel(M, 31)
    assert K.dim == 7
    assert not np.any(M @ K.basis.T % 31)


@given(matrices())
def test_kernel_rank_nullity(qm):
    q, M = qm
    K = kernel(M, q, cols=M.shape[1])
    assert K.dim + rank(M, q) == M.shape[1]
    if M.shape[0] and K.dim:
        assert not np.any(M @ K.basis.T % q)


def test_sum_and_intersection_examples():
    q = 31
    e = identity(5)
    A, B = span(e[:3], q), span(e[3:], q)
    assert subspace_sum(A, B) == SubspaceBasis.full(5, q)
    assert subspace_sum(A, A) == A
    assert subspace_sum(A, SubspaceBasis.zero(5, q)) == A
    assert subspace_intersection(A, A) == A
    assert subspace_intersection(A, SubspaceBasis.zero(5, q)).dim == 0


@given(st.integers(0, 10_000))
def test_dimension_identity(seed):
    rng = np.random.default_rng(seed)
    q, n = 31, 10
    A = span(rng.integers(0, q, size=(6, n)), q)
    B = span(rng.integers(0, q, size=(7, n)), q)
    S, X = subspace_sum(A, B), subspace_intersection(A, B)
    assert S.dim + X.dim == A.dim + B.dim
    assert A.contains(X.basis) and B.contains(X.basis)
    # kernel-based cross-check: X is the part of A orthogonal to B's annihilator
    annB = kernel(B.basis, q, cols=n)
    viaK = kernel(annB.basis @ A.basis.T % q, q, cols=A.dim)
    assert viaK.dim == X.dim


def test_solve_linear():
    q = 53
    v = np.arange(5)
    assert np.array_equal(solve_linear(identity(5), v, q), v)
    M = np.zeros((2, 2), dtype=np.int64)
    M[0, 0] = 1
    assert solve_linear(M, [0, 1], q) is None
    rng = np.random.default_rng(2)
    A = rng.integers(0, q, size=(8, 8))
    while rank(A, q) < 8:
        A = rng.integers(0, q, size=(8, 8))
    b = rng.integers(0, q, size=8)
    x = solve_linear(A, b, q)
    assert np.array_equal(A @ x % q, b)


@given(matrices(max_rows=6, max_cols=6))
def test_inverse_roundtrip(qm):
    q, M = qm
    if M.shape[0] != M.shape[1] or M.shape[0] == 0:
        return
    if rank_mod(M.tolist(), q) < M.shape[0]:
        with pytest.raises(ZeroDivisionError):
            inverse(M, q)
    else:
        assert np.array_equal(M @ inverse(M, q) % q, identity(M.shape[0]))
