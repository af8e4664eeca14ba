import io
from fractions import Fraction

import numpy as np
import pytest

from grslab.attack import (
    AttackError,
    AttackTranscript,
    PositionClassification,
    apply_elimination,
    associated_degree2,
    classify_positions,
    complete_attack,
    dump_transcript,
    elimination_matrix,
    eliminate_degree2,
    fallback_remaining_degree2,
    is_degree2_position,
    shortened_trial,
)
from grslab.bbcrs import BbcrsParams, decrypt, encrypt, keygen
from grslab.codes import code_dual, random_code
from grslab.distinguisher import PRESETS

from oracles import elimination_alpha

DESK = PRESETS["desk"]
SIZES = (13, 14)


def stuck_T(seed, q=53, n=48):
    """Rows 0 and 1 swap-share their columns: each is degree 2 and no
    degree-1 row touches either column, so no elimination can apply."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    T = np.zeros((n, n), dtype=np.int64)
    T[np.arange(n), perm] = rng.integers(1, q, size=n)
    T[0, perm[1]] = rng.integers(1, q)
    T[1, perm[0]] = rng.integers(1, q)
    return T


@pytest.fixture(scope="module")
def desk_key():
    sk, pk = keygen(DESK, 11)
    return sk, pk, code_dual(pk.code())


def test_position_classification_checks():
    with pytest.raises(ValueError):
        PositionClassification(frozenset({0, 1}), frozenset({1}))
    assert PositionClassification(frozenset({0}), frozenset({1})).n == 2


def test_alpha_example_q7():
    q = 7
    T = np.eye(4, dtype=np.int64)
    i1, i2, j1 = 0, 2, 0
    T[i1, j1] = 3
    T[i2, j1] = 4
    alpha = elimination_alpha(T, i1, i2, q)
    assert alpha == 1
    # C T^T D = C (D^T T)^T: row i2 of T gains alpha times row i1
    D = elimination_matrix(4, alpha, i1, i2, q)
    T2 = D.T @ T % q
    assert T2[i2, j1] == 0 and np.count_nonzero(T2[i2]) == 1


def test_apply_elimination_matches_matrix(desk_key):
    _, _, C = desk_key
    D = elimination_matrix(48, 17, 3, 9, 53)
    assert apply_elimination(C, 17, 3, 9) == type(C).from_generator(C.generator @ D % 53, 53)


def test_shortened_trial_on_random_code():
    C = random_code(48, 22, 53, 0)
    res = shortened_trial(C, range(13))
    assert not res.distinguishable


def test_is_degree2_position(desk_key):
    sk, _, C = desk_key
    rng = np.random.default_rng(0)
    j2 = sorted(sk.J2)
    j1 = sorted(sk.J1)[:10]
    assert all(is_degree2_position(C, i, 20, SIZES, rng) for i in j2)
    assert not any(is_degree2_position(C, i, 20, SIZES, rng) for i in j1)


def test_classify_positions(desk_key):
    sk, _, C = desk_key
    cls = classify_positions(C, 20, 1, SIZES)
    assert cls.J2 == sk.J2
    empty = classify_positions(C, 0, 1, SIZES)
    assert empty.J2 == frozenset() and empty.J1 == frozenset(range(48))


def test_classify_permutation_key():
    p = BbcrsParams(53, 48, 26, Fraction(1047, 1046))
    sk, pk = keygen(p, 2)
    assert sk.J2 == frozenset()
    cls = classify_positions(code_dual(pk.code()), 20, 2, (13, 14))
    assert cls.J2 == frozenset()


def test_associated_degree2_ground_truth(desk_key):
    sk, _, C = desk_key
    rng = np.random.default_rng(3)
    shared = {}
    for i in sk.J1:
        (j,) = sk.columns_of(i)
        shared[i] = frozenset(r for r in sk.J2 if sk.T[r, j])
    with_rows = [i for i in sorted(sk.J1) if shared[i]]
    without = [i for i in sorted(sk.J1) if not shared[i]]
    for i1 in with_rows:
        assert associated_degree2(C, i1, sk.J1, sk.J2, 20, rng, SIZES) == shared[i1]
    for i1 in without[:3]:
        assert associated_degree2(C, i1, sk.J1, sk.J2, 20, rng, SIZES) == frozenset()


def test_eliminate_degree2_white_box(desk_key):
    sk, _, C = desk_key
    rng = np.random.default_rng(4)
    for i1 in sorted(sk.J1):
        (j1,) = sk.columns_of(i1)
        rows = [r for r in sorted(sk.J2) if sk.T[r, j1]]
        if rows:
            break
    i2 = rows[0]
    Cn, alpha = eliminate_degree2(C, i1, i2, 20, rng, SIZES)
    assert alpha == elimination_alpha(sk.T, i1, i2, 53)
    T2 = elimination_matrix(48, alpha, i1, i2, 53).T @ sk.T % 53
    assert T2[i2, j1] == 0
    assert not is_degree2_position(Cn, i2, 20, SIZES, rng)


def test_eliminate_unassociated_pair_fails(desk_key):
    sk, _, C = desk_key
    i2 = sorted(sk.J2)[0]
    cols = set(sk.columns_of(i2))
    i1 = next(i for i in sorted(sk.J1) if not cols & set(sk.columns_of(i)))
    with pytest.raises(AttackError) as err:
        eliminate_degree2(C, i1, i2, 4, 5, SIZES)
    assert err.value.stage == "eliminate"


def test_fallback_empty_is_noop():
    tr = AttackTranscript(53, 48, 26)
    assert fallback_remaining_degree2(random_code(48, 22, 53, 0), set(), tr) is None
    assert tr.log == []


def test_fallback_on_stuck_key():
    sk, pk = keygen(DESK, 0, T=stuck_T(0))
    assert sk.J2 == frozenset({0, 1})
    tr = complete_attack(pk.code(), 20, 0, m=DESK.m, G_pub=pk.G_pub, t_pub=DESK.t_pub)
    assert tr.punctured_set == frozenset({0, 1})
    assert tr.challenges_ok == 50 and "fallback" in tr.timings
    rng = np.random.default_rng(9)
    m = rng.integers(0, 53, size=26)
    assert np.array_equal(tr.decrypt(encrypt(pk, m, rng)), m)


def test_permutation_key_goes_straight_to_strip():
    p = BbcrsParams(53, 48, 26, Fraction(1047, 1046))
    sk, pk = keygen(p, 3)
    tr = complete_attack(pk.code(), 20, 3, m=p.m, G_pub=pk.G_pub)
    assert tr.eliminations == [] and "strip" in tr.timings and tr.challenges_ok == 50


def test_full_attack_and_transcript(desk_key):
    sk, pk, _ = desk_key
    tr = complete_attack(pk.code(), 20, 12, m=DESK.m, G_pub=pk.G_pub)
    assert tr.classification.J2 == sk.J2
    assert len(tr.eliminations) == len(sk.J2)
    rng = np.random.default_rng(1)
    for _ in range(10):
        m = rng.integers(0, 53, size=26)
        c = encrypt(pk, m, rng)
        assert np.array_equal(decrypt(tr.recovered_key, c, pk.G_pub), m)
    buf = io.StringIO()
    dump_transcript(tr, buf)
    text = buf.getvalue()
    assert text.startswith("GRSLAB-TRANSCRIPT v1 q=53 n=48 k=26")
    for section in ("ELIMINATIONS", "T-TILDE", "SUPPORT", "PI-TILDE", "CHALLENGES-OK"):
        assert f"\n{section}\n" in text
    for i1, i2, al in tr.eliminations:
        assert f"\n{i1} {i2} {al}\n" in text


def test_random_code_not_distinguishable():
    C = random_code(48, 26, 53, 1)
    with pytest.raises(AttackError) as err:
        complete_attack(C, 20, 1, m=DESK.m)
    assert err.value.stage == "distinguish"
    assert "not distinguishable" in err.value.message
    assert err.value.transcript is not None


def test_s_max_zero_is_classification_failure(desk_key):
    _, pk, _ = desk_key
    with pytest.raises(AttackError) as err:
        complete_attack(pk.code(), 0, 1, m=DESK.m)
    assert err.value.stage == "classify"
