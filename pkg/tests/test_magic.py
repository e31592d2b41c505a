import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoqg.magic import (
    RankDeficiency,
    alternating_words,
    build_magic,
    classical_points,
    coaction_check,
    coaction_fixed_dimension,
    evaluate_pq_word,
    fixed_vector_dimension,
    identity_magic,
    noncommutativity_witness,
    permutation_magic,
    projection_pair,
    tensor_compose,
    verify_magic,
    word_independence_rank,
)

F = Fraction
angles = st.floats(0.0, 2 * np.pi, allow_nan=False)


def test_projection_pair_examples():
    pair = projection_pair(0.0)
    np.testing.assert_allclose(pair.p, pair.q)
    pair = projection_pair(np.pi / 2)
    assert np.abs(pair.p @ pair.q - pair.q @ pair.p).max() == pytest.approx(0.5)
    for e in (pair.p, pair.q):
        np.testing.assert_allclose(e @ e, e, atol=1e-15)
        assert np.trace(e) == pytest.approx(1)
    with pytest.raises(ValueError):
        projection_pair(cos=F(1, 2), sin=F(1, 2))


@settings(max_examples=40, deadline=None)
@given(angles)
def test_block_family_is_magic(theta):
    assert verify_magic(build_magic(theta)).max_residual <= 1e-12


@pytest.mark.parametrize("cs", [(F(3, 5), F(4, 5)), (F(5, 13), F(12, 13)), (F(-8, 17), F(15, 17)), (F(0), F(1))])
def test_exact_pythagorean_family(cs):
    rep = verify_magic(build_magic(cos=cs[0], sin=cs[1]))
    assert rep.max_residual == 0 and rep.passed


def test_permutation_and_identity_magic():
    for perm in itertools.permutations(range(4)):
        assert verify_magic(permutation_magic(perm)).passed
    assert verify_magic(identity_magic()).passed
    bad = build_magic(0.4)
    bad[0, 0] = bad[0, 0] * 0.5
    assert not verify_magic(bad).passed
    bad = permutation_magic((0, 1, 2, 3))
    bad[0, 1, 0, 0] = 1.0
    rep = verify_magic(bad)
    assert rep.rows > 0 and not rep.passed


def test_classical_points_and_fixed_dimensions():
    assert fixed_vector_dimension(itertools.permutations(range(4))) == 1
    assert fixed_vector_dimension([(0, 2, 1, 3)]) == 3
    assert fixed_vector_dimension([]) == 4
    M = build_magic(0.7)
    pts = classical_points(M)
    assert (0, 1, 2, 3) in pts and (1, 0, 3, 2) in pts
    assert fixed_vector_dimension(pts) == 2 == coaction_fixed_dimension(M)
    rep = coaction_check(M)
    assert rep.passed and rep.symmetric_group_fixed_dim == 1
    assert rep.classical_points_fixed_dim == 2
    assert max(rep.homomorphism.values()) <= 1e-12


def test_coaction_check_rejects_broken_magic():
    bad = build_magic(0.3)
    bad[2, 3] = bad[2, 2]
    assert not coaction_check(bad).passed


@settings(max_examples=15, deadline=None)
@given(angles, angles, angles)
def test_composition_is_magic_and_coassociative(a, b, c):
    A, B, C = build_magic(a), build_magic(b), build_magic(c)
    AB = tensor_compose(A, B)
    assert verify_magic(AB).max_residual <= 1e-11
    np.testing.assert_allclose(tensor_compose(AB, C), tensor_compose(A, tensor_compose(B, C)), atol=1e-12)


def test_identity_is_a_unit_for_composition():
    A = build_magic(1.1)
    one = identity_magic(1)
    np.testing.assert_allclose(tensor_compose(one, A), A)
    np.testing.assert_allclose(tensor_compose(A, one), A)


def test_exact_composition():
    A = build_magic(cos=F(3, 5), sin=F(4, 5))
    B = build_magic(cos=F(5, 13), sin=F(12, 13))
    assert verify_magic(tensor_compose(A, B)).max_residual == 0


@settings(max_examples=40, deadline=None)
@given(angles)
def test_witness_formula(theta):
    assert noncommutativity_witness(theta) == pytest.approx(abs(np.sin(theta)) / 2, abs=1e-12)


def test_witness_examples():
    assert noncommutativity_witness(0.0) <= 1e-15
    assert noncommutativity_witness(np.pi / 2) == pytest.approx(0.5)


def test_alternating_words():
    assert alternating_words(3) == ["", "p", "q", "pq", "qp", "pqp", "qpq"]
    assert len(alternating_words(8)) == 17
    np.testing.assert_allclose(evaluate_pq_word("", 0.3), np.eye(2))
    pair = projection_pair(0.3)
    np.testing.assert_allclose(evaluate_pq_word("pq", 0.3), pair.p @ pair.q)


def test_word_rank_values():
    assert [word_independence_rank(L) for L in range(1, 9)] == [2 * L + 1 for L in range(1, 9)]
    assert word_independence_rank(4, seed=11, strict=True) == 9


def test_degenerate_grid_reports_dependent_words():
    assert word_independence_rank(3, theta_grid=[0.5]) == 4
    with pytest.raises(RankDeficiency) as err:
        word_independence_rank(3, theta_grid=[0.5], strict=True)
    assert err.value.rank == 4 and err.value.dependent == ["qp", "pqp", "qpq"]


def test_word_rank_preconditions():
    with pytest.raises(ValueError):
        word_independence_rank(0)
    with pytest.raises(ValueError):
        word_independence_rank(2, theta_grid=[0.0, 1.0])
