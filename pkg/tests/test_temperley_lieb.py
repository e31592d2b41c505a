from fractions import Fraction
from functools import reduce

import numpy as np
import pytest
from scipy.stats import ortho_group

from ergoqg.temperley_lieb import (
    TLWord,
    catalan,
    enumerate_normal_words,
    evaluate_word,
    fixed_point_residual,
    jones_integer,
    jones_projection,
    markov_check,
    normal_words,
    quantum_vs_classical_contrast,
    tl_span_dimension,
    verify_tl_relations,
    word_integer,
)
from ergoqg.tensor import TensorOperator, normalized_trace

F = Fraction


def dense_jones(n, k, s):
    """``n e_s`` built from Kronecker products of matrix units."""
    E = np.zeros((n * n, n * n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.int64)
            e[i, j] = 1
            E += np.kron(e, e)
    parts = [np.eye(n ** (s - 1), dtype=np.int64), E, np.eye(n ** (k - s - 1), dtype=np.int64)]
    return reduce(np.kron, parts)


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)])
def test_jones_kernel_matches_kron_oracle(n, k):
    for s in range(1, k):
        np.testing.assert_array_equal(jones_integer(n, k, s), dense_jones(n, k, s))


def test_jones_projection_examples():
    e = jones_projection(2, 2, 1)
    assert e.beta == 4
    assert e.op.trace() == 1
    assert normalized_trace(e.op) == F(1, 4)
    assert np.linalg.matrix_rank(e.op.to_array()) == 1
    assert normalized_trace(jones_projection(3, 2, 1).op) == F(1, 9)
    e23 = jones_projection(2, 3, 2).op
    assert (e23 @ e23).residual(e23) == 0
    assert e23.residual(TensorOperator.identity(2).tensor(e.op)) == 0
    with pytest.raises(IndexError):
        jones_projection(2, 3, 3)


@pytest.mark.parametrize("n,k", [(2, 2), (2, 4), (3, 3), (2, 6), (3, 5)])
def test_relations_exact(n, k):
    rep = verify_tl_relations(n, k)
    assert rep.passed
    assert all(r == 0 for r in rep.residuals.values())


def test_relation_counts():
    rep = verify_tl_relations(2, 2)
    assert rep.checked["far_commute"] == 0 and rep.checked["braid_like"] == 0
    e1, e2 = (jones_projection(3, 3, s).op for s in (1, 2))
    assert ((e1 @ e2 @ e1) * 9).residual(e1) == 0


def test_word_enumeration_counts_and_constraints():
    assert [len(enumerate_normal_words(k)) for k in range(2, 8)] == [catalan(m) for m in range(1, 7)]
    assert [str(w) for w in enumerate_normal_words(3)] == ["1", "e1"]
    assert sorted(str(w) for w in enumerate_normal_words(4)) == sorted(["1", "e1", "e2", "e2e1", "e1·e2"])
    assert [str(w) for w in enumerate_normal_words(2)] == ["1"]
    assert all(w.length <= 2 for w in enumerate_normal_words(5, max_letters=2))
    with pytest.raises(ValueError):
        TLWord(((1, 1), (1, 1)))
    with pytest.raises(ValueError):
        TLWord(((1, 2),))


def test_evaluate_word():
    assert evaluate_word(TLWord(), 2, 3).residual(TensorOperator.identity(2, 3)) == 0
    assert evaluate_word(TLWord(((1, 1),)), 2, 2).residual(jones_projection(2, 2, 1).op) == 0
    assert (evaluate_word((1, 2, 1), 2, 3) * 4).residual(jones_projection(2, 3, 1).op) == 0
    with pytest.raises(IndexError):
        evaluate_word((3,), 2, 3)


def test_markov_examples():
    rep = markov_check(2, 3)
    row = {str(r.word): r for r in rep.rows}["e1"]
    assert row.tau_we == F(1, 16) and row.tau_w == F(1, 4)
    rep = markov_check(2, 4)
    assert rep.word_count == 5 and rep.passed
    row = {str(r.word): r for r in markov_check(3, 3).rows}["e1"]
    assert row.tau_we == F(1, 81)


@pytest.mark.parametrize("n,k", [(2, 6), (3, 6)])
def test_markov_exact_large(n, k):
    rep = markov_check(n, k)
    assert rep.worst_residual == 0
    assert all(v == F(1, n * n) for v in rep.trace_of_projections.values())
    assert rep.word_count == catalan(k - 1)


def test_trace_property_and_positivity():
    words = normal_words(3)
    mats = {str(w): word_integer(w, 2, 4) for w in words}
    for a in mats.values():
        for b in mats.values():
            assert np.trace(a @ b) == np.trace(b @ a)
        assert np.trace(a.T @ a) >= 0


def float_rank_oracle(n, k):
    rows = [evaluate_word(w, n, k, "float").to_array().ravel() for w in normal_words(k - 1)]
    return np.linalg.matrix_rank(np.array(rows))


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)])
def test_span_dimension_matches_rank_oracle(n, k):
    d = tl_span_dimension(n, k)
    assert d == catalan(k) == float_rank_oracle(n, k)


def test_span_dimension_values():
    assert [tl_span_dimension(2, k) for k in range(2, 6)] == [2, 5, 14, 42]
    assert [tl_span_dimension(3, k) for k in range(2, 6)] == [2, 5, 14, 42]


def test_fixed_point_membership_orthogonal():
    rng = np.random.default_rng(3)
    for _ in range(5):
        U = ortho_group.rvs(2, random_state=rng)
        assert fixed_point_residual(2, 4, U) <= 1e-12


def test_contrast_examples():
    rep = quantum_vs_classical_contrast(2, 2, "O")
    assert (rep.dim_tl, rep.dim_classical) == (2, 3) and rep.contained
    rep = quantum_vs_classical_contrast(2, 3, "O")
    assert rep.dim_tl == 5 <= rep.dim_classical and rep.contained
    rep = quantum_vs_classical_contrast(2, 2, "U")
    assert rep.dim_classical == rep.dim_tl == 2
