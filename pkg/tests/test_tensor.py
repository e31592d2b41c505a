from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoqg.linalg import RationalMatrix
from ergoqg.scalars import QQi
from ergoqg.temperley_lieb import jones_projection
from ergoqg.tensor import (
    DensityFunctional,
    TensorOperator,
    adjoint_action_point,
    classical_point_check,
    compatibility_residual,
    elementary_tensor,
    embed_at_leg,
    matrix_unit,
    normalized_trace,
    phi_Q,
    product_functional,
    random_classical_points,
    random_operator,
    random_rational_operator,
    restriction_residual,
)

F = Fraction
Q13 = DensityFunctional(RationalMatrix.diag([F(1, 3), F(2, 3)]))
QHALF = DensityFunctional(RationalMatrix.diag([F(1, 2), F(1, 2)]))


def test_matrix_units():
    assert matrix_unit(2, 1, 1).data.entries() == [[1, 0], [0, 0]]
    assert (matrix_unit(2, 1, 2) @ matrix_unit(2, 2, 1)).residual(matrix_unit(2, 1, 1)) == 0
    e = matrix_unit(3, 2, 3).to_array()
    assert e[1, 2] == 1 and np.abs(e).sum() == 1
    with pytest.raises(IndexError):
        matrix_unit(2, 3, 1)


def test_embed_at_leg():
    x = embed_at_leg(matrix_unit(2, 1, 1), 1, 2)
    assert x.dim == 4 and x.trace() == 2
    assert embed_at_leg(TensorOperator.identity(3), 2, 3).residual(TensorOperator.identity(3, 3)) == 0
    y = embed_at_leg(matrix_unit(2, 1, 2), 2, 2)
    np.testing.assert_array_equal(y.to_array(), np.kron(np.eye(2), [[0, 1], [0, 0]]))
    with pytest.raises(IndexError):
        embed_at_leg(matrix_unit(2, 1, 2), 3, 2)


def test_phi_q_examples():
    assert phi_Q(Q13, matrix_unit(2, 1, 1)) == F(1, 3)
    assert phi_Q(Q13, TensorOperator.identity(2)) == 1
    M = RationalMatrix.from_entries([[F(1, 2), F(1, 4)], [F(1, 4), F(1, 2)]])
    Q = DensityFunctional(M)
    assert phi_Q(Q, matrix_unit(2, 1, 2)) == F(1, 4)
    # complex off-diagonal: Tr(Q^t e_12) = Q_12
    Qc = DensityFunctional(RationalMatrix.from_entries([[F(1, 2), QQi(0, F(1, 5))], [QQi(0, F(-1, 5)), F(1, 2)]]))
    assert phi_Q(Qc, matrix_unit(2, 1, 2)) == QQi(0, F(1, 5))


def test_product_functional_examples():
    b = elementary_tensor([matrix_unit(2, 1, 1), matrix_unit(2, 2, 2)])
    assert product_functional(QHALF, 2, b) == F(1, 4)
    assert product_functional(Q13, 3, TensorOperator.identity(2, 3)) == 1
    b = elementary_tensor([matrix_unit(2, 1, 2), matrix_unit(2, 2, 1)])
    assert product_functional(Q13, 2, b) == 0


def test_product_functional_is_tensor_power_on_matrix_units():
    Q = DensityFunctional(RationalMatrix.from_entries([[F(2, 5), QQi(F(1, 10), F(1, 7))], [QQi(F(1, 10), F(-1, 7)), F(3, 5)]]))
    for idx in np.ndindex(2, 2, 2, 2):
        i1, j1, i2, j2 = (v + 1 for v in idx)
        b = elementary_tensor([matrix_unit(2, i1, j1), matrix_unit(2, i2, j2)])
        assert product_functional(Q, 2, b) == Q.entry(i1, j1) * Q.entry(i2, j2)


def test_normalized_trace():
    assert normalized_trace(TensorOperator.identity(2, 3)) == 1
    assert normalized_trace(embed_at_leg(matrix_unit(2, 1, 1), 1, 2)) == F(1, 2)
    assert normalized_trace(jones_projection(2, 2, 1).op) == F(1, 4)


def test_adjoint_action_examples():
    b = matrix_unit(2, 1, 2)
    assert adjoint_action_point(RationalMatrix.identity(2), 1, b).residual(b) == 0
    U = RationalMatrix.diag([QQi(0, 1), 1])
    out = adjoint_action_point(U, 1, b)
    assert out.residual(b * QQi(0, 1)) == 0


def test_density_validation():
    with pytest.raises(ValueError, match="Tr"):
        DensityFunctional(RationalMatrix.diag([F(1, 3), F(1, 3)]))
    with pytest.raises(ValueError, match="positive"):
        DensityFunctional(RationalMatrix.from_entries([[F(1, 2), 1], [1, F(1, 2)]]))
    with pytest.raises(ValueError, match="self-adjoint"):
        DensityFunctional(RationalMatrix.from_entries([[F(1, 2), 1], [0, F(1, 2)]]))
    with pytest.raises(ValueError):
        DensityFunctional(np.diag([1.2, -0.2]))


def test_classical_point_examples():
    rng = np.random.default_rng(1)
    th, ph = rng.uniform(0, 2 * np.pi, 2)
    assert classical_point_check(np.diag([np.exp(1j * th), np.exp(1j * ph)]), Q13).passed
    swap = classical_point_check(np.array([[0, 1], [1, 0]]), Q13)
    assert swap.unitary and not swap.relations and not swap.passed
    from scipy.stats import unitary_group

    U = unitary_group.rvs(3, random_state=rng)
    assert classical_point_check(U, DensityFunctional(np.eye(3) / 3)).passed
    exact = classical_point_check(RationalMatrix.diag([QQi(F(3, 5), F(4, 5)), -1]), Q13)
    assert exact.exact and exact.relation_residual == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_phi_invariant_at_classical_points(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q = a @ a.conj().T + 0.1 * np.eye(2)
    Q = DensityFunctional(q / np.trace(q).real)
    for U in random_classical_points(Q, 3, rng):
        assert classical_point_check(U, Q).passed
        b = random_operator(2, 1, rng)
        assert abs(phi_Q(Q, adjoint_action_point(U, 1, b)) - phi_Q(Q, b)) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_adjoint_action_is_star_automorphism(seed, k):
    rng = np.random.default_rng(seed)
    Q = DensityFunctional(np.diag([0.3, 0.7]))
    U = random_classical_points(Q, 1, rng)[0]
    x, y = random_operator(2, k, rng), random_operator(2, k, rng)
    ad = lambda b: adjoint_action_point(U, k, b)  # noqa: E731
    assert ad(x @ y).residual(ad(x) @ ad(y)) <= 1e-10
    assert ad(x.adjoint()).residual(ad(x).adjoint()) <= 1e-10
    assert ad(TensorOperator.identity(2, k, "float")).residual(TensorOperator.identity(2, k, "float")) <= 1e-10


def test_compatibility_and_restriction_exact():
    rng = np.random.default_rng(7)
    U = RationalMatrix.diag([QQi(F(5, 13), F(12, 13)), QQi(F(-3, 5), F(4, 5))])
    for k in range(2, 5):
        for j in range(1, k):
            x = random_rational_operator(2, j, rng, bound=3)
            assert compatibility_residual(U, x, k) == 0
            assert restriction_residual(Q13, x, k) == 0


def test_operator_shape_checks():
    with pytest.raises(ValueError):
        TensorOperator(2, 2, np.eye(3))
    with pytest.raises(ValueError):
        TensorOperator(2, 11, np.eye(2))
    with pytest.raises(ValueError):
        product_functional(Q13, 2, TensorOperator.identity(2, 1))
