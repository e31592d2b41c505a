from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoqg.linalg import RationalMatrix, exact_nullspace, exact_rank, gap_rank
from ergoqg.scalars import QQi, exact_value, format_exact, parse_scalar

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gaussian = st.builds(QQi, fractions, fractions)


@given(gaussian, gaussian)
def test_qqi_field_ops_match_complex(a, b):
    za, zb = complex(a), complex(b)
    assert complex(a + b) == pytest.approx(za + zb)
    assert complex(a * b) == pytest.approx(za * zb)
    assert complex(a - b) == pytest.approx(za - zb)
    if b != 0:
        assert complex(a / b) == pytest.approx(za / zb)
        assert (a / b) * b == a


def test_exact_value_collapses_to_fraction():
    assert isinstance(exact_value(Fraction(1, 2)), Fraction)
    assert isinstance(QQi(1, 1) * QQi(1, -1), Fraction)
    assert QQi(0, 1) ** 2 == -1


def test_parse_and_format():
    assert parse_scalar("1/3") == Fraction(1, 3)
    assert isinstance(parse_scalar("0.25"), float)
    assert parse_scalar("2") == 2
    assert parse_scalar("0.1-0.05j") == complex(0.1, -0.05)
    assert parse_scalar("1+2i") == complex(1, 2)
    assert format_exact(Fraction(-2, 6)) == "-1/3"
    assert format_exact(QQi(1, Fraction(-1, 2))) == "1-1/2i"
    with pytest.raises(ValueError):
        parse_scalar("")


def _random_matrix(rng, shape, bound=9):
    re = rng.integers(-bound, bound + 1, size=shape)
    im = rng.integers(-bound, bound + 1, size=shape)
    return RationalMatrix(re, im, int(rng.integers(1, 7)))


def _entrywise_product(a, b):
    # schoolbook product over exact scalars
    A, B = a.entries(), b.entries()
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m)), Fraction(0)) for j in range(p)] for i in range(n)]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matmul_matches_schoolbook(seed):
    rng = np.random.default_rng(seed)
    a, b = _random_matrix(rng, (3, 4)), _random_matrix(rng, (4, 2))
    assert (a @ b).entries() == _entrywise_product(a, b)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kron_adjoint_trace(seed):
    rng = np.random.default_rng(seed)
    a, b = _random_matrix(rng, (2, 2)), _random_matrix(rng, (3, 3))
    np.testing.assert_allclose(a.kron(b).to_complex(), np.kron(a.to_complex(), b.to_complex()))
    assert a.adjoint().adjoint() == a
    assert a.kron(b).trace() == a.trace() * b.trace()
    c = _random_matrix(rng, (2, 2))
    assert a.pairing(c) == (a.T @ c).trace()


def test_overflow_promotes_to_python_ints():
    big = RationalMatrix(np.full((2, 2), 2**40, dtype=np.int64))
    sq = big @ big @ big
    assert sq[0, 0] == 4 * 2**120


def test_exact_rank_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert exact_rank(rows) == 2
    ns = exact_nullspace(rows, 3)
    assert len(ns) == 1
    v = ns[0]
    assert all(sum(Fraction(r[i]) * v[i] for i in range(3)) == 0 for r in rows)


def test_gap_rank_cuts_at_first_gap():
    assert gap_rank([1.0, 0.99, 1e-9, 1e-10]) == 2
    assert gap_rank([0.98, 0.98, 5e-16, 2e-16, 0.0]) == 2
    assert gap_rank([1.0, 0.5, 0.25]) == 3
    assert gap_rank([0.0, 0.0]) == 0
