import math
from collections import Counter
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoqg.linalg import RationalMatrix
from ergoqg.modular import (
    EigenvalueList,
    continued_fraction_rational,
    cuntz_factor_type,
    kms_identity_check,
    modular_spectrum,
    modular_superoperator_eigenvalues,
    omega_from_q,
    spectrum_growth_report,
    spectrum_product,
    uhf_factor_type,
)

F = Fraction
Q13 = EigenvalueList((F(1, 3), F(2, 3)))
HALF = EigenvalueList((F(1, 2), F(1, 2)))


def expand(spectrum):
    return np.sort(np.array([float(v) for v, m in spectrum.items() for _ in range(m)]))


def test_spectrum_examples():
    for k in (1, 2, 3):
        assert modular_spectrum(HALF, k) == Counter({F(1): 4**k})
    assert modular_spectrum(Q13, 1) == Counter({F(1): 2, F(1, 2): 1, F(2): 1})
    spec2 = modular_spectrum(Q13, 2)
    assert [spec2[F(2) ** m] for m in range(-2, 3)] == [1, 4, 6, 4, 1]


@pytest.mark.parametrize("q", [(F(1, 3), F(2, 3)), (F(1, 6), F(1, 3), F(1, 2)), (0.2, 0.3, 0.5)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_spectrum_matches_dense_oracle(q, k):
    spectrum = modular_spectrum(EigenvalueList(q), k)
    oracle = np.sort(modular_superoperator_eigenvalues(EigenvalueList(q), k))
    np.testing.assert_allclose(expand(spectrum), oracle, rtol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=2, max_size=4), st.integers(1, 3), st.integers(1, 2))
def test_spectrum_symmetry_and_multiplicativity(weights, k1, k2):
    total = sum(weights)
    q = EigenvalueList(tuple(F(w, total) for w in weights))
    a, b = modular_spectrum(q, k1), modular_spectrum(q, k2)
    assert all(a[1 / v] == m for v, m in a.items())
    assert a[F(1)] >= 1
    assert spectrum_product(a, b) == modular_spectrum(q, k1 + k2)


def test_binomial_multiplicities():
    for k in range(1, 6):
        spectrum = modular_spectrum(Q13, k)
        assert dict(spectrum) == {F(2) ** m: comb(2 * k, k + m) for m in range(-k, k + 1)}


def test_kms_examples():
    assert kms_identity_check(HALF, 2, samples=20).max_residual <= 1e-12
    for k in range(1, 5):
        assert kms_identity_check(Q13, k, samples=100).passed


def test_factor_type_examples():
    assert str(uhf_factor_type(HALF)) == "II_1"
    assert str(uhf_factor_type(Q13)) == "III_{1/2}"
    x = np.array([1.0, 0.5, 2 ** -math.sqrt(2)])
    assert str(uhf_factor_type(tuple(x / x.sum()))) == "III_1"
    assert str(cuntz_factor_type(HALF)) == "III_{1/2}"
    label = cuntz_factor_type((0.25, 0.75))
    assert label.kind == "III_1" and label.caveat
    assert cuntz_factor_type((F(1, 4), F(3, 4)), method="exact").kind == "III_1"


def test_powers_of_lambda_example():
    # normalized (lambda, lambda^2) with lambda = 1/2 is (2/3, 1/3): two independent generators
    assert cuntz_factor_type((F(2, 3), F(1, 3))).kind == "III_1"
    # lambda with lambda + lambda^2 = 1 gives the single generator lambda
    lam = (math.sqrt(5) - 1) / 2
    label = cuntz_factor_type((lam, lam * lam))
    assert label.kind == "III_lambda" and label.lam == pytest.approx(lam)


@pytest.mark.parametrize("n", range(2, 7))
def test_equal_weights_cuntz(n):
    label = cuntz_factor_type(tuple([F(1, n)] * n))
    assert str(label) == f"III_{{1/{n}}}"
    assert str(cuntz_factor_type(tuple([1.0 / n] * n))).startswith("III_")
    assert cuntz_factor_type(tuple([1.0 / n] * n)).lam == pytest.approx(1 / n)
    assert str(uhf_factor_type(tuple([F(1, n)] * n))) == "II_1"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 50), st.integers(1, 50))
def test_two_point_uhf_label(a, b):
    if a == b:
        return
    t = F(a, a + b)
    label = uhf_factor_type((t, 1 - t))
    lam = min(t / (1 - t), (1 - t) / t)
    assert label.kind == "III_lambda" and label.lam == lam
    flabel = uhf_factor_type((float(t), float(1 - t)))
    assert flabel.kind == "III_lambda" and flabel.lam == pytest.approx(float(lam), rel=1e-9)


def test_exact_and_cf_agree_on_rational_groups():
    for q in [(F(1, 5), F(4, 5)), (F(1, 9), F(8, 9)), (F(1, 7), F(2, 7), F(4, 7))]:
        e = cuntz_factor_type(q)
        c = cuntz_factor_type(tuple(float(v) for v in q), method="cf")
        assert e.kind == c.kind
        if e.lam is not None:
            assert float(e.lam) == pytest.approx(c.lam)
    assert str(cuntz_factor_type((F(1, 7), F(2, 7), F(4, 7)))) == "III_1"


def test_continued_fraction():
    assert continued_fraction_rational(0.75).value == F(3, 4)
    assert continued_fraction_rational(-2.0).value == -2
    assert not continued_fraction_rational(math.sqrt(2)).rational
    assert not continued_fraction_rational(math.log(4) / math.log(4 / 3)).rational


def test_omega_examples():
    om = omega_from_q(HALF, math.log(2))
    assert om.omega == pytest.approx((1.0, 1.0))
    om = omega_from_q((0.25, 0.75), 1.0)
    assert om.omega == pytest.approx((math.log(4), math.log(4 / 3)))
    with pytest.raises(ValueError):
        omega_from_q(HALF, 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5), st.floats(0.1, 5.0))
def test_omega_round_trip(weights, beta):
    q = np.array(weights) / sum(weights)
    q = q / q.sum()
    om = omega_from_q(EigenvalueList(tuple(q), tol=1e-9), beta)
    np.testing.assert_allclose(om.q(), q, rtol=0, atol=1e-14)


def test_growth_report():
    rep = spectrum_growth_report(Q13, 3)
    assert rep.distinct(3) == sorted(F(2) ** m for m in range(-3, 4))
    assert [len(rep.spectra[k]) for k in (1, 2, 3)] == [3, 5, 7]
    assert all(rep.distinct(k) == [F(1)] for k in (1, 2, 3) for rep in [spectrum_growth_report(HALF, 3)])
    q = EigenvalueList((F(1, 5), F(4, 5)))
    assert [len(spectrum_growth_report(q, 6).spectra[k]) for k in range(1, 7)] == [2 * k + 1 for k in range(1, 7)]
    with pytest.raises(ValueError):
        spectrum_growth_report(Q13, 7)


def test_eigenvalue_validation_and_reduction():
    with pytest.raises(ValueError):
        EigenvalueList((F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        EigenvalueList((1.5, -0.5))
    Q = np.array([[0.5, 0.25], [0.25, 0.5]])
    q = EigenvalueList.from_density(Q)
    assert sorted(q.q) == pytest.approx([0.25, 0.75])
    assert EigenvalueList.from_density(RationalMatrix.diag([F(1, 3), F(2, 3)])).q == (F(1, 3), F(2, 3))
