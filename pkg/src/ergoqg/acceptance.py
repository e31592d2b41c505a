"""The nine acceptance criteria as callable checks with runtime budgets."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np

from .cuntz import (
    CuntzElement,
    all_words,
    identification_residual,
    invariance_check,
    quasi_free_state,
)
from .linalg import RationalMatrix
from .magic import (
    build_magic,
    noncommutativity_witness,
    tensor_compose,
    verify_magic,
    word_independence_rank,
)
from .modular import (
    EigenvalueList,
    cuntz_factor_type,
    kms_identity_check,
    modular_spectrum,
    modular_superoperator_eigenvalues,
    spectrum_product,
    uhf_factor_type,
)
from .quotient import ACCEPTANCE_PAIRS, quotient_check, standard_pair
from .scalars import QQi
from .temperley_lieb import catalan, markov_check, quantum_vs_classical_contrast, tl_span_dimension, verify_tl_relations
from .tensor import (
    DensityFunctional,
    classical_point_check,
    compatibility_residual,
    random_classical_points,
    random_diagonal_points,
    random_operator,
    random_rational_operator,
    restriction_residual,
)

# tolerances and budgets pinned by the acceptance criteria
ZERO = Fraction(0)
INVARIANCE_TOL = 1e-10
MAGIC_TOL = 1e-12
WITNESS_TOL = 1e-12
KMS_TOL = 1e-10
TOWER_TOL = 1e-10
HAAR_SAMPLES = 2000
RANK_GAP = 1e-4
TIME_LIMITS = {1: 10.0, 2: 30.0, 3: 120.0, 4: 30.0, 5: 1.0, 6: 30.0, 7: 30.0, 8: 5.0, 9: 30.0}
FULL_SUITE_LIMIT = 300.0


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: dict[str, bool]
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0
    limit: float = float("inf")

    @property
    def within_time(self) -> bool:
        return self.elapsed < self.limit

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and self.within_time

    @property
    def failures(self) -> list[str]:
        out = [name for name, ok in self.checks.items() if not ok]
        if not self.within_time:
            out.append(f"runtime {self.elapsed:.2f}s exceeds {self.limit:.0f}s")
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "" if self.passed else " [" + "; ".join(self.failures) + "]"
        return f"{status} criterion {self.number}: {self.title} ({self.elapsed:.2f}s < {self.limit:.0f}s){extra}"

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "number": self.number,
            "title": self.title,
            "checks": self.checks,
            "details": self.details,
            "limit_seconds": self.limit,
            "passed": all(self.checks.values()),
        }
        if timing:
            out["elapsed_seconds"] = round(self.elapsed, 3)
        return out


def _timed(number: int, title: str, body: Callable[[], tuple[dict, dict]]) -> CriterionResult:
    start = time.perf_counter()
    checks, details = body()
    elapsed = time.perf_counter() - start
    return CriterionResult(number, title, checks, details, elapsed, TIME_LIMITS[number])


def criterion_1_tl_relations(seed: int = 0) -> CriterionResult:
    def body():
        checks, details = {}, {}
        for n, k in itertools.product((2, 3), range(2, 7)):
            rep = verify_tl_relations(n, k)
            checks[f"n={n},k={k}"] = rep.passed
            details[f"n={n},k={k}"] = rep.residuals
        return checks, details

    return _timed(1, "Temperley-Lieb relations exact (n in {2,3}, k <= 6)", body)


def criterion_2_markov(seed: int = 0) -> CriterionResult:
    def body():
        checks, details = {}, {}
        for n, k in itertools.product((2, 3), range(3, 7)):
            rep = markov_check(n, k)
            checks[f"n={n},k={k}"] = rep.worst_residual == ZERO
            checks[f"n={n},k={k} trace(e_s)=1/n^2"] = all(v == Fraction(1, n * n) for v in rep.trace_of_projections.values())
            details[f"n={n},k={k}"] = {"words": rep.word_count, "worst_residual": rep.worst_residual}
        return checks, details

    return _timed(2, "Markov trace property exact (n in {2,3}, k <= 6)", body)


def criterion_3_tl_dimensions(seed: int = 0) -> CriterionResult:
    def body():
        checks, details = {}, {}
        for n, k in itertools.product((2, 3), range(2, 6)):
            d = tl_span_dimension(n, k)
            checks[f"dim TL(n={n},k={k}) = Catalan({k})"] = d == catalan(k)
            details[f"n={n},k={k}"] = d
        rep = quantum_vs_classical_contrast(2, 2, "O", samples=HAAR_SAMPLES, seed=seed, gap=RANK_GAP)
        checks["dim Fix_O(2)(M_2^(x)2) = 3"] = rep.dim_classical == 3
        checks["classical commutant strictly larger than TL span"] = rep.dim_classical > rep.dim_tl
        checks["TL span inside O(2) commutant"] = rep.contained
        details["contrast"] = {"dim_tl": rep.dim_tl, "dim_classical": rep.dim_classical, "samples": HAAR_SAMPLES, "seed": seed}
        return checks, details

    return _timed(3, "TL span dimensions and O(2) commutant contrast", body)


def criterion_4_quasi_free(seed: int = 0) -> CriterionResult:
    def body():
        Q = DensityFunctional(RationalMatrix.diag([Fraction(1, 3), Fraction(2, 3)]))
        checks, details = {}, {}
        unbalanced = list(all_words(2, 8, balanced=False))
        checks["vanishes on |I| != |J| up to length 8"] = all(
            quasi_free_state(Q, CuntzElement(2, {w: Fraction(1)})) == 0 for w in unbalanced
        )
        balanced = [w for w in all_words(2, 8, balanced=True) if w.I]
        worst = max(abs(identification_residual(Q, w)) for w in balanced)
        checks["matrix-unit identification exact"] = worst == 0
        details["unbalanced_words"] = len(unbalanced)
        details["balanced_words"] = len(balanced)
        rng = np.random.default_rng(seed)
        sample = list(all_words(2, 6))
        worst_dev = 0.0
        all_ok = True
        for U in random_diagonal_points(Q, 50, rng):
            rep = invariance_check(U, Q, sample, tol=INVARIANCE_TOL)
            all_ok &= rep.passed
            worst_dev = max(worst_dev, rep.max_deviation)
        checks["invariance at 50 diagonal classical points"] = all_ok
        details["max_invariance_deviation"] = worst_dev
        swap = np.array([[0, 1], [1, 0]])
        neg = invariance_check(swap, Q, sample, tol=INVARIANCE_TOL)
        checks["swap fails relation check"] = not classical_point_check(swap, Q).relations
        checks["swap fails invariance"] = not neg.invariant
        details["swap_deviation"] = neg.max_deviation
        return checks, details

    return _timed(4, "quasi-free state on Cuntz words", body)


def criterion_5_factor_types(seed: int = 0) -> CriterionResult:
    def body():
        half = (Fraction(1, 2), Fraction(1, 2))
        x = np.array([1.0, 2.0**-1, 2.0 ** -np.sqrt(2)])
        x = tuple(x / x.sum())
        labels = {
            "uhf(1/2,1/2)": (uhf_factor_type(EigenvalueList(half)), "II_1"),
            "uhf(1/3,2/3)": (uhf_factor_type(EigenvalueList((Fraction(1, 3), Fraction(2, 3)))), "III_{1/2}"),
            "cuntz(1/2,1/2)": (cuntz_factor_type(EigenvalueList(half)), "III_{1/2}"),
            "cuntz(1,2^-1,2^-sqrt2)": (cuntz_factor_type(EigenvalueList(x), method="cf"), "III_1"),
            "cuntz(1/4,3/4) continued fraction": (cuntz_factor_type(EigenvalueList((0.25, 0.75)), method="cf"), "III_1"),
        }
        checks = {f"{name} = {want}": str(lab) == want for name, (lab, want) in labels.items()}
        cf = labels["cuntz(1,2^-1,2^-sqrt2)"][0]
        checks["III_1 verdict carries a caveat"] = bool(cf.caveat)
        return checks, {name: lab.as_dict() for name, (lab, _) in labels.items()}

    return _timed(5, "factor-type labels", body)


def criterion_6_modular(seed: int = 0) -> CriterionResult:
    def body():
        q = EigenvalueList((Fraction(1, 3), Fraction(2, 3)))
        checks, details = {}, {}
        spectra = {k: modular_spectrum(q, k) for k in range(1, 5)}
        for k, spectrum in spectra.items():
            want = {Fraction(2) ** m: comb(2 * k, k + m) for m in range(-k, k + 1)}
            checks[f"k={k} values 2^m with multiplicity C(2k,k+m)"] = dict(spectrum) == want
            checks[f"k={k} inversion symmetric"] = all(spectrum[1 / v] == c for v, c in spectrum.items())
            oracle = np.sort(modular_superoperator_eigenvalues(q, k))
            ours = np.sort(np.array([float(v) for v, c in spectrum.items() for _ in range(c)]))
            checks[f"k={k} matches dense eigenvalues"] = bool(np.allclose(oracle, ours, rtol=1e-12, atol=0))
        for k1, k2 in [(1, 1), (1, 2), (2, 2), (1, 3)]:
            checks[f"multiplicative {k1}+{k2}"] = spectrum_product(spectra[k1], spectra[k2]) == spectra[k1 + k2]
        worst = 0.0
        for k in range(1, 5):
            rep = kms_identity_check(q, k, samples=100, seed=seed, tol=KMS_TOL)
            worst = max(worst, rep.max_residual)
        checks["KMS residual <= 1e-10 (100 pairs, k <= 4)"] = worst <= KMS_TOL
        details["kms_max_residual"] = worst
        details["spectra"] = {k: {str(v): c for v, c in sorted(s.items())} for k, s in spectra.items()}
        return checks, details

    return _timed(6, "modular spectrum and KMS identity", body)


def criterion_7_magic(seed: int = 0) -> CriterionResult:
    def body():
        grid = np.linspace(0.0, 2 * np.pi, 100)
        worst = max(verify_magic(build_magic(t), MAGIC_TOL).max_residual for t in grid)
        checks = {"magic axioms on 100-point grid": worst <= MAGIC_TOL}
        N = tensor_compose(build_magic(np.pi / 3), build_magic(np.pi / 5))
        checks["tensor_compose is magic"] = verify_magic(N, MAGIC_TOL).passed
        wit = max(abs(noncommutativity_witness(t) - abs(np.sin(t)) / 2) for t in grid)
        checks["commutator norm = |sin|/2"] = wit <= WITNESS_TOL
        ranks = {L: word_independence_rank(L, seed=seed) for L in range(1, 9)}
        checks["word rank 2L+1 for L <= 8"] = all(r == 2 * L + 1 for L, r in ranks.items())
        return checks, {"max_magic_residual": worst, "witness_error": wit, "ranks": ranks}

    return _timed(7, "magic unitary family", body)


def criterion_8_quotients(seed: int = 0) -> CriterionResult:
    def body():
        checks, details = {}, {}
        for pair in ACCEPTANCE_PAIRS:
            rep = quotient_check(standard_pair(pair), pair)
            checks[f"{pair} dim = index"] = rep.fixed.dimension == rep.fixed.subgroup.index and rep.fixed.span_matches
            checks[f"{pair} ergodic"] = rep.ergodic_dimension == 1
            checks[f"{pair} integration formula exact"] = rep.integration.passed
            checks[f"{pair} E idempotent unital positive"] = rep.expectation.passed
            details[pair] = rep.as_dict()
        return checks, details

    return _timed(8, "finite quotient spaces", body)


_PYTHAGOREAN = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)]


def _rational_phase(rng: np.random.Generator) -> QQi:
    a, b, c = _PYTHAGOREAN[int(rng.integers(len(_PYTHAGOREAN)))]
    sa, sb = rng.choice([-1, 1], size=2)
    if rng.integers(2):
        a, b = b, a
    return QQi(Fraction(int(sa) * a, c), Fraction(int(sb) * b, c))


def rational_classical_points(count: int, rng: np.random.Generator):
    """Exact classical points: Gaussian-rational diagonal phases for ``diag(1/3, 2/3)``,
    rational rotations times phases for ``I/2``."""
    diag_q = DensityFunctional(RationalMatrix.diag([Fraction(1, 3), Fraction(2, 3)]))
    flat_q = DensityFunctional(RationalMatrix.diag([Fraction(1, 2), Fraction(1, 2)]))
    out = []
    for i in range(count):
        if i % 2 == 0:
            out.append((RationalMatrix.diag([_rational_phase(rng), _rational_phase(rng)]), diag_q))
        else:
            a, b, c = _PYTHAGOREAN[int(rng.integers(len(_PYTHAGOREAN)))]
            rot = RationalMatrix.from_entries([[Fraction(a, c), Fraction(-b, c)], [Fraction(b, c), Fraction(a, c)]])
            out.append((rot @ RationalMatrix.diag([_rational_phase(rng), 1]), flat_q))
    return out


def criterion_9_tower(seed: int = 0) -> CriterionResult:
    def body():
        rng = np.random.default_rng(seed)
        pairs = [(j, k) for k in range(2, 6) for j in range(1, k)]
        Qf = DensityFunctional(np.array([[0.3, 0.1 - 0.05j], [0.1 + 0.05j, 0.7]]))
        worst_c = worst_r = 0.0
        for U in random_classical_points(Qf, 20, rng):
            for j, k in pairs:
                x = random_operator(2, j, rng)
                worst_c = max(worst_c, float(compatibility_residual(U.U, x, k)))
                worst_r = max(worst_r, abs(restriction_residual(Qf, x, k)))
        exact_c = exact_r = Fraction(0)
        points_ok = True
        for U, Q in rational_classical_points(20, rng):
            points_ok &= classical_point_check(U, Q, tol=0.0).passed
            for j, k in pairs:
                x = random_rational_operator(2, j, rng, bound=3)
                exact_c = max(exact_c, compatibility_residual(U, x, k))
                exact_r = max(exact_r, abs(restriction_residual(Q, x, k)))
        checks = {
            "floating compatibility <= 1e-10": worst_c <= TOWER_TOL,
            "floating restriction <= 1e-10": worst_r <= TOWER_TOL,
            "rational points are exact classical points": points_ok,
            "rational compatibility exact": exact_c == 0,
            "rational restriction exact": exact_r == 0,
        }
        details = {
            "pairs": len(pairs),
            "float_compatibility": worst_c,
            "float_restriction": worst_r,
            "exact_compatibility": exact_c,
            "exact_restriction": exact_r,
        }
        return checks, details

    return _timed(9, "inductive-system compatibility tower", body)


CRITERIA: dict[int, Callable[[int], CriterionResult]] = {
    1: criterion_1_tl_relations,
    2: criterion_2_markov,
    3: criterion_3_tl_dimensions,
    4: criterion_4_quasi_free,
    5: criterion_5_factor_types,
    6: criterion_6_modular,
    7: criterion_7_magic,
    8: criterion_8_quotients,
    9: criterion_9_tower,
}


def run_all(seed: int = 0, only: list[int] | None = None) -> list[CriterionResult]:
    return [CRITERIA[i](seed) for i in (only or sorted(CRITERIA))]
