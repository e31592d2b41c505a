"""Modular spectra of product states and ratio-group factor types.

For a diagonal density ``D = diag(q)^{(x)k}`` the modular map ``x -> D x D^{-1}``
has eigenvalues ``prod_l q_{i_l} / q_{j_l}``.  The factor-type labels come
from the multiplicative group generated by eigenvalue ratios (UHF / Powers
states) or by the eigenvalues themselves (Cuntz quasi-free states).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Literal, Sequence

import numpy as np
from sympy import factorint

from .linalg import exact_rank

CF_DEPTH = 40
CF_TOL = 1e-12


@dataclass(frozen=True)
class EigenvalueList:
    """Eigenvalues ``q_1..q_n`` of a diagonal density: positive, summing to one."""

    q: tuple
    tol: float = 1e-12

    def __post_init__(self):
        vals = tuple(Fraction(v) if isinstance(v, (Rational, str)) else float(v) for v in self.q)
        if len(vals) < 1:
            raise ValueError("need at least one eigenvalue")
        if any(v <= 0 for v in vals):
            raise ValueError(f"eigenvalues must be positive: {vals}")
        total = sum(vals)
        if (total != 1) if self.exact_values(vals) else abs(total - 1) > self.tol:
            raise ValueError(f"eigenvalues sum to {total}, not 1")
        object.__setattr__(self, "q", vals)

    @staticmethod
    def exact_values(vals) -> bool:
        return all(isinstance(v, Fraction) for v in vals)

    @property
    def exact(self) -> bool:
        return self.exact_values(self.q)

    @property
    def n(self) -> int:
        return len(self.q)

    @classmethod
    def from_density(cls, Q) -> "EigenvalueList":
        """Eigenvalues of a (possibly non-diagonal) density; exact when already diagonal."""
        from .tensor import DensityFunctional

        Q = Q if isinstance(Q, DensityFunctional) else DensityFunctional(Q)
        if Q.backend == "exact":
            entries = Q.Q.entries()
            if all(entries[i][j] == 0 for i in range(Q.n) for j in range(Q.n) if i != j):
                return cls(tuple(entries[i][i] for i in range(Q.n)))
        return cls(tuple(float(v) for v in Q.eigenvalues()))


def _coerce(q) -> EigenvalueList:
    return q if isinstance(q, EigenvalueList) else EigenvalueList(tuple(q))


def _merge_close(values: Sequence[float], rtol: float = 1e-9) -> Counter:
    out: Counter = Counter()
    rep: list[float] = []
    for v in sorted(values):
        if rep and abs(v - rep[-1]) <= rtol * max(abs(v), abs(rep[-1])):
            out[rep[-1]] += 1
        else:
            rep.append(v)
            out[v] += 1
    return out


def _ratio_multiset(q: EigenvalueList) -> Counter:
    if q.exact:
        return Counter(a / b for a in q.q for b in q.q)
    return _merge_close([a / b for a in q.q for b in q.q])


def _multiset_product(a: Counter, b: Counter, exact: bool) -> Counter:
    if exact:
        out: Counter = Counter()
        for x, mx in a.items():
            for y, my in b.items():
                out[x * y] += mx * my
        return out
    vals = []
    for x, mx in a.items():
        for y, my in b.items():
            vals.extend([x * y] * (mx * my))
    return _merge_close(vals)


def modular_spectrum(q, k: int) -> Counter:
    """Multiset ``{prod_l q_{i_l}/q_{j_l}}`` of the modular map on ``M_n^{(x)k}``.

    Exact eigenvalue input yields Fraction keys; floats are merged within a
    relative tolerance of 1e-9.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    q = _coerce(q)
    base = _ratio_multiset(q)
    return reduce(lambda acc, _: _multiset_product(acc, base, q.exact), range(k - 1), base)


def spectrum_product(a: Counter, b: Counter) -> Counter:
    exact = all(isinstance(x, Fraction) for x in list(a) + list(b))
    return _multiset_product(a, b, exact)


def modular_superoperator_eigenvalues(q, k: int) -> np.ndarray:
    """Eigenvalues of ``x -> D x D^{-1}`` by direct diagonalization of its matrix."""
    q = _coerce(q)
    D = reduce(np.kron, [np.diag([float(v) for v in q.q])] * k)
    Dinv = np.linalg.inv(D)
    # row-major vec(D x D^{-1}) = (D (x) D^{-T}) vec(x)
    return np.linalg.eigvals(np.kron(D, Dinv.T)).real


def modular_map(q, k: int, x: np.ndarray) -> np.ndarray:
    q = _coerce(q)
    d = reduce(np.kron, [np.array([float(v) for v in q.q])] * k)
    return (d[:, None] * x) / d[None, :]


@dataclass
class KMSReport:
    k: int
    samples: int
    max_residual: float
    tol: float
    seed: int | None

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def kms_identity_check(q, k: int, samples: int = 100, seed: int | None = 0, tol: float = 1e-10) -> KMSReport:
    """Check ``Tr(D x y) = Tr(D y Delta(x))`` with ``Delta(x) = D x D^{-1}`` on random pairs."""
    q = _coerce(q)
    rng = np.random.default_rng(seed)
    N = q.n**k
    d = reduce(np.kron, [np.array([float(v) for v in q.q])] * k)
    worst = 0.0
    for _ in range(samples):
        x = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        y = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        lhs = np.sum(d * np.diag(x @ y))
        rhs = np.sum(d * np.diag(y @ modular_map(q, k, x)))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return KMSReport(k, samples, float(worst), tol, seed)


# --------------------------------------------------------------------------
# factor types


@dataclass(frozen=True)
class FactorTypeLabel:
    kind: Literal["II_1", "III_lambda", "III_1"]
    lam: Fraction | float | None
    generators: tuple
    method: Literal["exact", "cf"]
    caveat: str | None = None

    def __post_init__(self):
        if (self.kind == "III_lambda") != (self.lam is not None):
            raise ValueError("lambda is reported exactly for III_lambda")
        if self.lam is not None and not 0 < self.lam < 1:
            raise ValueError(f"lambda must lie in (0,1), got {self.lam}")

    def __str__(self) -> str:
        if self.kind == "III_lambda":
            return f"III_{{{self.lam}}}"
        return self.kind

    def as_dict(self) -> dict:
        return {
            "label": str(self),
            "kind": self.kind,
            "lambda": None if self.lam is None else str(self.lam),
            "generators": [str(g) for g in self.generators],
            "method": self.method,
            "caveat": self.caveat,
        }


@dataclass
class CFResult:
    rational: bool
    value: Fraction | None
    depth: int
    partial_quotients: list[int] = field(default_factory=list)


def continued_fraction_rational(x: float, depth: int = CF_DEPTH, tol: float = CF_TOL) -> CFResult:
    """Decide rationality of ``x`` by whether its continued fraction terminates.

    The expansion stops once a fractional remainder drops below ``tol``; the
    convergent at that point is returned.  Not terminating within ``depth``
    terms is reported as irrational.
    """
    a0 = math.floor(x)
    quotients = [a0]
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    frac = x - a0
    for step in range(1, depth + 1):
        if abs(frac) < tol:
            return CFResult(True, Fraction(h, k), step, quotients)
        x = 1.0 / frac
        a = math.floor(x)
        frac = x - a
        quotients.append(a)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    return CFResult(False, None, depth, quotients)


def _group_label_cf(gens: Sequence[float], depth: int, tol: float) -> tuple[str, float | None, str | None]:
    logs = [math.log(g) for g in gens if abs(math.log(g)) > tol]
    if not logs:
        return "II_1", None, None
    ref = logs[0]
    ratios = []
    for g in logs:
        cf = continued_fraction_rational(g / ref, depth, tol)
        if not cf.rational:
            caveat = (
                f"continued fraction of log-ratio {g / ref!r} did not terminate within depth {depth} "
                f"at tol {tol}; irrationality is numerical, not proven"
            )
            return "III_1", None, caveat
        ratios.append(cf.value)
    num = reduce(math.gcd, [abs(r.numerator) for r in ratios])
    den = reduce(math.lcm, [r.denominator for r in ratios])
    step = abs(ref) * num / den
    return "III_lambda", math.exp(-step), None


def _prime_exponents(x: Fraction) -> dict[int, int]:
    out: dict[int, int] = {}
    for p, e in factorint(x.numerator).items():
        out[p] = out.get(p, 0) + e
    for p, e in factorint(x.denominator).items():
        out[p] = out.get(p, 0) - e
    return out


def _group_label_exact(gens: Sequence[Fraction]) -> tuple[str, Fraction | None, str | None]:
    """Exact classification of the subgroup of Q_{>0}^* generated by ``gens``.

    Positive rationals form a free abelian group on the primes, so the
    subgroup is cyclic iff the exponent vectors have rank <= 1.
    """
    vecs = [_prime_exponents(g) for g in gens if g != 1]
    if not vecs:
        return "II_1", None, None
    primes = sorted({p for v in vecs for p in v})
    rows = [[v.get(p, 0) for p in primes] for v in vecs]
    if exact_rank(rows) >= 2:
        return "III_1", None, "exact: prime-exponent vectors of the generators have rank >= 2"
    base = rows[0]
    g0 = reduce(math.gcd, [abs(e) for e in base])
    prim = [e // g0 for e in base]
    pivot = next(i for i, e in enumerate(prim) if e)
    mult = reduce(math.gcd, [abs(r[pivot] // prim[pivot]) for r in rows])
    gen = Fraction(1)
    for p, e in zip(primes, prim):
        gen *= Fraction(p) ** (e * mult)
    return "III_lambda", min(gen, 1 / gen), None


def _classify(gens, method: str, depth: int, tol: float) -> FactorTypeLabel:
    exact_in = all(isinstance(g, Fraction) for g in gens)
    if method == "auto":
        method = "exact" if exact_in else "cf"
    if method == "exact":
        if not exact_in:
            raise ValueError("exact classification needs rational eigenvalues")
        kind, lam, caveat = _group_label_exact(gens)
    else:
        kind, lam, caveat = _group_label_cf([float(g) for g in gens], depth, tol)
    return FactorTypeLabel(kind, lam, tuple(gens), method, caveat)


def uhf_factor_type(q, tol: float = CF_TOL, depth: int = CF_DEPTH, method: str = "auto") -> FactorTypeLabel:
    """Type of the product-state factor from the group generated by ratios ``q_i/q_j``."""
    q = _coerce(q)
    if q.n < 2:
        raise ValueError("need n >= 2")
    gens = sorted({a / b for a in q.q for b in q.q if a != b})
    return _classify(gens, method, depth, tol)


def cuntz_factor_type(q, tol: float = CF_TOL, depth: int = CF_DEPTH, method: str = "auto") -> FactorTypeLabel:
    """Type of the quasi-free-state factor from the group generated by the ``q_i`` themselves."""
    q = _coerce(q)
    if q.n < 2:
        raise ValueError("need n >= 2")
    gens = sorted(set(q.q))
    return _classify(gens, method, depth, tol)


@dataclass(frozen=True)
class OmegaExponents:
    beta: float
    omega: tuple[float, ...]

    def q(self) -> tuple[float, ...]:
        return tuple(math.exp(-self.beta * w) for w in self.omega)


def omega_from_q(q, beta: float) -> OmegaExponents:
    """Solve ``e^{-beta omega_i} = q_i``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    q = _coerce(q)
    return OmegaExponents(float(beta), tuple(-math.log(float(v)) / float(beta) for v in q.q))


@dataclass
class SpectrumGrowth:
    q: EigenvalueList
    spectra: dict[int, Counter]

    def distinct(self, k: int) -> list:
        return sorted(self.spectra[k])

    def table(self) -> list[tuple]:
        return [(k, str(v), m) for k in sorted(self.spectra) for v, m in sorted(self.spectra[k].items())]


def spectrum_growth_report(q, k_max: int) -> SpectrumGrowth:
    if not 1 <= k_max <= 6:
        raise ValueError("k_max must be in 1..6")
    q = _coerce(q)
    spectra = {1: modular_spectrum(q, 1)}
    base = spectra[1]
    for k in range(2, k_max + 1):
        spectra[k] = _multiset_product(spectra[k - 1], base, q.exact)
    return SpectrumGrowth(q, spectra)
