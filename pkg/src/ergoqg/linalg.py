"""Exact Gaussian-rational matrices and a few rank helpers.

A :class:`RationalMatrix` stores integer numerator arrays for the real and
imaginary parts over one common positive denominator.  Numerators live in
``int64`` while the arithmetic provably fits and are promoted to Python
integers (``object`` dtype) otherwise, so results never round.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Sequence

import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .scalars import QQi, exact_value

_SAFE = 2**62


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(a.max())), abs(int(a.min()))))


def _as_obj(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _fit(*arrays: np.ndarray, bound: int) -> list[np.ndarray]:
    """Promote to arbitrary-precision integers when ``bound`` may overflow int64."""
    if bound < _SAFE and all(a.dtype != object for a in arrays):
        return list(arrays)
    return [_as_obj(a) for a in arrays]


def _shrink(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and _maxabs(a) < _SAFE:
        return a.astype(np.int64)
    return a


class RationalMatrix:
    """Dense matrix with exact Gaussian-rational entries ``(re + i*im) / den``."""

    __slots__ = ("re", "im", "den")

    def __init__(self, re: np.ndarray, im: np.ndarray | None = None, den: int = 1, *, reduce: bool = True):
        re = np.asarray(re)
        if re.dtype != object:
            re = re.astype(np.int64)
        if im is not None:
            im = np.asarray(im)
            if im.dtype != object:
                im = im.astype(np.int64)
            if im.shape != re.shape:
                raise ValueError("real and imaginary numerators differ in shape")
            if not im.any():
                im = None
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.re, self.im, self.den = re, im, den
        if reduce:
            self._reduce()

    def _reduce(self) -> None:
        g = self.den
        if g != 1 and self.re.size:
            g = gcd(g, int(np.gcd.reduce(self.re.ravel())))
            if self.im is not None and g != 1:
                g = gcd(g, int(np.gcd.reduce(self.im.ravel())))
        if g > 1:
            self.re = self.re // g
            if self.im is not None:
                self.im = self.im // g
            self.den //= g
        self.re = _shrink(self.re)
        if self.im is not None:
            self.im = _shrink(self.im)

    # construction -----------------------------------------------------
    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        """Build from nested rows of ints, Fractions, ``"p/q"`` strings or QQi."""
        vals = [[_to_exact(v) for v in row] for row in rows]
        if not vals or any(len(r) != len(vals[0]) for r in vals):
            raise ValueError("rows must be non-empty and of equal length")
        parts = [(v.re, v.im) if isinstance(v, QQi) else (v, Fraction(0)) for r in vals for v in r]
        den = 1
        for a, b in parts:
            den = lcm(den, a.denominator, b.denominator)
        shape = (len(vals), len(vals[0]))
        re = np.array([int(a * den) for a, _ in parts], dtype=object).reshape(shape)
        im = np.array([int(b * den) for _, b in parts], dtype=object).reshape(shape)
        return cls(re, im, den)

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        return cls(np.eye(size, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        return cls(np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def diag(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        rows = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_entries(rows)

    # basic properties ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.re.shape

    @property
    def is_real(self) -> bool:
        return self.im is None

    def _im(self) -> np.ndarray:
        return np.zeros_like(self.re) if self.im is None else self.im

    def __getitem__(self, idx) -> Fraction | QQi:
        re = Fraction(int(self.re[idx]), self.den)
        im = Fraction(int(self.im[idx]), self.den) if self.im is not None else 0
        return exact_value(re, im)

    def to_complex(self) -> np.ndarray:
        out = self.re.astype(np.float64) / self.den
        if self.im is not None:
            out = out + 1j * (self.im.astype(np.float64) / self.den)
        return out.astype(np.complex128)

    def entries(self) -> list[list]:
        return [[self[i, j] for j in range(self.shape[1])] for i in range(self.shape[0])]

    # arithmetic ---------------------------------------------------------
    def _common(self, other: "RationalMatrix"):
        L = lcm(self.den, other.den)
        fa, fb = L // self.den, L // other.den
        bound = max(_maxabs(self.re), _maxabs(self._im())) * fa + max(_maxabs(other.re), _maxabs(other._im())) * fb
        ar, ai, br, bi = _fit(self.re, self._im(), other.re, other._im(), bound=max(bound, fa, fb))
        return ar * fa, ai * fa, br * fb, bi * fb, L

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        ar, ai, br, bi, L = self._common(other)
        return RationalMatrix(ar + br, ai + bi, L)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        ar, ai, br, bi, L = self._common(other)
        return RationalMatrix(ar - br, ai - bi, L)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(-self.re, None if self.im is None else -self.im, self.den, reduce=False)

    def scale(self, c) -> "RationalMatrix":
        """Multiply by an exact scalar."""
        c = _to_exact(c)
        cr, ci = (c.re, c.im) if isinstance(c, QQi) else (c, Fraction(0))
        d = lcm(cr.denominator, ci.denominator)
        nr, ni = int(cr * d), int(ci * d)
        bound = max(_maxabs(self.re), _maxabs(self._im())) * (abs(nr) + abs(ni))
        re, im = _fit(self.re, self._im(), bound=bound)
        return RationalMatrix(re * nr - im * ni, re * ni + im * nr, self.den * d)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        inner = self.shape[-1]
        bound = 2 * inner * max(_maxabs(self.re), _maxabs(self._im())) * max(_maxabs(other.re), _maxabs(other._im()))
        if self.im is None and other.im is None:
            a, b = _fit(self.re, other.re, bound=bound)
            return RationalMatrix(a @ b, None, self.den * other.den)
        ar, ai, br, bi = _fit(self.re, self._im(), other.re, other._im(), bound=bound)
        return RationalMatrix(ar @ br - ai @ bi, ar @ bi + ai @ br, self.den * other.den)

    def kron(self, other: "RationalMatrix") -> "RationalMatrix":
        bound = 2 * max(_maxabs(self.re), _maxabs(self._im())) * max(_maxabs(other.re), _maxabs(other._im()))
        if self.im is None and other.im is None:
            a, b = _fit(self.re, other.re, bound=bound)
            return RationalMatrix(np.kron(a, b), None, self.den * other.den)
        ar, ai, br, bi = _fit(self.re, self._im(), other.re, other._im(), bound=bound)
        re = np.kron(ar, br) - np.kron(ai, bi)
        im = np.kron(ar, bi) + np.kron(ai, br)
        return RationalMatrix(re, im, self.den * other.den)

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self.re.T.copy(), None if self.im is None else self.im.T.copy(), self.den, reduce=False)

    def conj(self) -> "RationalMatrix":
        return RationalMatrix(self.re, None if self.im is None else -self.im, self.den, reduce=False)

    def adjoint(self) -> "RationalMatrix":
        return self.T.conj()

    def trace(self) -> Fraction | QQi:
        tr = int(np.trace(self.re))
        ti = int(np.trace(self.im)) if self.im is not None else 0
        return exact_value(Fraction(tr, self.den), Fraction(ti, self.den))

    def pairing(self, other: "RationalMatrix") -> Fraction | QQi:
        """Bilinear sum ``sum_ij A_ij B_ij`` (no conjugation), i.e. ``Tr(A^t B)``."""
        bound = 2 * self.re.size * max(_maxabs(self.re), _maxabs(self._im())) * max(_maxabs(other.re), _maxabs(other._im()))
        ar, ai, br, bi = _fit(self.re, self._im(), other.re, other._im(), bound=bound)
        re = int((ar * br).sum() - (ai * bi).sum())
        im = int((ar * bi).sum() + (ai * br).sum())
        d = self.den * other.den
        return exact_value(Fraction(re, d), Fraction(im, d))

    def max_abs(self) -> Fraction:
        """Largest absolute value among real and imaginary parts (exact)."""
        return Fraction(max(_maxabs(self.re), _maxabs(self._im())), self.den)

    def is_zero(self) -> bool:
        return not self.re.any() and (self.im is None or not self.im.any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and (self - other).is_zero()

    __hash__ = None  # mutable arrays inside

    def reshape(self, *shape: int) -> "RationalMatrix":
        return RationalMatrix(
            self.re.reshape(*shape), None if self.im is None else self.im.reshape(*shape), self.den, reduce=False
        )

    def __repr__(self) -> str:
        return f"RationalMatrix(shape={self.shape}, den={self.den}, complex={self.im is not None})"


def _to_exact(v) -> Fraction | QQi:
    if isinstance(v, QQi):
        return v
    if isinstance(v, str):
        s = v.strip()
        if s.endswith("i"):
            raise ValueError(f"complex literal {v!r} is not supported; pass a QQi")
        return Fraction(s)
    if isinstance(v, Rational):
        return Fraction(v)
    if isinstance(v, (bool, np.integer)):
        return Fraction(int(v))
    raise TypeError(f"{v!r} is not an exact value")


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank over the rationals of a matrix given as rows of ints/Fractions."""
    if not rows:
        return 0
    data = [[QQ(Fraction(v).numerator, Fraction(v).denominator) for v in r] for r in rows]
    return DomainMatrix(data, (len(data), len(data[0])), QQ).rank()


def exact_integer_rank(a: np.ndarray) -> int:
    """Rank of an integer matrix, computed exactly."""
    rows = [[ZZ(int(v)) for v in r] for r in np.asarray(a)]
    if not rows or not rows[0]:
        return 0
    return DomainMatrix(rows, (len(rows), len(rows[0])), ZZ).convert_to(QQ).rank()


def exact_nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of the rational nullspace ``{x : A x = 0}``."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    data = [[QQ(Fraction(v).numerator, Fraction(v).denominator) for v in r] for r in rows]
    ns = DomainMatrix(data, (len(data), ncols), QQ).nullspace()
    out = []
    for vec in ns.to_Matrix().tolist():
        out.append([Fraction(int(x.p), int(x.q)) for x in vec])
    return out


def gap_rank(singular_values: Sequence[float], gap: float = 1e-4, atol: float = 1e-12) -> int:
    """Numerical rank by a relative singular-value gap.

    Values at or below ``atol`` count as zero.  The rank is the first ``r``
    with ``s[r] / s[r-1] < gap`` (descending order); with no such cut every
    value counts.
    """
    s = np.sort(np.abs(np.asarray(singular_values, dtype=float)))[::-1]
    s = np.where(s > atol, s, 0.0)
    if s.size == 0 or s[0] == 0.0:
        return 0
    for r in range(1, s.size):
        if s[r] / s[r - 1] < gap:
            return r
    return int(s.size)
