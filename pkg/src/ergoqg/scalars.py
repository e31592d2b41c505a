"""Scalars for the two backends.

The exact backend works with :class:`fractions.Fraction` for real values and
:class:`QQi` for Gaussian rationals.  The floating backend uses Python/numpy
``complex``.  Mixing an exact value with a float produces a float.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Exact = Union[Fraction, "QQi"]
Scalar = Union[Fraction, "QQi", complex, float]


class QQi:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, QQi):
            return other
        if isinstance(other, Rational):
            return QQi(other, 0)
        return None

    def __add__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return complex(self) + other
        return exact_value(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return complex(self) - other
        return exact_value(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return other - complex(self)
        return exact_value(o.re - self.re, o.im - self.im)

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return complex(self) * other
        return exact_value(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        num = num if isinstance(num, QQi) else QQi(num)
        return exact_value(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        o = QQi._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return complex(self) ** k
        out: Exact = Fraction(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        o = QQi._coerce(other)
        if o is None:
            if isinstance(other, (complex, float)):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"

    def __str__(self):
        return format_exact(self)


def exact_value(re, im=0) -> Exact:
    """Return a Fraction when the imaginary part vanishes, else a QQi."""
    re, im = Fraction(re), Fraction(im)
    return re if im == 0 else QQi(re, im)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"``, an integer, a decimal, or a complex literal such as ``0.1-0.05j``.

    Integers and ``p/q`` literals stay exact; anything with a decimal point or
    exponent becomes a float, and anything with ``j`` or ``i`` a complex.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty scalar literal")
    if "j" in s or "i" in s:
        return complex(s.replace("i", "j"))
    if any(ch in s for ch in ".eE") and "/" not in s:
        return float(s)
    return Fraction(s)


def is_exact(x) -> bool:
    return isinstance(x, (Rational, QQi))


def conj(x):
    """Complex conjugate that keeps exact values exact."""
    if isinstance(x, Rational):
        return x
    return x.conjugate()


def re_im(x) -> tuple[Fraction, Fraction] | tuple[float, float]:
    if isinstance(x, QQi):
        return x.re, x.im
    if isinstance(x, Rational):
        return Fraction(x), Fraction(0)
    z = complex(x)
    return z.real, z.imag


def format_exact(x) -> str:
    """Render a scalar for reports: rationals as ``p/q``, complex as ``a+bi``."""
    if isinstance(x, QQi):
        sign = "+" if x.im >= 0 else "-"
        return f"{x.re}{sign}{abs(x.im)}i"
    if isinstance(x, Rational):
        return str(Fraction(x))
    z = complex(x)
    if z.imag == 0:
        return repr(z.real)
    return repr(z)


def magnitude(x) -> Fraction | float:
    """``|x|`` exactly where possible (real exact values), otherwise a float."""
    if isinstance(x, Rational):
        return abs(Fraction(x))
    if isinstance(x, QQi) and x.im == 0:
        return abs(x.re)
    return abs(complex(x))
