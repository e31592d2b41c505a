"""Word calculus for the Cuntz algebra O_n and its quasi-free states.

Elements are finite combinations of normal-form words ``S_I S_J^*`` where
``S_I = S_{i_1} ... S_{i_r}``.  The isometry relations ``S_a^* S_b = delta_ab``
are applied as rewrites.  ``sum_k S_k S_k^* = 1`` is deliberately not a
rewrite rule; the words ``S_I S_J^*`` stay a basis and the relation is checked
through states instead.
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .linalg import RationalMatrix
from .scalars import Scalar, conj, magnitude
from .tensor import (
    DensityFunctional,
    PointCheck,
    TensorOperator,
    UnitaryPoint,
    classical_point_check,
    elementary_tensor,
    matrix_unit,
    product_functional,
)

MAX_WORD_LENGTH = 12


class CuntzWord(NamedTuple):
    """``S_I S_J^*`` with ``I = (i_1..i_r)``, ``J = (j_1..j_s)``; ``S_J^* = S_{j_s}^* ... S_{j_1}^*``."""

    I: tuple[int, ...]
    J: tuple[int, ...]

    @property
    def grading(self) -> tuple[int, int]:
        return len(self.I), len(self.J)

    @property
    def length(self) -> int:
        return len(self.I) + len(self.J)

    def __str__(self) -> str:
        if not self.I and not self.J:
            return "1"
        parts = [f"S{i}" for i in self.I] + [f"S{j}*" for j in reversed(self.J)]
        return " ".join(parts)


UNIT_WORD = CuntzWord((), ())


def _word_product(a: CuntzWord, b: CuntzWord) -> CuntzWord | None:
    """Normal form of ``(S_I S_J^*)(S_K S_L^*)``, or None when it vanishes."""
    J, K = a.J, b.I
    if len(J) <= len(K):
        if K[: len(J)] != J:
            return None
        return CuntzWord(a.I + K[len(J) :], b.J)
    if J[: len(K)] != K:
        return None
    return CuntzWord(a.I, b.J + J[len(K) :])


class CuntzElement:
    """Finite linear combination of normal-form words in ``O_n``."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[CuntzWord, Scalar] | None = None):
        if n < 2:
            raise ValueError("O_n needs n >= 2")
        self.n = n
        clean: dict[CuntzWord, Scalar] = {}
        for w, c in (terms or {}).items():
            w = CuntzWord(tuple(w[0]), tuple(w[1]))
            if any(not 1 <= i <= n for i in w.I + w.J):
                raise ValueError(f"index out of range in {w} for n={n}")
            if c != 0:
                clean[w] = c
        self.terms = clean

    # constructors -----------------------------------------------------
    @classmethod
    def unit(cls, n: int) -> "CuntzElement":
        return cls(n, {UNIT_WORD: Fraction(1)})

    @classmethod
    def word(cls, n: int, I: Iterable[int] = (), J: Iterable[int] = (), coeff: Scalar = Fraction(1)) -> "CuntzElement":
        return cls(n, {CuntzWord(tuple(I), tuple(J)): coeff})

    @classmethod
    def S(cls, n: int, i: int) -> "CuntzElement":
        return cls.word(n, (i,), ())

    @classmethod
    def S_star(cls, n: int, i: int) -> "CuntzElement":
        return cls.word(n, (), (i,))

    @classmethod
    def parse(cls, text: str, n: int) -> "CuntzElement":
        """Parse a product of letters such as ``"S1 S2 S2* S1*"``; ``"1"`` is the unit."""
        tokens = text.replace("·", " ").split()
        out = cls.unit(n)
        for tok in tokens:
            if tok == "1":
                continue
            m = re.fullmatch(r"S(\d+)(\*?)", tok)
            if not m:
                raise ValueError(f"cannot parse Cuntz letter {tok!r}")
            i = int(m.group(1))
            out = out * (cls.S_star(n, i) if m.group(2) else cls.S(n, i))
        return out

    # algebra ------------------------------------------------------------
    def _check(self, other: "CuntzElement") -> None:
        if self.n != other.n:
            raise ValueError(f"different Cuntz algebras O_{self.n} and O_{other.n}")

    def __add__(self, other: "CuntzElement") -> "CuntzElement":
        self._check(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            acc[w] = acc.get(w, 0) + c
        return CuntzElement(self.n, acc)

    def __neg__(self) -> "CuntzElement":
        return CuntzElement(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "CuntzElement") -> "CuntzElement":
        return self + (-other)

    def scale(self, c: Scalar) -> "CuntzElement":
        return CuntzElement(self.n, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, CuntzElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def adjoint(self) -> "CuntzElement":
        return adjoint(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CuntzElement):
            return NotImplemented
        return self.n == other.n and (self - other).terms == {}

    __hash__ = None

    def grading(self) -> dict[tuple[int, int], "CuntzElement"]:
        return grading_decompose(self)

    @property
    def max_length(self) -> int:
        return max((w.length for w in self.terms), default=0)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})·{w}" for w, c in sorted(self.terms.items()))


def multiply(x: CuntzElement, y: CuntzElement) -> CuntzElement:
    """Normal-form product using ``S_a^* S_b = delta_ab``."""
    x._check(y)
    acc: dict[CuntzWord, Scalar] = defaultdict(int)
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            w = _word_product(a, b)
            if w is not None:
                acc[w] = acc[w] + ca * cb
    return CuntzElement(x.n, acc)


def adjoint(x: CuntzElement) -> CuntzElement:
    """``(c S_I S_J^*)^* = conj(c) S_J S_I^*``."""
    return CuntzElement(x.n, {CuntzWord(w.J, w.I): conj(c) for w, c in x.terms.items()})


def grading_decompose(x: CuntzElement) -> dict[tuple[int, int], CuntzElement]:
    """Split ``x`` into components of fixed grading ``(r, s) = (|I|, |J|)``."""
    parts: dict[tuple[int, int], dict] = defaultdict(dict)
    for w, c in x.terms.items():
        parts[w.grading][w] = c
    return {g: CuntzElement(x.n, t) for g, t in sorted(parts.items())}


def cuntz_relation_element(n: int) -> CuntzElement:
    """``sum_k S_k S_k^*`` kept as an ``n``-term element."""
    return CuntzElement(n, {CuntzWord((k,), (k,)): Fraction(1) for k in range(1, n + 1)})


# --------------------------------------------------------------------------
# states


def _word_state(Q: DensityFunctional, w: CuntzWord) -> Scalar:
    if len(w.I) != len(w.J):
        return Fraction(0)
    val: Scalar = Fraction(1)
    for i, j in zip(w.I, w.J):
        val = val * Q.entry(i, j)
    return val


def quasi_free_state(Q: DensityFunctional, x: CuntzElement) -> Scalar:
    """``omega_Q``: zero on unbalanced words, ``prod_l Q_{i_l j_l}`` on ``S_I S_J^*`` with ``|I| = |J|``."""
    if Q.n != x.n:
        raise ValueError("Q and the Cuntz algebra have different n")
    total: Scalar = Fraction(0)
    for w, c in x.terms.items():
        v = _word_state(Q, w)
        if v != 0:
            total = total + c * v
    return total


def matrix_unit_image(w: CuntzWord, n: int, backend: str = "exact") -> TensorOperator:
    """The balanced word ``S_I S_J^*`` as ``e_{i_1 j_1} (x) ... (x) e_{i_r j_r}``."""
    if len(w.I) != len(w.J) or not w.I:
        raise ValueError("only balanced words of positive length have a matrix-unit image")
    return elementary_tensor([matrix_unit(n, i, j, backend) for i, j in zip(w.I, w.J)])


def identification_residual(Q: DensityFunctional, w: CuntzWord):
    """``omega_Q(S_I S_J^*) - phi_Q^{(x)r}(e_{i_1 j_1} (x) ... )`` for a balanced word."""
    r = len(w.I)
    lhs = quasi_free_state(Q, CuntzElement(Q.n, {w: Fraction(1)}))
    rhs = product_functional(Q, r, matrix_unit_image(w, Q.n, Q.backend))
    return lhs - rhs


def all_words(n: int, max_length: int, balanced: bool | None = None) -> Iterator[CuntzWord]:
    """All normal-form words with ``|I| + |J| <= max_length``.

    ``balanced`` restricts to ``|I| == |J|`` (True) or ``|I| != |J|`` (False).
    """
    letters = range(1, n + 1)
    for total in range(max_length + 1):
        for r in range(total + 1):
            s = total - r
            if balanced is True and r != s:
                continue
            if balanced is False and r == s:
                continue
            for I in itertools.product(letters, repeat=r):
                for J in itertools.product(letters, repeat=s):
                    yield CuntzWord(I, J)


def random_element(n: int, max_length: int, terms: int, rng: np.random.Generator, exact: bool = True) -> CuntzElement:
    out: dict[CuntzWord, Scalar] = {}
    for _ in range(terms):
        total = int(rng.integers(0, max_length + 1))
        r = int(rng.integers(0, total + 1))
        I = tuple(int(v) for v in rng.integers(1, n + 1, size=r))
        J = tuple(int(v) for v in rng.integers(1, n + 1, size=total - r))
        if exact:
            c = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
        else:
            c = complex(rng.standard_normal(), rng.standard_normal())
        out[CuntzWord(I, J)] = out.get(CuntzWord(I, J), 0) + c
    return CuntzElement(n, out)


def gram_min_eigenvalue(Q: DensityFunctional, words: Iterable[CuntzWord]) -> float:
    """Smallest eigenvalue of ``G_ab = omega_Q(w_a^* w_b)``; nonnegative for a state."""
    ws = [CuntzElement(Q.n, {w: Fraction(1)}) for w in words]
    G = np.empty((len(ws), len(ws)), dtype=complex)
    for a, wa in enumerate(ws):
        wa_star = adjoint(wa)
        for b, wb in enumerate(ws):
            G[a, b] = complex(quasi_free_state(Q, wa_star * wb))
    G = (G + G.conj().T) / 2
    return float(np.linalg.eigvalsh(G).min())


# --------------------------------------------------------------------------
# action at classical points


def _letter_images(U: UnitaryPoint | np.ndarray, n: int):
    """Nonzero ``(k, U_{k i})`` per column ``i``, 1-based."""
    if isinstance(U, UnitaryPoint):
        get = U.entry
    elif isinstance(U, RationalMatrix):
        get = lambda a, b: U[a - 1, b - 1]  # noqa: E731
    else:
        arr = np.asarray(U, dtype=complex)
        get = lambda a, b: complex(arr[a - 1, b - 1])  # noqa: E731
    cols = {}
    for i in range(1, n + 1):
        cols[i] = [(k, get(k, i)) for k in range(1, n + 1) if get(k, i) != 0]
    return cols


def act_classical(U: UnitaryPoint | np.ndarray, x: CuntzElement, max_length: int = MAX_WORD_LENGTH) -> CuntzElement:
    """The endomorphism ``S_j -> sum_i U_ij S_i`` extended multiplicatively."""
    n = x.n
    shape = U.U.shape if isinstance(U, UnitaryPoint) else U.shape if isinstance(U, RationalMatrix) else np.shape(U)
    if tuple(shape) != (n, n):
        raise ValueError(f"U has shape {tuple(shape)}, expected ({n},{n})")
    if x.max_length > max_length:
        raise ValueError(f"word length {x.max_length} exceeds the cap {max_length}")
    cols = _letter_images(U, n)
    acc: dict[CuntzWord, Scalar] = defaultdict(int)
    for w, c in x.terms.items():
        left = [cols[i] for i in w.I]
        right = [[(k, conj(u)) for k, u in cols[j]] for j in w.J]
        for pick_i in itertools.product(*left):
            ci = c
            for _, u in pick_i:
                ci = ci * u
            K = tuple(k for k, _ in pick_i)
            for pick_j in itertools.product(*right):
                cj = ci
                for _, u in pick_j:
                    cj = cj * u
                acc[CuntzWord(K, tuple(k for k, _ in pick_j))] += cj
    return CuntzElement(n, acc)


@dataclass
class InvarianceReport:
    point: PointCheck
    words_checked: int
    max_deviation: float
    worst_word: str
    tol: float

    @property
    def invariant(self) -> bool:
        return self.max_deviation <= self.tol

    @property
    def passed(self) -> bool:
        """Invariance holds and ``U`` is a legitimate classical point."""
        return self.invariant and self.point.passed

    def as_dict(self) -> dict:
        return {
            "point": self.point.as_dict(),
            "words_checked": self.words_checked,
            "max_deviation": self.max_deviation,
            "worst_word": self.worst_word,
            "invariant": self.invariant,
            "passed": self.passed,
            "tol": self.tol,
            "scope": "classical points only",
        }


def invariance_check(
    U: UnitaryPoint | np.ndarray,
    Q: DensityFunctional,
    sample_words: Iterable[CuntzWord | CuntzElement],
    tol: float = 1e-10,
) -> InvarianceReport:
    """Compare ``omega_Q(alpha_U(x))`` with ``omega_Q(x)`` over the sample words."""
    point = classical_point_check(U, Q, tol)
    worst, worst_word, count = 0.0, "", 0
    for item in sample_words:
        x = item if isinstance(item, CuntzElement) else CuntzElement(Q.n, {item: Fraction(1)})
        dev = magnitude(quasi_free_state(Q, act_classical(U, x)) - quasi_free_state(Q, x))
        count += 1
        if dev > worst:
            worst, worst_word = dev, repr(x)
    return InvarianceReport(point, count, worst, worst_word, tol)
