"""Tensor powers of M_n(C): operators, functionals and classical points.

Elements of ``M_n(C)^{(x)k}`` are :class:`TensorOperator` values carrying
either an exact :class:`~ergoqg.linalg.RationalMatrix` or a ``complex128``
array.  Indices exposed to callers (matrix units, legs, positions) are
1-based, matching the usual ``e_{ij}`` notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Literal, Sequence

import numpy as np

from .linalg import RationalMatrix, _to_exact
from .scalars import QQi, Scalar, exact_value

Backend = Literal["exact", "float"]

DEFAULT_TOL = 1e-10
MC_TOL = 1e-6
# Dense storage only: n^(2k) entries per operator stays at desk scale.
MAX_ENTRIES = 1 << 20


def _check_size(n: int, legs: int) -> None:
    if n < 1 or legs < 1:
        raise ValueError(f"need n >= 1 and legs >= 1, got n={n}, legs={legs}")
    if n ** (2 * legs) > MAX_ENTRIES:
        raise ValueError(f"n^(2k) = {n ** (2 * legs)} exceeds the dense cap of {MAX_ENTRIES} entries")


@dataclass(frozen=True, eq=False)
class TensorOperator:
    """An element of ``M_n(C)^{(x)legs}`` stored as an ``n^legs x n^legs`` matrix."""

    n: int
    legs: int
    data: RationalMatrix | np.ndarray

    def __post_init__(self):
        _check_size(self.n, self.legs)
        size = self.n**self.legs
        if tuple(self.data.shape) != (size, size):
            raise ValueError(f"entries must be {size}x{size}, got {tuple(self.data.shape)}")
        if isinstance(self.data, np.ndarray) and self.data.dtype != np.complex128:
            object.__setattr__(self, "data", self.data.astype(np.complex128))

    @property
    def backend(self) -> Backend:
        return "exact" if isinstance(self.data, RationalMatrix) else "float"

    @property
    def dim(self) -> int:
        return self.n**self.legs

    @classmethod
    def identity(cls, n: int, legs: int = 1, backend: Backend = "exact") -> "TensorOperator":
        size = n**legs
        data = RationalMatrix.identity(size) if backend == "exact" else np.eye(size, dtype=np.complex128)
        return cls(n, legs, data)

    @classmethod
    def from_array(cls, n: int, legs: int, a) -> "TensorOperator":
        """Wrap a float array, or nested exact rows, as an operator."""
        if isinstance(a, RationalMatrix):
            return cls(n, legs, a)
        arr = np.asarray(a)
        if arr.dtype == object:
            return cls(n, legs, RationalMatrix.from_entries(arr.tolist()))
        return cls(n, legs, arr.astype(np.complex128))

    def to_float(self) -> "TensorOperator":
        if self.backend == "float":
            return self
        return TensorOperator(self.n, self.legs, self.data.to_complex())

    def to_array(self) -> np.ndarray:
        return self.data.to_complex() if self.backend == "exact" else self.data

    def _pair(self, other: "TensorOperator"):
        if (self.n, self.legs) != (other.n, other.legs):
            raise ValueError(f"shape mismatch: ({self.n},{self.legs}) vs ({other.n},{other.legs})")
        if self.backend == other.backend:
            return self.data, other.data, self.backend
        return self.to_array(), other.to_array(), "float"

    def __matmul__(self, other: "TensorOperator") -> "TensorOperator":
        a, b, _ = self._pair(other)
        return TensorOperator(self.n, self.legs, a @ b)

    def __add__(self, other: "TensorOperator") -> "TensorOperator":
        a, b, _ = self._pair(other)
        return TensorOperator(self.n, self.legs, a + b)

    def __sub__(self, other: "TensorOperator") -> "TensorOperator":
        a, b, _ = self._pair(other)
        return TensorOperator(self.n, self.legs, a - b)

    def __mul__(self, c) -> "TensorOperator":
        if self.backend == "exact" and isinstance(c, (Rational, QQi)):
            return TensorOperator(self.n, self.legs, self.data.scale(c))
        return TensorOperator(self.n, self.legs, self.to_array() * complex(c))

    __rmul__ = __mul__

    def adjoint(self) -> "TensorOperator":
        d = self.data.adjoint() if self.backend == "exact" else self.data.conj().T
        return TensorOperator(self.n, self.legs, d)

    def tensor(self, other: "TensorOperator") -> "TensorOperator":
        """Kronecker product; legs add up."""
        if self.n != other.n:
            raise ValueError("base dimensions differ")
        if self.backend == other.backend == "exact":
            d = self.data.kron(other.data)
        else:
            d = np.kron(self.to_array(), other.to_array())
        return TensorOperator(self.n, self.legs + other.legs, d)

    def trace(self) -> Scalar:
        return self.data.trace() if self.backend == "exact" else complex(np.trace(self.data))

    def residual(self, other: "TensorOperator") -> Fraction | float:
        """Max-abs entry difference: exact on the exact backend."""
        a, b, backend = self._pair(other)
        if backend == "exact":
            return (a - b).max_abs()
        return float(np.max(np.abs(a - b))) if a.size else 0.0

    def equals(self, other: "TensorOperator", tol: float = DEFAULT_TOL) -> bool:
        r = self.residual(other)
        return r == 0 if isinstance(r, Fraction) else r <= tol


def _as_exact_matrix(a) -> RationalMatrix:
    if isinstance(a, RationalMatrix):
        return a
    return RationalMatrix.from_entries(np.asarray(a, dtype=object).tolist())


def _is_exact_input(a) -> bool:
    if isinstance(a, RationalMatrix):
        return True
    arr = np.asarray(a, dtype=object)
    return all(isinstance(v, (Rational, QQi, str)) for v in arr.ravel())


@dataclass(frozen=True, eq=False)
class DensityFunctional:
    """Positive definite, trace-one ``n x n`` matrix ``Q`` defining ``phi_Q(b) = Tr(Q^t b)``."""

    Q: RationalMatrix | np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        Q = self.Q
        if not isinstance(Q, RationalMatrix):
            if _is_exact_input(Q):
                Q = _as_exact_matrix(Q)
            else:
                Q = np.asarray(Q, dtype=np.complex128)
            object.__setattr__(self, "Q", Q)
        rows, cols = Q.shape
        if rows != cols or rows < 1:
            raise ValueError("Q must be square")
        if isinstance(Q, RationalMatrix):
            if Q != Q.adjoint():
                raise ValueError("Q is not self-adjoint")
            if Q.trace() != 1:
                raise ValueError(f"Tr(Q) = {Q.trace()} != 1")
            if not all(p > 0 for p in _hermitian_pivots(Q.entries())):
                raise ValueError("Q is not positive definite")
        else:
            if np.max(np.abs(Q - Q.conj().T)) > self.tol:
                raise ValueError("Q is not self-adjoint")
            if abs(np.trace(Q) - 1) > self.tol:
                raise ValueError(f"Tr(Q) = {np.trace(Q)} != 1")
            if np.linalg.eigvalsh((Q + Q.conj().T) / 2).min() <= 0:
                raise ValueError("Q is not positive definite")

    @classmethod
    def diagonal(cls, q: Sequence) -> "DensityFunctional":
        if all(isinstance(v, (Rational, str)) for v in q):
            return cls(RationalMatrix.diag([_to_exact(v) for v in q]))
        return cls(np.diag(np.asarray(q, dtype=float)).astype(np.complex128))

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def backend(self) -> Backend:
        return "exact" if isinstance(self.Q, RationalMatrix) else "float"

    def array(self) -> np.ndarray:
        return self.Q.to_complex() if isinstance(self.Q, RationalMatrix) else self.Q

    def entry(self, i: int, j: int) -> Scalar:
        """``Q_{ij}`` with 1-based indices."""
        if isinstance(self.Q, RationalMatrix):
            return self.Q[i - 1, j - 1]
        return complex(self.Q[i - 1, j - 1])

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.array())


def _hermitian_pivots(rows: list[list]) -> list:
    """Pivots of an exact LDL* elimination; all positive iff positive definite."""
    a = [list(r) for r in rows]
    n = len(a)
    pivots = []
    for k in range(n):
        p = a[k][k]
        p = p.re if isinstance(p, QQi) else p
        pivots.append(p)
        if p <= 0:
            return pivots
        for i in range(k + 1, n):
            f = a[i][k] / p
            for j in range(k, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return pivots


@dataclass(frozen=True, eq=False)
class UnitaryPoint:
    """A classical point of ``A_u(Q)``: a concrete unitary ``U`` paired with ``Q``."""

    U: RationalMatrix | np.ndarray
    Q: DensityFunctional

    def __post_init__(self):
        if not isinstance(self.U, RationalMatrix):
            U = _as_exact_matrix(self.U) if _is_exact_input(self.U) else np.asarray(self.U, dtype=np.complex128)
            object.__setattr__(self, "U", U)
        if self.U.shape != (self.Q.n, self.Q.n):
            raise ValueError(f"U has shape {self.U.shape}, Q is {self.Q.n}x{self.Q.n}")

    @property
    def n(self) -> int:
        return self.Q.n

    def array(self) -> np.ndarray:
        return self.U.to_complex() if isinstance(self.U, RationalMatrix) else self.U

    def entry(self, i: int, j: int) -> Scalar:
        if isinstance(self.U, RationalMatrix):
            return self.U[i - 1, j - 1]
        return complex(self.U[i - 1, j - 1])


# --------------------------------------------------------------------------
# operations


def matrix_unit(n: int, i: int, j: int, backend: Backend = "exact") -> TensorOperator:
    """The matrix unit ``e_{ij}`` of ``M_n`` (1-based)."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"matrix unit ({i},{j}) out of range for n={n}")
    a = np.zeros((n, n), dtype=np.int64)
    a[i - 1, j - 1] = 1
    data = RationalMatrix(a) if backend == "exact" else a.astype(np.complex128)
    return TensorOperator(n, 1, data)


def embed_at_leg(x: TensorOperator, position: int, total_legs: int) -> TensorOperator:
    """``I^{(x)(s-1)} (x) x (x) I^{(x)(k-s)}`` for a one-leg ``x``."""
    if x.legs != 1:
        raise ValueError("embed_at_leg expects a one-leg operator")
    if not 1 <= position <= total_legs:
        raise IndexError(f"position {position} outside 1..{total_legs}")
    parts = [TensorOperator.identity(x.n, 1, x.backend)] * (position - 1) + [x]
    parts += [TensorOperator.identity(x.n, 1, x.backend)] * (total_legs - position)
    return reduce(TensorOperator.tensor, parts)


def elementary_tensor(factors: Sequence[TensorOperator]) -> TensorOperator:
    return reduce(TensorOperator.tensor, factors)


def phi_Q(Q: DensityFunctional, b: TensorOperator) -> Scalar:
    """``phi_Q(b) = Tr(Q^t b)`` on a one-leg operator."""
    if b.legs != 1 or b.n != Q.n:
        raise ValueError(f"phi_Q needs a one-leg operator on C^{Q.n}")
    return product_functional(Q, 1, b)


def _q_power(Q: DensityFunctional, k: int):
    if Q.backend == "exact":
        return reduce(RationalMatrix.kron, [Q.Q] * k)
    return reduce(np.kron, [Q.Q] * k)


def product_functional(Q: DensityFunctional, k: int, b: TensorOperator) -> Scalar:
    """``phi_Q^{(x)k}(b) = Tr((Q^t)^{(x)k} b)``."""
    if b.legs != k or b.n != Q.n:
        raise ValueError(f"expected a {k}-leg operator on C^{Q.n}, got n={b.n}, legs={b.legs}")
    if Q.backend == "exact" and b.backend == "exact":
        # Tr(A^t b) with A = (Q^t)^{(x)k} is the entrywise pairing with Q^{(x)k}
        return _q_power(Q, k).pairing(b.data)
    Qk = _q_power(Q, k)
    Qk = Qk.to_complex() if isinstance(Qk, RationalMatrix) else Qk
    return complex(np.sum(Qk * b.to_array()))


def normalized_trace(b: TensorOperator) -> Scalar:
    """``Tr(b) / n^k``: the product state for ``Q = I/n``."""
    t = b.trace()
    if b.backend == "exact":
        return t * Fraction(1, b.dim)
    return t / b.dim


def tensor_power_unitary(U, k: int):
    if isinstance(U, RationalMatrix):
        return reduce(RationalMatrix.kron, [U] * k)
    return reduce(np.kron, [np.asarray(U, dtype=np.complex128)] * k)


def adjoint_action_point(U: UnitaryPoint | np.ndarray | RationalMatrix, k: int, b: TensorOperator) -> TensorOperator:
    """``U^{(x)k} b (U^{(x)k})^*``: the adjoint action evaluated at a classical point."""
    mat = U.U if isinstance(U, UnitaryPoint) else U
    if not isinstance(mat, RationalMatrix):
        mat = np.asarray(mat, dtype=np.complex128)
    if b.legs != k or mat.shape != (b.n, b.n):
        raise ValueError("dimension mismatch between U, k and b")
    V = tensor_power_unitary(mat, k)
    if isinstance(V, RationalMatrix) and b.backend == "exact":
        return TensorOperator(b.n, k, V @ b.data @ V.adjoint())
    V = V.to_complex() if isinstance(V, RationalMatrix) else V
    return TensorOperator(b.n, k, V @ b.to_array() @ V.conj().T)


@dataclass(frozen=True)
class PointCheck:
    """Outcome of testing the ``A_u(Q)`` relations at a concrete matrix."""

    unitary_residual: float
    relation_residual: float
    commutation_residual: float
    tol: float
    exact: bool

    @property
    def unitary(self) -> bool:
        return self.unitary_residual <= self.tol

    @property
    def relations(self) -> bool:
        return self.relation_residual <= self.tol

    @property
    def commutes(self) -> bool:
        """Sufficient condition ``UQ = QU``."""
        return self.commutation_residual <= self.tol

    @property
    def passed(self) -> bool:
        return self.unitary and self.relations

    def as_dict(self) -> dict:
        return {
            "unitary_residual": self.unitary_residual,
            "relation_residual": self.relation_residual,
            "commutation_residual": self.commutation_residual,
            "unitary": self.unitary,
            "relations": self.relations,
            "commutes": self.commutes,
            "passed": self.passed,
            "tol": self.tol,
            "backend": "exact" if self.exact else "float",
        }


def classical_point_check(U, Q: DensityFunctional, tol: float = DEFAULT_TOL) -> PointCheck:
    """Test ``U*U = I = UU*`` and ``U^t Q conj(U) Q^{-1} = I = Q conj(U) Q^{-1} U^t``.

    The relation residuals are measured in the multiplied-through forms
    ``U^t Q conj(U) - Q`` and ``Q conj(U) - conj(U) Q``; the second uses
    ``(U^t)^{-1} = conj(U)``, valid whenever the unitarity residual is zero.
    """
    mat = U.U if isinstance(U, UnitaryPoint) else U
    if not isinstance(mat, RationalMatrix):
        mat = _as_exact_matrix(mat) if _is_exact_input(mat) else np.asarray(mat, dtype=np.complex128)
    if mat.shape != (Q.n, Q.n):
        raise ValueError("U and Q dimensions differ")
    if isinstance(mat, RationalMatrix) and Q.backend == "exact":
        I = RationalMatrix.identity(Q.n)
        Ubar = mat.conj()
        unit = max((mat.adjoint() @ mat - I).max_abs(), (mat @ mat.adjoint() - I).max_abs())
        rel = max((mat.T @ Q.Q @ Ubar - Q.Q).max_abs(), (Q.Q @ Ubar - Ubar @ Q.Q).max_abs())
        comm = (mat @ Q.Q - Q.Q @ mat).max_abs()
        return PointCheck(float(unit), float(rel), float(comm), tol, True)
    A = mat.to_complex() if isinstance(mat, RationalMatrix) else mat
    q = Q.array()
    I = np.eye(Q.n)
    unit = max(np.abs(A.conj().T @ A - I).max(), np.abs(A @ A.conj().T - I).max())
    rel = max(np.abs(A.T @ q @ A.conj() - q).max(), np.abs(q @ A.conj() - A.conj() @ q).max())
    comm = np.abs(A @ q - q @ A).max()
    return PointCheck(float(unit), float(rel), float(comm), tol, False)


def random_classical_points(Q: DensityFunctional, count: int, rng: np.random.Generator) -> list[UnitaryPoint]:
    """Random unitaries satisfying the ``A_u(Q)`` relations.

    These are exactly the unitaries commuting with ``conj(Q) = Q^t``; they
    are drawn as ``V diag(e^{i phi}) V^*`` in an eigenbasis ``V`` of ``Q^t``.
    """
    _, V = np.linalg.eigh(Q.array().T)
    pts = []
    for _ in range(count):
        phases = np.exp(2j * np.pi * rng.random(Q.n))
        pts.append(UnitaryPoint(V @ np.diag(phases) @ V.conj().T, Q))
    return pts


def random_diagonal_points(Q: DensityFunctional, count: int, rng: np.random.Generator) -> list[UnitaryPoint]:
    return [UnitaryPoint(np.diag(np.exp(2j * np.pi * rng.random(Q.n))), Q) for _ in range(count)]


def compatibility_residual(U: np.ndarray | RationalMatrix, x: TensorOperator, k: int) -> Fraction | float:
    """Residual of ``Ad_{U^k}(x (x) I) = Ad_{U^j}(x) (x) I`` for a ``j``-leg ``x``.

    This is the inductive-system compatibility ``(pi_kj (x) 1) alpha_j =
    alpha_k pi_kj`` with ``pi_kj(x) = x (x) I^{(x)(k-j)}``.
    """
    j = x.legs
    if k < j:
        raise ValueError("need k >= j")
    pad = TensorOperator.identity(x.n, k - j, x.backend) if k > j else None
    lifted = x.tensor(pad) if pad is not None else x
    lhs = adjoint_action_point(U, k, lifted)
    inner = adjoint_action_point(U, j, x)
    rhs = inner.tensor(pad) if pad is not None else inner
    return lhs.residual(rhs)


def restriction_residual(Q: DensityFunctional, x: TensorOperator, k: int) -> Scalar:
    """``phi_Q^{(x)k}(x (x) I) - phi_Q^{(x)j}(x)``; exactly zero on the rational backend."""
    j = x.legs
    lifted = x.tensor(TensorOperator.identity(x.n, k - j, x.backend)) if k > j else x
    return product_functional(Q, k, lifted) - product_functional(Q, j, x)


def random_rational_operator(n: int, legs: int, rng: np.random.Generator, bound: int = 5) -> TensorOperator:
    """Random operator with small Gaussian-rational entries (exact backend)."""
    size = n**legs
    re = rng.integers(-bound, bound + 1, size=(size, size))
    im = rng.integers(-bound, bound + 1, size=(size, size))
    den = int(rng.integers(1, bound + 1))
    return TensorOperator(n, legs, RationalMatrix(re, im, den))


def random_operator(n: int, legs: int, rng: np.random.Generator) -> TensorOperator:
    size = n**legs
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return TensorOperator(n, legs, a)


def exact_scalar(x) -> Scalar:
    """Coerce int/str/Fraction input to an exact scalar, leave floats alone."""
    if isinstance(x, (Rational, str)):
        return _to_exact(x)
    return x


__all__ = [
    "Backend",
    "DEFAULT_TOL",
    "MC_TOL",
    "TensorOperator",
    "DensityFunctional",
    "UnitaryPoint",
    "PointCheck",
    "matrix_unit",
    "embed_at_leg",
    "elementary_tensor",
    "phi_Q",
    "product_functional",
    "normalized_trace",
    "adjoint_action_point",
    "classical_point_check",
    "random_classical_points",
    "random_diagonal_points",
    "compatibility_residual",
    "restriction_residual",
    "random_rational_operator",
    "random_operator",
    "exact_value",
]
