"""Jones projections in ``M_n(C)^{(x)k}`` and their Temperley-Lieb algebra.

``e_s = I (x) (1/n) sum_ij e_ij (x) e_ij (x) I`` sits on legs ``s, s+1``.
All exact work uses the integer matrix ``E_s = n e_s``, which is the rank-one
operator ``|Omega><Omega|`` on two legs with ``Omega = sum_i e_i (x) e_i``.
Multiplying a dense matrix by ``E_s`` only needs a diagonal partial trace
over two legs followed by a diagonal re-embedding, which costs ``O(N^2)``
instead of a full matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb
from typing import Iterator

import numpy as np

from .haar import FixedSpace, GroupSampler, haar_average_fixed_space, sampler_by_name
from .linalg import RationalMatrix, exact_integer_rank
from .tensor import TensorOperator, _check_size


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


@dataclass(frozen=True)
class JonesProjection:
    n: int
    k: int
    s: int
    op: TensorOperator

    @property
    def beta(self) -> int:
        return self.n**2


@dataclass(frozen=True)
class TLWord:
    """A word in Jones normal form: a product of descending runs.

    ``runs = ((i_1, j_1), ..., (i_p, j_p))`` stands for
    ``(e_{i_1} e_{i_1 - 1} ... e_{j_1}) ... (e_{i_p} ... e_{j_p})`` with both
    ``i`` and ``j`` strictly increasing and ``i_m >= j_m``.
    """

    runs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev_i = prev_j = 0
        for i, j in self.runs:
            if not (j >= 1 and i >= j and i > prev_i and j > prev_j):
                raise ValueError(f"runs {self.runs} violate the normal-form constraints")
            prev_i, prev_j = i, j

    @property
    def letters(self) -> tuple[int, ...]:
        return tuple(s for i, j in self.runs for s in range(i, j - 1, -1))

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def max_index(self) -> int:
        return max(self.letters, default=0)

    def __str__(self) -> str:
        if not self.runs:
            return "1"
        return "·".join("".join(f"e{s}" for s in range(i, j - 1, -1)) for i, j in self.runs)


def normal_words(generators: int, max_letters: int | None = None) -> list[TLWord]:
    """All normal-form words on ``e_1 .. e_generators``; there are ``C_{generators+1}``."""
    out: list[TLWord] = []

    def grow(runs: tuple, last_i: int, last_j: int, size: int) -> None:
        out.append(TLWord(runs))
        for i in range(last_i + 1, generators + 1):
            for j in range(last_j + 1, i + 1):
                extra = i - j + 1
                if max_letters is not None and size + extra > max_letters:
                    continue
                grow(runs + ((i, j),), i, j, size + extra)

    grow((), 0, 0, 0)
    return out


def enumerate_normal_words(k: int, max_letters: int | None = None) -> list[TLWord]:
    """Normal-form words on ``e_1 .. e_{k-2}`` (the ``w`` of the Markov condition)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return normal_words(k - 2, max_letters)


# --------------------------------------------------------------------------
# integer kernels on E_s = n e_s


def _legs_view(n: int, k: int, s: int, cols: int) -> tuple[int, int]:
    return n ** (s - 1), n ** (k - s - 1) * cols


def jones_left(X: np.ndarray, n: int, k: int, s: int) -> np.ndarray:
    """``E_s @ X`` for an ``n^k x m`` array ``X``."""
    left, right = _legs_view(n, k, s, X.shape[1])
    Xr = X.reshape(left, n, n, right)
    diag = sum(Xr[:, c, c, :] for c in range(n))
    out = np.zeros_like(Xr)
    for a in range(n):
        out[:, a, a, :] = diag
    return out.reshape(X.shape)


def jones_right(X: np.ndarray, n: int, k: int, s: int) -> np.ndarray:
    """``X @ E_s`` for an ``m x n^k`` array ``X`` (``E_s`` is real symmetric)."""
    return jones_left(X.T, n, k, s).T


def _check_s(n: int, k: int, s: int) -> None:
    if n < 2:
        raise ValueError("Jones projections need n >= 2")
    if not 1 <= s <= k - 1:
        raise IndexError(f"s={s} outside 1..{k - 1}")


def jones_integer(n: int, k: int, s: int) -> np.ndarray:
    """Integer matrix ``E_s = n e_s``."""
    _check_s(n, k, s)
    _check_size(n, k)
    return jones_left(np.eye(n**k, dtype=np.int64), n, k, s)


def jones_projection(n: int, k: int, s: int, backend: str = "exact") -> JonesProjection:
    """The Jones projection ``e_s`` in ``M_n^{(x)k}``."""
    op = TensorOperator(n, k, RationalMatrix(jones_integer(n, k, s), None, n))
    if backend == "float":
        op = op.to_float()
    return JonesProjection(n, k, s, op)


def word_integer(word: TLWord | tuple[int, ...], n: int, k: int) -> np.ndarray:
    """``E_{a_1} ... E_{a_L}`` as an integer matrix; equals ``n^L`` times the word."""
    letters = word.letters if isinstance(word, TLWord) else tuple(word)
    for a in letters:
        _check_s(n, k, a)
    _check_size(n, k)
    X = np.eye(n**k, dtype=np.int64)
    for a in reversed(letters):
        X = jones_left(X, n, k, a)
    return X


def evaluate_word(word: TLWord | tuple[int, ...], n: int, k: int, backend: str = "exact") -> TensorOperator:
    """Matrix product of the Jones projections spelled by ``word``."""
    letters = word.letters if isinstance(word, TLWord) else tuple(word)
    op = TensorOperator(n, k, RationalMatrix(word_integer(letters, n, k), None, n ** len(letters)))
    return op.to_float() if backend == "float" else op


def _iter_word_matrices(generators: int, n: int, k: int) -> Iterator[tuple[TLWord, np.ndarray]]:
    """Depth-first walk of the normal-form words, extending products letter by letter.

    Yields ``(word, E_word)`` with ``E_word`` the unnormalized integer product.
    Sibling runs ``(i..j)`` share the prefix ``(i..j+1)``, so each step costs
    one kernel application.
    """

    def grow(runs, X, last_i, last_j):
        yield TLWord(runs), X
        for i in range(last_i + 1, generators + 1):
            Y = X
            for j in range(i, last_j, -1):
                Y = jones_right(Y, n, k, j)
                yield from grow(runs + ((i, j),), Y, i, j)

    yield from grow((), np.eye(n**k, dtype=np.int64), 0, 0)


# --------------------------------------------------------------------------
# verification


@dataclass
class RelationReport:
    n: int
    k: int
    beta: int
    residuals: dict[str, Fraction]
    checked: dict[str, int]

    @property
    def passed(self) -> bool:
        return all(r == 0 for r in self.residuals.values())

    def rows(self) -> list[tuple]:
        return [(name, self.checked[name], str(self.residuals[name])) for name in self.residuals]


def verify_tl_relations(n: int, k: int) -> RelationReport:
    """Check ``e_s^2 = e_s = e_s^*``, far commutation and ``beta e_s e_t e_s = e_s``.

    Residuals are exact maximum entry deviations in terms of ``e_s`` (not ``E_s``).
    """
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")
    E = {s: jones_integer(n, k, s) for s in range(1, k)}
    res = {"idempotent": Fraction(0), "self_adjoint": Fraction(0), "far_commute": Fraction(0), "braid_like": Fraction(0)}
    cnt = dict.fromkeys(res, 0)
    for s, Es in E.items():
        # e_s^2 - e_s = (E_s^2 - n E_s) / n^2
        d = np.abs(jones_left(Es, n, k, s) - n * Es).max()
        res["idempotent"] = max(res["idempotent"], Fraction(int(d), n * n))
        res["self_adjoint"] = max(res["self_adjoint"], Fraction(int(np.abs(Es - Es.T).max()), n))
        cnt["idempotent"] += 1
        cnt["self_adjoint"] += 1
        for t in E:
            if abs(s - t) >= 2:
                d = np.abs(jones_left(E[t], n, k, s) - jones_right(E[t], n, k, s)).max()
                res["far_commute"] = max(res["far_commute"], Fraction(int(d), n * n))
                cnt["far_commute"] += 1
            elif abs(s - t) == 1:
                # beta e_s e_t e_s - e_s = (E_s E_t E_s - E_s) / n
                d = np.abs(jones_left(jones_right(E[t], n, k, s), n, k, s) - Es).max()
                res["braid_like"] = max(res["braid_like"], Fraction(int(d), n))
                cnt["braid_like"] += 1
    return RelationReport(n, k, n * n, res, cnt)


@dataclass
class MarkovRow:
    word: TLWord
    tau_w: Fraction
    tau_we: Fraction

    @property
    def ratio(self) -> Fraction | None:
        return self.tau_we / self.tau_w if self.tau_w else None


@dataclass
class MarkovReport:
    n: int
    k: int
    beta: int
    rows: list[MarkovRow]
    worst_residual: Fraction
    trace_of_projections: dict[int, Fraction]

    @property
    def passed(self) -> bool:
        return self.worst_residual == 0 and all(v == Fraction(1, self.beta) for v in self.trace_of_projections.values())

    @property
    def word_count(self) -> int:
        return len(self.rows)

    def table(self) -> list[tuple[str, str, str, str]]:
        return [(str(r.word), str(r.tau_w), str(r.tau_we), str(r.ratio)) for r in self.rows]


def markov_check(n: int, k: int) -> MarkovReport:
    """Verify ``tau(w e_{k-1}) = tau(w) / n^2`` for every normal-form ``w`` on ``e_1..e_{k-2}``."""
    if n < 2 or k < 3:
        raise ValueError("need n >= 2 and k >= 3")
    _check_size(n, k)
    beta = n * n
    N = n**k
    rows, worst = [], Fraction(0)
    for word, X in _iter_word_matrices(k - 2, n, k):
        scale = n ** word.length * N
        tau_w = Fraction(int(np.trace(X)), scale)
        tau_we = Fraction(int(np.trace(jones_right(X, n, k, k - 1))), scale * n)
        worst = max(worst, abs(tau_we - tau_w / beta))
        rows.append(MarkovRow(word, tau_w, tau_we))
    traces = {s: Fraction(int(np.trace(jones_integer(n, k, s))), n * N) for s in range(1, k)}
    return MarkovReport(n, k, beta, rows, worst, traces)


def _primitive(X: np.ndarray) -> np.ndarray:
    g = int(np.gcd.reduce(X.ravel()))
    return X // g if g > 1 else X


def tl_span_dimension(n: int, k: int, chunk: int = 1 << 16) -> int:
    """Dimension of the span of all products of ``e_1 .. e_{k-1}`` in ``M_n^{(x)k}``.

    Normal-form words span the algebra; the rank of their flattened matrices is
    computed exactly as the rank of the integer Gram matrix.
    """
    if n < 2 or not 2 <= k <= 6:
        raise ValueError("need n >= 2 and 2 <= k <= 6")
    _check_size(n, k)
    rows = [_primitive(X).ravel() for _, X in _iter_word_matrices(k - 1, n, k)]
    if any(np.abs(r).max() > 127 for r in rows):
        W = np.stack(rows)
    else:
        W = np.stack([r.astype(np.int8) for r in rows])
    gram = np.zeros((W.shape[0], W.shape[0]), dtype=np.float64)
    for start in range(0, W.shape[1], chunk):
        block = W[:, start : start + chunk].astype(np.float64)
        gram += block @ block.T
    if gram.max() >= 2**52:
        raise OverflowError("Gram entries exceed exact float range")
    return exact_integer_rank(np.rint(gram).astype(np.int64))


def fixed_point_residual(n: int, k: int, U: np.ndarray) -> float:
    """``max_s |U^{(x)k} e_s - e_s U^{(x)k}|``; zero for real orthogonal ``U``."""
    V = reduce(np.kron, [np.asarray(U, dtype=complex)] * k)
    worst = 0.0
    for s in range(1, k):
        e = jones_integer(n, k, s) / n
        worst = max(worst, float(np.abs(V @ e - e @ V).max()))
    return worst


@dataclass
class ContrastReport:
    n: int
    k: int
    group: str
    dim_tl: int
    dim_classical: int
    contained: bool
    containment_residual: float
    fixed_space: FixedSpace

    def csv_row(self) -> tuple[int, int, int, int]:
        return (self.n, self.k, self.dim_tl, self.dim_classical)


def quantum_vs_classical_contrast(
    n: int,
    k: int,
    group: str | GroupSampler = "O",
    samples: int = 2000,
    seed: int | None = 0,
    gap: float = 1e-4,
    tol: float = 1e-6,
) -> ContrastReport:
    """Compare the Temperley-Lieb span with the commutant of a classical group.

    Containment of every normal-form word in the classical fixed space is
    measured by relative projection residual against ``tol``.
    """
    sampler = group if isinstance(group, GroupSampler) else sampler_by_name(group, n)
    fs = haar_average_fixed_space(sampler, k, samples=samples, seed=seed, gap=gap)
    worst = 0.0
    for w in normal_words(k - 1):
        worst = max(worst, fs.projection_residual(evaluate_word(w, n, k, "float")))
    return ContrastReport(n, k, sampler.name, tl_span_dimension(n, k), fs.dimension, worst <= tol, worst, fs)
