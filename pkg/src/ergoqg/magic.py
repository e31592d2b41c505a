"""Magic unitaries from the free product Z/2 * Z/2.

Two order-two unitaries ``u = diag(1, -1)`` and the reflection ``v(theta)``
give projections ``p = (1-u)/2`` and ``q = (1-v)/2``.  Arranged in the 4x4
block pattern below they form a magic unitary, i.e. a representation of the
quantum permutation relations on four points::

    [[p, 1-p, 0,   0  ],
     [1-p, p, 0,   0  ],
     [0,   0, q,   1-q],
     [0,   0, 1-q, q  ]]

Entries are stored as an array of shape ``(m, m, d, d)``; float arrays hold
generic angles, ``object`` arrays of Fractions hold Pythagorean angles exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import gap_rank


@dataclass(frozen=True)
class ProjectionPair:
    theta: float | None
    p: np.ndarray
    q: np.ndarray
    u: np.ndarray
    v: np.ndarray


def projection_pair(theta: float | None = None, *, cos=None, sin=None) -> ProjectionPair:
    """``p = (1-u)/2``, ``q = (1-v)/2``; pass exact ``cos``/``sin`` with ``cos^2 + sin^2 = 1`` for exact entries."""
    if cos is not None or sin is not None:
        c, s = Fraction(cos), Fraction(sin)
        if c * c + s * s != 1:
            raise ValueError("cos^2 + sin^2 must equal 1")
        one, zero = Fraction(1), Fraction(0)
        u = np.array([[one, zero], [zero, -one]], dtype=object)
        v = np.array([[c, s], [s, -c]], dtype=object)
        I = np.array([[one, zero], [zero, one]], dtype=object)
    else:
        c, s = np.cos(theta), np.sin(theta)
        u = np.diag([1.0, -1.0])
        v = np.array([[c, s], [s, -c]])
        I = np.eye(2)
    return ProjectionPair(theta, (I - u) / 2, (I - v) / 2, u, v)


def build_magic(theta: float | None = None, *, cos=None, sin=None) -> np.ndarray:
    """The block magic unitary at angle ``theta`` (shape ``(4, 4, 2, 2)``)."""
    pair = projection_pair(theta, cos=cos, sin=sin)
    p, q = pair.p, pair.q
    I = np.eye(2, dtype=p.dtype) if p.dtype != object else np.array([[Fraction(1), 0], [0, Fraction(1)]], dtype=object)
    Z = I * 0
    M = np.empty((4, 4, 2, 2), dtype=p.dtype)
    layout = [[p, I - p, Z, Z], [I - p, p, Z, Z], [Z, Z, q, I - q], [Z, Z, I - q, q]]
    for i in range(4):
        for j in range(4):
            M[i, j] = layout[i][j]
    return M


def permutation_magic(perm: tuple[int, ...]) -> np.ndarray:
    """Permutation matrix ``P[i, perm[i]] = 1`` as a magic unitary with 1x1 entries."""
    m = len(perm)
    M = np.zeros((m, m, 1, 1))
    for i, j in enumerate(perm):
        M[i, j, 0, 0] = 1.0
    return M


def identity_magic(d: int = 2, m: int = 4) -> np.ndarray:
    M = np.zeros((m, m, d, d))
    for i in range(m):
        M[i, i] = np.eye(d)
    return M


def _absmax(a: np.ndarray):
    if a.size == 0:
        return 0.0
    if a.dtype == object:
        return max(abs(x) for x in a.ravel())
    return float(np.max(np.abs(a)))


@dataclass
class MagicReport:
    projection: float
    self_adjoint: float
    rows: float
    columns: float
    orthogonality: float
    tol: float

    @property
    def max_residual(self):
        return max(self.projection, self.self_adjoint, self.rows, self.columns, self.orthogonality)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in vars(self).items()} | {"passed": self.passed}


def verify_magic(M: np.ndarray, tol: float = 1e-12) -> MagicReport:
    """Projection entries, unit row/column sums, and orthogonality within rows and columns."""
    m, _, d, _ = M.shape
    I = np.eye(d) if M.dtype != object else np.array([[Fraction(int(i == j)) for j in range(d)] for i in range(d)], dtype=object)
    proj = adj = orth = 0
    for i in range(m):
        for j in range(m):
            e = M[i, j]
            proj = max(proj, _absmax(e @ e - e))
            adj = max(adj, _absmax(e - e.conj().T))
            for l in range(m):
                if l != j:
                    orth = max(orth, _absmax(e @ M[i, l]))
                if l != i:
                    orth = max(orth, _absmax(e @ M[l, j]))
    rows = max(_absmax(M[i].sum(axis=0) - I) for i in range(m))
    cols = max(_absmax(M[:, j].sum(axis=0) - I) for j in range(m))
    return MagicReport(proj, adj, rows, cols, orth, tol)


def fixed_vector_dimension(perms, m: int = 4, tol: float = 1e-10) -> int:
    """Dimension of ``{f in C^m : f o sigma = f for every sigma}``."""
    rows = []
    for perm in perms:
        P = np.zeros((m, m))
        for i, j in enumerate(perm):
            P[i, j] = 1.0
        rows.append(P - np.eye(m))
    if not rows:
        return m
    s = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return m - int((s > tol).sum())


def coaction_fixed_dimension(M: np.ndarray, tol: float = 1e-10) -> int:
    """Solutions of ``alpha(a) = a (x) 1`` with ``alpha(delta_j) = sum_i delta_i (x) m_ij``.

    Component ``i`` of ``alpha(a)`` is ``sum_j a_j m_ij``, so the system reads
    ``sum_j a_j m_ij - a_i I = 0`` for every ``i``.
    """
    m, _, d, _ = M.shape
    A = np.asarray(M, dtype=complex)
    rows = np.zeros((m * d * d, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            block = A[i, j] - (np.eye(d) if i == j else 0)
            rows[i * d * d : (i + 1) * d * d, j] = block.ravel()
    s = np.linalg.svd(rows, compute_uv=False)
    return m - int((s > tol).sum())


def classical_points(M: np.ndarray, tol: float = 1e-10) -> list[tuple[int, ...]]:
    """Permutations obtained by evaluating ``M`` at one-dimensional representations.

    Entries are simultaneously diagonalized when they commute; otherwise the
    characters of the (commutative) subalgebra are not visible in this
    representation and the joint eigenbasis of the first noncommuting pair
    fails.  For the block family the characters send ``p, q`` to ``{0, 1}``
    independently, which is handled directly.
    """
    m = M.shape[0]
    perms = set()
    if M.shape[2] == 1:
        perms.add(tuple(int(np.argmax(M[i, :, 0, 0])) for i in range(m)))
        return sorted(perms)
    for a, b in itertools.product((0, 1), repeat=2):
        # characters of C*(Z/2 * Z/2): p -> a, q -> b
        table = {
            (0, 0): a, (0, 1): 1 - a, (1, 0): 1 - a, (1, 1): a,
            (2, 2): b, (2, 3): 1 - b, (3, 2): 1 - b, (3, 3): b,
        }
        perms.add(tuple(next(j for j in range(m) if table.get((i, j), 0) == 1) for i in range(m)))
    return sorted(perms)


def homomorphism_residuals(M: np.ndarray) -> dict[str, float]:
    """Residuals of the unital *-homomorphism identities for ``alpha`` on ``C(X_m)``."""
    m, _, d, _ = M.shape
    A = np.asarray(M, dtype=complex)
    I = np.eye(d)
    mult = unit = star = 0.0
    for j in range(m):
        for l in range(m):
            # component i of alpha(delta_j) alpha(delta_l) - delta_jl alpha(delta_j)
            for i in range(m):
                target = A[i, j] if j == l else 0
                mult = max(mult, float(np.abs(A[i, j] @ A[i, l] - target).max()))
    for i in range(m):
        unit = max(unit, float(np.abs(A[i].sum(axis=0) - I).max()))
        for j in range(m):
            star = max(star, float(np.abs(A[i, j].conj().T - A[i, j]).max()))
    return {"multiplicative": mult, "unital": unit, "star": star}


@dataclass
class CoactionReport:
    magic: MagicReport
    homomorphism: dict[str, float]
    coaction_fixed_dim: int
    classical_points: list[tuple[int, ...]]
    classical_points_fixed_dim: int
    symmetric_group_fixed_dim: int
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.magic.passed
            and max(self.homomorphism.values()) <= self.tol
            and self.symmetric_group_fixed_dim == 1
        )

    def as_dict(self) -> dict:
        return {
            "magic": self.magic.as_dict(),
            "homomorphism": self.homomorphism,
            "coaction_fixed_dim": self.coaction_fixed_dim,
            "classical_points": [list(p) for p in self.classical_points],
            "classical_points_fixed_dim": self.classical_points_fixed_dim,
            "symmetric_group_fixed_dim": self.symmetric_group_fixed_dim,
            "passed": self.passed,
        }


def coaction_check(M: np.ndarray, tol: float = 1e-12) -> CoactionReport:
    """Homomorphism identities of ``alpha(delta_j) = sum_i delta_i (x) m_ij`` and ergodicity shadows.

    ``symmetric_group_fixed_dim`` uses all ``m!`` classical permutation points
    of the quantum permutation group and must be 1.  The points of ``M`` itself
    and the fixed space of ``alpha`` are reported alongside.
    """
    magic = verify_magic(M, tol)
    if not magic.passed:
        return CoactionReport(magic, homomorphism_residuals(M), -1, [], -1, -1, tol)
    m = M.shape[0]
    pts = classical_points(M)
    return CoactionReport(
        magic,
        homomorphism_residuals(M),
        coaction_fixed_dimension(M),
        pts,
        fixed_vector_dimension(pts, m),
        fixed_vector_dimension(itertools.permutations(range(m)), m),
        tol,
    )


def tensor_compose(M1: np.ndarray, M2: np.ndarray) -> np.ndarray:
    """``N_ij = sum_k m1_ik (x) m2_kj``: the coproduct shadow, again magic."""
    m, _, d1, _ = M1.shape
    _, _, d2, _ = M2.shape
    dtype = object if object in (M1.dtype, M2.dtype) else np.result_type(M1.dtype, M2.dtype)
    N = np.zeros((m, m, d1 * d2, d1 * d2), dtype=dtype)
    for i in range(m):
        for j in range(m):
            N[i, j] = sum(np.kron(M1[i, k], M2[k, j]) for k in range(m))
    return N


def noncommutativity_witness(theta: float) -> float:
    """Operator norm of ``[p, q(theta)]``."""
    pair = projection_pair(theta)
    c = pair.p @ pair.q - pair.q @ pair.p
    return float(np.linalg.norm(c, 2))


def alternating_words(L: int) -> list[str]:
    """Reduced words in the projections ``p, q`` of length ``<= L``, unit first."""
    words = [""]
    for length in range(1, L + 1):
        for first in "pq":
            other = "q" if first == "p" else "p"
            words.append("".join(first if i % 2 == 0 else other for i in range(length)))
    return words


def evaluate_pq_word(word: str, theta: float) -> np.ndarray:
    pair = projection_pair(theta)
    out = np.eye(2)
    for ch in word:
        out = out @ (pair.p if ch == "p" else pair.q)
    return out


class RankDeficiency(RuntimeError):
    def __init__(self, rank: int, dependent: list[str]):
        super().__init__(f"rank {rank}; dependent words: {', '.join(w or '1' for w in dependent)}")
        self.rank = rank
        self.dependent = dependent


def word_independence_rank(
    L: int, theta_grid=None, seed: int | None = 0, strict: bool = False, gap: float = 1e-4
) -> int:
    """Rank of the reduced words in ``p, q`` sampled on a grid of angles.

    Each word becomes a row of its 2x2 values at every grid angle.  With a
    generic grid the rank is ``2L + 1``; ``strict`` raises
    :class:`RankDeficiency` naming dependent words otherwise.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    if theta_grid is None:
        rng = np.random.default_rng(seed)
        theta_grid = np.sort(rng.uniform(0.05, np.pi - 0.05, size=4 * L))
    grid = np.asarray(theta_grid, dtype=float)
    if grid.size == 0 or np.any((grid <= 0) | (grid >= np.pi)):
        raise ValueError("grid angles must lie in (0, pi)")
    # fewer than 4L distinct angles is a degenerate grid: the rank may drop
    words = alternating_words(L)
    W = np.array([np.concatenate([evaluate_pq_word(w, t).ravel() for t in grid]) for w in words])
    rank = gap_rank(np.linalg.svd(W, compute_uv=False), gap=gap, atol=1e-12)
    if strict and rank < len(words):
        dependent, basis = [], np.zeros((0, W.shape[1]))
        for w, row in zip(words, W):
            trial = np.vstack([basis, row])
            if gap_rank(np.linalg.svd(trial, compute_uv=False), gap=gap) > basis.shape[0]:
                basis = trial
            else:
                dependent.append(w)
        raise RankDeficiency(rank, dependent)
    return rank
