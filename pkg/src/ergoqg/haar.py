"""Haar averaging over classical matrix groups and the resulting fixed spaces.

The fixed space of ``b -> U^{(x)k} b U^{(x)k *}`` is read off from the mean
``P`` of the superoperators ``T_U = (U (x) conj(U))^{(x)k}`` (suitably
reordered).  ``P`` fixes every invariant vector exactly, so the spectrum of
``I - (P + P^*)/2`` is zero there and bounded away from zero elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Sequence

import numpy as np
from scipy.stats import ortho_group, unitary_group

from .linalg import gap_rank
from .tensor import MC_TOL, TensorOperator

MAX_SUPEROP_DIM = 4096


class NonConvergence(RuntimeError):
    """The averaged projector shows no spectral gap at the requested threshold."""


@dataclass(frozen=True)
class GroupSampler:
    """Draws elements of a compact matrix group.

    ``draw`` samples Haar-distributed elements; a finite group instead lists
    all ``elements`` and is averaged exactly by enumeration.
    """

    name: str
    n: int
    draw: Callable[[np.random.Generator], np.ndarray] | None = None
    elements: tuple[np.ndarray, ...] | None = None

    @property
    def finite(self) -> bool:
        return self.elements is not None


def unitary_sampler(n: int) -> GroupSampler:
    return GroupSampler(f"U({n})", n, draw=lambda rng: unitary_group.rvs(n, random_state=rng))


def orthogonal_sampler(n: int) -> GroupSampler:
    return GroupSampler(f"O({n})", n, draw=lambda rng: ortho_group.rvs(n, random_state=rng).astype(complex))


def torus_sampler(n: int) -> GroupSampler:
    return GroupSampler(f"T^{n}", n, draw=lambda rng: np.diag(np.exp(2j * np.pi * rng.random(n))))


def finite_sampler(name: str, matrices: Sequence[np.ndarray]) -> GroupSampler:
    mats = tuple(np.asarray(m, dtype=complex) for m in matrices)
    return GroupSampler(name, mats[0].shape[0], elements=mats)


def trivial_sampler(n: int) -> GroupSampler:
    return finite_sampler("trivial", [np.eye(n)])


def sampler_by_name(group: str, n: int) -> GroupSampler:
    key = group.strip().upper()
    if key in ("O", f"O({n})"):
        return orthogonal_sampler(n)
    if key in ("U", f"U({n})"):
        return unitary_sampler(n)
    if key in ("T", "TORUS"):
        return torus_sampler(n)
    if key == "TRIVIAL":
        return trivial_sampler(n)
    raise ValueError(f"unknown group {group!r}; expected O, U, torus or trivial")


def superoperator(U: np.ndarray, k: int) -> np.ndarray:
    """Matrix of ``b -> V b V^*`` on row-major ``vec(b)``, ``V = U^{(x)k}``."""
    V = reduce(np.kron, [U] * k)
    return np.kron(V, V.conj())


@dataclass
class FixedSpace:
    """Orthonormal (Hilbert-Schmidt) basis of the fixed subspace and its provenance."""

    group: str
    n: int
    k: int
    dimension: int
    basis: list[TensorOperator]
    spectrum: np.ndarray = field(repr=False)
    samples: int
    seed: int | None
    gap: float
    converged: bool

    def projection_residual(self, b: TensorOperator) -> float:
        """Norm of the component of ``b`` orthogonal to the fixed space, relative to ``|b|``."""
        v = b.to_array().ravel()
        B = np.array([e.to_array().ravel() for e in self.basis]).reshape(len(self.basis), -1)
        coeff = B.conj() @ v if len(self.basis) else np.zeros(0)
        rest = v - (B.T @ coeff if len(self.basis) else 0)
        nv = np.linalg.norm(v)
        return float(np.linalg.norm(rest) / nv) if nv else 0.0

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "n": self.n,
            "k": self.k,
            "dimension": self.dimension,
            "samples": self.samples,
            "seed": self.seed,
            "gap": self.gap,
            "converged": self.converged,
        }


def haar_average_fixed_space(
    sampler: GroupSampler,
    k: int,
    samples: int = 2000,
    seed: int | None = 0,
    gap: float = 1e-4,
    atol: float = 1e-12,
    strict: bool = True,
) -> FixedSpace:
    """Fixed subspace of ``Ad_{U^{(x)k}}`` averaged over the group.

    Raises :class:`NonConvergence` (when ``strict``) if the spectrum of the
    averaged operator has no relative gap below ``gap``.
    """
    n = sampler.n
    D = n ** (2 * k)
    if D > MAX_SUPEROP_DIM:
        raise ValueError(f"superoperator dimension {D} exceeds {MAX_SUPEROP_DIM}")
    P = np.zeros((D, D), dtype=np.complex128)
    if sampler.finite:
        for U in sampler.elements:
            P += superoperator(U, k)
        count = len(sampler.elements)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            P += superoperator(sampler.draw(rng), k)
        count = samples
    P /= count
    H = (P + P.conj().T) / 2
    evals, evecs = np.linalg.eigh(H)
    defect = np.clip(1.0 - evals, 0.0, None)
    rank = gap_rank(defect, gap=gap, atol=atol)
    dim = D - rank
    # the identity is always fixed, so an empty fixed space means the cut failed
    converged = dim >= 1 and np.sort(defect)[dim - 1] <= MC_TOL
    if strict and not converged:
        raise NonConvergence(f"no spectral gap below {gap} for {sampler.name}, k={k}")
    order = np.argsort(defect)[:dim]
    N = n**k
    basis = [TensorOperator(n, k, evecs[:, i].reshape(N, N)) for i in order]
    return FixedSpace(
        group=sampler.name,
        n=n,
        k=k,
        dimension=dim,
        basis=basis,
        spectrum=np.sort(defect)[::-1],
        samples=count,
        seed=None if sampler.finite else seed,
        gap=gap,
        converged=converged,
    )
