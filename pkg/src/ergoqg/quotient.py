"""Quotient spaces ``H\\G`` of finite groups, computed exactly.

Functions on ``G`` are lists of Fractions indexed like ``group.elements``.
With ``beta(f)(h, g) = f(hg)`` the fixed algebra ``{a : beta(a) = 1 (x) a}``
consists of the functions constant on right cosets ``Hg``; averaging over
left multiplication by ``H`` projects onto it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from .linalg import exact_nullspace, exact_rank

Function = list[Fraction]


class GroupTableError(ValueError):
    """The multiplication table is not a group law."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table ``table[a, b] = index of ab``."""

    name: str
    elements: tuple[Hashable, ...]
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        object.__setattr__(self, "table", t)
        N = len(self.elements)
        if t.shape != (N, N):
            raise GroupTableError(f"table shape {t.shape} does not match {N} elements")
        if N == 0 or t.min() < 0 or t.max() >= N:
            raise GroupTableError("table entries must be element indices")
        ab_c = t[t[:, :, None], np.arange(N)[None, None, :]]
        a_bc = t[np.arange(N)[:, None, None], t[None, :, :]]
        if not np.array_equal(ab_c, a_bc):
            raise GroupTableError("multiplication is not associative")
        e = self.identity
        if e is None:
            raise GroupTableError("no identity element")
        for a in range(N):
            if not (t[a] == e).any():
                raise GroupTableError(f"element {self.elements[a]!r} has no inverse")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int | None:
        N = self.order
        rng = np.arange(N)
        for e in range(N):
            if np.array_equal(self.table[e], rng) and np.array_equal(self.table[:, e], rng):
                return e
        return None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(np.flatnonzero(self.table[a] == self.identity)[0])

    def index(self, element: Hashable) -> int:
        return self.elements.index(element)

    # text format: order N on the first line, then N rows of N indices
    def dumps(self) -> str:
        lines = [str(self.order)]
        lines += [" ".join(str(int(v)) for v in row) for row in self.table]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, name: str = "G") -> "FiniteGroup":
        tokens = text.split()
        if not tokens:
            raise GroupTableError("empty group table")
        N = int(tokens[0])
        vals = [int(v) for v in tokens[1:]]
        if len(vals) != N * N:
            raise GroupTableError(f"expected {N * N} table entries, found {len(vals)}")
        return cls(name, tuple(range(N)), np.array(vals).reshape(N, N))

    @classmethod
    def load(cls, path: str | Path, name: str | None = None) -> "FiniteGroup":
        path = Path(path)
        return cls.loads(path.read_text(), name or path.stem)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


def _from_operation(name: str, elements: Sequence, op) -> FiniteGroup:
    index = {g: i for i, g in enumerate(elements)}
    N = len(elements)
    table = np.empty((N, N), dtype=np.int64)
    for a, b in itertools.product(range(N), repeat=2):
        table[a, b] = index[op(elements[a], elements[b])]
    return FiniteGroup(name, tuple(elements), table)


def symmetric_group(n: int) -> FiniteGroup:
    """``S_n`` on ``{0..n-1}`` with ``(gh)(x) = g(h(x))``."""
    if not 1 <= n <= 5:
        raise ValueError("built-in symmetric groups cover n <= 5")
    perms = list(itertools.permutations(range(n)))
    return _from_operation(f"S{n}", perms, lambda g, h: tuple(g[h[x]] for x in range(n)))


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("n must be positive")
    return _from_operation(f"Z{n}", list(range(n)), lambda a, b: (a + b) % n)


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the ``n``-gon as pairs ``(r, s)`` meaning ``rot^r ref^s``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    elems = [(r, s) for s in (0, 1) for r in range(n)]

    def op(a, b):
        r1, s1 = a
        r2, s2 = b
        return ((r1 + (-r2 if s1 else r2)) % n, (s1 + s2) % 2)

    return _from_operation(f"D{n}", elems, op)


def builtin_group(name: str) -> FiniteGroup:
    key = name.strip().upper()
    kind, num = key[0], key[1:]
    if key.startswith("Z") or key.startswith("C"):
        return cyclic_group(int(num))
    if kind == "S":
        return symmetric_group(int(num))
    if kind == "D":
        return dihedral_group(int(num))
    raise ValueError(f"unknown group {name!r}; expected S<n>, Z<n> or D<n>")


@dataclass(frozen=True, eq=False)
class Subgroup:
    """Subgroup ``H`` of ``parent`` given by element indices.

    Restriction of functions to ``H`` is the surjection ``C(G) -> C(H)``.
    """

    parent: FiniteGroup
    indices: tuple[int, ...]
    name: str = "H"

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        object.__setattr__(self, "indices", idx)
        members = set(idx)
        G = self.parent
        if not idx or any(not 0 <= i < G.order for i in idx):
            raise GroupTableError("subgroup indices out of range")
        for a, b in itertools.product(idx, repeat=2):
            if G.mul(a, b) not in members:
                raise GroupTableError("subgroup is not closed under multiplication")
        if any(G.inverse(a) not in members for a in idx):
            raise GroupTableError("subgroup is not closed under inverses")

    @property
    def order(self) -> int:
        return len(self.indices)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @classmethod
    def generated(cls, parent: FiniteGroup, generators: Sequence[int], name: str = "H") -> "Subgroup":
        members = {parent.identity}
        frontier = list(members)
        while frontier:
            nxt = []
            for a in frontier:
                for g in generators:
                    b = parent.mul(a, int(g))
                    if b not in members:
                        members.add(b)
                        nxt.append(b)
            frontier = nxt
        return cls(parent, tuple(members), name)

    def restrict(self, f: Function) -> Function:
        return [f[i] for i in self.indices]

    def coproduct_residual(self) -> Fraction:
        """``(theta (x) theta) Phi_G = Phi_H theta`` on every delta function of ``G``.

        Both sides evaluate ``f(hh')`` on ``H x H``, the first through ``G``'s table.
        """
        G = self.parent
        pos = {g: a for a, g in enumerate(self.indices)}
        worst = Fraction(0)
        for j in range(G.order):
            delta = _delta(G.order, j)
            via_g = [[delta[G.mul(h1, h2)] for h2 in self.indices] for h1 in self.indices]
            restricted = self.restrict(delta)
            via_h = [[restricted[pos[G.mul(h1, h2)]] for h2 in self.indices] for h1 in self.indices]
            worst = max(worst, max(abs(a - b) for ra, rb in zip(via_g, via_h) for a, b in zip(ra, rb)))
        return worst


def _delta(N: int, j: int) -> Function:
    return [Fraction(int(i == j)) for i in range(N)]


def _check_function(G: FiniteGroup, f: Sequence) -> Function:
    if len(f) != G.order:
        raise ValueError(f"function has {len(f)} values, group has order {G.order}")
    return [Fraction(v) for v in f]


# --------------------------------------------------------------------------
# coaction, fixed algebra, expectation


def coproduct(G: FiniteGroup, f: Sequence) -> list[list[Fraction]]:
    """``Phi_G(f)(g, g') = f(gg')``."""
    f = _check_function(G, f)
    return [[f[int(G.table[a, b])] for b in range(G.order)] for a in range(G.order)]


def subgroup_coaction(H: Subgroup, f: Sequence) -> list[list[Fraction]]:
    """``beta(f)(h, g) = f(hg)`` on ``H x G`` (rows follow ``H.indices``)."""
    G = H.parent
    f = _check_function(G, f)
    return [[f[G.mul(h, g)] for g in range(G.order)] for h in H.indices]


def coaction_two_path_residual(H: Subgroup, f: Sequence) -> Fraction:
    """``(theta (x) 1) Phi_G (f)`` against the direct formula for ``beta(f)``."""
    phi = coproduct(H.parent, f)
    via_restriction = [phi[h] for h in H.indices]
    direct = subgroup_coaction(H, f)
    return max(abs(a - b) for ra, rb in zip(via_restriction, direct) for a, b in zip(ra, rb))


def right_cosets(H: Subgroup) -> list[tuple[int, ...]]:
    """Right cosets ``Hg`` in order of their smallest element."""
    G = H.parent
    seen: set[int] = set()
    out = []
    for g in range(G.order):
        if g in seen:
            continue
        coset = tuple(sorted({G.mul(h, g) for h in H.indices}))
        seen.update(coset)
        out.append(coset)
    return out


@dataclass
class FixedAlgebra:
    subgroup: Subgroup
    solution_basis: list[Function]
    cosets: list[tuple[int, ...]]
    indicators: list[Function]
    span_matches: bool

    @property
    def dimension(self) -> int:
        return len(self.solution_basis)

    def as_dict(self) -> dict:
        return {
            "group": self.subgroup.parent.name,
            "subgroup": self.subgroup.name,
            "dimension": self.dimension,
            "index": self.subgroup.index,
            "cosets": [list(c) for c in self.cosets],
            "span_matches_coset_indicators": self.span_matches,
        }


def fixed_algebra(H: Subgroup) -> FixedAlgebra:
    """Solve ``beta(a) = 1 (x) a`` exactly and compare with the coset indicators."""
    G = H.parent
    rows = []
    for h in H.indices:
        for g in range(G.order):
            hg = G.mul(h, g)
            if hg != g:
                row = [0] * G.order
                row[hg] += 1
                row[g] -= 1
                rows.append(row)
    basis = exact_nullspace(rows, G.order)
    cosets = right_cosets(H)
    indicators = [[Fraction(int(i in c)) for i in range(G.order)] for c in cosets]
    same = exact_rank(basis) == exact_rank(indicators) == exact_rank(basis + indicators)
    return FixedAlgebra(H, basis, cosets, indicators, same)


def projection_E(H: Subgroup, f: Sequence) -> Function:
    """``E(f)(g) = (1/|H|) sum_h f(hg)``."""
    G = H.parent
    f = _check_function(G, f)
    return [sum((f[G.mul(h, g)] for h in H.indices), Fraction(0)) / H.order for g in range(G.order)]


def haar_state(G: FiniteGroup, f: Sequence) -> Fraction:
    return sum(_check_function(G, f), Fraction(0)) / G.order


@dataclass
class ExpectationReport:
    idempotent: Fraction
    unital: Fraction
    positive: bool
    contractive: bool
    range_in_fixed: bool

    @property
    def passed(self) -> bool:
        return self.idempotent == 0 and self.unital == 0 and self.positive and self.contractive and self.range_in_fixed


def expectation_check(H: Subgroup) -> ExpectationReport:
    """Idempotence, unitality, positivity and contraction of ``E`` on every delta function."""
    G = H.parent
    fixed = fixed_algebra(H)
    idem = Fraction(0)
    positive = contractive = in_range = True
    for j in range(G.order):
        f = _delta(G.order, j)
        e = projection_E(H, f)
        idem = max(idem, max(abs(a - b) for a, b in zip(projection_E(H, e), e)))
        positive &= all(v >= 0 for v in e)
        contractive &= max(abs(v) for v in e) <= max(abs(v) for v in f)
        in_range &= exact_rank(fixed.indicators + [e]) == len(fixed.indicators)
    one = [Fraction(1)] * G.order
    unital = max(abs(v - 1) for v in projection_E(H, one))
    return ExpectationReport(idem, unital, positive, contractive, in_range)


def ergodicity_dimension(H: Subgroup) -> int:
    """Dimension of ``{a in C(H\\G) : a(xg) = a(x) for all x, g}``.

    ``a`` is written in the coset-indicator basis; ``alpha`` is the
    restriction of ``Phi_G`` (right translation).
    """
    G = H.parent
    chi = fixed_algebra(H).indicators
    rows = []
    for x in range(G.order):
        for g in range(G.order):
            xg = G.mul(x, g)
            row = [c[xg] - c[x] for c in chi]
            if any(row):
                rows.append(row)
    return len(exact_nullspace(rows, len(chi)))


@dataclass
class IntegrationReport:
    residual: Fraction
    invariance_residual: Fraction
    values: list[tuple[Fraction, Fraction]]

    @property
    def passed(self) -> bool:
        return self.residual == 0 and self.invariance_residual == 0


def integration_formula_check(H: Subgroup) -> IntegrationReport:
    """``h_G(a) = omega(E(a))`` on every delta function, ``omega = h_G`` on the fixed algebra.

    Also checks ``(omega (x) id) alpha(a) = omega(a) 1`` on the coset indicators.
    """
    G = H.parent
    values = []
    residual = Fraction(0)
    for j in range(G.order):
        a = _delta(G.order, j)
        lhs, rhs = haar_state(G, a), haar_state(G, projection_E(H, a))
        values.append((lhs, rhs))
        residual = max(residual, abs(lhs - rhs))
    inv = Fraction(0)
    for chi in fixed_algebra(H).indicators:
        w = haar_state(G, chi)
        for g in range(G.order):
            translated = sum((chi[G.mul(x, g)] for x in range(G.order)), Fraction(0)) / G.order
            inv = max(inv, abs(translated - w))
    return IntegrationReport(residual, inv, values)


@dataclass
class HopfReport:
    coassociativity: bool
    counit: bool
    antipode: bool
    haar_invariance: bool

    @property
    def passed(self) -> bool:
        return self.coassociativity and self.counit and self.antipode and self.haar_invariance


def hopf_axioms_check(G: FiniteGroup) -> HopfReport:
    """Hopf axioms of ``C(G)`` on the full delta basis.

    On ``delta_j`` each axiom compares two index maps into ``G``; comparing the
    maps themselves checks every basis function at once.
    """
    N, t, e = G.order, G.table, G.identity
    ar = np.arange(N)
    inv = np.array([G.inverse(a) for a in range(N)])
    # (Phi (x) id) Phi (f)(a, b, c) = f((ab)c) against f(a(bc))
    coassoc = np.array_equal(t[t[:, :, None], ar[None, None, :]], t[ar[:, None, None], t[None, :, :]])
    counit = np.array_equal(t[e, :], ar) and np.array_equal(t[:, e], ar)
    # m(S (x) id) Phi (f)(g) = f(g^-1 g) = f(e)
    antipode = bool((t[inv, ar] == e).all() and (t[ar, inv] == e).all())
    # (h (x) id) Phi (f) = h(f) 1: every row and column of the table is a bijection
    sorted_rows = np.sort(t, axis=1)
    sorted_cols = np.sort(t, axis=0)
    haar = bool((sorted_rows == ar[None, :]).all() and (sorted_cols == ar[:, None]).all())
    return HopfReport(bool(coassoc), bool(counit), antipode, haar)


# --------------------------------------------------------------------------
# standard pairs


def standard_pair(name: str) -> Subgroup:
    """Built-in pairs: ``S4/S3``, ``S3/A3``, ``S3/C2``, ``Z6/Z2``, ``S3/1``, ``S3/S3``."""
    key = name.replace(" ", "").upper()
    if key == "S4/S3":
        G = symmetric_group(4)
        idx = [i for i, p in enumerate(G.elements) if p[3] == 3]
        return Subgroup(G, tuple(idx), "S3")
    if key == "S3/A3":
        G = symmetric_group(3)
        return Subgroup.generated(G, [G.index((1, 2, 0))], "A3")
    if key in ("S3/C2", "S3/<(12)>"):
        G = symmetric_group(3)
        return Subgroup.generated(G, [G.index((1, 0, 2))], "<(12)>")
    if key == "Z6/Z2":
        G = cyclic_group(6)
        return Subgroup.generated(G, [3], "Z2")
    if key == "S3/1":
        G = symmetric_group(3)
        return Subgroup(G, (G.identity,), "1")
    if key == "S3/S3":
        G = symmetric_group(3)
        return Subgroup(G, tuple(range(G.order)), "S3")
    raise ValueError(f"unknown pair {name!r}")


ACCEPTANCE_PAIRS = ("S4/S3", "S3/A3", "S3/C2", "Z6/Z2")


@dataclass
class QuotientReport:
    pair: str
    order: int
    subgroup_order: int
    fixed: FixedAlgebra
    ergodic_dimension: int
    integration: IntegrationReport
    expectation: ExpectationReport
    hopf: HopfReport
    coproduct_residual: Fraction

    @property
    def passed(self) -> bool:
        return (
            self.fixed.dimension == self.fixed.subgroup.index
            and self.fixed.span_matches
            and self.ergodic_dimension == 1
            and self.integration.passed
            and self.expectation.passed
            and self.hopf.passed
            and self.coproduct_residual == 0
        )

    def as_dict(self) -> dict:
        return {
            "pair": self.pair,
            "order": self.order,
            "subgroup_order": self.subgroup_order,
            "fixed_algebra": self.fixed.as_dict(),
            "ergodicity_dimension": self.ergodic_dimension,
            "integration_residual": self.integration.residual,
            "omega_invariance_residual": self.integration.invariance_residual,
            "E_idempotence_residual": self.expectation.idempotent,
            "E_unital_residual": self.expectation.unital,
            "E_positive": self.expectation.positive,
            "E_contractive": self.expectation.contractive,
            "E_range_in_fixed_algebra": self.expectation.range_in_fixed,
            "hopf_axioms": vars(self.hopf) | {"passed": self.hopf.passed},
            "restriction_coproduct_residual": self.coproduct_residual,
            "passed": self.passed,
        }


def quotient_check(H: Subgroup, label: str | None = None) -> QuotientReport:
    G = H.parent
    return QuotientReport(
        pair=label or f"{G.name}/{H.name}",
        order=G.order,
        subgroup_order=H.order,
        fixed=fixed_algebra(H),
        ergodic_dimension=ergodicity_dimension(H),
        integration=integration_formula_check(H),
        expectation=expectation_check(H),
        hopf=hopf_axioms_check(G),
        coproduct_residual=H.coproduct_residual(),
    )
