import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergoqg.quotient import (
    ACCEPTANCE_PAIRS,
    FiniteGroup,
    GroupTableError,
    Subgroup,
    builtin_group,
    coaction_two_path_residual,
    coproduct,
    cyclic_group,
    dihedral_group,
    ergodicity_dimension,
    expectation_check,
    fixed_algebra,
    haar_state,
    hopf_axioms_check,
    integration_formula_check,
    projection_E,
    quotient_check,
    right_cosets,
    standard_pair,
    subgroup_coaction,
    symmetric_group,
)

F = Fraction


def brute_force_invariants(H):
    """Orbits of left multiplication by ``H``, computed directly."""
    G = H.parent
    return {frozenset(G.mul(h, g) for h in H.indices) for g in range(G.order)}


def test_symmetric_group_law():
    S3 = symmetric_group(3)
    a, b = S3.index((1, 0, 2)), S3.index((0, 2, 1))
    assert S3.elements[S3.mul(a, b)] == (1, 2, 0)
    assert S3.order == 6 and S3.elements[S3.identity] == (0, 1, 2)
    assert symmetric_group(5).order == 120
    with pytest.raises(ValueError):
        symmetric_group(6)


@pytest.mark.parametrize("G", [symmetric_group(3), symmetric_group(4), cyclic_group(6), dihedral_group(4)])
def test_builtin_groups_satisfy_hopf_axioms(G):
    assert hopf_axioms_check(G).passed


def test_builtin_group_names():
    assert builtin_group("S4").order == 24
    assert builtin_group("z6").order == 6
    assert builtin_group("D5").order == 10
    with pytest.raises(ValueError):
        builtin_group("Q8")


def test_table_round_trip(tmp_path):
    G = dihedral_group(3)
    path = tmp_path / "d3.txt"
    G.dump(path)
    H = FiniteGroup.load(path)
    assert H.name == "d3"
    np.testing.assert_array_equal(H.table, G.table)
    assert FiniteGroup.loads(G.dumps()).order == 6


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2\n0 1\n1",
        "2\n0 1\n1 1",
        "3\n0 1 2\n1 2 0\n2 0 0",
        "2\n0 5\n1 0",
        "3\n1 0 2\n0 1 2\n2 2 2",
    ],
)
def test_invalid_tables_rejected(text):
    with pytest.raises(GroupTableError):
        FiniteGroup.loads(text)


def test_nonassociative_table_rejected():
    # a Latin square with identity 0 that is not associative
    table = "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0"
    with pytest.raises(GroupTableError, match="associative"):
        FiniteGroup.loads(table)


def test_invalid_subgroups_rejected():
    S3 = symmetric_group(3)
    with pytest.raises(GroupTableError):
        Subgroup(S3, (S3.identity, S3.index((1, 2, 0))))
    with pytest.raises(GroupTableError):
        Subgroup(S3, (99,))


def test_standard_pair_orders():
    orders = {name: (standard_pair(name).parent.order, standard_pair(name).order) for name in ACCEPTANCE_PAIRS}
    assert orders == {"S4/S3": (24, 6), "S3/A3": (6, 3), "S3/C2": (6, 2), "Z6/Z2": (6, 2)}
    with pytest.raises(ValueError):
        standard_pair("S5/A5")


@pytest.mark.parametrize("name", ACCEPTANCE_PAIRS + ("S3/1", "S3/S3"))
def test_fixed_algebra_is_coset_span(name):
    H = standard_pair(name)
    fixed = fixed_algebra(H)
    assert fixed.dimension == H.index == len(right_cosets(H))
    assert fixed.span_matches
    orbits = brute_force_invariants(H)
    assert {frozenset(c) for c in fixed.cosets} == orbits
    assert ergodicity_dimension(H) == 1


def test_cosets_partition_group():
    H = standard_pair("S4/S3")
    cosets = right_cosets(H)
    assert sorted(itertools.chain(*cosets)) == list(range(24))
    assert all(len(c) == 6 for c in cosets)


def test_expectation_examples():
    H = standard_pair("S3/A3")
    G = H.parent
    e = [F(int(i == G.identity)) for i in range(G.order)]
    expected = [F(1, 3) * int(i in H.indices) for i in range(G.order)]
    assert projection_E(H, e) == expected
    assert expectation_check(H).passed


def test_integration_values():
    H = standard_pair("S4/S3")
    rep = integration_formula_check(H)
    assert rep.passed and all(lhs == rhs == F(1, 24) for lhs, rhs in rep.values)
    for chi in fixed_algebra(H).indicators:
        assert haar_state(H.parent, chi) == F(1, 4)
    H = standard_pair("S3/C2")
    assert all(haar_state(H.parent, chi) == F(1, 3) for chi in fixed_algebra(H).indicators)
    assert integration_formula_check(standard_pair("S3/A3")).values[0] == (F(1, 6), F(1, 6))


def test_coaction_formulas():
    H = standard_pair("S3/C2")
    G = H.parent
    f = [F(i + 1) for i in range(G.order)]
    beta = subgroup_coaction(H, f)
    assert len(beta) == 2 and len(beta[0]) == 6
    assert beta[H.indices.index(G.identity)] == f
    assert coproduct(G, f)[G.identity] == f
    assert coaction_two_path_residual(H, f) == 0
    assert H.coproduct_residual() == 0
    with pytest.raises(ValueError):
        projection_E(H, [1, 2])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ACCEPTANCE_PAIRS), st.data())
def test_expectation_properties_on_random_functions(name, data):
    H = standard_pair(name)
    G = H.parent
    f = [F(data.draw(st.integers(-20, 20)), data.draw(st.integers(1, 9))) for _ in range(G.order)]
    e = projection_E(H, f)
    assert projection_E(H, e) == e
    assert haar_state(G, e) == haar_state(G, f)
    assert max(abs(v) for v in e) <= max(abs(v) for v in f)
    for h in H.indices:
        assert all(e[G.mul(h, g)] == e[g] for g in range(G.order))
    assert coaction_two_path_residual(H, f) == 0


@pytest.mark.parametrize("name", ACCEPTANCE_PAIRS)
def test_quotient_check_passes(name):
    rep = quotient_check(standard_pair(name), name)
    assert rep.passed
    d = rep.as_dict()
    assert d["pair"] == name and d["fixed_algebra"]["dimension"] == d["fixed_algebra"]["index"]


def test_custom_table_pair():
    G = FiniteGroup.loads(cyclic_group(4).dumps(), "Z4")
    H = Subgroup.generated(G, [2], "Z2")
    assert H.order == 2 and quotient_check(H).passed
