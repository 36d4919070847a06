"""Bond systems: validity, feasibility, reduction, pushes, and the order."""

import pytest

from bondlat import (
    Arc,
    Bond,
    BondSystem,
    CycleVector,
    GraphError,
    InfeasibleSystemError,
    Multigraph,
    arc_value_range,
    find_initial_bond,
    flow_difference,
)

from util import star_system, tension_bonds, tri_graph, tri_system

ARCS = ("a1", "a2", "a3")


def path_system(lo=0, hi=2):
    g = Multigraph([1, 2, 3], [Arc("a", 1, 2), Arc("b", 2, 3)])
    return BondSystem(
        g, {"a": lo, "b": lo}, {"a": hi, "b": hi}, {"a": 0, "b": 0}, 1
    )


def bond(*triple):
    return Bond(dict(zip(ARCS, triple)))


def test_system_rejects_disconnected_and_missing_tables():
    g = Multigraph([1, 2], [])
    with pytest.raises(GraphError):
        BondSystem(g, {}, {}, {}, 1)
    with pytest.raises(GraphError):
        BondSystem(tri_graph(), {"a1": 0}, {"a1": 1}, {"a1": 0}, 1)
    with pytest.raises(GraphError):
        tri_system(forbidden=9)


def test_system_rejects_empty_window():
    g = Multigraph([1, 2], [Arc("a", 1, 2)])
    with pytest.raises(GraphError):
        BondSystem(g, {"a": 3}, {"a": 2}, {"a": 0}, 1)


def test_flow_difference_accepts_bond_or_mapping():
    cycle = CycleVector({"a1": 1, "a2": 1, "a3": 1})
    assert flow_difference(bond(1, 0, 0), cycle) == 1
    assert flow_difference({"a1": 2, "a2": 0, "a3": -1}, cycle) == 1
    assert flow_difference(bond(1, 0, 0), cycle.reversed()) == -1


class TestCheckBond:
    def test_valid(self):
        report = tri_system().check_bond(bond(1, 0, 0))
        assert report.ok and bool(report)
        assert report.capacity_violations == () and report.cycle_violations == ()

    def test_cycle_violation(self):
        report = tri_system().check_bond(bond(1, 1, 1))
        assert not report
        assert report.capacity_violations == ()
        ((cycle, required, actual),) = report.cycle_violations
        assert required == 1 and actual == 3
        assert cycle.signs == {"a1": 1, "a2": 1, "a3": 1}

    def test_capacity_violations_all_reported(self):
        report = tri_system().check_bond(bond(2, 0, -1))
        assert set(report.capacity_violations) == {
            ("a1", 2, 0, 1),
            ("a3", -1, 0, 1),
        }

    def test_missing_arc(self):
        with pytest.raises(GraphError):
            tri_system().check_bond(Bond({"a1": 0}))


class TestFeasibility:
    def test_initial_bond_is_a_bond(self):
        s = tri_system()
        assert s.is_bond(find_initial_bond(s))

    def test_infeasible_reference_certified(self):
        g = tri_graph()
        s = BondSystem(
            g,
            {a: 0 for a in ARCS},
            {a: 1 for a in ARCS},
            {"a1": 4, "a2": 0, "a3": 0},
            1,
        )
        with pytest.raises(InfeasibleSystemError) as exc:
            find_initial_bond(s)
        cert = exc.value
        # certificate must be checkable without trusting the solver
        assert flow_difference(s.reference, cert.cycle) == cert.required
        lo = sum(s.lower[a] for a in cert.cycle.forward_arcs()) - sum(
            s.upper[a] for a in cert.cycle.backward_arcs()
        )
        hi = sum(s.upper[a] for a in cert.cycle.forward_arcs()) - sum(
            s.lower[a] for a in cert.cycle.backward_arcs()
        )
        assert (cert.window_min, cert.window_max) == (lo, hi)
        assert not lo <= cert.required <= hi

    def test_parallel_arc_infeasibility(self):
        g = Multigraph([1, 2], [Arc("a", 1, 2), Arc("b", 1, 2)])
        s = BondSystem(g, {"a": 0, "b": 0}, {"a": 1, "b": 1}, {"a": 0, "b": 5}, 1)
        with pytest.raises(InfeasibleSystemError):
            find_initial_bond(s)


class TestValueRange:
    def test_triangle(self):
        s = tri_system()
        assert all(arc_value_range(s, a) == (0, 1) for a in ARCS)

    def test_rigid_when_delta_zero(self):
        s = tri_system(delta=0)
        assert all(arc_value_range(s, a) == (0, 0) for a in ARCS)
        assert not s.is_reduced()

    def test_tree_arc_spans_whole_window(self):
        s = path_system(0, 2)
        assert arc_value_range(s, "a") == (0, 2)
        assert arc_value_range(s, "b") == (0, 2)

    def test_matches_brute_force(self):
        s = tri_system()
        for a in ARCS:
            values = [x.value(a) for x in s.all_bonds_brute_force()]
            assert arc_value_range(s, a) == (min(values), max(values))


class TestReduce:
    def test_already_reduced_is_identity(self):
        s = star_system()
        reduced, contraction = s.reduce()
        assert reduced.graph == s.graph
        assert contraction.forced == {}
        assert contraction.vertex_map == {0: 0, 1: 1, 2: 2}

    def test_fully_rigid_collapses_to_a_point(self):
        reduced, contraction = tri_system(delta=0).reduce()
        assert reduced.graph.vertices == (1,)
        assert reduced.graph.arcs == ()
        assert contraction.forced == {"a1": 0, "a2": 0, "a3": 0}
        assert contraction.vertex_map == {1: 1, 2: 1, 3: 1}
        assert contraction.expand(Bond({})) == bond(0, 0, 0)

    def test_pinned_window_with_different_reference(self):
        # the forced value comes from a bond, not from the raw reference
        g = Multigraph([1, 2], [Arc("a", 1, 2)])
        s = BondSystem(g, {"a": 5}, {"a": 5}, {"a": 0}, 1)
        reduced, contraction = s.reduce()
        assert contraction.forced == {"a": 5}
        assert reduced.graph.vertices == (1,)
        assert contraction.vertex_map == {1: 1, 2: 1}

    def test_partial_reduction(self):
        g = tri_graph()
        s = BondSystem(
            g,
            {"a1": 0, "a2": 0, "a3": 0},
            {"a1": 1, "a2": 0, "a3": 1},
            {"a1": 1, "a2": 0, "a3": 0},
            1,
        )
        reduced, contraction = s.reduce()
        assert contraction.forced == {"a2": 0}
        assert {a.id for a in reduced.graph.arcs} == {"a1", "a3"}
        assert reduced.is_reduced()
        # reconstruction is a bijection onto the original bond set
        original = {x.as_tuple(ARCS) for x in s.all_bonds_brute_force()}
        expanded = {
            contraction.expand(x).as_tuple(ARCS)
            for x in reduced.all_bonds_brute_force()
        }
        assert expanded == original == {(1, 0, 0), (0, 0, 1)}
        for x in reduced.all_bonds_brute_force():
            assert s.is_bond(contraction.expand(x))
            assert contraction.restrict(contraction.expand(x)) == x

    def test_reduced_system_has_strict_ranges(self):
        reduced, _ = tri_system(delta=0).reduce()
        assert reduced.is_reduced()
        for a in reduced.graph.arcs:
            lo, hi = reduced.value_range(a.id)
            assert lo < hi


class TestPush:
    def test_single_vertex(self):
        s = tri_system()
        assert s.push(bond(1, 0, 0), {2}) == bond(0, 1, 0)
        assert s.push(bond(0, 1, 0), {3}) == bond(0, 0, 1)

    def test_empty_set_is_identity(self):
        s = tri_system()
        assert s.push(bond(1, 0, 0), set()) == bond(1, 0, 0)

    def test_set_push_composes_from_vertex_pushes(self):
        s = tri_system()
        assert s.push(bond(1, 0, 0), {2, 3}) == s.push(s.push(bond(1, 0, 0), {2}), {3})

    def test_forbidden_vertex_rejected(self):
        s = tri_system()
        with pytest.raises(GraphError):
            s.push(bond(1, 0, 0), {1, 2})
        with pytest.raises(GraphError):
            s.is_legal_push(bond(1, 0, 0), {1})

    def test_push_preserves_cycle_differences(self):
        s = tri_system()
        x = bond(1, 0, 0)
        for inside in ({2}, {3}, {2, 3}):
            y = s.push(x, inside)
            for cycle, target in zip(s.cycles, s.targets):
                assert flow_difference(y, cycle) == target

    def test_legality(self):
        s = tri_system()
        assert s.is_legal_push(bond(1, 0, 0), {2})
        assert not s.is_legal_push(bond(1, 0, 0), {3})  # a2 already at its floor
        assert not s.is_legal_push(bond(0, 0, 1), {2, 3})

    def test_legal_push_yields_bond(self):
        s = star_system()
        for x in s.all_bonds_brute_force():
            for inside in ({1}, {2}, {1, 2}):
                if s.is_legal_push(x, inside):
                    assert s.is_bond(s.push(x, inside))


class TestMinimumBond:
    def test_triangle(self):
        assert tri_system().minimum_bond() == bond(1, 0, 0)

    def test_star(self):
        assert star_system().minimum_bond() == Bond({"a": 0, "b": 0})

    def test_single_vertex(self):
        s = BondSystem(Multigraph([7], []), {}, {}, {}, 7)
        assert s.minimum_bond() == Bond({})

    def test_requires_reduced(self):
        with pytest.raises(GraphError) as exc:
            tri_system(delta=0).minimum_bond()
        assert "reduce" in str(exc.value)

    def test_no_bond_lies_below(self):
        s = tri_system()
        m = s.minimum_bond()
        for x in s.all_bonds_brute_force():
            assert s.leq(m, x)

    def test_forbidden_choice_moves_the_minimum(self):
        assert tri_system(forbidden=2).minimum_bond() == bond(0, 1, 0)


class TestPushCounts:
    def test_minimum_is_all_zero(self):
        s = tri_system()
        assert s.push_counts(s.minimum_bond()).counts == {2: 0, 3: 0}

    def test_chain_counts(self):
        s = tri_system()
        assert s.push_counts(bond(0, 1, 0)).counts == {2: 1, 3: 0}
        assert s.push_counts(bond(0, 0, 1)).counts == {2: 1, 3: 1}

    def test_difference_identity(self):
        s = tri_system()
        m = s.minimum_bond()
        for x in s.all_bonds_brute_force():
            c = s.push_counts(x)
            full = {v: c.count(v) for v in s.graph.vertices}
            for a in s.graph.arcs:
                assert x.value(a.id) - m.value(a.id) == full[a.tail] - full[a.head]

    def test_roundtrip_bijection(self):
        for s in (tri_system(), star_system()):
            for x in s.all_bonds_brute_force():
                assert s.bond_from_counts(s.push_counts(x)) == x

    def test_non_bond_rejected(self):
        with pytest.raises(GraphError) as exc:
            tri_system().push_counts(bond(1, 1, 0))
        assert "not a bond" in str(exc.value)

    def test_below_minimum_rejected(self):
        with pytest.raises(GraphError) as exc:
            tri_system().push_counts(bond(2, -1, 0))
        assert "below the minimum" in str(exc.value)


class TestOrder:
    def test_reflexive(self):
        s = tri_system()
        for x in s.all_bonds_brute_force():
            assert s.leq(x, x)

    def test_triangle_chain(self):
        s = tri_system()
        assert s.leq(bond(1, 0, 0), bond(0, 1, 0))
        assert s.leq(bond(0, 1, 0), bond(0, 0, 1))
        assert s.leq(bond(1, 0, 0), bond(0, 0, 1))
        assert not s.leq(bond(0, 1, 0), bond(1, 0, 0))

    def test_star_incomparable_pair(self):
        s = star_system()
        x = Bond({"a": 1, "b": 0})
        y = Bond({"a": 0, "b": 1})
        assert not s.leq(x, y) and not s.leq(y, x)

    def test_meet_join_star(self):
        s = star_system()
        x = Bond({"a": 1, "b": 0})
        y = Bond({"a": 0, "b": 1})
        assert s.meet(x, y) == Bond({"a": 0, "b": 0})
        assert s.join(x, y) == Bond({"a": 1, "b": 1})

    def test_lattice_laws_hold_elementwise(self):
        s = star_system()
        elements = s.all_bonds_brute_force()
        for x in elements:
            for y in elements:
                assert s.meet(x, y) == s.meet(y, x)
                assert s.join(x, y) == s.join(y, x)
                assert s.meet(x, s.join(x, y)) == x  # absorption
                assert s.leq(s.meet(x, y), x)
                assert s.leq(x, s.join(x, y))

    def test_chain_join_is_the_top(self):
        s = tri_system()
        assert s.join(bond(1, 0, 0), bond(0, 0, 1)) == bond(0, 0, 1)
        assert s.meet(bond(0, 1, 0), bond(0, 0, 1)) == bond(0, 1, 0)


def test_brute_force_agrees_with_tension_oracle():
    for s in (tri_system(), star_system(), path_system(0, 1)):
        order = [a.id for a in s.graph.arcs]
        ours = {x.as_tuple(order) for x in s.all_bonds_brute_force()}
        oracle = {x.as_tuple(order) for x in tension_bonds(s)}
        assert ours == oracle


def test_brute_force_respects_limit():
    with pytest.raises(GraphError):
        path_system(0, 100).all_bonds_brute_force(limit=50)
