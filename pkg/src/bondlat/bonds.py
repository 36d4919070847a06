"""Bond systems: integer arc labelings confined to per-arc capacity windows
whose flow-difference around every cycle matches a reference labeling.

A labeling x qualifies as a bond when c_lower(a) <= x(a) <= c_upper(a) on
every arc and, on every cycle, the sum over forward arcs minus the sum over
backward arcs equals the same signed sum of the reference labeling.
Checking a fundamental-cycle basis suffices; the basis comes from the
deterministic spanning tree.

Anything with matching cycle sums differs from the reference by a potential:
x(a) = reference(a) + p(tail) - p(head).  Feasibility therefore reduces to
difference constraints solved by Bellman-Ford over a constraint graph with
two edges per arc, and a negative cycle maps back to a cycle of the
multigraph whose capacity window cannot accommodate the required sum.

The bond set is ordered by pushes: adding one unit on the arcs leaving a
vertex set and removing one on the arcs entering it.  With a designated
forbidden vertex excluded from pushing, single-vertex pushes generate the
order whenever no arc is rigid (equal value in every bond); rigid arcs are
removed by `reduce`, which contracts them and remembers their forced values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .graph import (
    Arc,
    CycleVector,
    GraphError,
    Multigraph,
    fundamental_cycles,
    id_key,
    spanning_tree,
    vertex_cut,
)

_INF = float("inf")


class InfeasibleError(ValueError):
    """No labeling satisfies the stated constraints."""


class InfeasibleSystemError(InfeasibleError):
    """Empty bond set, certified by a cycle whose capacity window excludes
    the required flow-difference."""

    def __init__(self, cycle: CycleVector, required: int, window_min: int, window_max: int):
        super().__init__(
            f"no bond exists: a cycle requires flow-difference {required} "
            f"but its capacity window only allows [{window_min}, {window_max}]"
        )
        self.cycle = cycle
        self.required = required
        self.window_min = window_min
        self.window_max = window_max


@dataclass(frozen=True)
class Bond:
    """Integer labeling of every arc of a system's graph."""

    values: Mapping

    def value(self, arc_id) -> int:
        return self.values[arc_id]

    def as_tuple(self, arc_order: Iterable) -> tuple:
        return tuple(self.values[a] for a in arc_order)

    def __eq__(self, other):
        return isinstance(other, Bond) and dict(self.values) == dict(other.values)


@dataclass(frozen=True)
class PushCount:
    """How often each vertex was pushed to reach a bond from the minimum.

    The forbidden vertex never appears; every listed count is >= 0 and
    x(a) - minimum(a) = count(tail) - count(head) on every arc.
    """

    counts: Mapping

    def count(self, v) -> int:
        return self.counts.get(v, 0)

    def as_tuple(self, vertex_order: Iterable) -> tuple:
        return tuple(self.counts.get(v, 0) for v in vertex_order)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of checking a labeling against a system's two conditions."""

    ok: bool
    capacity_violations: tuple  # (arc id, value, lower, upper)
    cycle_violations: tuple     # (cycle, required, actual)

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class ContractionMap:
    """Bookkeeping from `reduce`: forced values of removed arcs and the
    merge of vertices into surviving class representatives."""

    forced: Mapping        # removed arc id -> value in every bond
    vertex_map: Mapping    # original vertex -> surviving representative

    def expand(self, reduced_bond: Bond) -> Bond:
        values = dict(reduced_bond.values)
        values.update(self.forced)
        return Bond(values)

    def restrict(self, full_bond: Bond) -> Bond:
        return Bond({a: v for a, v in full_bond.values.items() if a not in self.forced})


def flow_difference(values: Mapping | Bond, cycle: CycleVector) -> int:
    """Signed sum of a labeling around a cycle: forward minus backward."""
    table = values.values if isinstance(values, Bond) else values
    return sum(s * table[a] for a, s in cycle.signs.items())


class BondSystem:
    """A connected multigraph with capacity windows, a reference labeling
    prescribing all cycle flow-differences, and a forbidden vertex."""

    def __init__(
        self,
        graph: Multigraph,
        lower: Mapping,
        upper: Mapping,
        reference: Mapping,
        forbidden,
    ):
        if not graph.vertices:
            raise GraphError("bond system needs at least one vertex")
        if not graph.is_connected():
            comps = graph.connected_components()
            a = sorted(comps[0], key=id_key)[0]
            b = sorted(comps[1], key=id_key)[0]
            raise GraphError(f"bond system requires a connected graph: {a!r} and {b!r} are separated")
        if not graph.has_vertex(forbidden):
            raise GraphError(f"forbidden vertex {forbidden!r} is not in the graph")
        self.graph = graph
        self.lower = {a.id: _as_int(lower, a.id, "lower") for a in graph.arcs}
        self.upper = {a.id: _as_int(upper, a.id, "upper") for a in graph.arcs}
        self.reference = {a.id: _as_int(reference, a.id, "reference") for a in graph.arcs}
        for a in graph.arcs:
            if self.lower[a.id] > self.upper[a.id]:
                raise GraphError(
                    f"arc {a.id!r} has empty capacity window [{self.lower[a.id]}, {self.upper[a.id]}]"
                )
        self.forbidden = forbidden
        self.tree = spanning_tree(graph)
        self.cycles = tuple(fundamental_cycles(graph, self.tree))
        self.targets = tuple(flow_difference(self.reference, c) for c in self.cycles)
        self._arc_order = tuple(a.id for a in graph.arcs)
        self._cut_cache: dict = {}
        self._dist_cache: dict = {}
        self._minimum: Bond | None = None

    # ------------------------------------------------------------------
    # validation and feasibility

    def check_bond(self, x: Bond) -> ValidityReport:
        """Test both bond conditions, reporting every violation."""
        capacity = []
        for a in self.graph.arcs:
            if a.id not in x.values:
                raise GraphError(f"labeling misses arc {a.id!r}")
            v = x.values[a.id]
            if not (self.lower[a.id] <= v <= self.upper[a.id]):
                capacity.append((a.id, v, self.lower[a.id], self.upper[a.id]))
        cycles = []
        for cycle, target in zip(self.cycles, self.targets):
            actual = flow_difference(x, cycle)
            if actual != target:
                cycles.append((cycle, target, actual))
        return ValidityReport(not capacity and not cycles, tuple(capacity), tuple(cycles))

    def is_bond(self, x: Bond) -> bool:
        return self.check_bond(x).ok

    def _constraint_edges(self) -> list:
        """Difference constraints on p with x = reference + p(tail) - p(head):
        edge (u, v, w, arc, sign) encodes p(v) <= p(u) + w; traversing it
        walks the arc forward (sign +1) or backward (-1)."""
        edges = []
        for a in self.graph.arcs:
            edges.append((a.head, a.tail, self.upper[a.id] - self.reference[a.id], a.id, -1))
            edges.append((a.tail, a.head, self.reference[a.id] - self.lower[a.id], a.id, 1))
        return edges

    def _distances(self, source) -> dict:
        """Shortest constraint-graph distances from `source`, raising an
        InfeasibleSystemError built from any negative cycle."""
        if source in self._dist_cache:
            return self._dist_cache[source]
        dist = {v: _INF for v in self.graph.vertices}
        dist[source] = 0
        pred: dict = {}
        edges = self._constraint_edges()
        n = len(self.graph.vertices)
        for _ in range(n - 1):
            changed = False
            for u, v, w, arc_id, sign in edges:
                if dist[u] + w < dist[v]:
                    dist[v] = dist[u] + w
                    pred[v] = (u, arc_id, sign)
                    changed = True
            if not changed:
                break
        for u, v, w, arc_id, sign in edges:
            if dist[u] + w < dist[v]:
                pred[v] = (u, arc_id, sign)
                raise self._negative_cycle_error(pred, v)
        self._dist_cache[source] = dist
        return dist

    def _negative_cycle_error(self, pred: dict, start) -> InfeasibleSystemError:
        v = start
        for _ in range(len(self.graph.vertices)):
            v = pred[v][0]
        cycle_vertices = []
        u = v
        while True:
            cycle_vertices.append(u)
            u = pred[u][0]
            if u == v:
                break
        signs: dict = {}
        u = v
        for _ in range(len(cycle_vertices)):
            prev, arc_id, sign = pred[u]
            # pred edge enters u, so the walk runs prev -> u; flip to cycle order
            signs[arc_id] = sign
            u = prev
        cycle = CycleVector(signs)
        required = flow_difference(self.reference, cycle)
        window_min = sum(self.lower[a] for a in cycle.forward_arcs()) - sum(
            self.upper[a] for a in cycle.backward_arcs()
        )
        window_max = sum(self.upper[a] for a in cycle.forward_arcs()) - sum(
            self.lower[a] for a in cycle.backward_arcs()
        )
        return InfeasibleSystemError(cycle, required, window_min, window_max)

    def initial_bond(self) -> Bond:
        """Some bond of the system, or raise with an infeasibility certificate."""
        dist = self._distances(self.forbidden)
        values = {
            a.id: self.reference[a.id] + dist[a.tail] - dist[a.head] for a in self.graph.arcs
        }
        return Bond(values)

    def value_range(self, arc_id) -> tuple[int, int]:
        """Tight min and max of x(arc) over all bonds (system must be feasible)."""
        a = self.graph.arc(arc_id)
        down = self._distances(a.tail)
        up = self._distances(a.head)
        return (
            self.reference[a.id] - down[a.head],
            self.reference[a.id] + up[a.tail],
        )

    def is_reduced(self) -> bool:
        return all(lo < hi for lo, hi in (self.value_range(a.id) for a in self.graph.arcs))

    def reduce(self) -> tuple["BondSystem", ContractionMap]:
        """Contract every rigid arc (value forced equal in all bonds).

        Returns the rigid-free system plus the map reconstructing full
        bonds from reduced ones.  The reduced reference is an actual bond
        restricted to the surviving arcs, which keeps every cycle target
        consistent with the forced values that left the graph.
        """
        system = self
        forced: dict = {}
        vertex_map = {v: v for v in self.graph.vertices}
        while True:
            anchor = system.initial_bond()
            rigid = {}
            for a in system.graph.arcs:
                lo, hi = system.value_range(a.id)
                if lo == hi:
                    rigid[a.id] = lo
            if not rigid:
                return system, ContractionMap(dict(forced), dict(vertex_map))
            forced.update(rigid)
            rep = {v: v for v in system.graph.vertices}

            def find(v):
                while rep[v] != v:
                    rep[v] = rep[rep[v]]
                    v = rep[v]
                return v

            for arc_id in rigid:
                a = system.graph.arc(arc_id)
                ru, rv = find(a.tail), find(a.head)
                if ru != rv:
                    keep, drop = sorted((ru, rv), key=id_key)
                    rep[drop] = keep
            survivors = [
                Arc(a.id, find(a.tail), find(a.head))
                for a in system.graph.arcs
                if a.id not in rigid
            ]
            merged = Multigraph({find(v) for v in system.graph.vertices}, survivors)
            vertex_map = {v: find(vertex_map[v]) for v in vertex_map}
            keep_ids = {a.id for a in survivors}
            system = BondSystem(
                merged,
                {i: system.lower[i] for i in keep_ids},
                {i: system.upper[i] for i in keep_ids},
                {i: anchor.values[i] for i in keep_ids},
                find(system.forbidden),
            )

    # ------------------------------------------------------------------
    # pushes and the lattice order

    def _cut(self, v):
        if v not in self._cut_cache:
            cut = vertex_cut(self.graph, [v])
            self._cut_cache[v] = (cut.forward, cut.backward)
        return self._cut_cache[v]

    def push(self, x: Bond, inside: Iterable) -> Bond:
        """Raise by one on arcs leaving `inside`, lower on arcs entering it."""
        members = frozenset(inside)
        if self.forbidden in members:
            raise GraphError(f"cannot push a set containing the forbidden vertex {self.forbidden!r}")
        cut = vertex_cut(self.graph, members)
        values = dict(x.values)
        for a in cut.forward:
            values[a] += 1
        for a in cut.backward:
            values[a] -= 1
        return Bond(values)

    def is_legal_push(self, x: Bond, inside: Iterable) -> bool:
        """A push is legal when every crossing arc keeps strict slack."""
        members = frozenset(inside)
        if self.forbidden in members:
            raise GraphError(f"cannot push a set containing the forbidden vertex {self.forbidden!r}")
        cut = vertex_cut(self.graph, members)
        return all(x.values[a] < self.upper[a] for a in cut.forward) and all(
            x.values[a] > self.lower[a] for a in cut.backward
        )

    def _legal_vertex_push(self, x: Bond, v) -> bool:
        forward, backward = self._cut(v)
        return all(x.values[a] < self.upper[a] for a in forward) and all(
            x.values[a] > self.lower[a] for a in backward
        )

    def _legal_vertex_unpush(self, x: Bond, v) -> bool:
        forward, backward = self._cut(v)
        return all(x.values[a] > self.lower[a] for a in forward) and all(
            x.values[a] < self.upper[a] for a in backward
        )

    def _apply_vertex_push(self, x: Bond, v, step: int) -> Bond:
        forward, backward = self._cut(v)
        values = dict(x.values)
        for a in forward:
            values[a] += step
        for a in backward:
            values[a] -= step
        return Bond(values)

    def pushable_vertices(self) -> tuple:
        return tuple(v for v in self.graph.vertices if v != self.forbidden)

    def minimum_bond(self) -> Bond:
        """Unique minimum of the push order, reached by walking single-vertex
        unpushes to exhaustion.  Requires a reduced, feasible system."""
        if self._minimum is not None:
            return self._minimum
        self._require_reduced("minimum_bond")
        x = self.initial_bond()
        budget = _descent_budget(self)
        moving = True
        while moving:
            moving = False
            for v in self.pushable_vertices():
                if self._legal_vertex_unpush(x, v):
                    x = self._apply_vertex_push(x, v, -1)
                    moving = True
                    budget -= 1
                    if budget < 0:
                        raise RuntimeError("unpush descent exceeded its bound; system state is inconsistent")
                    break
        self._minimum = x
        return x

    def _require_reduced(self, operation: str):
        for a in self.graph.arcs:
            lo, hi = self.value_range(a.id)
            if lo == hi:
                raise GraphError(
                    f"{operation} requires a reduced system, but arc {a.id!r} is rigid "
                    f"(forced to {lo}); call reduce() first"
                )

    def push_counts(self, x: Bond) -> PushCount:
        """Per-vertex push counts of x relative to the minimum bond."""
        m = self.minimum_bond()
        offset = {a: x.values[a] - m.values[a] for a in self._arc_order}
        counts = {self.forbidden: 0}
        order = [self.forbidden]
        while order:
            frontier = order.pop()
            for arc in self.graph.incident_arcs(frontier):
                known_tail = arc.tail in counts
                known_head = arc.head in counts
                if known_tail and known_head:
                    if counts[arc.tail] - counts[arc.head] != offset[arc.id]:
                        raise GraphError(
                            f"labeling is not a bond of this system: arc {arc.id!r} "
                            "disagrees with its push-count difference"
                        )
                elif known_tail:
                    counts[arc.head] = counts[arc.tail] - offset[arc.id]
                    order.append(arc.head)
                else:
                    counts[arc.tail] = counts[arc.head] + offset[arc.id]
                    order.append(arc.tail)
        negatives = [v for v in counts if counts[v] < 0]
        if negatives:
            bad = sorted(negatives, key=id_key)[0]
            raise GraphError(
                f"labeling lies below the minimum bond (vertex {bad!r} has negative push count)"
            )
        del counts[self.forbidden]
        return PushCount(counts)

    def bond_from_counts(self, counts: PushCount | Mapping) -> Bond:
        table = counts.counts if isinstance(counts, PushCount) else counts
        m = self.minimum_bond()
        values = {}
        for a in self.graph.arcs:
            ct = 0 if a.tail == self.forbidden else table.get(a.tail, 0)
            ch = 0 if a.head == self.forbidden else table.get(a.head, 0)
            values[a.id] = m.values[a.id] + ct - ch
        return Bond(values)

    def leq(self, x: Bond, y: Bond) -> bool:
        cx = self.push_counts(x)
        cy = self.push_counts(y)
        verts = self.pushable_vertices()
        return all(cx.count(v) <= cy.count(v) for v in verts)

    def meet(self, x: Bond, y: Bond) -> Bond:
        cx = self.push_counts(x)
        cy = self.push_counts(y)
        low = {v: min(cx.count(v), cy.count(v)) for v in self.pushable_vertices()}
        return self.bond_from_counts(low)

    def join(self, x: Bond, y: Bond) -> Bond:
        cx = self.push_counts(x)
        cy = self.push_counts(y)
        high = {v: max(cx.count(v), cy.count(v)) for v in self.pushable_vertices()}
        return self.bond_from_counts(high)

    # ------------------------------------------------------------------
    # brute-force oracle (testing aid, deliberately independent of pushes)

    def all_bonds_brute_force(self, limit: int = 2_000_000) -> list[Bond]:
        """Every point of the capacity box satisfying the cycle condition.

        Exhaustive by construction; intended for small systems and tests.
        """
        arcs = self._arc_order
        size = 1
        for a in arcs:
            size *= self.upper[a] - self.lower[a] + 1
            if size > limit:
                raise GraphError(f"capacity box larger than {limit} points")
        found = []
        ranges = [range(self.lower[a], self.upper[a] + 1) for a in arcs]
        for combo in itertools.product(*ranges):
            values = dict(zip(arcs, combo))
            if all(
                flow_difference(values, c) == t for c, t in zip(self.cycles, self.targets)
            ):
                found.append(Bond(values))
        return found


def _as_int(table: Mapping, arc_id, what: str) -> int:
    try:
        value = table[arc_id]
    except KeyError:
        raise GraphError(f"{what} capacity table misses arc {arc_id!r}") from None
    if isinstance(value, bool) or not isinstance(value, int):
        raise GraphError(f"{what} value for arc {arc_id!r} must be an integer, got {value!r}")
    return value


def _descent_budget(system: BondSystem) -> int:
    spread = sum(system.upper[a.id] - system.lower[a.id] for a in system.graph.arcs)
    return (spread + 1) * (len(system.graph.vertices) + 1) * 4 + 64


def find_initial_bond(system: BondSystem) -> Bond:
    """One bond of the system, or InfeasibleSystemError carrying a
    certificate cycle whose window excludes the required flow-difference."""
    return system.initial_bond()


def arc_value_range(system: BondSystem, arc_id) -> tuple[int, int]:
    """Smallest and largest value the arc takes over all bonds."""
    return system.value_range(arc_id)
