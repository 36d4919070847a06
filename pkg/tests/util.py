"""Shared fixtures and independent oracles for the test suite.

The oracles deliberately avoid the library's own machinery: bond
enumeration goes through potential consistency instead of fundamental
cycles, and the order oracle walks arbitrary legal set pushes instead of
single-vertex covers.
"""

from __future__ import annotations

import itertools
from collections import deque

from bondlat import (
    Arc,
    ArcEnd,
    Bond,
    BondSystem,
    ColoredDigraph,
    FinitePoset,
    Multigraph,
    PlanarEmbedding,
)
from bondlat.graph import HEAD, TAIL


def tri_graph() -> Multigraph:
    return Multigraph([1, 2, 3], [Arc("a1", 1, 2), Arc("a2", 2, 3), Arc("a3", 3, 1)])


def tri_system(delta: int = 1, forbidden=1) -> BondSystem:
    g = tri_graph()
    zeros = {a.id: 0 for a in g.arcs}
    ones = {a.id: 1 for a in g.arcs}
    reference = {"a1": delta, "a2": 0, "a3": 0}
    return BondSystem(g, zeros, ones, reference, forbidden)


def star_system() -> BondSystem:
    g = Multigraph([0, 1, 2], [Arc("a", 1, 0), Arc("b", 2, 0)])
    return BondSystem(
        g, {"a": 0, "b": 0}, {"a": 1, "b": 1}, {"a": 0, "b": 0}, 0
    )


def tri_embedding() -> PlanarEmbedding:
    g = tri_graph()
    rotation = {
        1: (ArcEnd("a1", TAIL), ArcEnd("a3", HEAD)),
        2: (ArcEnd("a2", TAIL), ArcEnd("a1", HEAD)),
        3: (ArcEnd("a3", TAIL), ArcEnd("a2", HEAD)),
    }
    return PlanarEmbedding(g, rotation)


def cyclic_u_digraph(n: int = 6) -> ColoredDigraph:
    """Strongly cyclic digraph satisfying both fork axioms: a directed
    n-cycle with distance-2 chords, steps colored "s" and "d"."""
    arcs = []
    colors = {}
    for i in range(n):
        arcs.append(Arc(("s", i), i, (i + 1) % n))
        colors[("s", i)] = "s"
        arcs.append(Arc(("d", i), i, (i + 2) % n))
        colors[("d", i)] = "d"
    return ColoredDigraph(Multigraph(range(n), arcs), colors)


def two_source_u_digraph() -> ColoredDigraph:
    """U-colored cover digraph of the two-source bowtie-with-top poset."""
    arcs = [
        Arc("su", "s", "u"),
        Arc("sv", "s", "v"),
        Arc("tu", "t", "u"),
        Arc("tv", "t", "v"),
        Arc("uT", "u", "T"),
        Arc("vT", "v", "T"),
    ]
    colors = {"su": 1, "sv": 2, "tu": 1, "tv": 2, "uT": 2, "vT": 1}
    return ColoredDigraph(Multigraph(["s", "t", "u", "v", "T"], arcs), colors)


def two_source_poset() -> FinitePoset:
    labels = ("s", "t", "u", "v", "T")
    covers = [(0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 4)]
    return FinitePoset.from_covers(labels, covers)


def chain_poset(k: int) -> FinitePoset:
    return FinitePoset.from_covers(tuple(range(k)), [(i, i + 1) for i in range(k - 1)])


def diamond_poset() -> FinitePoset:
    return FinitePoset.from_covers(("bot", "a", "b", "top"), [(0, 1), (0, 2), (1, 3), (2, 3)])


def m3_poset() -> FinitePoset:
    covers = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]
    return FinitePoset.from_covers(("bot", "a", "b", "c", "top"), covers)


def n5_poset() -> FinitePoset:
    covers = [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]
    return FinitePoset.from_covers(("bot", "a", "b", "c", "top"), covers)


# ---------------------------------------------------------------------------
# oracles


def tension_bonds(system: BondSystem, box_limit: int = 500_000) -> list[Bond]:
    """Enumerate the capacity box, keeping labelings that differ from the
    reference by a consistent vertex potential (the defining property,
    checked without any cycle machinery)."""
    g = system.graph
    order = [a.id for a in g.arcs]
    ranges = [range(system.lower[a], system.upper[a] + 1) for a in order]
    size = 1
    for r in ranges:
        size *= len(r)
    if size > box_limit:
        raise AssertionError(f"oracle box has {size} points, over the {box_limit} limit")
    found = []
    for combo in itertools.product(*ranges):
        values = dict(zip(order, combo))
        if _is_tension(g, {a: values[a] - system.reference[a] for a in order}):
            found.append(Bond(values))
    return found


def _is_tension(g: Multigraph, diff: dict) -> bool:
    """True when diff(a) = p(tail) - p(head) for some vertex labeling p."""
    potential = {g.vertices[0]: 0}
    queue = deque([g.vertices[0]])
    while queue:
        v = queue.popleft()
        for arc in g.incident_arcs(v):
            if arc.tail in potential and arc.head in potential:
                if potential[arc.tail] - potential[arc.head] != diff[arc.id]:
                    return False
            elif arc.tail in potential:
                potential[arc.head] = potential[arc.tail] - diff[arc.id]
                queue.append(arc.head)
            else:
                potential[arc.tail] = potential[arc.head] + diff[arc.id]
                queue.append(arc.tail)
    return len(potential) == len(g.vertices)


def push_reachability(system: BondSystem, elements: list[Bond]) -> dict:
    """Order oracle: leq[(i, j)] iff element j is reachable from element i
    by legal pushes of arbitrary vertex sets avoiding the forbidden vertex."""
    g = system.graph
    others = [v for v in g.vertices if v != system.forbidden]
    subsets = []
    for size in range(1, len(others) + 1):
        subsets.extend(itertools.combinations(others, size))
    key_of = {x.as_tuple([a.id for a in g.arcs]): i for i, x in enumerate(elements)}
    arc_order = [a.id for a in g.arcs]
    reach = {}
    for i, x in enumerate(elements):
        seen = {i}
        queue = deque([x])
        while queue:
            current = queue.popleft()
            for inside in subsets:
                if not system.is_legal_push(current, inside):
                    continue
                nxt = system.push(current, inside)
                j = key_of[nxt.as_tuple(arc_order)]
                if j not in seen:
                    seen.add(j)
                    queue.append(nxt)
        for j in seen:
            reach[(i, j)] = True
    return reach
