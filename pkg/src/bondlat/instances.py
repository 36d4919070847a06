"""Encoders turning well-known combinatorial families into bond systems.

Each encoder produces a system whose bonds are in explicit bijection with
the target family, plus decode/encode converters:

* orientations with prescribed cycle flow-differences (0/1 windows, flips),
* capacity-bounded flows with prescribed vertex excess on a planar digraph
  (transferred to the planar dual, where excess turns into cycle sums),
* orientations with prescribed out-degrees (a flow encoding in disguise),
* vertex potentials with per-arc difference windows (the zero-reference
  system on the graph itself).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping

from .bonds import Bond, BondSystem, InfeasibleError
from .graph import (
    Arc,
    ArcEnd,
    GraphError,
    HEAD,
    Multigraph,
    PlanarDual,
    PlanarEmbedding,
    TAIL,
    fundamental_cycles,
    id_key,
    planar_dual,
    spanning_tree,
)


@dataclass(frozen=True)
class Orientation:
    """An orientation of a graph, stored as flips of a base orientation."""

    base: Multigraph
    flips: Mapping  # arc id -> 0 (keep) or 1 (reverse)

    def __post_init__(self):
        for a in self.base.arcs:
            if self.flips.get(a.id) not in (0, 1):
                raise GraphError(f"orientation must flip arc {a.id!r} by 0 or 1")

    def as_multigraph(self) -> Multigraph:
        arcs = [
            Arc(a.id, a.head, a.tail) if self.flips[a.id] else a for a in self.base.arcs
        ]
        return Multigraph(self.base.vertices, arcs)

    def out_degrees(self) -> dict:
        degrees = {v: 0 for v in self.base.vertices}
        for a in self.as_multigraph().arcs:
            degrees[a.tail] += 1
        return degrees


class ParityError(ValueError):
    """Cycle whose target differs from the base count by an odd amount."""

    def __init__(self, defining_arc, base_count: int, target: int):
        super().__init__(
            f"cycle of non-tree arc {defining_arc!r} has base flow-difference {base_count} "
            f"but target {target}; they must differ by an even number"
        )
        self.defining_arc = defining_arc
        self.base_count = base_count
        self.target = target


@dataclass(frozen=True)
class COrientationFamily:
    """Orientations of `base` whose flow-difference on each fundamental
    cycle equals the prescribed target; bonds are the flip indicators."""

    system: BondSystem
    base: Multigraph
    targets: Mapping  # non-tree arc id -> prescribed cycle flow-difference

    def decode(self, bond: Bond) -> Orientation:
        return Orientation(self.base, dict(bond.values))

    def encode(self, orientation: Orientation) -> Bond:
        if orientation.base != self.base:
            raise GraphError("orientation belongs to a different base graph")
        return Bond({a.id: orientation.flips[a.id] for a in self.base.arcs})


def encode_c_orientations(base: Multigraph, targets: Mapping, forbidden=None) -> COrientationFamily:
    """Bond system for orientations with prescribed cycle flow-differences.

    `targets` maps every non-tree arc of the deterministic spanning tree to
    the required flow-difference of its fundamental cycle (targets for the
    base orientation itself are the signed arc counts).  Flipping a set of
    arcs changes each count by twice the flipped overlap, hence the parity
    precondition.
    """
    tree = spanning_tree(base)
    cycles = fundamental_cycles(base, tree)
    non_tree = [c.support()[_defining_index(c, tree)] for c in cycles]
    wanted = set(non_tree)
    given = set(targets)
    if given - wanted:
        stray = sorted(given - wanted, key=id_key)[0]
        raise GraphError(f"target given for {stray!r}, which is not a non-tree arc")
    if wanted - given:
        missing = sorted(wanted - given, key=id_key)[0]
        raise GraphError(f"no target given for non-tree arc {missing!r}")
    reference = {a.id: 0 for a in base.arcs}
    for cycle, defining in zip(cycles, non_tree):
        base_count = sum(cycle.signs.values())
        target = targets[defining]
        if (base_count - target) % 2 != 0:
            raise ParityError(defining, base_count, target)
        reference[defining] = (base_count - target) // 2
    if forbidden is None:
        forbidden = base.vertices[0]
    system = BondSystem(
        base,
        {a.id: 0 for a in base.arcs},
        {a.id: 1 for a in base.arcs},
        reference,
        forbidden,
    )
    return COrientationFamily(system, base, dict(targets))


def _defining_index(cycle, tree) -> int:
    support = cycle.support()
    outside = [i for i, a in enumerate(support) if a not in tree]
    if len(outside) != 1:
        raise GraphError("fundamental cycle must contain exactly one non-tree arc")
    return outside[0]


@dataclass(frozen=True)
class FlowSpec:
    """A plane digraph with per-arc capacity windows and per-vertex excess
    (flow in minus flow out); missing excess entries default to zero."""

    embedding: PlanarEmbedding
    lower: Mapping
    upper: Mapping
    excess: Mapping


@dataclass(frozen=True)
class FlowFamily:
    """Flows of the primal digraph, realized as bonds of the planar dual."""

    system: BondSystem
    spec: FlowSpec
    dual: PlanarDual

    def decode(self, bond: Bond) -> dict:
        """Bond of the dual system -> flow labeling of the primal arcs."""
        return {a: bond.values[self.dual.arc_map[a]] for a in self.dual.arc_map}

    def encode(self, flow: Mapping) -> Bond:
        return Bond({self.dual.arc_map[a]: flow[a] for a in self.dual.arc_map})


class ExcessImbalanceError(InfeasibleError):
    """Prescribed excesses that do not sum to zero admit no flow at all."""

    def __init__(self, total: int):
        super().__init__(f"prescribed excesses sum to {total}, but every flow's excesses sum to 0")
        self.total = total


def encode_flows(spec: FlowSpec, unbounded_face: int = 0) -> FlowFamily:
    """Transfer a flow problem to a bond system on the planar dual.

    A labeling has prescribed excess everywhere iff it differs from one
    fixed such labeling by a circulation, and circulations of the primal
    are exactly the labelings of the dual with zero flow-difference on
    every cycle.  The fixed labeling, built over a spanning tree, becomes
    the dual system's reference; the designated unbounded face becomes the
    forbidden vertex.
    """
    g = spec.embedding.host
    excess = {v: int(spec.excess.get(v, 0)) for v in g.vertices}
    total = sum(excess.values())
    if total != 0:
        raise ExcessImbalanceError(total)
    anchor_flow = _flow_with_excess(g, excess)
    dual = planar_dual(spec.embedding)
    if not (isinstance(unbounded_face, int) and 0 <= unbounded_face < len(dual.faces)):
        raise GraphError(
            f"unbounded face must be a face index in [0, {len(dual.faces) - 1}], got {unbounded_face!r}"
        )
    lower = {}
    upper = {}
    reference = {}
    for primal_id, dual_id in dual.arc_map.items():
        lower[dual_id] = _window_value(spec.lower, primal_id, "lower")
        upper[dual_id] = _window_value(spec.upper, primal_id, "upper")
        reference[dual_id] = anchor_flow[primal_id]
    system = BondSystem(dual.graph, lower, upper, reference, unbounded_face)
    return FlowFamily(system, spec, dual)


def _window_value(table: Mapping, arc_id, what: str) -> int:
    try:
        return int(table[arc_id])
    except KeyError:
        raise GraphError(f"{what} capacity table misses arc {arc_id!r}") from None


def _flow_with_excess(g: Multigraph, excess: Mapping) -> dict:
    """Any integer labeling with the prescribed excess at every vertex.

    Non-tree arcs carry zero; each tree arc then carries the accumulated
    excess of the subtree it separates, signed by its direction.
    """
    tree = spanning_tree(g)
    root = g.vertices[0]
    parent: dict = {root: None}
    order = [root]
    adjacency: dict = {v: [] for v in g.vertices}
    for arc_id in tree:
        a = g.arc(arc_id)
        adjacency[a.tail].append((a.head, a))
        adjacency[a.head].append((a.tail, a))
    from collections import deque

    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w, a in adjacency[v]:
            if w not in parent:
                parent[w] = (v, a)
                order.append(w)
                queue.append(w)
    flow = {a.id: 0 for a in g.arcs}
    subtotal = dict(excess)
    for v in reversed(order):
        if parent[v] is None:
            continue
        up, arc = parent[v]
        # arc crosses the subtree cut at v; inflow into the subtree must
        # equal the subtree's total excess
        if arc.head == v:
            flow[arc.id] = subtotal[v]
        else:
            flow[arc.id] = -subtotal[v]
        subtotal[up] += subtotal[v]
    return flow


@dataclass(frozen=True)
class AlphaSpec:
    """A plane graph (arc directions ignored) with a prescribed out-degree
    for every vertex."""

    embedding: PlanarEmbedding
    out_degrees: Mapping


@dataclass(frozen=True)
class AlphaFamily:
    """Orientations with prescribed out-degrees, as dual-system bonds."""

    flows: FlowFamily
    reference: Multigraph  # the deterministic small-to-large orientation

    @property
    def system(self) -> BondSystem:
        return self.flows.system

    def decode(self, bond: Bond) -> Orientation:
        return Orientation(self.reference, self.flows.decode(bond))

    def encode(self, orientation: Orientation) -> Bond:
        if orientation.base != self.reference:
            raise GraphError("orientation belongs to a different reference graph")
        return self.flows.encode(dict(orientation.flips))


def encode_alpha_orientations(spec: AlphaSpec, unbounded_face: int = 0) -> AlphaFamily:
    """Encode prescribed-out-degree orientations via the flow encoder.

    Edges are first redirected from smaller to larger endpoint id (the
    deterministic reference orientation); flipping a set of arcs changes
    each out-degree by that vertex's in-minus-out flip count, so the stated
    out-degrees become excess targets on unit-window flows.
    """
    g = spec.embedding.host
    degrees = {}
    for v in g.vertices:
        try:
            value = int(spec.out_degrees[v])
        except KeyError:
            raise GraphError(f"no out-degree prescribed for vertex {v!r}") from None
        degrees[v] = value
    if sum(degrees.values()) != len(g.arcs):
        raise GraphError(
            f"out-degrees sum to {sum(degrees.values())} but the graph has {len(g.arcs)} edges"
        )
    reference, embedding = _reference_orientation(spec.embedding)
    excess = {v: degrees[v] - reference.out_degree(v) for v in reference.vertices}
    flows = encode_flows(
        FlowSpec(
            embedding,
            {a.id: 0 for a in reference.arcs},
            {a.id: 1 for a in reference.arcs},
            excess,
        ),
        unbounded_face,
    )
    return AlphaFamily(flows, reference)


def _reference_orientation(embedding: PlanarEmbedding) -> tuple[Multigraph, PlanarEmbedding]:
    """Redirect every arc from smaller to larger endpoint, remapping the
    rotation's tail/head tags on flipped arcs."""
    g = embedding.host
    flipped = set()
    arcs = []
    for a in g.arcs:
        if id_key(a.tail) > id_key(a.head):
            arcs.append(Arc(a.id, a.head, a.tail))
            flipped.add(a.id)
        else:
            arcs.append(a)
    oriented = Multigraph(g.vertices, arcs)
    rotation = {}
    for v, ring in embedding.rotation.items():
        entries = []
        for end in ring:
            if end.arc in flipped:
                entries.append(ArcEnd(end.arc, HEAD if end.end == TAIL else TAIL))
            else:
                entries.append(end)
        rotation[v] = tuple(entries)
    return oriented, PlanarEmbedding(oriented, rotation)


@dataclass(frozen=True)
class PotentialFamily:
    """Vertex potentials anchored at zero with per-arc difference windows.

    A potential assigns each vertex an integer with p(anchor) = 0 and
    lower(a) <= p(head) - p(tail) <= upper(a); these correspond to the
    bonds of the zero-reference system via x(a) = p(head) - p(tail).
    """

    system: BondSystem
    anchor: Hashable

    def decode(self, bond: Bond) -> dict:
        """Bond -> potential, by signed path sums from the anchor."""
        g = self.system.graph
        potential = {self.anchor: 0}
        stack = [self.anchor]
        while stack:
            v = stack.pop()
            for arc in g.incident_arcs(v):
                if arc.tail in potential and arc.head in potential:
                    if potential[arc.head] - potential[arc.tail] != bond.values[arc.id]:
                        raise GraphError(
                            f"labeling has nonzero flow-difference around a cycle through {arc.id!r}"
                        )
                elif arc.tail in potential:
                    potential[arc.head] = potential[arc.tail] + bond.values[arc.id]
                    stack.append(arc.head)
                else:
                    potential[arc.tail] = potential[arc.head] - bond.values[arc.id]
                    stack.append(arc.tail)
        return potential

    def encode(self, potential: Mapping) -> Bond:
        if potential.get(self.anchor, 0) != 0:
            raise GraphError(f"potential must vanish at the anchor {self.anchor!r}")
        g = self.system.graph
        return Bond({a.id: potential[a.head] - potential[a.tail] for a in g.arcs})


def encode_potentials(graph: Multigraph, lower: Mapping, upper: Mapping, anchor) -> PotentialFamily:
    """Bond system whose bonds are the per-arc differences of potentials."""
    reference = {a.id: 0 for a in graph.arcs}
    system = BondSystem(graph, lower, upper, reference, anchor)
    return PotentialFamily(system, anchor)
