"""Directed multigraph foundation: spanning trees, cycle and cut vectors,
rotation-system embeddings, faces, and planar duals.

Conventions
-----------
Vertex and arc ids are arbitrary hashable values, ints and strings in
practice.  Mixed id types are ordered ints-first via `id_key`, so every
"ascending id" rule below is total and deterministic.

A rotation system lists, for every vertex, the incident arc ends in
clockwise order.  Face traversal follows "leave through the end after the
arrival end in rotation order"; under the clockwise convention this walks
the boundary of every bounded face clockwise.  The dual of an arc runs
from the face holding its forward traversal to the face holding its
backward traversal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

TAIL = "tail"
HEAD = "head"

FORWARD = 1
BACKWARD = -1


class GraphError(ValueError):
    """Malformed graph data or an operation applied outside its domain."""


class NonPlanarError(GraphError):
    """Rotation system whose face count contradicts Euler's formula."""

    def __init__(self, genus: int):
        super().__init__(f"rotation system describes a surface of genus {genus}, not the plane")
        self.genus = genus


def id_key(value):
    """Sort key giving a total order over mixed int/str ids (ints first)."""
    if isinstance(value, int) and not isinstance(value, bool):
        return (0, value)
    return (1, str(value))


@dataclass(frozen=True)
class Arc:
    id: Hashable
    tail: Hashable
    head: Hashable

    def is_loop(self) -> bool:
        return self.tail == self.head

    def ends(self) -> tuple[tuple[Hashable, str], tuple[Hashable, str]]:
        return (self.id, TAIL), (self.id, HEAD)


class Multigraph:
    """Finite directed multigraph with identity-carrying arcs.

    Parallel arcs and loops are permitted.  Instances are treated as
    immutable: nothing mutates `vertices` or `arcs` after construction.
    """

    def __init__(self, vertices: Iterable, arcs: Iterable):
        self.vertices: tuple = tuple(sorted(set(vertices), key=id_key))
        vset = set(self.vertices)
        normalized = []
        for a in arcs:
            arc = a if isinstance(a, Arc) else Arc(*a)
            if arc.tail not in vset or arc.head not in vset:
                raise GraphError(f"arc {arc.id!r} references unknown vertex {arc.tail!r} or {arc.head!r}")
            normalized.append(arc)
        self.arcs: tuple[Arc, ...] = tuple(normalized)
        self._by_id: dict = {}
        for arc in self.arcs:
            if arc.id in self._by_id:
                raise GraphError(f"duplicate arc id {arc.id!r}")
            self._by_id[arc.id] = arc
        self._out = {v: [] for v in self.vertices}
        self._in = {v: [] for v in self.vertices}
        for arc in self.arcs:
            self._out[arc.tail].append(arc)
            self._in[arc.head].append(arc)
        for v in self.vertices:
            self._out[v].sort(key=lambda a: id_key(a.id))
            self._in[v].sort(key=lambda a: id_key(a.id))

    def __eq__(self, other):
        return (
            isinstance(other, Multigraph)
            and self.vertices == other.vertices
            and self.arcs == other.arcs
        )

    def __repr__(self):
        return f"Multigraph({len(self.vertices)} vertices, {len(self.arcs)} arcs)"

    def arc(self, arc_id) -> Arc:
        try:
            return self._by_id[arc_id]
        except KeyError:
            raise GraphError(f"unknown arc id {arc_id!r}") from None

    def has_vertex(self, v) -> bool:
        return v in self._out

    def out_arcs(self, v) -> list[Arc]:
        return list(self._out[v])

    def in_arcs(self, v) -> list[Arc]:
        return list(self._in[v])

    def incident_arcs(self, v) -> list[Arc]:
        """All arcs touching v, loops listed once, ascending by id."""
        seen = {}
        for arc in self._out[v] + self._in[v]:
            seen[arc.id] = arc
        return sorted(seen.values(), key=lambda a: id_key(a.id))

    def out_degree(self, v) -> int:
        return len(self._out[v])

    def in_degree(self, v) -> int:
        return len(self._in[v])

    def reversed(self) -> "Multigraph":
        return Multigraph(self.vertices, [Arc(a.id, a.head, a.tail) for a in self.arcs])

    def connected_components(self) -> list[frozenset]:
        """Vertex sets of the underlying undirected components, each sorted
        internally; components ordered by their smallest vertex."""
        unvisited = set(self.vertices)
        components = []
        for start in self.vertices:
            if start not in unvisited:
                continue
            seen = {start}
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for arc in self.incident_arcs(v):
                    for w in (arc.tail, arc.head):
                        if w not in seen:
                            seen.add(w)
                            queue.append(w)
            unvisited -= seen
            components.append(frozenset(seen))
        return components

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1

    def induced_subgraph(self, vertices: Iterable) -> "Multigraph":
        keep = set(vertices)
        arcs = [a for a in self.arcs if a.tail in keep and a.head in keep]
        return Multigraph(keep, arcs)


@dataclass(frozen=True)
class CycleVector:
    """Signed arc incidence of a closed walk: +1 forward, -1 backward.

    Arcs traversed equally often in both directions are omitted, so every
    stored entry is +1 or -1.
    """

    signs: Mapping

    def __post_init__(self):
        for arc_id, s in self.signs.items():
            if s not in (1, -1):
                raise GraphError(f"cycle entry for arc {arc_id!r} must be +1 or -1, got {s!r}")

    def sign(self, arc_id) -> int:
        return self.signs.get(arc_id, 0)

    def support(self) -> list:
        return sorted(self.signs, key=id_key)

    def forward_arcs(self) -> list:
        return sorted((a for a, s in self.signs.items() if s == 1), key=id_key)

    def backward_arcs(self) -> list:
        return sorted((a for a, s in self.signs.items() if s == -1), key=id_key)

    def reversed(self) -> "CycleVector":
        return CycleVector({a: -s for a, s in self.signs.items()})

    def items(self):
        return [(a, self.signs[a]) for a in self.support()]

    def __len__(self):
        return len(self.signs)

    def __eq__(self, other):
        return isinstance(other, CycleVector) and dict(self.signs) == dict(other.signs)


@dataclass(frozen=True)
class VertexCut:
    """Arcs crossing a vertex set: `forward` leave it, `backward` enter it."""

    inside: frozenset
    forward: tuple
    backward: tuple


def spanning_tree(g: Multigraph) -> frozenset:
    """Deterministic spanning tree of the underlying undirected graph.

    Grows from the smallest vertex, repeatedly adding the smallest-id arc
    with exactly one endpoint reached.  Raises on disconnected input,
    naming two vertices with no connecting path.
    """
    if not g.vertices:
        raise GraphError("empty graph has no spanning tree")
    root = g.vertices[0]
    reached = {root}
    tree: set = set()
    ordered = sorted(g.arcs, key=lambda a: id_key(a.id))
    while len(reached) < len(g.vertices):
        for arc in ordered:
            tail_in = arc.tail in reached
            if tail_in != (arc.head in reached):
                tree.add(arc.id)
                reached.add(arc.head if tail_in else arc.tail)
                break
        else:
            stranded = next(v for v in g.vertices if v not in reached)
            raise GraphError(f"graph is disconnected: no path between {root!r} and {stranded!r}")
    return frozenset(tree)


def _tree_adjacency(g: Multigraph, tree: frozenset) -> dict:
    adj: dict = {v: [] for v in g.vertices}
    for arc_id in tree:
        arc = g.arc(arc_id)
        if arc.is_loop():
            raise GraphError(f"tree arc {arc_id!r} is a loop")
        adj[arc.tail].append((arc.head, arc, FORWARD))
        adj[arc.head].append((arc.tail, arc, BACKWARD))
    for v in adj:
        adj[v].sort(key=lambda item: id_key(item[1].id))
    return adj


def _check_spanning_tree(g: Multigraph, tree: frozenset) -> dict:
    """Validate `tree` and return parent links {v: (parent, arc, direction)}."""
    if len(tree) != len(g.vertices) - 1:
        raise GraphError(f"a spanning tree here needs {len(g.vertices) - 1} arcs, got {len(tree)}")
    adj = _tree_adjacency(g, tree)
    root = g.vertices[0]
    parent: dict = {root: None}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w, arc, direction in adj[v]:
            if w not in parent:
                parent[w] = (v, arc, direction)
                queue.append(w)
    if len(parent) != len(g.vertices):
        raise GraphError("given arc set does not span the graph")
    return parent


def fundamental_cycles(g: Multigraph, tree: frozenset) -> list[CycleVector]:
    """One cycle per non-tree arc, ordered by ascending non-tree arc id.

    The defining arc is traversed forward (+1) and the cycle closes through
    the tree path from its head back to its tail.  A loop closes on itself.
    """
    parent = _check_spanning_tree(g, tree)

    def climb_steps(v):
        steps = []
        while parent[v] is not None:
            up, arc, _ = parent[v]
            steps.append((v, up, arc))
            v = up
        return steps

    cycles = []
    for arc in sorted(g.arcs, key=lambda a: id_key(a.id)):
        if arc.id in tree:
            continue
        signs = {arc.id: 1}
        if not arc.is_loop():
            from_head = climb_steps(arc.head)
            from_tail = climb_steps(arc.tail)
            head_chain = [arc.head] + [s[1] for s in from_head]
            tail_chain = [arc.tail] + [s[1] for s in from_tail]
            common = set(head_chain) & set(tail_chain)
            meet = next(v for v in head_chain if v in common)
            walk: list[tuple[Arc, int]] = []
            for v, up, tarc in from_head:
                if v == meet:
                    break
                walk.append((tarc, FORWARD if tarc.tail == v else BACKWARD))
                if up == meet:
                    break
            descent: list[tuple[Arc, int]] = []
            for v, up, tarc in from_tail:
                if v == meet:
                    break
                descent.append((tarc, FORWARD if tarc.head == v else BACKWARD))
                if up == meet:
                    break
            for tarc, direction in walk + list(reversed(descent)):
                signs[tarc.id] = direction
        cycles.append(CycleVector(signs))
    return cycles


def vertex_cut(g: Multigraph, inside: Iterable) -> VertexCut:
    """Cut induced by a vertex set; loops and internal arcs never cross."""
    members = frozenset(inside)
    unknown = [v for v in members if not g.has_vertex(v)]
    if unknown:
        raise GraphError(f"cut references unknown vertex {sorted(unknown, key=id_key)[0]!r}")
    forward = []
    backward = []
    for arc in g.arcs:
        tail_in = arc.tail in members
        head_in = arc.head in members
        if tail_in and not head_in:
            forward.append(arc.id)
        elif head_in and not tail_in:
            backward.append(arc.id)
    return VertexCut(members, tuple(sorted(forward, key=id_key)), tuple(sorted(backward, key=id_key)))


@dataclass(frozen=True)
class ArcEnd:
    arc: Hashable
    end: str

    def __post_init__(self):
        if self.end not in (TAIL, HEAD):
            raise GraphError(f"arc end must be {TAIL!r} or {HEAD!r}, got {self.end!r}")


class PlanarEmbedding:
    """Combinatorial embedding: per-vertex clockwise rotation of arc ends."""

    def __init__(self, host: Multigraph, rotation: Mapping):
        self.host = host
        normalized: dict = {}
        seen: set = set()
        for v, ends in rotation.items():
            if not host.has_vertex(v):
                raise GraphError(f"rotation lists unknown vertex {v!r}")
            entries = []
            for e in ends:
                entry = e if isinstance(e, ArcEnd) else ArcEnd(*e)
                arc = host.arc(entry.arc)
                expected = arc.tail if entry.end == TAIL else arc.head
                if expected != v:
                    raise GraphError(
                        f"arc end ({entry.arc!r}, {entry.end}) belongs at vertex {expected!r}, not {v!r}"
                    )
                key = (entry.arc, entry.end)
                if key in seen:
                    raise GraphError(f"arc end ({entry.arc!r}, {entry.end}) appears twice")
                seen.add(key)
                entries.append(entry)
            normalized[v] = tuple(entries)
        for v in host.vertices:
            normalized.setdefault(v, ())
        expected_ends = 2 * len(host.arcs)
        if len(seen) != expected_ends:
            missing = next(
                (a.id, end)
                for a in host.arcs
                for end in (TAIL, HEAD)
                if (a.id, end) not in seen
            )
            raise GraphError(f"rotation misses arc end {missing!r}")
        self.rotation = normalized

    def next_end(self, v, end: ArcEnd) -> ArcEnd:
        ring = self.rotation[v]
        idx = ring.index(end)
        return ring[(idx + 1) % len(ring)]


@dataclass(frozen=True)
class FaceWalk:
    """Closed boundary walk of one face, as (arc id, direction) darts."""

    darts: tuple

    def __len__(self):
        return len(self.darts)

    def cycle_vector(self) -> CycleVector:
        net: dict = {}
        for arc_id, direction in self.darts:
            net[arc_id] = net.get(arc_id, 0) + direction
        return CycleVector({a: s for a, s in net.items() if s != 0})

    def arc_ids(self) -> list:
        return [arc_id for arc_id, _ in self.darts]


def faces(embedding: PlanarEmbedding) -> list[FaceWalk]:
    """All facial walks of a connected plane embedding.

    Every dart (arc, direction) lies on exactly one face.  After Euler's
    count the traversal must find  2 - |V| + |A|  faces; any other count
    means the rotation describes a higher-genus surface and is rejected.
    """
    g = embedding.host
    if not g.vertices:
        raise GraphError("cannot trace faces of an empty graph")
    if not g.is_connected():
        raise GraphError("face tracing requires a connected embedding")
    if not g.arcs:
        return [FaceWalk(())]

    def landing(arc: Arc, direction: int) -> tuple:
        return (arc.head, ArcEnd(arc.id, HEAD)) if direction == FORWARD else (arc.tail, ArcEnd(arc.id, TAIL))

    def dart_of(end: ArcEnd) -> tuple:
        return (end.arc, FORWARD if end.end == TAIL else BACKWARD)

    unused = {
        (arc.id, direction)
        for arc in g.arcs
        for direction in (FORWARD, BACKWARD)
    }
    walks = []
    for arc in sorted(g.arcs, key=lambda a: id_key(a.id)):
        for direction in (FORWARD, BACKWARD):
            start = (arc.id, direction)
            if start not in unused:
                continue
            walk = []
            dart = start
            while True:
                walk.append(dart)
                unused.discard(dart)
                v, arrived = landing(g.arc(dart[0]), dart[1])
                dart = dart_of(embedding.next_end(v, arrived))
                if dart == start:
                    break
            walks.append(FaceWalk(tuple(walk)))
    euler = len(g.vertices) - len(g.arcs) + len(walks)
    if euler != 2:
        raise NonPlanarError((2 - euler) // 2)
    return walks


@dataclass(frozen=True)
class PlanarDual:
    """Dual graph with face list and the primal-to-dual arc bijection.

    Dual vertex i is faces[i]; dual arcs reuse primal arc ids.  Each dual
    arc leaves the face holding the primal arc's forward dart, entering
    the face holding its backward dart.
    """

    graph: Multigraph
    faces: tuple
    arc_map: Mapping
    embedding: PlanarEmbedding


def planar_dual(embedding: PlanarEmbedding) -> PlanarDual:
    walks = faces(embedding)
    face_of_dart = {}
    for i, walk in enumerate(walks):
        for dart in walk.darts:
            face_of_dart[dart] = i
    g = embedding.host
    dual_arcs = []
    for arc in sorted(g.arcs, key=lambda a: id_key(a.id)):
        tail_face = face_of_dart[(arc.id, FORWARD)]
        head_face = face_of_dart[(arc.id, BACKWARD)]
        dual_arcs.append(Arc(arc.id, tail_face, head_face))
    dual = Multigraph(range(len(walks)), dual_arcs)
    # Rotation around a face vertex: the crossed arcs in boundary-walk order.
    rotation = {}
    for i, walk in enumerate(walks):
        ring = []
        for arc_id, direction in walk.darts:
            ring.append(ArcEnd(arc_id, TAIL if direction == FORWARD else HEAD))
        rotation[i] = tuple(ring)
    dual_embedding = PlanarEmbedding(dual, rotation)
    arc_map = {arc.id: arc.id for arc in g.arcs}
    return PlanarDual(dual, tuple(walks), arc_map, dual_embedding)
