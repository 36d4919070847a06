"""Chip-firing games on directed multigraphs.

A vertex holding at least as many chips as its out-degree (and at least one
out-arc) may fire, sending one chip along every out-arc; loops return their
chips.  The reachable arrangements with moves colored by the fired vertex
form a digraph whose certification mirrors the bond-lattice machinery: a
finite game has a unique final arrangement and every maximal firing
sequence fires the same multiset of vertices.

The bidirectional closure also walks unfirings (pulling one chip back along
every out-arc), recorded as reversed fire moves.  Its order is generally
only a meet-semilattice-like poset; `unique_minimal_representation_report`
checks the one property that survives: every arrangement is the unique
maximal lower bound of a unique minimal set of meet-irreducibles.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Mapping

from .checker import (
    ColoredDigraph,
    CoverVerdict,
    FinitePoset,
    PosetError,
    certify_uld_cover,
)
from .graph import Arc, Multigraph

FINITE = "finite"
CYCLIC = "cyclic"
CAP_EXCEEDED = "cap exceeded"


class ChipError(ValueError):
    """Illegal chip-firing move or malformed arrangement."""


@dataclass(frozen=True)
class ChipArrangement:
    """Nonnegative chip counts on every vertex of a game graph."""

    chips: Mapping

    def count(self, v) -> int:
        return self.chips.get(v, 0)

    def total(self) -> int:
        return sum(self.chips.values())

    def as_tuple(self, vertex_order: Iterable) -> tuple:
        return tuple(self.chips.get(v, 0) for v in vertex_order)

    def __eq__(self, other):
        if not isinstance(other, ChipArrangement):
            return NotImplemented
        mine = {v: n for v, n in self.chips.items() if n}
        theirs = {v: n for v, n in other.chips.items() if n}
        return mine == theirs


def _check_arrangement(g: Multigraph, arrangement: ChipArrangement):
    for v, n in arrangement.chips.items():
        if not g.has_vertex(v):
            raise ChipError(f"arrangement places chips on unknown vertex {v!r}")
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ChipError(f"vertex {v!r} must hold a nonnegative integer number of chips")


def can_fire(g: Multigraph, arrangement: ChipArrangement, v) -> bool:
    out = g.out_degree(v)
    return out >= 1 and arrangement.count(v) >= out


def fire(g: Multigraph, arrangement: ChipArrangement, v) -> ChipArrangement:
    """Send one chip along every out-arc of v."""
    if not g.has_vertex(v):
        raise ChipError(f"cannot fire unknown vertex {v!r}")
    out = g.out_degree(v)
    if out == 0:
        raise ChipError(f"vertex {v!r} has no out-arcs and can never fire")
    if arrangement.count(v) < out:
        raise ChipError(
            f"vertex {v!r} holds {arrangement.count(v)} chips but needs {out} to fire"
        )
    chips = dict(arrangement.chips)
    chips[v] = chips.get(v, 0) - out
    for arc in g.out_arcs(v):
        chips[arc.head] = chips.get(arc.head, 0) + 1
    return ChipArrangement(chips)


def can_unfire(g: Multigraph, arrangement: ChipArrangement, v) -> bool:
    # every out-neighbor must return one chip per parallel arc; loops make
    # v its own out-neighbor, which keeps fire(unfire(s, v), v) = s exact
    out = g.out_degree(v)
    if out == 0:
        return False
    needed = Counter(arc.head for arc in g.out_arcs(v))
    return all(arrangement.count(w) >= k for w, k in needed.items())

def unfire(g: Multigraph, arrangement: ChipArrangement, v) -> ChipArrangement:
    """Pull one chip back along every out-arc of v (the inverse of fire)."""
    if not can_unfire(g, arrangement, v):
        raise ChipError(f"cannot unfire vertex {v!r}: some out-neighbor lacks chips")
    chips = dict(arrangement.chips)
    chips[v] = chips.get(v, 0) + g.out_degree(v)
    for arc in g.out_arcs(v):
        chips[arc.head] = chips.get(arc.head, 0) - 1
    return ChipArrangement(chips)


@dataclass(frozen=True)
class GameGraph:
    """Reachable arrangements and fire moves from a start arrangement.

    Moves are (from index, to index, fired vertex).  `verdict` is "finite"
    (all states explored, no directed cycle), "cyclic", or "cap exceeded".
    """

    graph: Multigraph
    states: tuple
    moves: tuple
    verdict: str

    @property
    def complete(self) -> bool:
        return self.verdict != CAP_EXCEEDED

    def terminal_index(self) -> int:
        targets = {m[0] for m in self.moves}
        stuck = [i for i in range(len(self.states)) if i not in targets]
        if len(stuck) != 1:
            raise ChipError(f"expected a unique final arrangement, found {len(stuck)}")
        return stuck[0]

    def to_colored_digraph(self) -> ColoredDigraph:
        arcs = [Arc(k, i, j) for k, (i, j, _) in enumerate(self.moves)]
        colors = {k: v for k, (_, _, v) in enumerate(self.moves)}
        return ColoredDigraph(Multigraph(range(len(self.states)), arcs), colors)


def build_game(g: Multigraph, start: ChipArrangement, cap: int = 100_000) -> GameGraph:
    """Breadth-first exploration of all arrangements reachable by firing."""
    _check_arrangement(g, start)
    order = g.vertices
    key = start.as_tuple(order)
    states = [start]
    index = {key: 0}
    moves = []
    queue = deque([0])
    capped = False
    while queue:
        i = queue.popleft()
        current = states[i]
        for v in order:
            if not can_fire(g, current, v):
                continue
            nxt = fire(g, current, v)
            k = nxt.as_tuple(order)
            if k not in index:
                if len(states) >= cap:
                    capped = True
                    continue
                index[k] = len(states)
                states.append(nxt)
                queue.append(index[k])
            moves.append((i, index[k], v))
    verdict = CAP_EXCEEDED if capped else (FINITE if _is_acyclic(len(states), moves) else CYCLIC)
    return GameGraph(g, tuple(states), tuple(sorted(moves)), verdict)


def _is_acyclic(n: int, moves: Iterable[tuple]) -> bool:
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for i, j, _ in moves:
        succ[i].append(j)
        indeg[j] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    seen = 0
    while queue:
        i = queue.popleft()
        seen += 1
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    return seen == n


@dataclass(frozen=True)
class GameCertificate:
    """Certification of a finite game's move digraph."""

    verdict: CoverVerdict
    terminal: ChipArrangement
    firing_counts: tuple           # per state: Counter of fires on any maximal run to the terminal
    multisets_consistent: bool
    multiset_witness: object

    @property
    def ok(self) -> bool:
        return self.verdict.ok and self.multisets_consistent


def certify_game(game: GameGraph) -> GameCertificate:
    """Certify the move digraph and the run-invariance of firing multisets.

    The multiset check propagates backwards from the terminal arrangement:
    each move must extend its target's multiset by the fired vertex, and
    all moves out of one state must agree.
    """
    if game.verdict != FINITE:
        raise ChipError(f"only finite games can be certified (verdict: {game.verdict})")
    verdict = certify_uld_cover(game.to_colored_digraph())
    n = len(game.states)
    succ: list[list[tuple[int, Hashable]]] = [[] for _ in range(n)]
    for i, j, v in game.moves:
        succ[i].append((j, v))
    counts: list[Counter | None] = [None] * n
    consistent = True
    witness = None
    for i in _reverse_topological(n, game.moves):
        if not succ[i]:
            counts[i] = Counter()
            continue
        candidates = []
        for j, v in succ[i]:
            extended = Counter(counts[j])
            extended[v] += 1
            candidates.append(extended)
        counts[i] = candidates[0]
        for other in candidates[1:]:
            if other != candidates[0]:
                consistent = False
                if witness is None:
                    witness = (i, dict(candidates[0]), dict(other))
    terminal = game.states[game.terminal_index()]
    return GameCertificate(verdict, terminal, tuple(counts), consistent, witness)


def _reverse_topological(n: int, moves: Iterable[tuple]) -> list[int]:
    succ: list[list[int]] = [[] for _ in range(n)]
    outdeg = [0] * n
    for i, j, _ in moves:
        succ[j].append(i)  # reversed
        outdeg[i] += 1
    queue = deque(i for i in range(n) if outdeg[i] == 0)
    topo = []
    while queue:
        i = queue.popleft()
        topo.append(i)
        for j in succ[i]:
            outdeg[j] -= 1
            if outdeg[j] == 0:
                queue.append(j)
    if len(topo) != n:
        raise ChipError("move digraph contains a directed cycle")
    return topo


def maximal_firing_sequences(game: GameGraph, start: int = 0, limit: int = 50_000):
    """Yield every maximal firing sequence from a state, as vertex tuples.

    Depth-first; raises ChipError past `limit` sequences.  Intended for
    exhaustive cross-checks on small games.
    """
    n = len(game.states)
    succ: list[list[tuple[int, Hashable]]] = [[] for _ in range(n)]
    for i, j, v in game.moves:
        succ[i].append((j, v))
    produced = 0
    stack: list[tuple[int, tuple]] = [(start, ())]
    while stack:
        i, prefix = stack.pop()
        if not succ[i]:
            produced += 1
            if produced > limit:
                raise ChipError(f"more than {limit} maximal firing sequences")
            yield prefix
            continue
        for j, v in reversed(succ[i]):
            stack.append((j, prefix + (v,)))


@dataclass(frozen=True)
class CompleteGame:
    """Closure of a start arrangement under both fire and unfire moves.

    All moves are stored in fire direction.  `complete` is False when the
    radius or state cap interrupted the walk.
    """

    graph: Multigraph
    states: tuple
    moves: tuple
    complete: bool
    acyclic: bool

    def to_colored_digraph(self) -> ColoredDigraph:
        arcs = [Arc(k, i, j) for k, (i, j, _) in enumerate(self.moves)]
        colors = {k: v for k, (_, _, v) in enumerate(self.moves)}
        return ColoredDigraph(Multigraph(range(len(self.states)), arcs), colors)

    def to_poset(self) -> FinitePoset:
        if not self.acyclic:
            raise PosetError("complete game digraph is cyclic; it induces no order")
        n = len(self.states)
        above = [1 << i for i in range(n)]
        succ: list[list[int]] = [[] for _ in range(n)]
        for i, j, _ in self.moves:
            succ[i].append(j)
        for i in reversed(_forward_topological(n, self.moves)):
            for j in succ[i]:
                above[i] |= above[j]
        return FinitePoset(tuple(range(n)), tuple(above))


def _forward_topological(n: int, moves: Iterable[tuple]) -> list[int]:
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for i, j, _ in moves:
        succ[i].append(j)
        indeg[j] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    topo = []
    while queue:
        i = queue.popleft()
        topo.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    if len(topo) != n:
        raise ChipError("move digraph contains a directed cycle")
    return topo


def build_complete_game(
    g: Multigraph,
    start: ChipArrangement,
    radius: int = 100_000,
    state_cap: int = 100_000,
) -> CompleteGame:
    """Breadth-first closure under fire and unfire up to a move radius."""
    _check_arrangement(g, start)
    order = g.vertices
    states = [start]
    index = {start.as_tuple(order): 0}
    distance = [0]
    moves: set = set()
    queue = deque([0])
    complete = True

    def register(state) -> int:
        k = state.as_tuple(order)
        j = index.get(k)
        if j is None:
            j = len(states)
            index[k] = j
            states.append(state)
            distance.append(distance[i] + 1)
            queue.append(j)
        return j

    while queue:
        i = queue.popleft()
        if len(states) > state_cap:
            complete = False
            break
        if distance[i] >= radius:
            complete = False
            continue
        current = states[i]
        for v in order:
            if can_fire(g, current, v):
                moves.add((i, register(fire(g, current, v)), v))
            if can_unfire(g, current, v):
                moves.add((register(unfire(g, current, v)), i, v))
    acyclic = _is_acyclic(len(states), moves)
    return CompleteGame(g, tuple(states), tuple(sorted(moves)), complete, acyclic)


@dataclass(frozen=True)
class RepresentationReport:
    """Unique-minimal-representation analysis of a finite poset."""

    ok: bool
    witness: object                 # (s, t) labels: two maximal lower bounds, or two rep sets
    representations: Mapping        # element index -> minimal representing index set


def unique_minimal_representation_report(p: FinitePoset) -> RepresentationReport:
    """Check that every element is the unique maximal lower bound of a
    unique minimal set of meet-irreducibles.

    Failure witnesses are either two minimal representing sets for one
    element or a pair (s, t) of distinct maximal lower bounds of s's set.
    """
    irreducibles = p.meet_irreducible_indices()
    representations = {}
    for s in range(p.n):
        candidates = [m for m in irreducibles if p.leq(s, m)]
        if len(candidates) > 18:
            raise PosetError("too many meet-irreducibles above one element for brute search")
        minimal: list[frozenset] = []
        for size in range(len(candidates) + 1):
            for combo in combinations(candidates, size):
                chosen = frozenset(combo)
                if any(known <= chosen for known in minimal):
                    continue
                if s in p.maximal_lower_bounds(chosen):
                    minimal.append(chosen)
        if not minimal:
            return RepresentationReport(False, (p.labels[s], None), dict(representations))
        if len(minimal) > 1:
            return RepresentationReport(
                False,
                (p.labels[s], tuple(sorted(minimal[0])), tuple(sorted(minimal[1]))),
                dict(representations),
            )
        rep = minimal[0]
        bounds = p.maximal_lower_bounds(rep)
        if bounds != [s]:
            other = next(t for t in bounds if t != s)
            return RepresentationReport(False, (p.labels[s], p.labels[other]), dict(representations))
        representations[s] = tuple(sorted(rep))
    return RepresentationReport(True, None, representations)


def check_complete_game_representation(game: CompleteGame) -> RepresentationReport:
    """Run the representation check on a fully explored, acyclic closure."""
    if not game.complete:
        raise ChipError(
            "closure exploration hit its cap; the representation check needs the whole poset"
        )
    return unique_minimal_representation_report(game.to_poset())
