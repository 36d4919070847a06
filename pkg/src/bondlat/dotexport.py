"""Graphviz DOT rendering of cover digraphs and chip-firing games.

Output is deterministic: nodes in index order, edges in stored cover
order, edge colors assigned from a fixed palette by the sorted sequence
of distinct cover colors.  Diagrams grow upward (rankdir=BT) so the
unique minimum sits at the bottom, as Hasse diagrams are drawn.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .chipfire import GameGraph
from .graph import id_key
from .lattice import CoverDigraph

_PALETTE = (
    "#1b9e77",
    "#d95f02",
    "#7570b3",
    "#e7298a",
    "#66a61e",
    "#e6ab02",
    "#a6761d",
    "#666666",
)


def _quoted(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _render(
    count: int,
    node_labels: Sequence[str],
    edges: Iterable[tuple[int, int, object]],
    comments: Iterable[str],
) -> str:
    edges = list(edges)
    palette = {}
    for key in sorted({key for _, _, key in edges}, key=id_key):
        palette[key] = _PALETTE[len(palette) % len(_PALETTE)]
    lines = ["digraph {", "  rankdir=BT;", "  node [shape=box];"]
    lines += [f"  // {c}" for c in comments]
    for i in range(count):
        lines.append(f"  n{i} [label={_quoted(node_labels[i])}];")
    for i, j, key in edges:
        lines.append(
            f"  n{i} -> n{j} [label={_quoted(str(key))}, color={_quoted(palette[key])}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def cover_digraph_dot(cd: CoverDigraph, node_labels: Sequence[str], comments: Iterable[str] = ()) -> str:
    """DOT text for a cover digraph; covers are labeled by their color."""
    if len(node_labels) != cd.n:
        raise ValueError(f"{cd.n} elements but {len(node_labels)} labels")
    return _render(cd.n, node_labels, cd.covers, comments)


def bond_labels(cd: CoverDigraph, arc_order: Sequence, expand=None) -> list[str]:
    """One label per element: comma-joined arc values in the given order."""
    labels = []
    for x in cd.elements:
        full = expand(x) if expand is not None else x
        labels.append(",".join(str(full.value(a)) for a in arc_order))
    return labels


def game_dot(game: GameGraph, comments: Iterable[str] = ()) -> str:
    """DOT text for a game's move digraph; moves are labeled by the fired
    vertex and states by their chip counts in vertex order."""
    order = game.graph.vertices
    labels = [",".join(str(s.count(v)) for v in order) for s in game.states]
    head = [f"chips in vertex order: {', '.join(str(v) for v in order)}"]
    return _render(len(game.states), labels, game.moves, list(head) + list(comments))
