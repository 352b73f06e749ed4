"""
Built-in D4-symmetric example.

The parent graph is drawn in the plane so that the dihedral group of the square
acts by the 2x2 matrices below; the action on vertices and edges is derived
from the coordinates.

    vertices  O (0, 0); X+- (+-4, 0); Y+- (0, +-4); U+ (2, 2), U- (-2, -2), V+ (-2, 2), V- (2, -2)
    spokes    O -> X+-, Y+- of length a; O -> U+-, V+- of length b
    rims      eight rims of length c joining each axis vertex to its two neighbouring
              diagonal vertices, each split at its midpoint M1..M8 (counter-clockwise
              from the Y+/U+ rim) into halves "c<i>:<axis>" and "c<i>:<diagonal>"

The rim midpoints are degree-2 Neumann vertices, invisible to the spectrum; the
extended parent attaches lead L<i> at M<i>. The eight leads form one free orbit,
so both quotients carry two leads.

Subgroups and representations:

    H1 = {e, ru, rv, s2}    R1: ru -> +1, rv -> -1, s2 -> -1
    H2 = {e, rx, ry, s2}    R2: rx -> -1, ry -> +1, s2 -> -1
"""

from __future__ import annotations

import math
from functools import cache
from typing import NamedTuple

import numpy as np

from qgraph.graphs._models import Edge, ExtendedGraph, Lead, MetricGraph, Vertex
from qgraph.symmetry._actions import EdgeImage, GraphAction
from qgraph.symmetry._groups import FiniteGroup, Rep1D
from qgraph.symmetry._quotient import quotient

DEFAULT_LENGTHS = (1.0, math.sqrt(2.0), math.sqrt(3.0))

D4_MATRICES: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "e": ((1, 0), (0, 1)),
    "s": ((0, -1), (1, 0)),
    "s2": ((-1, 0), (0, -1)),
    "s3": ((0, 1), (-1, 0)),
    "rx": ((1, 0), (0, -1)),
    "ry": ((-1, 0), (0, 1)),
    "ru": ((0, 1), (1, 0)),
    "rv": ((0, -1), (-1, 0)),
}

H1 = ("e", "s2", "ru", "rv")
H2 = ("e", "s2", "rx", "ry")

_AXES = {"X+": (4, 0), "X-": (-4, 0), "Y+": (0, 4), "Y-": (0, -4)}
_DIAGONALS = {"U+": (2, 2), "U-": (-2, -2), "V+": (-2, 2), "V-": (2, -2)}
# Rim i joins (axis, diagonal); midpoints run counter-clockwise from the Y+/U+ rim
_RIMS = (
    ("Y+", "U+"), ("Y+", "V+"), ("X-", "V+"), ("X-", "U-"),
    ("Y-", "U-"), ("Y-", "V-"), ("X+", "V-"), ("X+", "U+"),
)

# Lead-space transplantation between the two quotients of the extended parent
BUILTIN_T = np.array([[1.0, 1.0], [1.0, -1.0]])

BUILTIN_NAMES = ("d4-parent", "d4-parent-leads", "d4-r1", "d4-r2", "d4-r1-leads", "d4-r2-leads")


def _coordinates() -> dict[str, tuple[int, int]]:
    coords: dict[str, tuple[int, int]] = {"O": (0, 0), **_AXES, **_DIAGONALS}
    for i, (axis, diagonal) in enumerate(_RIMS, start=1):
        ax, ay = _AXES[axis]
        dx, dy = _DIAGONALS[diagonal]
        coords[f"M{i}"] = ((ax + dx) // 2, (ay + dy) // 2)
    return coords


def d4_group() -> FiniteGroup:
    """The dihedral group of order 8 as signed permutation matrices (rotation s by 90 degrees)."""
    matrices = {name: np.array(m) for name, m in D4_MATRICES.items()}
    lookup = {tuple(m.flatten()): name for name, m in matrices.items()}

    def mult(a: str, b: str) -> str:
        return lookup[tuple((matrices[a] @ matrices[b]).flatten())]

    return FiniteGroup.from_func(tuple(D4_MATRICES), mult, name="D4")


def d4_parent_graph(a: float = DEFAULT_LENGTHS[0], b: float = DEFAULT_LENGTHS[1], c: float = DEFAULT_LENGTHS[2],
                    leads: bool = False) -> ExtendedGraph:
    """
    The D4-symmetric parent graph with spoke lengths a, b and rim length c.

    Args:
        leads: Attach the eight rim leads L1..L8 at the midpoints M1..M8.
    """
    vertex_ids = ["O", *_AXES, *_DIAGONALS] + [f"M{i}" for i in range(1, len(_RIMS) + 1)]
    edges = [Edge(f"a:{v}", "O", v, a) for v in _AXES] + [Edge(f"b:{v}", "O", v, b) for v in _DIAGONALS]
    for i, (axis, diagonal) in enumerate(_RIMS, start=1):
        edges.append(Edge(f"c{i}:{axis}", axis, f"M{i}", c / 2))
        edges.append(Edge(f"c{i}:{diagonal}", diagonal, f"M{i}", c / 2))
    graph = MetricGraph(vertices=tuple(Vertex(v) for v in vertex_ids), edges=tuple(edges))
    rim_leads = tuple(Lead(f"L{i}", f"M{i}") for i in range(1, len(_RIMS) + 1)) if leads else ()
    return ExtendedGraph(graph=graph, leads=rim_leads)


def action_from_coordinates(
    graph: MetricGraph,
    group: FiniteGroup,
    matrices: dict[str, np.ndarray],
    coords: dict[str, tuple[int, int]],
) -> GraphAction:
    """Derive vertex and edge maps of a group of planar isometries from vertex coordinates."""
    by_position = {pos: vid for vid, pos in coords.items()}
    by_ends = {(e.start, e.end): e.id for e in graph.edges}
    vertex_perm: dict[str, dict[str, str]] = {}
    edge_perm: dict[str, dict[str, EdgeImage]] = {}
    for name in group.elements:
        m = matrices[name]
        vmap = {}
        for vid, pos in coords.items():
            image = m @ np.array(pos)
            vmap[vid] = by_position[(int(image[0]), int(image[1]))]
        emap = {}
        for edge in graph.edges:
            start, end = vmap[edge.start], vmap[edge.end]
            if (start, end) in by_ends:
                emap[edge.id] = EdgeImage(by_ends[(start, end)], False)
            else:
                emap[edge.id] = EdgeImage(by_ends[(end, start)], True)
        vertex_perm[name] = vmap
        edge_perm[name] = emap
    return GraphAction(group=group, vertex_perm=vertex_perm, edge_perm=edge_perm)


def d4_action(parent: ExtendedGraph | MetricGraph | None = None) -> GraphAction:
    """The D4 action on the built-in parent (edge lengths do not matter)."""
    graph = d4_parent_graph().graph if parent is None else (
        parent.graph if isinstance(parent, ExtendedGraph) else parent
    )
    matrices = {name: np.array(m) for name, m in D4_MATRICES.items()}
    return action_from_coordinates(graph, d4_group(), matrices, _coordinates())


def d4_reps(group: FiniteGroup) -> dict[str, Rep1D]:
    """The representations R1, R2 and the trivial representation of {e} ("identity")."""
    return {
        "R1": Rep1D(group, {"e": 1, "s2": -1, "ru": 1, "rv": -1}, name="R1"),
        "R2": Rep1D(group, {"e": 1, "s2": -1, "rx": -1, "ry": 1}, name="R2"),
        "identity": Rep1D.trivial(group, ["e"], name="identity"),
    }


class D4Example(NamedTuple):
    parent: ExtendedGraph
    action: GraphAction
    rep1: Rep1D
    rep2: Rep1D
    T: np.ndarray


def builtin_d4_example(
    a: float = DEFAULT_LENGTHS[0],
    b: float = DEFAULT_LENGTHS[1],
    c: float = DEFAULT_LENGTHS[2],
) -> D4Example:
    """
    The built-in isoscattering example.

    Returns:
        (parent with the eight rim leads, D4 action, R1 on H1, R2 on H2, T = [[1, 1], [1, -1]]).

    Example:
        >>> parent, action, r1, r2, T = builtin_d4_example()
        >>> action.group.order, r1.subgroup, T.tolist()
        (8, ('e', 's2', 'ru', 'rv'), [[1.0, 1.0], [1.0, -1.0]])
    """
    parent = d4_parent_graph(a, b, c, leads=True)
    action = d4_action(parent)
    reps = d4_reps(action.group)
    return D4Example(parent=parent, action=action, rep1=reps["R1"], rep2=reps["R2"], T=BUILTIN_T.copy())


@cache
def builtin_graph(name: str) -> ExtendedGraph:
    """
    A built-in graph by name (see BUILTIN_NAMES), with default lengths.

    Raises:
        ValueError: For unknown names.
    """
    if name not in BUILTIN_NAMES:
        raise ValueError(f"unknown built-in graph {name!r} (expected one of {', '.join(BUILTIN_NAMES)})")
    example = builtin_d4_example()
    if name == "d4-parent-leads":
        return example.parent
    compact = ExtendedGraph(graph=example.parent.graph)
    if name == "d4-parent":
        return compact
    rep = example.rep1 if "-r1" in name else example.rep2
    source = example.parent if name.endswith("-leads") else compact
    return quotient(source, example.action, rep).quotient
