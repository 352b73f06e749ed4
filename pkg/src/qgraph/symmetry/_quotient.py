"""
Quotient of a symmetric graph by a +-1 representation of a subgroup.

The quotient describes the functions on the parent satisfying

    f(h x) = R(h) f(x)    for every h in H,

by their restriction to one representative per orbit of edge segments.

Construction:
- Edges mapped onto themselves reversed by some h are cut at the midpoint into
  two halves, each oriented from its vertex towards the midpoint.
- Segment orbits are formed under H; the representative of an orbit is its
  lexicographically smallest (edge id, part). An orbit whose pointwise
  stabilizer carries a -1 value vanishes identically and is dropped.
- A vertex orbit becomes one node, named after its smallest vertex id. It is
  Dirichlet if the parent vertex is Dirichlet or R is nontrivial on the vertex
  stabilizer, Neumann otherwise. A cut midpoint becomes a degree-1 node "<edge>/m",
  Dirichlet if the reversing element has R = -1.
- Kirchhoff weights are multiplied by orbit sizes.
- Edge ends meeting a node through an element with R = -1 pick up a sign;
  edge signs are regauged so that plain continuity holds. A cycle with an odd
  number of sign flips has no such gauge and raises QuotientError.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from qgraph._errors import QuotientError, RepresentationError
from qgraph.graphs._models import Edge, ExtendedGraph, Lead, MetricGraph, Vertex, VertexCondition, as_extended
from qgraph.symmetry._actions import EdgeImage, GraphAction, lead_permutation, require_valid_action
from qgraph.symmetry._groups import Rep1D

logger = logging.getLogger(__name__)


# =============================================================================
# Orbits
# =============================================================================


@dataclass(frozen=True, order=True)
class Segment:
    """
    A piece of a parent edge.

    Attributes:
        edge: Parent edge id.
        part: 0 for the whole edge, 1 for [0, L/2] (start -> midpoint),
            2 for [L/2, L] (end -> midpoint).
    """
    edge: str
    part: int = 0

    @property
    def label(self) -> str:
        return self.edge if self.part == 0 else f"{self.edge}/{self.part}"


def cut_edges(graph: MetricGraph, action: GraphAction, elements: Iterable[str]) -> set[str]:
    """Edges mapped onto themselves reversed by at least one element."""
    members = tuple(elements)
    return {
        edge.id for edge in graph.edges
        if any(action.edge(h, edge.id) == EdgeImage(edge.id, True) for h in members)
    }


def segment_image(action: GraphAction, element: str, segment: Segment) -> tuple[Segment, bool]:
    """Image of a segment and whether its orientation flips (halves never flip)."""
    image = action.edge(element, segment.edge)
    if segment.part == 0:
        return Segment(image.edge, 0), image.reversed
    return Segment(image.edge, 3 - segment.part if image.reversed else segment.part), False


def segments_of(graph: MetricGraph, cut: set[str]) -> list[Segment]:
    result = []
    for edge in graph.edges:
        if edge.id in cut:
            result.extend((Segment(edge.id, 1), Segment(edge.id, 2)))
        else:
            result.append(Segment(edge.id, 0))
    return result


@dataclass(frozen=True)
class SegmentOrbit:
    """
    An orbit of segments.

    Attributes:
        representative: Lexicographically smallest member.
        transport: member -> (first element h with h(representative) = member, orientation flip).
        stabilizer: Elements fixing the representative pointwise.
    """
    representative: Segment
    transport: Mapping[Segment, tuple[str, bool]]
    stabilizer: tuple[str, ...]

    @property
    def members(self) -> tuple[Segment, ...]:
        return tuple(self.transport)

    @property
    def size(self) -> int:
        return len(self.transport)


def segment_orbits(graph: MetricGraph, action: GraphAction, elements: Iterable[str],
                   cut: set[str] | None = None) -> dict[Segment, SegmentOrbit]:
    """
    Orbits of all segments under the given elements (which must form a subgroup).

    Returns:
        Mapping from every segment to its orbit.
    """
    members = tuple(elements)
    cut = cut_edges(graph, action, members) if cut is None else cut
    result: dict[Segment, SegmentOrbit] = {}
    for segment in segments_of(graph, cut):
        if segment in result:
            continue
        representative = min(segment_image(action, h, segment)[0] for h in members)
        transport: dict[Segment, tuple[str, bool]] = {}
        stabilizer = []
        for h in members:
            image, flip = segment_image(action, h, representative)
            transport.setdefault(image, (h, flip))
            if image == representative and not flip:
                stabilizer.append(h)
        orbit = SegmentOrbit(representative=representative, transport=transport, stabilizer=tuple(stabilizer))
        for member in transport:
            result[member] = orbit
    return result


@dataclass(frozen=True)
class VertexOrbit:
    representative: str
    transport: Mapping[str, str]
    stabilizer: tuple[str, ...]


def vertex_orbits(graph: MetricGraph, action: GraphAction, elements: Iterable[str]) -> dict[str, VertexOrbit]:
    members = tuple(elements)
    result: dict[str, VertexOrbit] = {}
    for vertex in graph.vertices:
        if vertex.id in result:
            continue
        representative = min(action.vertex(h, vertex.id) for h in members)
        transport: dict[str, str] = {}
        for h in members:
            transport.setdefault(action.vertex(h, representative), h)
        orbit = VertexOrbit(
            representative=representative,
            transport=transport,
            stabilizer=tuple(h for h in members if action.vertex(h, representative) == representative),
        )
        for member in transport:
            result[member] = orbit
    return result


# =============================================================================
# Result types
# =============================================================================


@dataclass(frozen=True)
class EdgePiece:
    """
    How a piece [x0, x1] of a parent edge is recovered from the quotient.

    f(x) = sign * psi(quotient_edge, y) with y = L - x if `reversed` else x
    (L the parent edge length); quotient_edge is None where f vanishes.
    """
    x0: float
    x1: float
    quotient_edge: str | None
    reversed: bool = False
    sign: int = 0


@dataclass(frozen=True)
class EdgeSource:
    """Provenance of a quotient edge."""
    segment: Segment
    orbit: tuple[str, ...]
    tau: int
    weight: float


@dataclass(frozen=True)
class NodeProvenance:
    """
    Provenance of a quotient vertex.

    Attributes:
        kind: "vertex" (a parent vertex orbit) or "midpoint" (a cut edge midpoint).
        source: Representative parent vertex, or the parent edge whose midpoint this is.
        orbit: The parent vertices (or cut edges) identified into this node.
        condition: The imposed condition.
        rule: Which fixed-point rule produced the condition.
    """
    kind: str
    source: str
    orbit: tuple[str, ...]
    condition: VertexCondition
    rule: str


@dataclass(frozen=True)
class LeadSource:
    """
    Provenance of a quotient lead.

    Attributes:
        lead: Representative parent lead.
        transport: parent lead -> element h with h(representative) = that lead.
        tau: Gauge sign; the quotient amplitude is tau times the parent amplitude at the representative.
        weight: Kirchhoff weight (orbit size times parent lead weight).
    """
    lead: str
    transport: Mapping[str, str]
    tau: int
    weight: float

    @property
    def orbit(self) -> tuple[str, ...]:
        return tuple(self.transport)


@dataclass(frozen=True, eq=False)
class QuotientResult:
    """
    A quotient graph together with its provenance.

    Attributes:
        quotient: The quotient (an ExtendedGraph; compact when no lead survives).
        parent: The parent graph.
        action: The action used.
        rep: The representation used.
        edge_pieces: Parent edge id -> pieces covering [0, L] (for lifting functions).
        edge_sources: Quotient edge id -> provenance.
        nodes: Quotient vertex id -> provenance.
        lead_sources: Quotient lead id -> provenance.
        killed_length: Total parent length on which every function of this sector vanishes.
    """

    quotient: ExtendedGraph
    parent: ExtendedGraph
    action: GraphAction
    rep: Rep1D
    edge_pieces: Mapping[str, tuple[EdgePiece, ...]]
    edge_sources: Mapping[str, EdgeSource]
    nodes: Mapping[str, NodeProvenance]
    lead_sources: Mapping[str, LeadSource]
    killed_length: float = 0.0
    warnings: tuple[str, ...] = field(default=())

    @property
    def graph(self) -> MetricGraph:
        return self.quotient.graph

    @property
    def subgroup_order(self) -> int:
        return len(self.rep.subgroup)

    def weighted_length(self) -> float:
        """Sum over quotient edges of orbit size times length."""
        return sum(len(src.orbit) * self.graph.edge(eid).length for eid, src in self.edge_sources.items())

    def lift_value(
        self,
        evaluate: Callable[[str, np.ndarray], np.ndarray],
        parent_edge: str,
        x: float | np.ndarray,
    ) -> np.ndarray:
        """
        Value of the lifted parent function at coordinates x on a parent edge.

        Args:
            evaluate: Quotient function, evaluate(quotient_edge, y) -> values.
            parent_edge: Parent edge id.
            x: Parent coordinates in [0, L].
        """
        length = self.parent.graph.edge(parent_edge).length
        points = np.atleast_1d(np.asarray(x, dtype=float))
        values = np.zeros(points.shape, dtype=complex)
        assigned = np.zeros(points.shape, dtype=bool)
        for piece in self.edge_pieces[parent_edge]:
            mask = (points >= piece.x0) & (points <= piece.x1) & ~assigned
            assigned |= mask
            if piece.quotient_edge is None or not np.any(mask):
                continue
            y = length - points[mask] if piece.reversed else points[mask]
            values[mask] = piece.sign * np.asarray(evaluate(piece.quotient_edge, y))
        return values

    def provenance(self) -> dict[str, Any]:
        """JSON-ready provenance listing."""
        return {
            "rep": {"name": self.rep.name, "values": dict(self.rep.values)},
            "edges": {
                eid: {"segment": src.segment.label, "orbit": list(src.orbit), "sign": src.tau, "weight": src.weight}
                for eid, src in self.edge_sources.items()
            },
            "vertices": {
                vid: {"kind": p.kind, "source": p.source, "orbit": list(p.orbit), "condition": str(p.condition),
                      "rule": p.rule}
                for vid, p in self.nodes.items()
            },
            "leads": {
                lid: {"lead": src.lead, "orbit": list(src.orbit), "sign": src.tau, "weight": src.weight}
                for lid, src in self.lead_sources.items()
            },
            "killed_length": self.killed_length,
        }


# =============================================================================
# Construction
# =============================================================================


@dataclass
class _End:
    node: str
    sign: int


def _signed_gauge(
    node_order: list[str],
    dirichlet: set[str],
    constraints: list[tuple[_End, _End, str]],
) -> dict[str, int]:
    """Node gauges rho with rho_b = s_a * s_b * rho_a along every edge between Neumann nodes."""
    adjacency: dict[str, list[tuple[str, int, str]]] = {node: [] for node in node_order}
    for a, b, label in constraints:
        if a.node in dirichlet or b.node in dirichlet:
            continue
        parity = a.sign * b.sign
        adjacency[a.node].append((b.node, parity, label))
        adjacency[b.node].append((a.node, parity, label))

    rho: dict[str, int] = {}
    for root in node_order:
        if root in rho or root in dirichlet:
            continue
        rho[root] = 1
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for other, parity, label in adjacency[node]:
                expected = parity * rho[node]
                if other not in rho:
                    rho[other] = expected
                    queue.append(other)
                elif rho[other] != expected:
                    raise QuotientError(
                        f"twisted vertex conditions: no consistent sign choice around quotient edge {label!r} "
                        f"(between {node!r} and {other!r}); the quotient is outside the Neumann/Dirichlet model"
                    )
    return rho


def quotient(g: MetricGraph | ExtendedGraph, action: GraphAction, rep: Rep1D) -> QuotientResult:
    """
    Quotient of a graph by a +-1 representation of a subgroup acting on it.

    Raises:
        RepresentationError: If rep lives on a different group.
        ActionError: If the subgroup does not act on the graph.
        SymmetryBreakingLeadsError: If the leads are not whole orbits of the subgroup.
        QuotientError: If the sector needs conditions outside the Neumann/Dirichlet model.

    Example:
        >>> q = quotient(d4_parent, d4_action, r2)
        >>> [v.id for v in q.graph.vertices]
        ['O', 'X+', 'Y+', 'U+', 'M1', 'M3']
    """
    eg = as_extended(g)
    if not rep.group.same_as(action.group):
        raise RepresentationError("representation and action use different groups")
    elements = rep.subgroup
    require_valid_action(eg, action, elements)

    graph = eg.graph
    cut = cut_edges(graph, action, elements)
    orbits = segment_orbits(graph, action, elements, cut)
    vorbits = vertex_orbits(graph, action, elements)
    order = graph.vertex_index

    def killed(orbit: SegmentOrbit) -> bool:
        return not rep.is_trivial_on(orbit.stabilizer)

    # Surviving segment orbits, ordered by representative (parent edge order, then part)
    representatives = sorted(
        {orbit.representative for orbit in orbits.values()},
        key=lambda s: (graph.edge_index[s.edge], s.part),
    )
    surviving = [s for s in representatives if not killed(orbits[s])]
    killed_length = 0.0
    for s in representatives:
        if killed(orbits[s]):
            length = graph.edge(s.edge).length / (1 if s.part == 0 else 2)
            killed_length += length * orbits[s].size

    # Nodes from vertex orbits
    node_conditions: dict[str, VertexCondition] = {}
    provenance: dict[str, NodeProvenance] = {}
    for vertex_id in sorted({o.representative for o in vorbits.values()}, key=lambda v: order[v]):
        vorbit = vorbits[vertex_id]
        parent_condition = graph.condition(vertex_id)
        odd = [h for h in vorbit.stabilizer if rep(h) == -1]
        if parent_condition is VertexCondition.DIRICHLET:
            condition, rule = VertexCondition.DIRICHLET, "dirichlet in parent"
        elif odd:
            condition, rule = VertexCondition.DIRICHLET, f"antisymmetric fixed point: rep({odd[0]}) = -1"
        else:
            condition, rule = VertexCondition.NEUMANN, "neumann: stabilizer acts trivially"
        node_conditions[vertex_id] = condition
        provenance[vertex_id] = NodeProvenance(
            kind="vertex",
            source=vertex_id,
            orbit=tuple(sorted(vorbit.transport, key=lambda v: order[v])),
            condition=condition,
            rule=rule,
        )

    def vertex_end(vertex_id: str) -> _End:
        vorbit = vorbits[vertex_id]
        return _End(vorbit.representative, rep(vorbit.transport[vertex_id]))

    # Midpoint nodes of surviving half orbits
    for s in surviving:
        if s.part == 0:
            continue
        reversing = [h for h in elements if action.edge(h, s.edge) == EdgeImage(s.edge, True)]
        odd = [h for h in reversing if rep(h) == -1]
        node = f"{s.edge}/m"
        condition = VertexCondition.DIRICHLET if odd else VertexCondition.NEUMANN
        rule = f"antisymmetric midpoint: rep({odd[0]}) = -1" if odd else f"symmetric midpoint: rep({reversing[0]}) = +1"
        node_conditions[node] = condition
        provenance[node] = NodeProvenance(
            kind="midpoint",
            source=s.edge,
            orbit=tuple(sorted({m.edge for m in orbits[s].members}, key=lambda e: graph.edge_index[e])),
            condition=condition,
            rule=rule,
        )

    # Quotient edge ends
    edge_ends: dict[str, tuple[_End, _End]] = {}
    for s in surviving:
        edge = graph.edge(s.edge)
        if s.part == 0:
            edge_ends[s.label] = (vertex_end(edge.start), vertex_end(edge.end))
        else:
            edge_ends[s.label] = (vertex_end(edge.start), _End(f"{s.edge}/m", 1))

    # Lead orbits
    lead_perms = {h: lead_permutation(eg, action, h) for h in elements} if eg.leads else {}
    lead_orbits: list[tuple[Lead, dict[str, str], bool]] = []
    assigned: set[str] = set()
    for lead in eg.leads:
        if lead.id in assigned:
            continue
        transport: dict[str, str] = {}
        for h in elements:
            transport.setdefault(lead_perms[h][lead.id], h)
        assigned |= set(transport)
        stabilizer = [h for h in elements if lead_perms[h][lead.id] == lead.id]
        lead_orbits.append((lead, transport, rep.is_trivial_on(stabilizer)))

    lead_ends: dict[str, _End] = {}
    for lead, _, survives in lead_orbits:
        if not survives:
            continue
        end = vertex_end(lead.vertex)
        if node_conditions[end.node] is VertexCondition.DIRICHLET:
            raise QuotientError(
                f"lead {lead.id!r} survives at quotient vertex {end.node!r}, which becomes Dirichlet "
                f"({provenance[end.node].rule}); leads require Neumann attachment"
            )
        lead_ends[lead.id] = end

    # Keep parent-isolated vertices, drop vertices isolated by vanishing orbits
    used = {end.node for ends in edge_ends.values() for end in ends} | {end.node for end in lead_ends.values()}
    node_order = [
        node for node in provenance
        if node in used or (provenance[node].kind == "vertex" and not eg.graph.incidences[node]
                            and not eg.leads_at(node))
    ]
    dirichlet = {node for node in node_order if node_conditions[node] is VertexCondition.DIRICHLET}

    rho = _signed_gauge(node_order, dirichlet, [(a, b, label) for label, (a, b) in edge_ends.items()])

    def tau_of(*ends: _End) -> int:
        for end in ends:
            if end.node not in dirichlet:
                return end.sign * rho[end.node]
        return 1

    # Assemble the quotient graph
    edges: list[Edge] = []
    edge_sources: dict[str, EdgeSource] = {}
    taus: dict[Segment, int] = {}
    for s in surviving:
        parent_edge = graph.edge(s.edge)
        start, end = edge_ends[s.label]
        orbit = orbits[s]
        tau = tau_of(start, end)
        taus[s] = tau
        edges.append(Edge(
            id=s.label,
            start=start.node,
            end=end.node,
            length=parent_edge.length if s.part == 0 else parent_edge.length / 2,
            weight=parent_edge.weight * orbit.size,
        ))
        edge_sources[s.label] = EdgeSource(
            segment=s,
            orbit=tuple(m.label for m in orbit.members),
            tau=tau,
            weight=parent_edge.weight * orbit.size,
        )

    leads: list[Lead] = []
    lead_sources: dict[str, LeadSource] = {}
    for lead, transport, survives in lead_orbits:
        if not survives:
            continue
        end = lead_ends[lead.id]
        tau = tau_of(end)
        leads.append(Lead(id=lead.id, vertex=end.node, weight=lead.weight * len(transport)))
        lead_sources[lead.id] = LeadSource(lead=lead.id, transport=transport, tau=tau,
                                           weight=lead.weight * len(transport))

    vertices = tuple(Vertex(node, node_conditions[node]) for node in node_order)
    quotient_graph = ExtendedGraph(graph=MetricGraph(vertices=vertices, edges=tuple(edges)), leads=tuple(leads))

    # Lift map: every parent segment from its orbit representative
    pieces: dict[str, tuple[EdgePiece, ...]] = {}
    for edge in graph.edges:
        segments = [Segment(edge.id, 1), Segment(edge.id, 2)] if edge.id in cut else [Segment(edge.id, 0)]
        bounds = [(0.0, edge.length / 2), (edge.length / 2, edge.length)] if edge.id in cut else [(0.0, edge.length)]
        edge_pieces = []
        for segment, (x0, x1) in zip(segments, bounds, strict=True):
            orbit = orbits[segment]
            if orbit.representative not in taus:
                edge_pieces.append(EdgePiece(x0, x1, None))
                continue
            h, flip = orbit.transport[segment]
            edge_pieces.append(EdgePiece(
                x0=x0,
                x1=x1,
                quotient_edge=orbit.representative.label,
                reversed=flip if segment.part == 0 else segment.part == 2,
                sign=rep(h) * taus[orbit.representative],
            ))
        pieces[edge.id] = tuple(edge_pieces)

    result = QuotientResult(
        quotient=quotient_graph,
        parent=eg,
        action=action,
        rep=rep,
        edge_pieces=pieces,
        edge_sources=edge_sources,
        nodes={node: provenance[node] for node in node_order},
        lead_sources=lead_sources,
        killed_length=killed_length,
    )
    parent_total = graph.total_length
    assert math.isclose(result.weighted_length() + killed_length, parent_total, rel_tol=1e-12, abs_tol=1e-12), \
        "🌀 Sanity check | weighted quotient length plus vanishing length must equal the parent length."

    logger.info(
        f"{'Quotient'[:26]:<26} | SYM  | ✅ {rep.name or 'rep'} on |H|={len(elements)}: "
        f"{len(vertices)} vertices, {len(edges)} edges, {len(leads)} leads"
    )
    for node in node_order:
        marker = "└" if node == node_order[-1] else "├"
        logger.debug(f"{'Quotient'[:26]:<26} | SYM  |   {marker} {node}: {provenance[node].rule}")
    return result
