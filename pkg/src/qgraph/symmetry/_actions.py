"""
Group actions on metric graphs by isometries.

An action assigns to every group element a vertex permutation and an edge map
e -> (e', reversed). A reversed image maps the point at coordinate x on e to
coordinate L - x on e'. Leads are not part of the action: the i-th lead at v
is mapped to the i-th lead at g(v), which requires equal lead counts on every
vertex orbit.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from qgraph._errors import ActionError, SymmetryBreakingLeadsError
from qgraph.graphs._models import ExtendedGraph, MetricGraph, as_extended
from qgraph.symmetry._groups import FiniteGroup

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeImage:
    edge: str
    reversed: bool = False


@dataclass(frozen=True, eq=False)
class GraphAction:
    """
    A group acting on a graph.

    Attributes:
        group: The acting group.
        vertex_perm: element -> vertex id -> image vertex id.
        edge_perm: element -> edge id -> EdgeImage.

    Example:
        >>> action.vertex("s", "X+")
        'Y+'
        >>> action.edge("s", "a:X+")
        EdgeImage(edge='a:Y+', reversed=False)
    """

    group: FiniteGroup
    vertex_perm: Mapping[str, Mapping[str, str]]
    edge_perm: Mapping[str, Mapping[str, EdgeImage]]

    def vertex(self, element: str, vertex_id: str) -> str:
        return self.vertex_perm[element][vertex_id]

    def edge(self, element: str, edge_id: str) -> EdgeImage:
        return self.edge_perm[element][edge_id]

    def point(self, element: str, graph: MetricGraph, edge_id: str, x: float) -> tuple[str, float]:
        """Image of the point at coordinate x on an edge."""
        image = self.edge(element, edge_id)
        return image.edge, (graph.edge(edge_id).length - x if image.reversed else x)


class ViolationKind(enum.StrEnum):
    BIJECTION = "not a bijection"
    INCIDENCE = "incidence not preserved"
    LENGTH = "length not preserved"
    WEIGHT = "weight not preserved"
    CONDITION = "vertex condition not preserved"
    COMPOSITION = "composition mismatch"
    LEAD_ORBIT = "lead orbit broken"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ActionViolation:
    element: str
    kind: ViolationKind
    detail: str

    def __str__(self) -> str:
        return f"element {self.element!r}: {self.kind}: {self.detail}"


@dataclass(frozen=True)
class ActionReport:
    """
    Result of verify_action.

    Attributes:
        elements: The elements that were checked.
        violations: Every violated invariant, naming the element and incidence.
    """
    elements: tuple[str, ...]
    violations: tuple[ActionViolation, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}

    def summary(self) -> str:
        if self.passed:
            return f"action verified on {len(self.elements)} elements"
        lines = [f"{len(self.violations)} violation(s):"]
        lines.extend(f"  - {v}" for v in self.violations[:20])
        if len(self.violations) > 20:
            lines.append(f"  ... and {len(self.violations) - 20} more")
        return "\n".join(lines)


def lead_permutation(eg: ExtendedGraph, action: GraphAction, element: str) -> dict[str, str]:
    """
    Lead map of an element: the i-th lead at v goes to the i-th lead at g(v).

    Raises:
        SymmetryBreakingLeadsError: If v and g(v) carry different numbers of leads.
    """
    result = {}
    for vertex in eg.graph.vertices:
        here = eg.leads_at(vertex.id)
        if not here:
            continue
        target = action.vertex(element, vertex.id)
        there = eg.leads_at(target)
        if len(here) != len(there):
            raise SymmetryBreakingLeadsError(
                f"symmetry-breaking lead set: element {element!r} maps vertex {vertex.id!r} "
                f"({len(here)} leads) to {target!r} ({len(there)} leads)"
            )
        for source, image in zip(here, there, strict=True):
            result[source.id] = image.id
    return result


def _check_element(eg: ExtendedGraph, action: GraphAction, el: str) -> list[ActionViolation]:
    graph = eg.graph
    found: list[ActionViolation] = []

    def fail(kind: ViolationKind, detail: str) -> None:
        found.append(ActionViolation(el, kind, detail))

    vmap = action.vertex_perm.get(el)
    emap = action.edge_perm.get(el)
    if vmap is None or emap is None:
        fail(ViolationKind.BIJECTION, "no vertex or edge permutation given")
        return found

    vertex_ids = {v.id for v in graph.vertices}
    if set(vmap) != vertex_ids or set(vmap.values()) != vertex_ids:
        fail(ViolationKind.BIJECTION, "vertex map is not a permutation of the vertex set")
        return found
    edge_ids = {e.id for e in graph.edges}
    if set(emap) != edge_ids or {img.edge for img in emap.values()} != edge_ids:
        fail(ViolationKind.BIJECTION, "edge map is not a permutation of the edge set")
        return found

    for vertex in graph.vertices:
        image = vmap[vertex.id]
        if graph.condition(image) is not vertex.condition:
            fail(ViolationKind.CONDITION, f"vertex {vertex.id!r} ({vertex.condition}) -> {image!r} "
                                          f"({graph.condition(image)})")

    for edge in graph.edges:
        img = emap[edge.id]
        target = graph.edge(img.edge)
        start, end = (target.end, target.start) if img.reversed else (target.start, target.end)
        if (vmap[edge.start], vmap[edge.end]) != (start, end):
            fail(ViolationKind.INCIDENCE, f"edge {edge.id!r} ({edge.start}->{edge.end}) maps to "
                                          f"{img.edge!r}{' reversed' if img.reversed else ''} "
                                          f"but its ends map to ({vmap[edge.start]}, {vmap[edge.end]})")
        if target.length != edge.length:
            fail(ViolationKind.LENGTH, f"edge {edge.id!r} (length {edge.length!r}) -> {img.edge!r} "
                                       f"(length {target.length!r})")
        if target.weight != edge.weight:
            fail(ViolationKind.WEIGHT, f"edge {edge.id!r} -> {img.edge!r}")

    if eg.leads:
        try:
            leads = lead_permutation(eg, action, el)
        except SymmetryBreakingLeadsError as e:
            fail(ViolationKind.LEAD_ORBIT, str(e))
        else:
            weights = {lead.id: lead.weight for lead in eg.leads}
            for source, image in leads.items():
                if weights[source] != weights[image]:
                    fail(ViolationKind.LEAD_ORBIT, f"lead {source!r} -> {image!r} changes the lead weight")
    return found


def _check_composition(eg: ExtendedGraph, action: GraphAction, elements: tuple[str, ...]) -> list[ActionViolation]:
    group = action.group
    found: list[ActionViolation] = []
    for g in elements:
        for h in elements:
            gh = group.multiply(g, h)
            label = f"{g}*{h}"
            for vertex in eg.graph.vertices:
                composed = action.vertex(g, action.vertex(h, vertex.id))
                if composed != action.vertex(gh, vertex.id):
                    found.append(ActionViolation(
                        label, ViolationKind.COMPOSITION,
                        f"vertex {vertex.id!r}: {g}({h}(v)) = {composed!r} but {gh}(v) = {action.vertex(gh, vertex.id)!r}",
                    ))
            for edge in eg.graph.edges:
                first = action.edge(h, edge.id)
                second = action.edge(g, first.edge)
                composed = EdgeImage(second.edge, first.reversed != second.reversed)
                if composed != action.edge(gh, edge.id):
                    found.append(ActionViolation(
                        label, ViolationKind.COMPOSITION,
                        f"edge {edge.id!r}: {g}({h}(e)) = {composed} but {gh}(e) = {action.edge(gh, edge.id)}",
                    ))
    return found


def verify_action(
    g: MetricGraph | ExtendedGraph,
    action: GraphAction,
    subgroup: Iterable[str] | None = None,
) -> ActionReport:
    """
    Check that (a subgroup of) the group acts on the graph by symmetries.

    Checks bijectivity, incidence, lengths, weights and vertex conditions per
    element, the composition law action(g*h) = action(g) o action(h) for all
    pairs, and that leads form whole orbits.

    Example:
        >>> verify_action(d4_parent, d4_action).passed
        True
    """
    eg = as_extended(g)
    elements = action.group.elements if subgroup is None else action.group.require_subgroup(subgroup)
    violations: list[ActionViolation] = []
    for el in elements:
        violations.extend(_check_element(eg, action, el))
    if not any(v.kind is ViolationKind.BIJECTION for v in violations):
        violations.extend(_check_composition(eg, action, elements))

    report = ActionReport(elements=elements, violations=tuple(violations))
    if not report.passed:
        logger.debug(f"{'GraphAction'[:26]:<26} | SYM  | ❌ {report.summary()}")
    return report


def require_valid_action(
    g: MetricGraph | ExtendedGraph,
    action: GraphAction,
    subgroup: Iterable[str] | None = None,
) -> None:
    """
    Raise if verify_action fails.

    Raises:
        SymmetryBreakingLeadsError: If the only violations concern lead orbits.
        ActionError: For any other violation.
    """
    report = verify_action(g, action, subgroup)
    if report.passed:
        return
    if report.kinds() == {ViolationKind.LEAD_ORBIT}:
        raise SymmetryBreakingLeadsError(f"symmetry-breaking lead set\n{report.summary()}")
    raise ActionError(f"group does not act on the graph\n{report.summary()}")


@dataclass(frozen=True)
class FixedPointSet:
    """
    Fixed points of a group element.

    Attributes:
        vertices: Fixed vertices.
        midpoints: Edges mapped onto themselves reversed (their midpoint x = L/2 is fixed).
        edges: Edges mapped onto themselves without reversal (fixed pointwise).
    """
    vertices: tuple[str, ...]
    midpoints: tuple[str, ...]
    edges: tuple[str, ...]


def fixed_points(g: MetricGraph | ExtendedGraph, action: GraphAction, element: str) -> FixedPointSet:
    """
    Fixed vertices, fixed edge midpoints and pointwise fixed edges of an element.

    Example:
        >>> fixed_points(d4_parent, d4_action, "s").vertices
        ('O',)
    """
    graph = as_extended(g).graph
    action.group.require_element(element)
    images = [(edge.id, action.edge(element, edge.id)) for edge in graph.edges]
    return FixedPointSet(
        vertices=tuple(v.id for v in graph.vertices if action.vertex(element, v.id) == v.id),
        midpoints=tuple(eid for eid, img in images if img.edge == eid and img.reversed),
        edges=tuple(eid for eid, img in images if img.edge == eid and not img.reversed),
    )


def action_from_maps(
    group: FiniteGroup,
    vertex_perm: Mapping[str, Mapping[str, str]],
    edge_perm: Mapping[str, Mapping[str, tuple[str, bool] | EdgeImage]],
) -> GraphAction:
    """Build a GraphAction from plain mappings (edge images as (edge, reversed) pairs or EdgeImage)."""
    unknown = (set(vertex_perm) | set(edge_perm)) - set(group.elements)
    if unknown:
        raise ActionError(f"permutations given for unknown group elements {sorted(unknown)}")
    edges = {
        el: {eid: img if isinstance(img, EdgeImage) else EdgeImage(img[0], bool(img[1])) for eid, img in m.items()}
        for el, m in edge_perm.items()
    }
    return GraphAction(group=group, vertex_perm={el: dict(m) for el, m in vertex_perm.items()}, edge_perm=edges)
