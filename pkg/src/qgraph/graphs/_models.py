"""
Data models for metric graphs.

This module contains the immutable graph types shared by every other module:
- VertexCondition: Neumann (Kirchhoff) or Dirichlet vertex condition
- Vertex, Edge, Lead: the building pieces, referenced by opaque string ids
- MetricGraph: a finite metric graph (the compact object)
- ExtendedGraph: a MetricGraph with semi-infinite leads attached

Edges are oriented from `start` (x = 0) to `end` (x = length). Matrices built
from a graph index edges and leads in declaration order.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from qgraph._errors import GraphValidationError


class VertexCondition(enum.StrEnum):
    """
    Vertex condition of the free Laplacian.

    Attributes:
        NEUMANN: Continuity plus vanishing (weighted) sum of outgoing derivatives.
        DIRICHLET: The function vanishes at the vertex.
    """
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Vertex:
    id: str
    condition: VertexCondition = VertexCondition.NEUMANN


@dataclass(frozen=True)
class Edge:
    """
    An edge of finite length.

    Attributes:
        id: Unique edge id.
        start: Vertex at x = 0.
        end: Vertex at x = length (equal to `start` for a self-loop).
        length: Strictly positive, finite length.
        weight: Positive factor of this edge's derivative in the Kirchhoff sums (1 for ordinary graphs).
    """
    id: str
    start: str
    end: str
    length: float
    weight: float = 1.0

    @property
    def is_loop(self) -> bool:
        return self.start == self.end


@dataclass(frozen=True)
class Lead:
    """
    A semi-infinite lead with coordinate x in [0, inf) and x = 0 at `vertex`.

    Attributes:
        id: Unique lead id.
        vertex: Attachment vertex.
        weight: Positive factor of the lead's derivative in the Kirchhoff sum; scattering
            amplitudes are reported flux-normalized by sqrt(weight).
    """
    id: str
    vertex: str
    weight: float = 1.0


def _require_unique(kind: str, ids: Iterable[str]) -> None:
    seen: set[str] = set()
    for item_id in ids:
        if item_id in seen:
            raise GraphValidationError(f"duplicate {kind} id {item_id!r}")
        seen.add(item_id)


def _require_weight(kind: str, item_id: str, weight: float) -> None:
    if not (math.isfinite(weight) and weight > 0):
        raise GraphValidationError(f"{kind} {item_id!r}: weight must be positive and finite, got {weight!r}")


@dataclass(frozen=True)
class MetricGraph:
    """
    A finite metric graph with a Neumann or Dirichlet condition at every vertex.

    Self-loops are allowed and contribute two incidences at their vertex.
    Construction validates every invariant and raises GraphValidationError.

    Example:
        >>> g = MetricGraph(
        ...     vertices=(Vertex("u", VertexCondition.DIRICHLET), Vertex("v", VertexCondition.DIRICHLET)),
        ...     edges=(Edge("e", "u", "v", 1.0),),
        ... )
        >>> g.total_length
        1.0
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        _require_unique("vertex", (v.id for v in self.vertices))
        _require_unique("edge", (e.id for e in self.edges))

        known = {v.id for v in self.vertices}
        for edge in self.edges:
            for endpoint in (edge.start, edge.end):
                if endpoint not in known:
                    raise GraphValidationError(f"edge {edge.id!r} references unknown vertex {endpoint!r}")
            if not (math.isfinite(edge.length) and edge.length > 0):
                raise GraphValidationError(
                    f"edge {edge.id!r}: length must be positive and finite, got {edge.length!r}"
                )
            _require_weight("edge", edge.id, edge.weight)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v.id: idx for idx, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: idx for idx, e in enumerate(self.edges)}

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=float)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    @cached_property
    def incidences(self) -> dict[str, tuple[tuple[int, int], ...]]:
        """Edge ends per vertex as (edge index, end) pairs, end 0 = start and 1 = end, in edge order."""
        result: dict[str, list[tuple[int, int]]] = {v.id: [] for v in self.vertices}
        for idx, edge in enumerate(self.edges):
            result[edge.start].append((idx, 0))
            result[edge.end].append((idx, 1))
        return {vid: tuple(ends) for vid, ends in result.items()}

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    def vertex(self, vertex_id: str) -> Vertex:
        return self.vertices[self.vertex_index[vertex_id]]

    def edge(self, edge_id: str) -> Edge:
        return self.edges[self.edge_index[edge_id]]

    def condition(self, vertex_id: str) -> VertexCondition:
        return self.vertex(vertex_id).condition

    def degree(self, vertex_id: str) -> int:
        """Number of edge ends at the vertex (a self-loop counts twice)."""
        return len(self.incidences[vertex_id])

    def component_labels(self) -> np.ndarray:
        """Connected-component label per vertex (declaration order)."""
        n = len(self.vertices)
        rows = [self.vertex_index[e.start] for e in self.edges]
        cols = [self.vertex_index[e.end] for e in self.edges]
        adjacency = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        _, labels = connected_components(adjacency, directed=False)
        return np.asarray(labels)

    def is_connected(self) -> bool:
        return len(self.vertices) <= 1 or len(set(self.component_labels().tolist())) == 1

    def zero_mode_multiplicity(self) -> int:
        """Number of connected components that carry edges and no Dirichlet vertex (constant k = 0 modes)."""
        labels = self.component_labels()
        with_edges = {int(labels[self.vertex_index[e.start]]) for e in self.edges}
        with_dirichlet = {
            int(labels[idx]) for idx, v in enumerate(self.vertices)
            if v.condition is VertexCondition.DIRICHLET
        }
        return len(with_edges - with_dirichlet)

    def with_edge_length(self, edge_id: str, length: float) -> MetricGraph:
        """Return a copy with one edge length replaced."""
        self.edge(edge_id)
        return MetricGraph(
            vertices=self.vertices,
            edges=tuple(replace(e, length=length) if e.id == edge_id else e for e in self.edges),
        )


@dataclass(frozen=True)
class ExtendedGraph:
    """
    A metric graph with semi-infinite leads.

    Every attachment vertex must exist and carry a Neumann condition. With no
    leads the object degenerates to the compact graph. Several leads may share
    a vertex.

    Attributes:
        graph: The compact part.
        leads: Leads in declaration order (rows/columns of S follow this order).
    """

    graph: MetricGraph
    leads: tuple[Lead, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "leads", tuple(self.leads))
        _require_unique("lead", (lead.id for lead in self.leads))
        for lead in self.leads:
            if lead.vertex not in self.graph.vertex_index:
                raise GraphValidationError(f"lead {lead.id!r} references unknown vertex {lead.vertex!r}")
            if self.graph.condition(lead.vertex) is not VertexCondition.NEUMANN:
                raise GraphValidationError(
                    f"lead {lead.id!r}: lead requires Neumann attachment (vertex {lead.vertex!r} is Dirichlet)"
                )
            _require_weight("lead", lead.id, lead.weight)

    @cached_property
    def lead_weights(self) -> np.ndarray:
        return np.array([lead.weight for lead in self.leads], dtype=float)

    @property
    def lead_ids(self) -> tuple[str, ...]:
        return tuple(lead.id for lead in self.leads)

    @property
    def is_compact(self) -> bool:
        return not self.leads

    def leads_at(self, vertex_id: str) -> tuple[Lead, ...]:
        return tuple(lead for lead in self.leads if lead.vertex == vertex_id)

    def total_degree(self, vertex_id: str) -> int:
        return self.graph.degree(vertex_id) + len(self.leads_at(vertex_id))

    def compact(self) -> MetricGraph:
        return self.graph


def as_extended(g: MetricGraph | ExtendedGraph) -> ExtendedGraph:
    """Wrap a MetricGraph as an ExtendedGraph without leads (identity on ExtendedGraph)."""
    return g if isinstance(g, ExtendedGraph) else ExtendedGraph(graph=g)


def attach_leads(
    g: MetricGraph | ExtendedGraph,
    vertices: Sequence[str],
    lead_ids: Sequence[str] | None = None,
) -> ExtendedGraph:
    """
    Attach one lead per listed vertex (listing a vertex twice attaches two leads).

    Args:
        g: The graph to extend; an ExtendedGraph keeps its existing leads first.
        vertices: Attachment vertices, in lead order.
        lead_ids: Optional ids; defaults to L1, L2, ... continuing after existing leads.

    Raises:
        GraphValidationError: Unknown vertex, Dirichlet vertex, or a marked vertex
            whose total degree (edges + leads) stays below 2.

    Example:
        >>> eg = attach_leads(star, ["c"])
        >>> len(eg.leads)
        1
    """
    base = as_extended(g)
    if lead_ids is not None and len(lead_ids) != len(vertices):
        raise GraphValidationError(f"got {len(lead_ids)} lead ids for {len(vertices)} vertices")

    offset = len(base.leads)
    ids = list(lead_ids) if lead_ids is not None else [f"L{offset + i + 1}" for i in range(len(vertices))]
    for vid in vertices:
        if vid not in base.graph.vertex_index:
            raise GraphValidationError(f"cannot attach lead: unknown vertex {vid!r}")
        if base.graph.condition(vid) is not VertexCondition.NEUMANN:
            raise GraphValidationError(f"cannot attach lead: lead requires Neumann attachment (vertex {vid!r})")

    extended = ExtendedGraph(
        graph=base.graph,
        leads=base.leads + tuple(Lead(id=lid, vertex=vid) for lid, vid in zip(ids, vertices, strict=True)),
    )
    for vid in set(vertices):
        if extended.total_degree(vid) < 2:
            raise GraphValidationError(
                f"cannot attach lead: marked vertex {vid!r} needs valency >= 2 (edges + leads)"
            )
    return extended
