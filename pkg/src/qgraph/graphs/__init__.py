"""
Metric graphs: data model, validation and graph description files.

Example:
    >>> from qgraph.graphs import load_graph, attach_leads
    >>> eg = load_graph("star.json")
    >>> eg = attach_leads(eg.graph, ["c"])
"""

from qgraph.graphs._io import (
    graph_from_dict,
    graph_hash,
    graph_to_dict,
    load_graph,
    parse_graph,
    render_graph,
    serialize_graph,
)
from qgraph.graphs._models import (
    Edge,
    ExtendedGraph,
    Lead,
    MetricGraph,
    Vertex,
    VertexCondition,
    as_extended,
    attach_leads,
)

__all__ = [
    # Models
    "VertexCondition",
    "Vertex",
    "Edge",
    "Lead",
    "MetricGraph",
    "ExtendedGraph",
    "as_extended",
    "attach_leads",
    # Files
    "load_graph",
    "parse_graph",
    "serialize_graph",
    "render_graph",
    "graph_from_dict",
    "graph_to_dict",
    "graph_hash",
]
