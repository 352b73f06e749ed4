"""
Graph description files.

JSON documents with top-level keys "vertices", "edges" and the optional "leads":

    {
        "vertices": [{"id": "u", "condition": "dirichlet"}, ...],
        "edges":    [{"id": "e", "from": "u", "to": "v", "length": 1.0}, ...],
        "leads":    [{"id": "L1", "vertex": "v"}]
    }

Edges and leads may carry an optional positive "weight" (default 1). Leading
lines starting with '#' are manifest comments and are skipped on load.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any

from qgraph._config import QGRAPH
from qgraph._errors import GraphParseError
from qgraph._utils import read_text_file, render_json, save_text_file, sha256_bytes, strip_comment_lines
from qgraph.graphs._models import Edge, ExtendedGraph, Lead, MetricGraph, Vertex, VertexCondition

logger = logging.getLogger(__name__)

_TOP_LEVEL_KEYS = {"vertices", "edges", "leads"}
_VERTEX_KEYS = {"id", "condition"}
_EDGE_KEYS = {"id", "from", "to", "length", "weight"}
_LEAD_KEYS = {"id", "vertex", "weight"}


class _Reader:
    """Typed field access with path/location aware parse errors."""

    def __init__(self, source: str | None, strict: bool):
        self.source = source
        self.strict = strict

    def fail(self, message: str, location: str | None = None) -> GraphParseError:
        return GraphParseError(message, path=self.source, location=location)

    def object(self, value: Any, location: str, allowed: set[str], required: set[str]) -> dict[str, Any]:
        if not isinstance(value, dict):
            raise self.fail("expected an object", location)
        unknown = set(value) - allowed
        if unknown:
            if self.strict:
                raise self.fail(f"unknown keys {sorted(unknown)}", location)
            logger.warning(f"⚠️ Ignoring unknown keys {sorted(unknown)} at {location}")
        missing = required - set(value)
        if missing:
            raise self.fail(f"missing keys {sorted(missing)}", location)
        return value

    def list(self, value: Any, location: str) -> list[Any]:
        if not isinstance(value, list):
            raise self.fail("expected a list", location)
        return value

    def string(self, value: Any, location: str) -> str:
        if not isinstance(value, str) or not value:
            raise self.fail("expected a non-empty string", location)
        return value

    def number(self, value: Any, location: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail("expected a number", location)
        if not math.isfinite(value):
            raise self.fail("expected a finite number", location)
        return float(value)


def graph_from_dict(data: Any, source: str | None = None) -> ExtendedGraph:
    """
    Build a validated ExtendedGraph from a parsed graph document.

    Raises:
        GraphParseError: Wrong structure, types, unknown keys (strict mode) or bad condition names.
        GraphValidationError: The document is well-formed but violates a graph invariant.
    """
    reader = _Reader(source, strict=QGRAPH.config.runtime.strict_io)
    doc = reader.object(data, "document", _TOP_LEVEL_KEYS, {"vertices", "edges"})

    vertices = []
    for idx, item in enumerate(reader.list(doc["vertices"], "vertices")):
        where = f"vertices[{idx}]"
        obj = reader.object(item, where, _VERTEX_KEYS, {"id", "condition"})
        condition_name = reader.string(obj["condition"], f"{where}.condition").lower()
        try:
            condition = VertexCondition(condition_name)
        except ValueError:
            raise reader.fail(
                f"unknown condition {obj['condition']!r} (expected 'neumann' or 'dirichlet')", f"{where}.condition"
            ) from None
        vertices.append(Vertex(id=reader.string(obj["id"], f"{where}.id"), condition=condition))

    edges = []
    for idx, item in enumerate(reader.list(doc["edges"], "edges")):
        where = f"edges[{idx}]"
        obj = reader.object(item, where, _EDGE_KEYS, {"id", "from", "to", "length"})
        edges.append(Edge(
            id=reader.string(obj["id"], f"{where}.id"),
            start=reader.string(obj["from"], f"{where}.from"),
            end=reader.string(obj["to"], f"{where}.to"),
            length=reader.number(obj["length"], f"{where}.length"),
            weight=reader.number(obj.get("weight", 1.0), f"{where}.weight"),
        ))

    leads = []
    for idx, item in enumerate(reader.list(doc.get("leads", []), "leads")):
        where = f"leads[{idx}]"
        obj = reader.object(item, where, _LEAD_KEYS, {"id", "vertex"})
        leads.append(Lead(
            id=reader.string(obj["id"], f"{where}.id"),
            vertex=reader.string(obj["vertex"], f"{where}.vertex"),
            weight=reader.number(obj.get("weight", 1.0), f"{where}.weight"),
        ))

    return ExtendedGraph(graph=MetricGraph(vertices=tuple(vertices), edges=tuple(edges)), leads=tuple(leads))


def graph_to_dict(g: MetricGraph | ExtendedGraph) -> dict[str, Any]:
    """Canonical document of a graph (weights only written when different from 1)."""
    graph = g.graph if isinstance(g, ExtendedGraph) else g
    leads = g.leads if isinstance(g, ExtendedGraph) else ()

    def with_weight(item: dict[str, Any], weight: float) -> dict[str, Any]:
        if weight != 1.0:
            item["weight"] = weight
        return item

    doc: dict[str, Any] = {
        "vertices": [{"id": v.id, "condition": str(v.condition)} for v in graph.vertices],
        "edges": [
            with_weight({"id": e.id, "from": e.start, "to": e.end, "length": e.length}, e.weight)
            for e in graph.edges
        ],
    }
    if leads:
        doc["leads"] = [with_weight({"id": lead.id, "vertex": lead.vertex}, lead.weight) for lead in leads]
    return doc


def parse_graph(text: str, source: str | None = None) -> ExtendedGraph:
    """Parse graph document text, skipping leading '#' manifest lines."""
    body, skipped = strip_comment_lines(text)
    try:
        data = json.loads(body)
    except json.JSONDecodeError as e:
        raise GraphParseError(e.msg, path=source, location=f"line {e.lineno + skipped}, column {e.colno}") from e
    return graph_from_dict(data, source=source)


def load_graph(path: str | Path) -> ExtendedGraph:
    """
    Load and validate a graph description file.

    Raises:
        GraphParseError: Unreadable file or malformed document, with line/field context.
        GraphValidationError: Invariant violation, e.g. "unknown vertex" or
            "lead requires Neumann attachment".

    Example:
        >>> eg = load_graph("interval.json")
        >>> len(eg.graph.edges), len(eg.leads)
        (1, 0)
    """
    file_path = Path(path)
    return parse_graph(read_text_file(file_path), source=str(file_path))


def render_graph(g: MetricGraph | ExtendedGraph, header: tuple[str, ...] = ()) -> str:
    return render_json(graph_to_dict(g), header)


def serialize_graph(g: MetricGraph | ExtendedGraph, path: str | Path, header: tuple[str, ...] = ()) -> None:
    """
    Write a graph description file; load_graph reproduces the graph exactly.

    Args:
        g: The graph to write.
        path: Destination file.
        header: Optional manifest lines written as leading '#' comments.

    Raises:
        RuntimeError: If the file cannot be written.
    """
    save_text_file(render_graph(g, header), Path(path))


def graph_hash(g: MetricGraph | ExtendedGraph) -> str:
    """sha256 of the canonical compact serialization of a graph."""
    canonical = json.dumps(graph_to_dict(g), sort_keys=True, separators=(",", ":"))
    return sha256_bytes(canonical.encode("utf-8"))
