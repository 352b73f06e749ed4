"""Tests for graph description files."""

import json
import tempfile
import unittest
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

from qgraph._config import QGRAPH
from qgraph._errors import GraphParseError, GraphValidationError
from qgraph.graphs import (
    Edge,
    ExtendedGraph,
    Lead,
    MetricGraph,
    Vertex,
    VertexCondition,
    graph_hash,
    graph_to_dict,
    load_graph,
    parse_graph,
    render_graph,
    serialize_graph,
)

INTERVAL = {
    "vertices": [{"id": "u", "condition": "dirichlet"}, {"id": "v", "condition": "neumann"}],
    "edges": [{"id": "e", "from": "u", "to": "v", "length": 1.5}],
}


class TestParseGraph(unittest.TestCase):
    """Tests for parse_graph() and load_graph()."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_parses_interval(self):
        eg = parse_graph(json.dumps(INTERVAL))
        self.assertEqual(eg.graph.condition("u"), VertexCondition.DIRICHLET)
        self.assertEqual(eg.graph.edge("e").length, 1.5)
        self.assertTrue(eg.is_compact)

    def test_skips_manifest_lines(self):
        text = "# command: quotient\n# run_id: 01H\n" + json.dumps(INTERVAL)
        self.assertEqual(parse_graph(text).graph.edge("e").length, 1.5)

    def test_syntax_error_reports_line_after_manifest(self):
        """Should report line numbers of the original file, manifest lines included."""
        text = "# header\n{\n  \"vertices\": [,\n}"
        with self.assertRaises(GraphParseError) as ctx:
            parse_graph(text, source="broken.json")
        self.assertEqual(ctx.exception.path, "broken.json")
        self.assertTrue(ctx.exception.location.startswith("line 3"))

    def test_unknown_condition(self):
        doc = json.loads(json.dumps(INTERVAL))
        doc["vertices"][0]["condition"] = "robin"
        with self.assertRaises(GraphParseError) as ctx:
            parse_graph(json.dumps(doc))
        self.assertEqual(ctx.exception.location, "vertices[0].condition")

    def test_length_must_be_number(self):
        doc = json.loads(json.dumps(INTERVAL))
        doc["edges"][0]["length"] = "1.5"
        with self.assertRaises(GraphParseError) as ctx:
            parse_graph(json.dumps(doc))
        self.assertIn("edges[0].length", str(ctx.exception))

    def test_unknown_keys_rejected_in_strict_mode(self):
        doc = dict(INTERVAL, comment="hello")
        with self.assertRaises(GraphParseError):
            parse_graph(json.dumps(doc))

    def test_unknown_keys_tolerated_when_not_strict(self):
        QGRAPH.configure(runtime={"strict_io": False})
        doc = dict(INTERVAL, comment="hello")
        self.assertEqual(len(parse_graph(json.dumps(doc)).graph.edges), 1)

    def test_lead_on_dirichlet_vertex_is_validation_error(self):
        doc = dict(INTERVAL, leads=[{"id": "L1", "vertex": "u"}])
        with self.assertRaises(GraphValidationError) as ctx:
            parse_graph(json.dumps(doc))
        self.assertIn("lead requires Neumann attachment", str(ctx.exception))

    def test_edge_to_unknown_vertex_is_validation_error(self):
        doc = json.loads(json.dumps(INTERVAL))
        doc["edges"][0]["to"] = "w"
        with self.assertRaises(GraphValidationError) as ctx:
            parse_graph(json.dumps(doc))
        self.assertIn("unknown vertex", str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(GraphParseError) as ctx:
            load_graph("/nonexistent/graph.json")
        self.assertIn("cannot read file", str(ctx.exception))

    def test_non_utf8_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "latin1.json"
            path.write_bytes('{"vertices": [{"id": "Straße"}]}'.encode("latin-1"))
            with self.assertRaises(GraphParseError) as ctx:
                load_graph(path)
        self.assertEqual(ctx.exception.path, str(path))
        self.assertIn("not UTF-8", str(ctx.exception))


class TestSerializeGraph(unittest.TestCase):
    """Tests for serialize_graph(), graph_to_dict() and graph_hash()."""

    def test_weights_written_only_when_not_one(self):
        eg = ExtendedGraph(
            graph=MetricGraph(vertices=(Vertex("a"), Vertex("b")), edges=(Edge("e", "a", "b", 1.0, weight=2.0),)),
            leads=(Lead("L1", "a"),),
        )
        doc = graph_to_dict(eg)
        self.assertEqual(doc["edges"][0]["weight"], 2.0)
        self.assertNotIn("weight", doc["leads"][0])

    def test_no_leads_key_for_compact_graph(self):
        self.assertNotIn("leads", graph_to_dict(parse_graph(json.dumps(INTERVAL))))

    def test_file_round_trip_with_header(self):
        eg = parse_graph(json.dumps(INTERVAL))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "g.json"
            serialize_graph(eg, path, header=("command: quotient",))
            self.assertTrue(path.read_text(encoding="utf-8").startswith("# command: quotient\n"))
            self.assertEqual(load_graph(path), eg)

    def test_rendering_is_deterministic(self):
        eg = parse_graph(json.dumps(INTERVAL))
        self.assertEqual(render_graph(eg), render_graph(parse_graph(render_graph(eg))))

    def test_hash_ignores_header_and_depends_on_lengths(self):
        eg = parse_graph(json.dumps(INTERVAL))
        self.assertEqual(graph_hash(eg), graph_hash(parse_graph("# x\n" + render_graph(eg))))
        self.assertNotEqual(graph_hash(eg), graph_hash(eg.graph.with_edge_length("e", 2.0)))


@st.composite
def path_graphs(draw):
    """Random paths with random conditions, lengths and an optional lead."""
    n = draw(st.integers(min_value=2, max_value=6))
    conditions = draw(st.lists(st.sampled_from(list(VertexCondition)), min_size=n, max_size=n))
    lengths = draw(st.lists(
        st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False), min_size=n - 1, max_size=n - 1
    ))
    vertices = tuple(Vertex(f"v{i}", c) for i, c in enumerate(conditions))
    edges = tuple(Edge(f"e{i}", f"v{i}", f"v{i + 1}", length) for i, length in enumerate(lengths))
    neumann = [v.id for v in vertices if v.condition is VertexCondition.NEUMANN]
    leads = (Lead("L1", draw(st.sampled_from(neumann))),) if neumann and draw(st.booleans()) else ()
    return ExtendedGraph(graph=MetricGraph(vertices=vertices, edges=edges), leads=leads)


class TestSerializeProperties(unittest.TestCase):
    """Property tests for exact reloading of serialized graphs."""

    @settings(max_examples=50, deadline=None)
    @given(path_graphs())
    def test_reload_is_exact(self, eg):
        self.assertEqual(parse_graph(render_graph(eg)), eg)


if __name__ == "__main__":
    unittest.main()
