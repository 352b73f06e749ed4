"""Tests for the symmetry-breaking experiment."""

import unittest

from qgraph._config import QGRAPH
from qgraph._errors import AnalysisError
from qgraph.analysis import symmetry_breaking_experiment
from qgraph.scattering import Rectangle
from qgraph.symmetry import builtin_d4_example

RIM = [f"M{i}" for i in range(1, 9)]
RECT = Rectangle(0.5, 6.0, -1.5, -0.01)


class TestSymmetryBreakingExperiment(unittest.TestCase):
    """Tests for symmetry_breaking_experiment() on the built-in parent."""

    def setUp(self):
        QGRAPH.reset()
        parent, self.action, self.r1, self.r2, _ = builtin_d4_example()
        self.parent = parent.graph

    def tearDown(self):
        QGRAPH.reset()

    def test_lead_at_one_diagonal_vertex_separates_poles(self):
        result = symmetry_breaking_experiment(self.parent, self.action, self.r1, self.r2, RIM, ["U+"], RECT)
        self.assertTrue(result.symmetric.passed, result.symmetric.failures())
        self.assertIsNotNone(result.broken)
        self.assertFalse(result.broken.passed)
        self.assertTrue(result.as_expected)
        self.assertGreater(result.measured_separation, 1e-6)
        self.assertEqual(len(result.poles), 4)
        self.assertEqual([lead.id for lead in result.broken_graphs[0].leads][-1], "B1")

    def test_without_breaking_leads(self):
        result = symmetry_breaking_experiment(self.parent, self.action, self.r1, self.r2, RIM, [], RECT)
        self.assertIsNone(result.broken)
        self.assertIsNone(result.broken_graphs)
        self.assertIsNone(result.measured_separation)
        self.assertEqual(len(result.poles), 2)
        self.assertTrue(result.as_expected)

    def test_symmetric_leads_must_form_orbits(self):
        with self.assertRaises(AnalysisError):
            symmetry_breaking_experiment(self.parent, self.action, self.r1, self.r2, ["U+"], [], RECT)

    def test_breaking_leads_must_break_orbits(self):
        with self.assertRaises(AnalysisError) as ctx:
            symmetry_breaking_experiment(self.parent, self.action, self.r1, self.r2, RIM, RIM, RECT)
        self.assertIn("not symmetry-breaking", str(ctx.exception))

    def test_breaking_lead_on_dirichlet_node(self):
        """Should refuse a lead at a vertex that becomes Dirichlet in a quotient."""
        with self.assertRaises(AnalysisError) as ctx:
            symmetry_breaking_experiment(self.parent, self.action, self.r1, self.r2, RIM, ["X+"], RECT)
        self.assertIn("cannot attach", str(ctx.exception))


if __name__ == "__main__":
    unittest.main()
