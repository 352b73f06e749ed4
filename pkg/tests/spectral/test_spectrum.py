"""Tests for the real-axis eigenvalue search."""

import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qgraph._config import QGRAPH
from qgraph._errors import InvalidWavenumberError
from qgraph.graphs import Edge, MetricGraph, Vertex, VertexCondition
from qgraph.spectral import SpectrumOptions, assemble_secular, scaled_singular_values, spectrum
from qgraph.symmetry import builtin_graph

D = VertexCondition.DIRICHLET
N = VertexCondition.NEUMANN


def interval(left=D, right=D, length=1.0) -> MetricGraph:
    return MetricGraph(vertices=(Vertex("u", left), Vertex("v", right)), edges=(Edge("e", "u", "v", length),))


def star(tips=D, lengths=(1.0, 1.0, 1.0)) -> MetricGraph:
    return MetricGraph(
        vertices=(Vertex("c"), *(Vertex(f"t{i}", tips) for i in range(1, len(lengths) + 1))),
        edges=tuple(Edge(f"e{i}", "c", f"t{i}", length) for i, length in enumerate(lengths, start=1)),
    )


class TestSecularSystem(unittest.TestCase):
    """Tests for the assembled secular matrix."""

    def test_star_quarter_wave_is_singular(self):
        """Should be rank-deficient at k = pi/2 for the Dirichlet-tipped equilateral star."""
        self.assertLess(assemble_secular(star(), math.pi / 2).scaled_sigma_min(), 1e-10)

    def test_regular_point(self):
        self.assertGreater(assemble_secular(star(), 1.0).scaled_sigma_min(), 1e-3)

    def test_matrix_is_square_with_two_unknowns_per_edge(self):
        system = assemble_secular(star(), 2.0)
        self.assertEqual(system.matrix.shape, (6, 6))
        self.assertEqual(system.edge_ids, ("e1", "e2", "e3"))

    def test_rejects_zero_wavenumber(self):
        with self.assertRaises(InvalidWavenumberError):
            assemble_secular(star(), 0.0)


class TestClosedFormSpectra(unittest.TestCase):
    """Tests against closed-form interval and star spectra."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_dirichlet_interval_small_window(self):
        spec = spectrum(interval(), 0.1, 10.0)
        assert_allclose(spec.ks(), [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-10)
        self.assertTrue(all(line.multiplicity == 1 for line in spec.eigenvalues))

    def test_dirichlet_interval_first_ten(self):
        spec = spectrum(interval(), 0.1, 10.5 * math.pi)
        assert_allclose(spec.ks(), math.pi * np.arange(1, 11), atol=1e-10)

    def test_neumann_dirichlet_interval_first_ten(self):
        spec = spectrum(interval(N, D), 0.1, 10 * math.pi)
        assert_allclose(spec.ks(), math.pi * (np.arange(1, 11) - 0.5), atol=1e-10)

    def test_neumann_dirichlet_short_window(self):
        assert_allclose(spectrum(interval(N, D), 0.1, 5.0).ks(), [math.pi / 2, 3 * math.pi / 2], atol=1e-10)

    def test_neumann_interval_reports_zero_mode(self):
        """Should report the constant mode separately and keep k = 0 out of the list."""
        spec = spectrum(interval(N, N), 0.1, 7.0)
        self.assertEqual(spec.zero_mode_multiplicity, 1)
        self.assertTrue(spec.has_zero_mode)
        assert_allclose(spec.ks(), [math.pi, 2 * math.pi], atol=1e-10)

    def test_star_multiplicities(self):
        """Should count the two zero-sum combinations at k = pi and a simple quarter wave at pi/2."""
        spec = spectrum(star(), 0.1, 4.0)
        self.assertEqual(spec.multiplicity(math.pi / 2), 1)
        self.assertEqual(spec.multiplicity(math.pi), 2)
        self.assertEqual(spec.count, 3)
        self.assertEqual(spec.zero_mode_multiplicity, 0)

    def test_counts_is_weyl_function(self):
        spec = spectrum(star(), 0.1, 4.0)
        self.assertEqual(spec.counts(2.0), 1)
        self.assertEqual(spec.counts(4.0), 3)

    def test_scaled_singular_values_at_double_eigenvalue(self):
        sv = scaled_singular_values(star(), math.pi)
        self.assertEqual(int(np.count_nonzero(sv < 1e-8)), 2)

    def test_explicit_options_are_recorded(self):
        spec = spectrum(interval(), 0.1, 4.0, SpectrumOptions(scan_step=0.01, k_tol=1e-12, jobs=2))
        self.assertEqual(spec.scan_step, 0.01)
        self.assertEqual(spec.k_tol, 1e-12)
        self.assertAlmostEqual(spec.ks()[0], math.pi, places=10)

    def test_jobs_do_not_change_results(self):
        sequential = spectrum(star(lengths=(1.0, 1.3, 0.7)), 0.1, 8.0, SpectrumOptions(jobs=1))
        parallel = spectrum(star(lengths=(1.0, 1.3, 0.7)), 0.1, 8.0, SpectrumOptions(jobs=4))
        assert_allclose(sequential.ks(), parallel.ks(), rtol=0, atol=0)

    def test_render_csv(self):
        text = spectrum(interval(), 0.1, 4.0).render_csv(header=("command: spectrum",))
        lines = text.splitlines()
        self.assertEqual(lines[0], "# command: spectrum")
        self.assertEqual(lines[1], "k,multiplicity")
        self.assertAlmostEqual(float(lines[2].split(",")[0]), math.pi, places=10)

    def test_invalid_interval(self):
        with self.assertRaises(ValueError):
            spectrum(interval(), 5.0, 1.0)
        with self.assertRaises(ValueError):
            spectrum(interval(), 0.0, 1.0)

    def test_graph_without_edges(self):
        with self.assertRaises(ValueError):
            spectrum(MetricGraph(vertices=(Vertex("a"),), edges=()), 0.1, 1.0)


class TestNeumannLoop(unittest.TestCase):
    """Tests for a single loop at a Neumann vertex, where the whole secular matrix vanishes at eigenvalues."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    @staticmethod
    def loop(weight=1.0) -> MetricGraph:
        return MetricGraph(vertices=(Vertex("v"),), edges=(Edge("e", "v", "v", 1.0, weight),))

    def test_all_singular_values_vanish_at_eigenvalue(self):
        assert_allclose(scaled_singular_values(self.loop(4.0), 2 * math.pi), [0.0, 0.0], atol=1e-12)

    def test_weighted_loop_eigenvalues_are_double(self):
        spec = spectrum(self.loop(4.0), 0.1, 13.0)
        assert_allclose([line.k for line in spec.eigenvalues], [2 * math.pi, 4 * math.pi], atol=1e-9)
        self.assertEqual([line.multiplicity for line in spec.eigenvalues], [2, 2])
        self.assertEqual(spec.zero_mode_multiplicity, 1)

    def test_scale_ignores_k(self):
        system = assemble_secular(self.loop(4.0), 1.0)
        self.assertEqual(system.scale, 4.0)
        self.assertEqual(assemble_secular(self.loop(0.5), 1.0).scale, 1.0)


class TestBuiltinQuotientSpectra(unittest.TestCase):
    """Weyl count and grid refinement on the built-in quotient graphs."""

    @classmethod
    def setUpClass(cls):
        QGRAPH.reset()
        cls.graphs = {name: builtin_graph(name).graph for name in ("d4-r1", "d4-r2")}

    def test_weyl_count_up_to_fifty(self):
        for name, graph in self.graphs.items():
            with self.subTest(name=name):
                spec = spectrum(graph, 0.05, 50.0)
                expected = 50.0 * graph.total_length / math.pi
                self.assertLessEqual(abs(spec.counts(50.0) - expected), 2.0)

    def test_halving_scan_step_keeps_every_eigenvalue(self):
        for name, graph in self.graphs.items():
            with self.subTest(name=name):
                coarse = spectrum(graph, 0.1, 15.0)
                fine = spectrum(graph, 0.1, 15.0, SpectrumOptions(scan_step=coarse.scan_step / 2))
                for line in coarse.eigenvalues:
                    self.assertGreaterEqual(fine.multiplicity(line.k, tol=1e-8), line.multiplicity, f"k={line.k}")


class TestSpectrumProperties(unittest.TestCase):
    """Property tests for scaling of interval spectra."""

    @settings(max_examples=15, deadline=None)
    @given(st.floats(min_value=0.3, max_value=3.0))
    def test_dirichlet_interval_scales_with_length(self, length):
        spec = spectrum(interval(length=length), 0.1, 3.5 * math.pi / length)
        assert_allclose(spec.ks(), math.pi * np.arange(1, 4) / length, atol=1e-9)


if __name__ == "__main__":
    unittest.main()
