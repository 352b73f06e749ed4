"""Tests for isospectrality, isopolarity and S-matrix conjugation checks."""

import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from qgraph._config import QGRAPH
from qgraph._errors import AnalysisError
from qgraph.analysis import ComparisonKind, compare_poles, compare_spectra, conjugation_report, conjugation_residual
from qgraph.graphs import Edge, MetricGraph, Vertex, VertexCondition, graph_hash
from qgraph.scattering import Rectangle, eigenphases, resonances, smatrix
from qgraph.scattering._resonances import Pole, ResonanceSet
from qgraph.spectral import spectrum
from qgraph.symmetry import BUILTIN_T, builtin_graph

D = VertexCondition.DIRICHLET
N = VertexCondition.NEUMANN
RECT = Rectangle(0.5, 10.0, -2.0, -0.01)


def interval(left=D, right=D, length=1.0) -> MetricGraph:
    return MetricGraph(vertices=(Vertex("u", left), Vertex("v", right)), edges=(Edge("e", "u", "v", length),))


def pole_set(*ks, rect=RECT):
    return ResonanceSet(poles=tuple(Pole(k) for k in ks), rect=rect, contour=rect, winding=len(ks))


class TestCompareSpectra(unittest.TestCase):
    """Tests for compare_spectra()."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_builtin_quotients_are_isospectral(self):
        s1 = spectrum(builtin_graph("d4-r1").graph, 0.1, 15.0)
        s2 = spectrum(builtin_graph("d4-r2").graph, 0.1, 15.0)
        self.assertEqual(s1.count, s2.count)
        self.assertGreater(s1.count, 5)
        report = compare_spectra(s1, s2, tol=1e-8)
        self.assertTrue(report.passed, report.failures())
        self.assertEqual(report.kind, ComparisonKind.SPECTRA)
        self.assertEqual(report.metadata["interval"], [0.1, 15.0])
        self.assertEqual(report.metadata["graph_1"], graph_hash(builtin_graph("d4-r1").graph))
        self.assertEqual(report.metadata["graph_2"], graph_hash(builtin_graph("d4-r2").graph))

    def test_equal_counts_pair_in_order(self):
        report = compare_spectra(spectrum(interval(), 0.1, 10.0), spectrum(interval(length=1.01), 0.1, 10.0))
        self.assertFalse(report.passed)
        self.assertEqual(len(report.items), 3)
        self.assertEqual(report.unpaired, ())

    def test_unequal_counts_leave_entries_unpaired(self):
        report = compare_spectra(spectrum(interval(), 0.1, 7.0), spectrum(interval(length=2.0), 0.1, 7.0))
        self.assertFalse(report.passed)
        self.assertEqual(len(report.unpaired), 2)
        self.assertEqual(sum(1 for item in report.items if item.paired), 2)

    def test_zero_modes_are_compared(self):
        report = compare_spectra(spectrum(interval(N, N), 0.1, 2.0), spectrum(interval(D, D, 1.0), 0.1, 2.0))
        self.assertEqual(report.items[0].label, "zero-mode")
        self.assertTrue(math.isinf(report.items[0].deviation))

    def test_configured_tolerance(self):
        QGRAPH.configure(analysis={"spectra_tol": 0.5})
        report = compare_spectra(spectrum(interval(), 0.1, 10.0), spectrum(interval(length=1.01), 0.1, 10.0))
        self.assertEqual(report.tolerance, 0.5)
        self.assertTrue(report.passed)

    def test_rejects_different_intervals(self):
        with self.assertRaises(AnalysisError):
            compare_spectra(spectrum(interval(), 0.1, 5.0), spectrum(interval(), 0.1, 6.0))


class TestConjugation(unittest.TestCase):
    """Tests for conjugation_residual() and conjugation_report()."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_builtin_pair_on_real_grid(self):
        first, second = builtin_graph("d4-r1-leads"), builtin_graph("d4-r2-leads")
        report = conjugation_report(first, second, BUILTIN_T, np.linspace(0.1, 10.0, 100), tol=1e-9)
        self.assertTrue(report.passed, report.failures())
        self.assertEqual(report.kind, ComparisonKind.SMATRIX_CONJUGATION)
        self.assertEqual(report.metadata["grid_size"], 100)

    def test_builtin_pair_at_complex_k(self):
        """Should conjugate on both sides of the real axis, away from the resonances."""
        first, second = builtin_graph("d4-r1-leads"), builtin_graph("d4-r2-leads")
        poles = resonances(first, Rectangle(0.5, 10.0, -1.0, -0.01)).ks()
        imag_parts = [-0.9, -0.5, -0.2, 0.3, 0.7] * 4
        grid = [complex(re, im) for re, im in zip(np.linspace(0.7, 9.7, 20), imag_parts, strict=True)]
        sample = [2.0 - 0.3j, 1.1 - 0.5j, 4.7 - 0.8j, 8.3 - 0.2j]
        sample += [k for k in grid if poles.size == 0 or np.min(np.abs(poles - k)) > 0.1]
        self.assertGreaterEqual(len(sample), 16)
        self.assertTrue(any(k.imag > 0 for k in sample))
        for k in sample:
            self.assertLess(conjugation_residual(first, second, BUILTIN_T, k), 1e-9, k)

    def test_builtin_pair_shares_s_eigenvalues(self):
        first, second = builtin_graph("d4-r1-leads"), builtin_graph("d4-r2-leads")
        for k in (1.3, 4.4, 2.0 - 0.3j, 6.1 + 0.5j):
            s1, s2 = smatrix(first, k).S, smatrix(second, k).S
            self.assertLess(abs(np.trace(s1) - np.trace(s2)), 1e-9, k)
            self.assertLess(abs(np.linalg.det(s1) - np.linalg.det(s2)), 1e-9, k)
            if k.imag == 0:
                assert_allclose(eigenphases(s1), eigenphases(s2), atol=1e-9)

    def test_identity_is_not_a_transplantation(self):
        first, second = builtin_graph("d4-r1-leads"), builtin_graph("d4-r2-leads")
        worst = max(conjugation_residual(first, second, np.eye(2), k) for k in (1.1, 2.7, 4.3))
        self.assertGreater(worst, 1e-3)

    def test_dimension_mismatch(self):
        with self.assertRaises(AnalysisError):
            conjugation_residual(builtin_graph("d4-r1-leads"), builtin_graph("d4-r2-leads"), np.eye(3), 1.0)

    def test_parallel_grid_matches_sequential(self):
        first, second = builtin_graph("d4-r1-leads"), builtin_graph("d4-r2-leads")
        grid = np.linspace(0.5, 3.0, 8)
        one = conjugation_report(first, second, BUILTIN_T, grid, jobs=1)
        many = conjugation_report(first, second, BUILTIN_T, grid, jobs=4)
        self.assertEqual([i.deviation for i in one.items], [i.deviation for i in many.items])


class TestComparePoles(unittest.TestCase):
    """Tests for compare_poles()."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_builtin_pair_is_isopolar(self):
        r1 = resonances(builtin_graph("d4-r1-leads"), RECT)
        r2 = resonances(builtin_graph("d4-r2-leads"), RECT)
        self.assertGreater(len(r1), 0)
        report = compare_poles(r1, r2, tol=1e-6)
        self.assertTrue(report.passed, report.failures())
        self.assertEqual(report.metadata["count_1"], report.metadata["count_2"])
        self.assertEqual(report.metadata["graph_2"], graph_hash(builtin_graph("d4-r2-leads")))

    def test_greedy_matching(self):
        report = compare_poles(pole_set(1 - 0.5j, 2 - 0.5j), pole_set(2.1 - 0.5j, 1.05 - 0.5j), tol=0.2)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.items[0].deviation, 0.05, places=12)
        self.assertAlmostEqual(report.items[1].deviation, 0.1, places=12)

    def test_extra_pole_is_unmatched(self):
        report = compare_poles(pole_set(1 - 0.5j, 3 - 0.2j), pole_set(1 - 0.5j), tol=1e-6)
        self.assertFalse(report.passed)
        self.assertEqual(len(report.unpaired), 1)
        self.assertEqual(report.unpaired[0].left, 3 - 0.2j)

    def test_multiplicities_are_expanded(self):
        double = ResonanceSet(poles=(Pole(2 - 0.3j, multiplicity=2),), rect=RECT, contour=RECT, winding=2)
        report = compare_poles(double, pole_set(2 - 0.3j, 2 - 0.3j), tol=1e-6)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.items), 2)

    def test_rejects_different_rectangles(self):
        other = Rectangle(0.5, 5.0, -2.0, -0.01)
        with self.assertRaises(AnalysisError):
            compare_poles(pole_set(1 - 0.5j), pole_set(1 - 0.5j, rect=other))


if __name__ == "__main__":
    unittest.main()
