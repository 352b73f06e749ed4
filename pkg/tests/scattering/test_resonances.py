"""Tests for the complex resonance search."""

import cmath
import math
import unittest
from unittest.mock import patch

from numpy.testing import assert_allclose

from qgraph._config import QGRAPH
from qgraph._errors import ContourError, ResonanceSearchError
from qgraph.graphs import Edge, MetricGraph, Vertex, VertexCondition, attach_leads
from qgraph.scattering import Rectangle, ResonanceOptions, count_zeros, resonances

D = VertexCondition.DIRICHLET
RECT = Rectangle(0.5, 7.0, -2.0, -0.01)
# cot(k) = i/2  <=>  k = pi/2 + n*pi - i*artanh(1/2)
EXPECTED = [math.pi / 2 - 0.5j * math.log(3.0), 3 * math.pi / 2 - 0.5j * math.log(3.0)]


def lead_between_dirichlet_edges(l1=1.0, l2=1.0):
    graph = MetricGraph(
        vertices=(Vertex("c"), Vertex("t1", D), Vertex("t2", D)),
        edges=(Edge("e1", "c", "t1", l1), Edge("e2", "c", "t2", l2)),
    )
    return attach_leads(graph, ["c"])


class TestRectangle(unittest.TestCase):
    """Tests for Rectangle."""

    def test_parse(self):
        self.assertEqual(Rectangle.parse("0.5, 7, -2, -0.01").as_tuple(), (0.5, 7.0, -2.0, -0.01))

    def test_parse_rejects_wrong_arity(self):
        with self.assertRaises(ValueError):
            Rectangle.parse("0.5,7,-2")

    def test_parse_rejects_non_numbers(self):
        with self.assertRaises(ValueError):
            Rectangle.parse("a,b,c,d")

    def test_rejects_empty(self):
        with self.assertRaises(ValueError):
            Rectangle(1.0, 1.0, -1.0, 0.0)

    def test_contains_is_strict(self):
        self.assertTrue(RECT.contains(EXPECTED[0]))
        self.assertFalse(RECT.contains(complex(0.5, -1.0)))

    def test_split_along_longer_side(self):
        left, right = RECT.split()
        self.assertEqual(left.re_max, right.re_min)
        self.assertEqual(left.im_min, RECT.im_min)

    def test_boundary_has_four_sides(self):
        self.assertEqual(len(RECT.boundary(8)), 32)


class TestResonances(unittest.TestCase):
    """Tests for resonances() and count_zeros() on the two-Dirichlet-edge graph."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_poles_match_closed_form(self):
        found = resonances(lead_between_dirichlet_edges(), RECT)
        self.assertEqual(found.winding, 2)
        assert_allclose(found.ks(), EXPECTED, atol=1e-8)
        self.assertEqual([p.multiplicity for p in found.poles], [1, 1])

    def test_poles_satisfy_cot_condition(self):
        for pole in resonances(lead_between_dirichlet_edges(), RECT).poles:
            residual = cmath.cos(pole.k) / cmath.sin(pole.k) * 2 - 1j
            self.assertLess(abs(residual), 1e-8)

    def test_winding_equals_pole_count_in_every_subrectangle(self):
        """Should agree with the argument-principle count on each piece."""
        pieces = [Rectangle(0.5, 3.0, -2.0, -0.01), Rectangle(3.0, 7.0, -2.0, -0.01),
                  Rectangle(0.5, 7.0, -0.3, -0.01), Rectangle(2.0, 4.0, -2.0, -0.01)]
        expected = [1, 1, 0, 0]
        eg = lead_between_dirichlet_edges()
        for rect, count in zip(pieces, expected, strict=True):
            self.assertEqual(count_zeros(eg, rect), count, rect)
            self.assertEqual(len(resonances(eg, rect)), count, rect)

    def test_count_zeros_whole_rectangle(self):
        self.assertEqual(count_zeros(lead_between_dirichlet_edges(), RECT), 2)

    def test_unequal_edges(self):
        """Should find poles of cot(k l1) + cot(k l2) = i for incommensurate lengths."""
        l1, l2 = 1.0, math.sqrt(2.0)
        found = resonances(lead_between_dirichlet_edges(l1, l2), RECT)
        self.assertGreater(len(found), 0)
        for pole in found.poles:
            k = pole.k
            residual = cmath.cos(k * l1) / cmath.sin(k * l1) + cmath.cos(k * l2) / cmath.sin(k * l2) - 1j
            self.assertLess(abs(residual), 1e-7)

    def test_jobs_do_not_change_results(self):
        eg = lead_between_dirichlet_edges(1.0, 1.3)
        one = resonances(eg, RECT, ResonanceOptions(jobs=1))
        many = resonances(eg, RECT, ResonanceOptions(jobs=4))
        assert_allclose(one.ks(), many.ks(), rtol=0, atol=1e-12)

    def test_rejects_upper_half_plane(self):
        with self.assertRaises(ValueError):
            resonances(lead_between_dirichlet_edges(), Rectangle(0.5, 7.0, -1.0, 0.5))

    def test_render_csv(self):
        lines = resonances(lead_between_dirichlet_edges(), RECT).render_csv(("command: poles",)).splitlines()
        self.assertEqual(lines[0], "# command: poles")
        self.assertEqual(lines[1], "re_k,im_k,sigma_min")
        self.assertEqual(len(lines), 4)


class TestContourRetries(unittest.TestCase):
    """Tests for contour perturbation on ContourError."""

    def setUp(self):
        QGRAPH.reset()

    def tearDown(self):
        QGRAPH.reset()

    def test_shrinks_contour_after_contour_error(self):
        rect = Rectangle(2.0, 4.0, -0.3, -0.01)
        with patch("qgraph.scattering._resonances._ResonanceSearch.run",
                   side_effect=[ContourError("too close to a zero"), (0, [])]):
            found = resonances(lead_between_dirichlet_edges(), rect)
        self.assertEqual(found.attempts, 2)
        self.assertLess(found.contour.width, rect.width)
        self.assertEqual(len(found.warnings), 1)

    def test_gives_up_after_max_attempts(self):
        with patch("qgraph.scattering._resonances._ResonanceSearch.run",
                   side_effect=ContourError("too close to a zero")) as run:
            with self.assertRaises(ResonanceSearchError):
                resonances(lead_between_dirichlet_edges(), RECT, ResonanceOptions(max_attempts=3))
        self.assertEqual(run.call_count, 3)

    def test_single_attempt(self):
        with patch("qgraph.scattering._resonances._ResonanceSearch.run",
                   side_effect=ContourError("too close to a zero")):
            with self.assertRaises(ResonanceSearchError):
                resonances(lead_between_dirichlet_edges(), RECT, ResonanceOptions(max_attempts=1))


if __name__ == "__main__":
    unittest.main()
