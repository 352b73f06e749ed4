"""Tests for the built-in D4 example."""

import math
import unittest

import numpy as np

from qgraph.symmetry import (
    BUILTIN_NAMES,
    BUILTIN_T,
    H1,
    H2,
    builtin_d4_example,
    builtin_graph,
    d4_action,
    d4_parent_graph,
    induction_equivalent,
    verify_action,
)


class TestBuiltinParent(unittest.TestCase):
    """Tests for d4_parent_graph() and d4_action()."""

    def test_parent_shape(self):
        parent = d4_parent_graph(leads=True)
        self.assertEqual(len(parent.graph.vertices), 17)
        self.assertEqual(len(parent.graph.edges), 24)
        self.assertEqual([lead.id for lead in parent.leads], [f"L{i}" for i in range(1, 9)])
        self.assertAlmostEqual(parent.graph.total_length, 4 + 4 * math.sqrt(2) + 8 * math.sqrt(3), places=12)

    def test_rim_midpoints_have_degree_two(self):
        graph = d4_parent_graph().graph
        self.assertEqual({graph.degree(f"M{i}") for i in range(1, 9)}, {2})

    def test_action_is_valid_for_any_lengths(self):
        parent = d4_parent_graph(2.0, 0.5, 1.25, leads=True)
        report = verify_action(parent, d4_action(parent))
        self.assertTrue(report.passed, report.violations)

    def test_rotation_moves_leads_around_the_rim(self):
        action = d4_action()
        self.assertEqual(action.vertex_perm["s"]["X+"], "Y+")
        self.assertEqual(action.vertex_perm["s"]["M1"], "M3")


class TestBuiltinExample(unittest.TestCase):
    """Tests for builtin_d4_example() and builtin_graph()."""

    def test_example(self):
        parent, action, r1, r2, T = builtin_d4_example()
        self.assertEqual(action.group.order, 8)
        self.assertEqual(set(r1.subgroup), set(H1))
        self.assertEqual(set(r2.subgroup), set(H2))
        np.testing.assert_array_equal(T, BUILTIN_T)
        self.assertTrue(induction_equivalent(action.group, r1, r2))

    def test_t_is_a_copy(self):
        example = builtin_d4_example()
        example.T[0, 0] = 5.0
        self.assertEqual(BUILTIN_T[0, 0], 1.0)

    def test_all_names(self):
        for name in BUILTIN_NAMES:
            with self.subTest(name=name):
                eg = builtin_graph(name)
                self.assertEqual(len(eg.leads) > 0, name.endswith("-leads"))

    def test_quotients_carry_two_leads(self):
        self.assertEqual(len(builtin_graph("d4-r1-leads").leads), 2)
        self.assertEqual(len(builtin_graph("d4-r2-leads").leads), 2)

    def test_unknown_name(self):
        with self.assertRaises(ValueError):
            builtin_graph("d4-r3")


if __name__ == "__main__":
    unittest.main()
