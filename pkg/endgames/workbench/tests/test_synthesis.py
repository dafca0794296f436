from unittest import mock

from django.test import SimpleTestCase

from workbench.exceptions import ConfigurationError, EmptySetError, UnsupportedError
from workbench.order_tree import tree_from_preset
from workbench.spaces import ExplicitSpace, TreeSpace
from workbench.strategies import GluedStrategy, PitzStrategy
from workbench.synthesis import (
    Subbase, build_tc, dichotomy_case, kprime_partition, tc_bisimulation, verify_synth_subbase,
)


class KPrimeTests(SimpleTestCase):
    def setUp(self):
        self.space = ExplicitSpace([0, 1, 2], {'A': [1, 2], 'B': [1], 'C': [2]}, label='three-point')
        self.subbase = Subbase(self.space)

    def test_dichotomy(self):
        self.assertEqual(dichotomy_case(self.subbase, self.space.whole()).point, 0)
        self.assertEqual(dichotomy_case(self.subbase, self.space.normalize('A', ['B'])).case, 'i')
        with self.assertRaises(EmptySetError):
            dichotomy_case(self.subbase, None)

    def test_whole_space_is_split_around_subbasic(self):
        result = kprime_partition(self.subbase, self.space.whole())
        self.assertEqual(result.item, 4)
        self.assertEqual([self.space.members(p) for p in result.pieces], [{1, 2}, {0}])

    def test_enlarged_holes(self):
        result = kprime_partition(self.subbase, self.space.normalize('X', ['B']))
        self.assertEqual(result.item, 2)
        self.assertEqual([self.space.members(p) for p in result.pieces], [{0}, {2}])

    def test_singleton(self):
        result = kprime_partition(self.subbase, self.space.normalize('B'))
        self.assertEqual(result.item, 3)
        self.assertEqual(result.point, 1)

    def test_binary_root_uses_maximal_subbasics(self):
        space = TreeSpace(tree_from_preset('binary'))
        result = kprime_partition(Subbase(space), space.whole())
        self.assertEqual(result.item, 1)
        self.assertEqual(len(result.pieces), 2)

    def test_rho_table_must_cover_anchor(self):
        subbase = Subbase.from_json(self.space, {'C': ['A']})
        with self.assertRaises(ConfigurationError):
            kprime_partition(subbase, self.space.normalize('X', ['B']))


class TcSynthesisTests(SimpleTestCase):
    def setUp(self):
        self.space = TreeSpace(tree_from_preset('binary'))

    def test_binary_levels(self):
        tree = build_tc(Subbase(self.space), PitzStrategy(), depth=4)
        self.assertEqual(sum(len(tree.level(i)) for i in range(5)), 341)
        self.assertEqual(len(tree.level(1)), 4)

    def test_bisimulation_and_report(self):
        tree = build_tc(Subbase(self.space), PitzStrategy(), depth=3)
        bisimulation = tc_bisimulation(tree)
        self.assertTrue(bisimulation.passed)
        self.assertGreater(bisimulation.matched, 0)
        self.assertTrue(verify_synth_subbase(tree, depth=3).passed)

    def test_missing_neighbourhoods_fail_local_basis(self):
        tree = build_tc(Subbase(self.space), PitzStrategy(), depth=3)
        with mock.patch('workbench.synthesis._neighbourhoods', return_value=[]):
            report = verify_synth_subbase(tree, depth=3)
        self.assertFalse(report.passed)
        self.assertGreater(report.local_basis['fail'], 0)
        self.assertIn('open', report.local_basis['witnesses'][0])

    def test_non_stationary_strategy_rejected(self):
        with self.assertRaises(UnsupportedError):
            build_tc(Subbase(self.space), GluedStrategy(), depth=2)
