from django.test import SimpleTestCase

from workbench.exceptions import UnsupportedError
from workbench.games import play_end_match
from workbench.order_tree import tree_from_preset
from workbench.providers import product_counterexample_space
from workbench.services import counterexample_shape
from workbench.spaces import TreeSpace
from workbench.strategies import (
    BMFromEnd, GluedStrategy, PitzStrategy, ProductCounterexample, ProductSplitStrategy, automaton_family,
    gdelta_glue_strategy, product_split_family,
)


class AutomatonFamilyTests(SimpleTestCase):
    def setUp(self):
        self.space = TreeSpace(tree_from_preset('binary'))

    def test_family_is_deterministic(self):
        first = [(a.target, a.schedule) for a in automaton_family(self.space, 20, seed=3)]
        second = [(a.target, a.schedule) for a in automaton_family(self.space, 20, seed=3)]
        self.assertEqual(first, second)
        self.assertEqual(len(first), 20)

    def test_targets_are_points(self):
        for automaton in automaton_family(self.space, 20):
            self.assertTrue(self.space.is_point(automaton.target))

    def test_finite_tree_has_no_targets(self):
        space = TreeSpace(tree_from_preset('finite', {'alphabet': 2, 'depth': 2}), mode='branches')
        with self.assertRaises(UnsupportedError):
            automaton_family(space, 5)

    def test_pitz_beats_automata(self):
        for automaton in automaton_family(self.space, 10, seed=1):
            with self.subTest(automaton=automaton.name):
                state = play_end_match(self.space, automaton, PitzStrategy(), 64)
                self.assertEqual(state.winner, 'II')
                self.assertEqual(state.evidence['membership_mismatches'], [])


class ProductCounterexampleTests(SimpleTestCase):
    def test_family_size(self):
        family = product_split_family(50, seed=0)
        self.assertEqual(len(family), 50)
        self.assertEqual(len({item.name for item in family}), 50)

    def test_unknown_mode(self):
        with self.assertRaises(UnsupportedError):
            ProductSplitStrategy('diagonal')

    def test_player_one_wins_against_stationary_splits(self):
        space = product_counterexample_space()
        for psi in product_split_family(6, seed=2):
            with self.subTest(strategy=psi.name):
                state = play_end_match(space, ProductCounterexample(), psi, 32)
                self.assertEqual(state.winner, 'I')
                self.assertTrue(counterexample_shape(state))


class GluingTests(SimpleTestCase):
    def test_glued_strategy_is_not_stationary(self):
        glued = GluedStrategy()
        self.assertFalse(glued.stationary)
        self.assertTrue(glued.finite_state)
        self.assertFalse(GluedStrategy(partition='diagonal').finite_state)

    def test_bm_transfer_requires_stationary_strategy(self):
        with self.assertRaises(UnsupportedError):
            BMFromEnd(GluedStrategy())

    def test_diagonal_blocks_visit_every_index(self):
        glued = GluedStrategy(partition='diagonal')
        self.assertEqual([glued.block(n) for n in range(6)], [0, 1, 0, 2, 1, 0])

    def test_glued_strategy_wins_on_subspace(self):
        parent = TreeSpace(tree_from_preset('binary'))
        subspace, glued = gdelta_glue_strategy(parent)
        self.assertEqual(subspace.name, 'binary-rays-gdelta')
        played = 0
        for automaton in automaton_family(parent, 12, seed=0):
            if not subspace.is_point(automaton.target):
                continue
            played += 1
            state = play_end_match(subspace, automaton, glued, 64)
            self.assertEqual(state.winner, 'II', automaton.name)
        self.assertGreater(played, 0)
