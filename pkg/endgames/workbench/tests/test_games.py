from django.test import SimpleTestCase

from workbench.games import (
    END, MatchState, audit_transcript, find_period, play_bm_match, play_end_match, validate_move,
)
from workbench.order_tree import Node, tree_from_preset
from workbench.spaces import BasicOpen, TreeSpace, generated_basis
from workbench.strategies import (
    ForfeitStrategy, GapStrategy, OverlapStrategy, PitzStrategy, ScriptedPlayer, ShrinkStrategy, leftmost_descent,
)


class EndGameTests(SimpleTestCase):
    def setUp(self):
        self.space = TreeSpace(tree_from_preset('binary'))

    def test_pitz_cover_of_cylinder(self):
        cover = PitzStrategy().cover(self.space, self.space.parse_basic('0 -'))
        self.assertEqual(cover.pieces, (BasicOpen(Node((0, 0))), BasicOpen(Node((0, 1)))))
        self.assertIsNone(cover.rest)

    def test_leftmost_descent_loses_to_pitz(self):
        state = play_end_match(self.space, leftmost_descent(), PitzStrategy(), 32)
        self.assertEqual(state.status, 'adjudicated')
        self.assertEqual(state.winner, 'II')
        self.assertEqual(state.evidence['membership_mismatches'], [])
        self.assertEqual(state.evidence['decomposition']['verdict'], 'unique')
        self.assertEqual(audit_transcript(self.space, state), [])

    def test_move_outside_cover_forfeits_player_one(self):
        state = play_end_match(self.space, ScriptedPlayer(['0 -', '1 -']), PitzStrategy(), 8)
        self.assertEqual(state.winner, 'II')
        self.assertEqual(state.evidence['forfeit']['player'], 'I')
        self.assertEqual(state.evidence['forfeit']['rule'], 'containment')
        self.assertEqual(len(state.rounds), 1)

    def test_illegal_covers_forfeit_player_two(self):
        cases = {'disjointness': OverlapStrategy(), 'coverage': GapStrategy(), 'strategy': ForfeitStrategy('II')}
        for rule, strategy in cases.items():
            with self.subTest(rule=rule):
                state = play_end_match(self.space, leftmost_descent(), strategy, 8)
                self.assertEqual(state.winner, 'I')
                self.assertEqual(state.evidence['forfeit']['player'], 'II')
                self.assertEqual(state.evidence['forfeit']['rule'], rule)

    def test_validate_move_rejects_non_cover(self):
        state = MatchState(END).with_move(self.space.parse_basic('0 -'))
        violation = validate_move(self.space, state, self.space.parse_basic('00 -'))
        self.assertEqual(violation.rule, 'type')

    def test_generated_basis_admits_tightened_move(self):
        basis = generated_basis(self.space, [Node((0,)), Node((0, 1)), Node((1,))], depth=3)
        move = self.space.normalize(Node((0,)), [Node((0, 1))])
        self.assertIsNone(validate_move(self.space, MatchState(END), move, basis=basis))
        violation = validate_move(self.space, MatchState(END), self.space.parse_basic('000 -'), basis=basis)
        self.assertEqual(violation.rule, 'basis')

    def test_transcript_json(self):
        state = play_end_match(self.space, leftmost_descent(), PitzStrategy(), 4)
        payload = state.to_json(self.space)
        self.assertEqual(payload['schema_version'], 1)
        self.assertEqual(payload['space'], 'binary-rays')
        self.assertEqual(payload['rounds'][0]['reply']['pieces'][0], {'anchor': '00', 'holes': []})


class BanachMazurTests(SimpleTestCase):
    def test_nonempty_intersection_is_a_win_for_player_two(self):
        space = TreeSpace(tree_from_preset('binary'))
        state = play_bm_match(space, leftmost_descent(), ShrinkStrategy(), 16)
        self.assertEqual(state.winner, 'II')
        self.assertTrue(state.evidence['intersection_nonempty'])
        self.assertEqual(audit_transcript(space, state), [])


class FindPeriodTests(SimpleTestCase):
    def test_minimal_period_then_start(self):
        certificate = find_period([1, 2, 3, 2, 3, 2, 3])
        self.assertEqual((certificate.start, certificate.period), (1, 2))

    def test_tail_too_short(self):
        self.assertIsNone(find_period([1, 2, 3]))
