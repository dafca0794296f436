from django.test import SimpleTestCase

from workbench.order_tree import tree_from_preset
from workbench.repl import HumanPlayer, repl_step, start_session
from workbench.spaces import TreeSpace
from workbench.strategies import GapStrategy, PitzStrategy


class ReplStepTests(SimpleTestCase):
    def setUp(self):
        self.space = TreeSpace(tree_from_preset('binary'))
        self.session = start_session(self.space, PitzStrategy(), horizon=8)

    def test_legal_move_shows_cover(self):
        session, reply = repl_step(self.session, '0 -')
        self.assertEqual(reply, '{[00]; [01]}')
        self.assertEqual(len(session.state.rounds), 1)
        self.assertEqual(session.log, ['0 -'])

    def test_illegal_move_keeps_state(self):
        session, _ = repl_step(self.session, '0 -')
        after, reply = repl_step(session, '1 -')
        self.assertTrue(reply.startswith('Нарушение (containment)'))
        self.assertIs(after, session)
        self.assertEqual(len(after.state.rounds), 1)

    def test_unparsed_input_keeps_state(self):
        session, reply = repl_step(self.session, '0 x')
        self.assertIs(session, self.session)
        self.assertTrue(reply.startswith('Не удалось разобрать ход'))

    def test_quit_adjudicates(self):
        session = self.session
        for text in ('0 -', '00 -', '000 -', '0000 -', 'quit'):
            session, reply = repl_step(session, text)
        self.assertTrue(session.finished)
        self.assertEqual(session.state.winner, 'II')
        self.assertIn('Статус: adjudicated', reply)

    def test_horizon_ends_session(self):
        session = start_session(self.space, PitzStrategy(), horizon=2)
        session, _ = repl_step(session, '0 -')
        session, reply = repl_step(session, '00 -')
        self.assertTrue(session.finished)
        self.assertIn('Статус:', reply)

    def test_illegal_cover_forfeits_player_two(self):
        session = start_session(self.space, GapStrategy(), horizon=8)
        session, reply = repl_step(session, 'ε -')
        self.assertEqual(session.state.winner, 'I')
        self.assertIn('coverage', reply)

    def test_human_is_not_stationary(self):
        self.assertFalse(HumanPlayer().stationary)
        self.assertTrue(HumanPlayer().finite_state)
