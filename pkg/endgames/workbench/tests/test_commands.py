import json
import tempfile

from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from workbench.repositories import ReportRepo
from workbench.services import WorkbenchService


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        workbench = {**settings.WORKBENCH, 'ARTIFACT_DIR': Path(self.tmp.name) / 'artifacts'}
        override = override_settings(WORKBENCH=workbench)
        override.enable()
        self.addCleanup(override.disable)

    def call(self, name: str, **options) -> str:
        out = StringIO()
        call_command(name, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()

    def call_failing(self, name: str, **options) -> int:
        with self.assertRaises(CommandError) as caught:
            self.call(name, **options)
        return caught.exception.returncode

    def output(self, name: str) -> Path:
        return Path(self.tmp.name) / name


class ReportRepoTests(CommandTestCase):
    def test_create_or_update_overwrites(self):
        repo = ReportRepo()
        first, created = repo.create_or_update('subbase', {'passed': False})
        self.assertTrue(created)
        second, created = repo.create_or_update('subbase', {'passed': True})
        self.assertFalse(created)
        self.assertEqual(first, second)
        self.assertEqual(first.parent.name, 'reports')
        document = json.loads(second.read_text(encoding='utf-8'))
        self.assertEqual(document, {'schema_version': 1, 'passed': True})


class ExamplesCommandTests(CommandTestCase):
    def test_lists_suites(self):
        payload = json.loads(self.call('examples'))
        self.assertIn('gluing', payload['suites'])
        self.assertIn('binary-rays', payload['spaces'])
        self.assertIn('three-point', payload['spaces'])


class PlayCommandTests(CommandTestCase):
    def test_pitz_wins(self):
        target = self.output('match.json')
        text = self.call('play', space='binary-rays', pI='leftmost', pII='pitz', horizon=32, output=str(target))
        self.assertIn('победитель II', text)
        document = json.loads(target.read_text(encoding='utf-8'))
        self.assertEqual(document['schema_version'], 1)
        self.assertEqual(document['transcript']['winner'], 'II')
        self.assertEqual(document['transcript']['audit'], [])

    def test_product_counterexample(self):
        text = self.call('play', space='product-counterexample', pI='product-ce', pII='sampled', horizon=32)
        self.assertIn('победитель I,', text)

    def test_save_writes_transcript(self):
        self.call('play', space='binary-rays', pI='leftmost', pII='pitz', horizon=8, save=True)
        saved = list((Path(self.tmp.name) / 'artifacts' / 'transcripts').glob('play-*.json'))
        self.assertEqual(len(saved), 1)

    def test_usage_errors(self):
        self.assertEqual(self.call_failing('play', space='nowhere', pI='leftmost', pII='pitz'), 2)
        self.assertEqual(self.call_failing('play', space='binary-rays', pI='leftmost', pII='nobody'), 2)
        self.assertEqual(self.call_failing('play', space='binary-rays', pI='leftmost', pII='pitz', horizon=0), 2)

    def test_pitz_needs_tree_space(self):
        self.assertEqual(self.call_failing('play', space='cofinite', pI='leftmost', pII='pitz'), 2)


class VerifyCommandTests(CommandTestCase):
    def test_subbase_suite(self):
        text = self.call('verify', suite='subbase', tree='michael_line', depth='omega+3')
        self.assertEqual(text.strip(), 'Набор subbase: пройден')

    def test_ends_and_exchange_suites(self):
        for suite in ('ends', 'exchange'):
            with self.subTest(suite=suite):
                self.assertIn('пройден', self.call('verify', suite=suite))

    def test_bad_depth(self):
        self.assertEqual(self.call_failing('verify', suite='subbase', depth='omega*2'), 2)

    def test_failed_check_exits_with_one(self):
        with mock.patch.object(WorkbenchService, 'verify', return_value={'suite': 'ends', 'passed': False}):
            self.assertEqual(self.call_failing('verify', suite='ends'), 1)


class ProductCommandTests(CommandTestCase):
    def test_certificate(self):
        text = self.call('product', trees=['binary', 'binary'], depth=3)
        self.assertIn('нитей 64, совпало 64, расхождений 0', text)

    def test_power(self):
        self.assertIn('нитей 16', self.call('product', trees=['binary'], depth=2, power=True))

    def test_power_needs_one_tree(self):
        self.assertEqual(self.call_failing('product', trees=['binary', 'baire'], power=True), 2)

    def test_tree_above_omega(self):
        self.assertEqual(self.call_failing('product', trees=['michael_line']), 2)


class EndsCommandTests(CommandTestCase):
    def test_ladder(self):
        text = self.call('ends', graph='ladder', separators=['0,0;0,1'], walks=['0,0/-/R', '0,0/-/L'])
        self.assertIn('бесконечных компонент по сепараторам: 2', text)
        self.assertIn('Лучи: separated', text)

    def test_kappa_domination(self):
        text = self.call('ends', graph='kappa_rays', kappa='5', walks=['xi:0/-/f'], vertex='ray:1:0', k=5)
        self.assertIn('Доминирование (k=5): True', text)

    def test_unknown_graph(self):
        self.assertEqual(self.call_failing('ends', graph='torus'), 2)


class SynthCommandTests(CommandTestCase):
    def test_binary(self):
        target = self.output('tc.json')
        text = self.call('synth', space='binary-rays', depth=3, output=str(target))
        self.assertIn('бисимуляция есть', text)
        document = json.loads(target.read_text(encoding='utf-8'))
        self.assertTrue(document['passed'])

    def test_checked_depth_is_reported(self):
        target = self.output('tc-4.json')
        text = self.call('synth', space='binary-rays', depth=4, output=str(target))
        self.assertIn('до глубины 3', text)
        document = json.loads(target.read_text(encoding='utf-8'))
        self.assertEqual(document['checked_depth'], 3)
        self.assertEqual(document['tree']['depth'], 4)

    def test_non_stationary_strategy(self):
        self.assertEqual(self.call_failing('synth', strategy='glued', depth=2), 2)


class InteractiveCommandTests(CommandTestCase):
    def test_scripted_moves(self):
        text = self.call('play_interactive', moves='0 -;1 -;00 -')
        self.assertIn('U> 0 -\n{[00]; [01]}', text)
        self.assertIn('Нарушение (containment)', text)
        self.assertIn('Статус: adjudicated', text)
