"""
Проверочные наборы на уменьшенных семействах; полные размеры помечены тегом slow.
"""
from django.test import SimpleTestCase, tag

from workbench.services import WorkbenchService

from .test_commands import CommandTestCase


class SuiteTests(SimpleTestCase):
    def setUp(self):
        self.service = WorkbenchService()

    def assertPassed(self, report: dict):
        self.assertTrue(report['passed'], report.get('failures') or report)

    def test_strategy_suite(self):
        report = self.service.verify('strategy', count=12, horizon=64, seed=0, width=3)
        self.assertPassed(report)
        self.assertEqual(report['results']['binary'], {'matches': 12, 'won': 12})

    def test_partition_suite(self):
        report = self.service.verify('partition', depth='3', width=3)
        self.assertPassed(report)
        three_point = report['results']['three-point']['items']
        self.assertGreater(three_point['2'], 0)
        self.assertGreater(three_point['3'], 0)
        self.assertGreater(report['results']['binary-rays']['items']['1'], 0)
        for item, count in report['items'].items():
            with self.subTest(item=item):
                self.assertGreater(count, 0)

    def test_synthesis_suite(self):
        self.assertPassed(self.service.verify('synthesis', tree='binary', depth='3', width=3))

    def test_transfer_suite(self):
        report = self.service.verify('transfer', count=10, horizon=64, seed=0, width=3)
        self.assertPassed(report)
        self.assertEqual(report['directions']['end_to_bm']['failures'], 0)

    def test_gluing_suite(self):
        report = self.service.verify('gluing', count=10, horizon=64, seed=0, width=3)
        self.assertPassed(report)
        self.assertEqual(report['space'], 'binary-rays-gdelta')

    def test_product_counterexample_suite(self):
        report = self.service.verify('product-ce', count=8, horizon=32, seed=0, width=3)
        self.assertPassed(report)
        self.assertEqual(report['won'], 8)

    def test_exchange_suite(self):
        report = self.service.verify('exchange', depth='3', width=3)
        self.assertEqual([item['threads'] for item in report['results']], [8, 64, 216])


@tag('slow')
class FullSizeSuiteTests(SimpleTestCase):
    """Наборы в полном размере; исключаются через --exclude-tag slow."""

    def setUp(self):
        self.service = WorkbenchService()

    def test_strategy(self):
        report = self.service.verify('strategy', count=100, horizon=64, seed=0, width=3)
        self.assertTrue(report['passed'], report['failures'])
        self.assertEqual(report['results']['binary'], {'matches': 100, 'won': 100})

    def test_partition_depth_five(self):
        report = self.service.verify('partition', depth='5', width=3)
        self.assertTrue(report['passed'], report['failures'])
        self.assertEqual(report['depth'], 5)
        for item, count in report['items'].items():
            with self.subTest(item=item):
                self.assertGreater(count, 0)

    def test_transfer_and_gluing(self):
        for suite in ('transfer', 'gluing'):
            with self.subTest(suite=suite):
                report = self.service.verify(suite, count=50, horizon=64, seed=0, width=3)
                self.assertTrue(report['passed'], report.get('failures') or report)

    def test_product_counterexample(self):
        report = self.service.verify('product-ce', count=50, horizon=32, seed=0, width=3)
        self.assertTrue(report['passed'], report.get('failures') or report)
        self.assertEqual(report['won'], 50)

class DeterminismTests(CommandTestCase):
    def test_reruns_are_byte_identical(self):
        for name, options in (
            ('verify', {'suite': 'strategy', 'count': 5}),
            ('play', {'space': 'product-counterexample', 'pI': 'product-ce', 'pII': 'sampled', 'horizon': 16}),
        ):
            with self.subTest(command=name):
                first, second = self.output(f'{name}-1.json'), self.output(f'{name}-2.json')
                self.call(name, output=str(first), **options)
                self.call(name, output=str(second), **options)
                self.assertEqual(first.read_bytes(), second.read_bytes())
