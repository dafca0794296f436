from workbench.serializers import SUITE_CHOICES, VerifySerializer

from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Запускает проверочный набор и пишет отчет'
    serializer_class = VerifySerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--suite', required=True, choices=SUITE_CHOICES, help='Проверочный набор')
        parser.add_argument('--tree', help='Пресет дерева (для subbase и synthesis)')
        parser.add_argument('--depth', help='Глубина: "5", "omega" или "omega+3"')
        parser.add_argument('--count', type=int, help='Размер семейства стратегий')
        parser.add_argument('--horizon', type=int, help='Число раундов в каждой партии')

    def run(self, params: dict) -> dict:
        params = dict(params)
        return self.service.verify(params.pop('suite'), **params)

    def render(self, payload: dict) -> str:
        verdict = 'пройден' if payload['passed'] else 'НЕ пройден'
        failures = payload.get('failures')
        tail = f', отказов: {len(failures)}' if failures is not None else ''
        return f'Набор {payload["suite"]}: {verdict}{tail}'
