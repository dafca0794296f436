from workbench.serializers import ProductSerializer

from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Сверяет дерево поуровневого произведения с произведением пространств ветвей'
    serializer_class = ProductSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--tree', dest='trees', action='append', help='Пресет сомножителя (повторяемый)')
        parser.add_argument('--depth', type=int, help='Глубина сертификата')
        parser.add_argument('--power', action='store_true', default=None, help='Счетная степень одного дерева')

    def run(self, params: dict) -> dict:
        return self.service.product(**params)

    def render(self, payload: dict) -> str:
        if 'certificate' in payload:
            certificate = payload['certificate']
            return (f'{" × ".join(payload["trees"])}: нитей {certificate["threads"]}, '
                    f'совпало {certificate["matched"]}, расхождений {len(certificate["mismatches"])}')
        return f'Степень {payload["system"]["label"]}: нитей {payload["threads"]}'
