from workbench.serializers import SynthSerializer

from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Строит дерево T_C по выигрышной стратегии игрока II и проверяет его подбазу'
    serializer_class = SynthSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--space', help='Селектор пространства (по умолчанию binary-rays)')
        parser.add_argument('--strategy', help='Стратегия игрока II (по умолчанию pitz)')
        parser.add_argument('--depth', type=int, help='Число уровней T_C')
        parser.add_argument('--rho', help='JSON-файл с таблицей конфинальных последовательностей')

    def run(self, params: dict) -> dict:
        return self.service.synth(**params)

    def render(self, payload: dict) -> str:
        tree = payload['tree']
        return (f'T_C: узлов {len(tree["nodes"])}, уровней {tree["depth"]}; '
                f'подбаза {"проверена" if payload["report"]["passed"] else "НЕ проверена"} '
                f'до глубины {payload["checked_depth"]}; '
                f'бисимуляция {"есть" if payload["bisimulation"]["passed"] else "НЕТ"}')
