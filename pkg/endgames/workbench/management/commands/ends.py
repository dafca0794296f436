from workbench.serializers import EndsSerializer

from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Компоненты графа без конечных сепараторов, эквивалентность лучей и доминирование'
    serializer_class = EndsSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--graph', required=True, help='ladder, grid, binary_tree или kappa_rays')
        parser.add_argument('--kappa', help='κ для kappa_rays: число или symbolic')
        parser.add_argument('--separator', dest='separators', action='append',
                            help='Вершины сепаратора через ";" (повторяемый, по возрастанию)')
        parser.add_argument('--radius', type=int, help='Радиус усечения')
        parser.add_argument('--walk', dest='walks', action='append', help='Луч "start/stem/cycle"')
        parser.add_argument('--vertex', help='Вершина для проверки доминирования')
        parser.add_argument('--k', type=int, help='Число непересекающихся путей')

    def run(self, params: dict) -> dict:
        return self.service.ends(**params)

    def render(self, payload: dict) -> str:
        counts = ', '.join(str(item['infinite']) for item in payload['partition'])
        lines = [f'{payload["graph"]["preset"]}: бесконечных компонент по сепараторам: {counts}']
        if 'equivalence' in payload:
            lines.append(f'Лучи: {payload["equivalence"]}')
        if 'dominates' in payload:
            lines.append(f'Доминирование (k={payload["dominates"]["k"]}): {payload["dominates"]["value"]}')
        return '\n'.join(lines)
