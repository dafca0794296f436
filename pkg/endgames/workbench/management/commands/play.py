from workbench.repositories import TranscriptRepo
from workbench.serializers import GAME_CHOICES, MatchSummarySerializer, PlaySerializer

from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Разыгрывает и судит партию End-игры или игры Банаха–Мазура'
    serializer_class = PlaySerializer
    repo_class = TranscriptRepo

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--space', required=True, help='Селектор пространства, например binary-rays')
        parser.add_argument('--pI', required=True, help='Стратегия игрока I')
        parser.add_argument('--pII', required=True, help='Стратегия игрока II')
        parser.add_argument('--game', choices=GAME_CHOICES, help='Вид игры (по умолчанию end)')
        parser.add_argument('--horizon', type=int, help='Число раундов до судейства')

    def run(self, params: dict) -> dict:
        return self.service.play(**params)

    def render(self, payload: dict) -> str:
        transcript = payload['transcript']
        summary = MatchSummarySerializer(data={
            'game': transcript['game'],
            'space': transcript['space'],
            'status': transcript['status'],
            'winner': transcript['winner'],
            'rounds': len(transcript['rounds']),
            'violations': len(transcript['audit']),
        })
        summary.is_valid(raise_exception=True)
        data = summary.validated_data
        return (f'{data["game"]} на {data["space"]}: статус {data["status"]}, победитель {data["winner"] or "-"}, '
                f'раундов {data["rounds"]}, нарушений в протоколе {data["violations"]}')
