from typing import Iterator, Optional

from workbench.games import audit_transcript
from workbench.repl import PROMPT, repl_step, start_session
from workbench.repositories import TranscriptRepo
from workbench.serializers import InteractiveSerializer

from ._base import WorkbenchCommand


class Command(WorkbenchCommand):
    help = 'Интерактивная End-игра: ходы игрока I вводятся с клавиатуры или через --moves'
    serializer_class = InteractiveSerializer
    repo_class = TranscriptRepo

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--space', help='Селектор пространства (по умолчанию binary-rays)')
        parser.add_argument('--pII', help='Стратегия игрока II (по умолчанию pitz)')
        parser.add_argument('--horizon', type=int, help='Число раундов до судейства')
        parser.add_argument('--moves', help='Ходы через ";", например "0 -;00 -;quit"')

    def lines(self, moves: Optional[str]) -> Iterator[str]:
        if moves is not None:
            yield from (part for part in moves.split(';') if part.strip())
            yield 'quit'
            return
        while True:
            try:
                yield input(PROMPT)
            except EOFError:
                yield 'quit'
                return

    def run(self, params: dict) -> dict:
        space = self.service.get_space(params['space'], params['width'])
        player_two = self.service.get_strategy(params['pII'], space, 'II', params['seed'])
        session = start_session(space, player_two, params['horizon'], params['width'])
        for text in self.lines(params.get('moves')):
            if params.get('moves') is not None:
                self.stdout.write(f'{PROMPT}{text}')
            session, reply = repl_step(session, text)
            self.stdout.write(reply)
            if session.finished:
                break
        violations = [item.to_json() for item in audit_transcript(space, session.state)]
        transcript = session.state.to_json(space)
        transcript['audit'] = violations
        return {'transcript': transcript, 'inputs': session.log, 'passed': not violations}

    def render(self, payload: dict) -> str:
        return f'Протокол: {len(payload["transcript"]["rounds"])} раундов'
