"""
Пошаговая End-игра с человеком в роли игрока I.

repl_step: чистая функция: строка ввода и сессия на входе, новая сессия и
текст ответа на выходе. Ввод и вывод делает команда play_interactive.
"""
import logging

from dataclasses import dataclass, field, replace
from typing import Any, Optional

from .exceptions import ProtocolError, WorkbenchError
from .games import (
    MatchState, Round, StrategyHandle, Violation, adjudicate, ask_strategy, audit_transcript, forfeit, locate,
    validate_move, widen_cover,
)
from .spaces import SpaceModel


logger = logging.getLogger(__name__)

QUIT = ('quit', 'exit', 'q')
PROMPT = 'U> '


@dataclass
class Session:
    space: SpaceModel
    player_two: StrategyHandle
    state: MatchState
    width: Optional[int] = None
    log: list = field(default_factory=list)

    @property
    def finished(self) -> bool:
        return self.state.status != 'running'


class HumanPlayer(StrategyHandle):
    """Ходы игрока I вводятся вручную; при судействе хвост экстраполируется по найденному периоду."""
    player = 'I'
    name = 'human'
    stationary = False

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        raise ProtocolError('Ход человека не вычисляется')


def start_session(space: SpaceModel, player_two: StrategyHandle, horizon: int,
                  width: Optional[int] = None) -> Session:
    state = MatchState('end', {'I': HumanPlayer().describe(), 'II': player_two.describe()}, horizon)
    return Session(space, player_two, state, width)


def render_cover(space: SpaceModel, cover: Any, width: Optional[int]) -> str:
    """Покрытие в одну строку: не более width элементов, остаток: символически."""
    if cover is None:
        return '-'
    limit = width or len(cover.pieces)
    shown = [_render_basic(space, piece) for piece in cover.pieces[:limit]]
    hidden = cover.pieces[limit:]
    if hidden:
        shown.append(f'... (+{len(hidden)})')
    if cover.rest is not None:
        shown.append(f'rest {_render_basic(space, cover.rest)}')
    return '{' + '; '.join(shown) + '}'


def _render_basic(space: SpaceModel, basic: Any) -> str:
    payload = space.describe(basic)
    if isinstance(payload, dict) and 'anchor' in payload:
        holes = ','.join(map(str, payload['holes'])) or '-'
        anchor = payload['anchor'] if payload['anchor'] != '' else 'root'
        return f'[{anchor}]∖{holes}' if payload['holes'] else f'[{anchor}]'
    return str(payload)


def render_violation(violation: Violation) -> str:
    witness = ', '.join(f'{key}={value}' for key, value in sorted(violation.witness.items()))
    return f'Нарушение ({violation.rule}): {violation.message}' + (f' [{witness}]' if witness else '')


def summary(session: Session) -> str:
    state = session.state
    violations = audit_transcript(session.space, state)
    lines = [f'Статус: {state.status}; победитель: {state.winner or "-"}; раундов: {len(state.rounds)}']
    if reason := state.evidence.get('reason'):
        lines.append(f'Причина: {reason}')
    lines.append(f'Аудит протокола: {"нарушений нет" if not violations else len(violations)}')
    return '\n'.join(lines)


def _finish(session: Session) -> Session:
    state = adjudicate(session.space, session.state, HumanPlayer(), session.player_two)
    return replace(session, state=state)


def repl_step(session: Session, text: str) -> tuple[Session, str]:
    """
    Один шаг диалога.

    Нераспознанный ввод и нелегальный ход состояние не меняют; после
    'quit' или по достижении горизонта партия судится и выводится итог.
    """
    if session.finished:
        return session, summary(session)
    text = text.strip()
    if text.lower() in QUIT:
        session = _finish(session)
        return session, summary(session)
    space, state = session.space, session.state
    try:
        move = space.parse_basic(text)
    except WorkbenchError as error:
        return session, f'Не удалось разобрать ход: {error.detail}. Формат: "<якорь> <дыры через запятую|->"'
    if state.rounds:
        state = replace(state, rounds=state.rounds[:-1] + [replace(state.rounds[-1])])
        widen_cover(space, state, session.player_two, move, session.width)
    violation = validate_move(space, state, move)
    if violation:
        return session, render_violation(violation)

    chosen = locate(space, state.last_reply, move) if state.rounds else None
    state = replace(state, rounds=state.rounds + [Round(len(state.rounds), move, chosen=chosen)])
    cover, violation = ask_strategy(session.player_two, space, state, session.width)
    violation = violation or validate_move(space, state, cover)
    if violation:
        logger.warning('Стратегия %s нарушила правила: %s', session.player_two.name, violation.message)
        session = replace(session, state=forfeit(state, 'II', violation))
        return session, render_violation(violation) + '\n' + summary(session)
    state.rounds[-1].reply = cover
    state.rounds[-1].key = (
        HumanPlayer().state_key(space, state),
        session.player_two.state_key(space, state),
        space.relative_key(move),
    )
    session = replace(session, state=state, log=session.log + [text])
    reply = render_cover(space, cover, session.width)
    if len(state.rounds) >= state.horizon:
        session = _finish(session)
        return session, reply + '\n' + summary(session)
    return session, reply
