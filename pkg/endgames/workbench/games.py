"""
Игровой движок: End-игра (в базисе и без ограничения) и игра Банаха–Мазура.

Нелегальный ход не прерывает партию исключением: нарушитель проигрывает,
нарушение записывается в протокол.
"""
import logging

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any, Hashable, Optional

from .exceptions import ProtocolError, WorkbenchError
from .spaces import (
    INFINITE, Decomposition, OpenUnion, SpaceModel, TailCertificate,
    decompose_point_plus_open, pieces_of,
)


logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

END = 'end'
END_UNRESTRICTED = 'end_unrestricted'
BANACH_MAZUR = 'banach_mazur'
GAMES = (END, END_UNRESTRICTED, BANACH_MAZUR)

WIDENINGS = 4


@dataclass(frozen=True)
class Cover:
    """Ответ игрока II в End-игре; rest: символический остаток бесконечного покрытия."""
    pieces: tuple
    rest: Any = None

    def all_pieces(self) -> tuple:
        return self.pieces + ((self.rest,) if self.rest is not None else ())


@dataclass
class Violation:
    rule: str
    message: str
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {'rule': self.rule, 'message': self.message, 'witness': self.witness}


@dataclass
class Round:
    index: int
    move: Any
    reply: Any = None
    chosen: Any = None
    key: Optional[tuple] = None


@dataclass
class MatchState:
    game: str
    players: dict = field(default_factory=dict)
    horizon: int = 64
    rounds: list = field(default_factory=list)
    status: str = 'running'
    winner: Optional[str] = None
    evidence: dict = field(default_factory=dict)

    def expects(self) -> tuple[str, str]:
        """Чей ход и какого вида: ('I', 'open'), ('II', 'cover') или ('II', 'open')."""
        if not self.rounds or self.rounds[-1].reply is not None:
            return 'I', 'open'
        return 'II', 'open' if self.game == BANACH_MAZUR else 'cover'

    @property
    def last_move(self) -> Any:
        return self.rounds[-1].move if self.rounds else None

    @property
    def last_reply(self) -> Any:
        for item in reversed(self.rounds):
            if item.reply is not None:
                return item.reply
        return None

    def with_move(self, move: Any) -> 'MatchState':
        """Копия состояния с дописанным ходом игрока I (для гипотетических ответов)."""
        return replace(self, rounds=self.rounds + [Round(len(self.rounds), move)])

    def chain(self) -> list:
        match self.game:
            case 'end':
                return [item.move for item in self.rounds if item.reply is not None]
            case 'end_unrestricted':
                return [item.chosen for item in self.rounds[1:] if item.reply is not None]
            case _:
                return [item.reply for item in self.rounds if item.reply is not None]

    def to_json(self, space: SpaceModel) -> dict[str, Any]:
        def reply_json(reply: Any) -> Any:
            if reply is None:
                return None
            if isinstance(reply, Cover):
                payload = {'pieces': [space.describe(p) for p in reply.pieces]}
                if reply.rest is not None:
                    payload['rest'] = space.describe(reply.rest)
                return payload
            return space.describe_open(reply)

        return {
            'schema_version': SCHEMA_VERSION,
            'game': self.game,
            'space': space.name,
            'players': self.players,
            'horizon': self.horizon,
            'rounds': [
                {
                    'index': item.index,
                    'move': space.describe_open(item.move),
                    'chosen': None if item.chosen is None else space.describe(item.chosen),
                    'reply': reply_json(item.reply),
                }
                for item in self.rounds
            ],
            'status': self.status,
            'winner': self.winner,
            'evidence': self.evidence,
        }


class StrategyHandle(ABC):
    """Стратегия одного из игроков; стационарная зависит только от последнего хода соперника."""
    player = 'II'
    name = 'strategy'
    stationary = True
    finite_state = True

    @abstractmethod
    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        pass

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        return ()

    def describe(self) -> dict[str, Any]:
        return {
            'name': self.name,
            'player': self.player,
            'stationary': self.stationary,
            'finite_state': self.finite_state,
        }


def _nonempty_violation(space: SpaceModel, move: Any, rule: str = 'nonempty') -> Optional[Violation]:
    for piece in pieces_of(move):
        if piece is None:
            return Violation(rule, 'Пустое множество')
        try:
            space.witness_point(piece)
        except WorkbenchError:
            return Violation(rule, 'Множество пусто', {'set': space.describe(piece)})
    return None


def _basis_violation(space: SpaceModel, move: Any, basis: Any) -> Optional[Violation]:
    if basis is None:
        return None
    for piece in pieces_of(move):
        if not basis.admits(piece):
            return Violation('basis', 'Множество не из базиса игры', {'set': space.describe(piece)})
    return None


def locate(space: SpaceModel, cover: Cover, move: Any) -> Optional[Any]:
    """Элемент покрытия, содержащий ход; None: такого нет."""
    for piece in cover.all_pieces():
        if space.open_subset(move, piece):
            return piece
    return None


def validate_move(space: SpaceModel, state: MatchState, move: Any, basis: Any = None) -> Optional[Violation]:
    """
    Проверяет очередной ход по правилам игры.

    Args:
        space (SpaceModel): Модель пространства.
        state (MatchState): Состояние партии до хода.
        move: Открытое множество игрока I, покрытие (Cover) или открытое множество игрока II.
        basis: Базис игры с методом admits (None: все базисные множества модели).

    Returns:
        Violation | None: Нарушенное правило со свидетелем либо None.
    """
    if state.status != 'running':
        return Violation('state', 'Партия уже завершена')
    player, kind = state.expects()
    if kind == 'cover':
        return _validate_cover(space, state.last_move, move, basis)
    if move is None:
        return Violation('nonempty', 'Ход отсутствует')
    if state.game == END and player == 'I' and isinstance(move, OpenUnion):
        return Violation('basic', 'В End-игре игрок I объявляет базисное множество')
    if isinstance(move, (Cover, list, tuple)):
        return Violation('type', 'Ожидается открытое множество')
    violation = _nonempty_violation(space, move) or _basis_violation(space, move, basis)
    if violation:
        return violation
    if player == 'II':
        if not space.open_subset(move, state.last_move):
            return Violation('containment', 'V_n не содержится в U_n', {'move': space.describe_open(move)})
        return None
    if not state.rounds:
        return None
    previous = state.last_reply
    if state.game == BANACH_MAZUR:
        if not space.open_subset(move, previous):
            return Violation('containment', 'U_n не содержится в V_{n-1}', {'move': space.describe_open(move)})
        return None
    if locate(space, previous, move) is None:
        return Violation('containment', 'U_n не содержится ни в одном элементе покрытия',
                         {'move': space.describe_open(move)})
    return None


def _validate_cover(space: SpaceModel, target: Any, cover: Any, basis: Any) -> Optional[Violation]:
    if not isinstance(cover, Cover):
        return Violation('type', 'Ожидается покрытие')
    pieces = cover.all_pieces()
    if not pieces:
        return Violation('coverage', 'Пустое покрытие')
    for piece in pieces:
        if isinstance(piece, OpenUnion):
            return Violation('basic', 'Элемент покрытия не базисный')
        violation = _nonempty_violation(space, piece) or _basis_violation(space, piece, basis)
        if violation:
            return violation
        if not space.open_subset(piece, target):
            return Violation('piece-containment', 'Элемент покрытия выходит за U_n', {'piece': space.describe(piece)})
    for i, first in enumerate(pieces):
        for second in pieces[i + 1:]:
            if not space.disjoint(first, second):
                common = space.intersect(first, second)
                return Violation('disjointness', 'Элементы покрытия пересекаются', {
                    'first': space.describe(first),
                    'second': space.describe(second),
                    'point': space.point_json(space.witness_point(common)),
                })
    remainder = space.subtract(pieces_of(target), pieces)
    if remainder:
        witness = space.witness_point(remainder[0])
        return Violation('coverage', 'Покрытие не покрывает U_n', {'point': space.point_json(witness)})
    return None


def find_period(keys: list) -> Optional[TailCertificate]:
    """Минимальный период p, затем минимальное начало a, при условии len(keys) − a ≥ 2p."""
    size = len(keys)
    for period in range(1, size // 2 + 1):
        for start in range(0, size - 2 * period + 1):
            if all(keys[n] == keys[n + period] for n in range(start, size - period)):
                return TailCertificate(start, period)
    return None


def ask_strategy(handle: StrategyHandle, space: SpaceModel, state: MatchState, width: Optional[int]) -> tuple[Any, Optional[Violation]]:
    try:
        return handle.move(space, state, width), None
    except WorkbenchError as error:
        return None, Violation('strategy', error.detail, {'code': error.code, **error.as_dict()['witness']})


def forfeit(state: MatchState, player: str, violation: Violation) -> MatchState:
    state.status = 'adjudicated'
    state.winner = 'II' if player == 'I' else 'I'
    state.evidence = {'forfeit': {'player': player, **violation.to_json()}}
    logger.info('Игрок %s проиграл из-за нарушения правила %s', player, violation.rule)
    return state


def widen_cover(space: SpaceModel, state: MatchState, player_two: StrategyHandle,
                move: Any, width: Optional[int]) -> None:
    previous = state.rounds[-1]
    if not isinstance(previous.reply, Cover) or previous.reply.rest is None:
        return
    if locate(space, Cover(previous.reply.pieces), move) is not None:
        return
    base = width or 3
    before = replace(state, rounds=state.rounds[:-1] + [Round(previous.index, previous.move, chosen=previous.chosen)])
    for step in range(1, WIDENINGS + 1):
        cover, violation = ask_strategy(player_two, space, before, base * 2 ** step)
        if violation is None and isinstance(cover, Cover) and locate(space, Cover(cover.pieces), move) is not None:
            logger.debug('Покрытие расширено до ширины %d', base * 2 ** step)
            previous.reply = cover
            return


def play_end_match(space: SpaceModel, player_one: StrategyHandle, player_two: StrategyHandle,
                   horizon: int = 64, basis: Any = None, unrestricted: bool = False,
                   width: Optional[int] = None) -> MatchState:
    """
    Разыгрывает End-игру не более horizon раундов и выносит вердикт.

    Returns:
        MatchState: Протокол партии со статусом adjudicated или undetermined.
    """
    game = END_UNRESTRICTED if unrestricted else END
    state = MatchState(game, {'I': player_one.describe(), 'II': player_two.describe()}, horizon)
    for index in range(horizon):
        move, violation = ask_strategy(player_one, space, state, width)
        if violation is None and index and move is not None:
            widen_cover(space, state, player_two, move, width)
        violation = violation or validate_move(space, state, move, basis)
        if violation:
            return forfeit(state, 'I', violation)
        chosen = locate(space, state.last_reply, move) if index else None
        state.rounds.append(Round(index, move, chosen=chosen))
        cover, violation = ask_strategy(player_two, space, state, width)
        violation = violation or validate_move(space, state, cover, basis)
        if violation:
            return forfeit(state, 'II', violation)
        state.rounds[-1].reply = cover
        element = move if game == END else chosen
        if element is not None:
            state.rounds[-1].key = (
                player_one.state_key(space, state),
                player_two.state_key(space, state),
                space.relative_key(element),
            )
    return adjudicate(space, state, player_one, player_two)


def play_bm_match(space: SpaceModel, player_one: StrategyHandle, player_two: StrategyHandle,
                  horizon: int = 64, basis: Any = None, width: Optional[int] = None) -> MatchState:
    """Игра Банаха–Мазура: II выигрывает, если пересечение V_n непусто."""
    state = MatchState(BANACH_MAZUR, {'I': player_one.describe(), 'II': player_two.describe()}, horizon)
    for index in range(horizon):
        move, violation = ask_strategy(player_one, space, state, width)
        violation = violation or validate_move(space, state, move, basis)
        if violation:
            return forfeit(state, 'I', violation)
        state.rounds.append(Round(index, move))
        reply, violation = ask_strategy(player_two, space, state, width)
        if violation is None and isinstance(reply, OpenUnion):
            violation = Violation('basic', 'Игрок II отвечает базисным множеством')
        violation = violation or validate_move(space, state, reply, basis)
        if violation:
            return forfeit(state, 'II', violation)
        state.rounds[-1].reply = reply
        state.rounds[-1].key = (
            player_one.state_key(space, state),
            player_two.state_key(space, state),
            space.relative_key(reply),
        )
    return adjudicate(space, state, player_one, player_two)


def adjudicate(space: SpaceModel, state: MatchState, player_one: StrategyHandle,
               player_two: StrategyHandle) -> MatchState:
    """Экстраполирует периодический хвост и выносит точный вердикт."""
    if state.status != 'running':
        return state
    chain = state.chain()
    keys = [item.key for item in state.rounds if item.key is not None]
    if not (player_one.finite_state and player_two.finite_state):
        state.status = 'undetermined'
        state.evidence = {'reason': 'стратегия без конечного числа состояний', 'horizon': state.horizon}
        return state
    certificate = find_period(keys)
    try:
        decomposition = decompose_point_plus_open(space, chain, certificate)
    except ProtocolError as error:
        state.status = 'undetermined'
        state.evidence = {'reason': error.detail, 'horizon': state.horizon}
        return state
    if decomposition.verdict == 'not-adjudicable':
        state.status = 'undetermined'
        state.evidence = {'reason': decomposition.reason, 'horizon': state.horizon}
        return state
    state.status = 'adjudicated'
    if state.game == BANACH_MAZUR:
        limit = decomposition.limit
        state.winner = 'II' if limit.total > 0 else 'I'
    else:
        state.winner = 'II' if decomposition.unique else 'I'
    state.evidence = {
        'certificate': {'start': certificate.start, 'period': certificate.period},
        'decomposition': decomposition.to_json(space),
        'membership_mismatches': verify_limit_membership(space, chain, decomposition),
    }
    if state.game == BANACH_MAZUR:
        state.evidence['intersection_nonempty'] = decomposition.limit.total > 0
        state.evidence['intersection_infinite'] = decomposition.limit.total == INFINITE
    logger.info('Партия %s на %s: победитель %s', state.game, space.name, state.winner)
    return state


def verify_limit_membership(space: SpaceModel, chain: list, decomposition: Decomposition,
                            depth: int = 4, cycle_length: int = 2) -> list:
    """
    Сверяет принадлежность ⋂ цепи и {x} ∪ A на выборке точек.

    Точки, про которые символическое описание не выносит суждения, пропускаются.
    """
    limit = decomposition.limit
    if limit is None:
        return []
    mismatches = []
    for point in space.sample_points(depth, cycle_length):
        expected = limit.member(space, point)
        if expected is None:
            continue
        actual = all(space.contains(element, point) for element in chain)
        if actual != expected:
            mismatches.append(space.point_json(point))
    return mismatches


def audit_transcript(space: SpaceModel, state: MatchState, basis: Any = None) -> list[Violation]:
    """Переигрывает протокол через validate_move; пустой список: протокол легален."""
    replay = MatchState(state.game, state.players, state.horizon)
    found = []
    for item in state.rounds:
        violation = validate_move(space, replay, item.move, basis)
        if violation:
            found.append(violation)
        replay.rounds.append(Round(item.index, item.move, chosen=item.chosen))
        if item.reply is None:
            break
        violation = validate_move(space, replay, item.reply, basis)
        if violation:
            found.append(violation)
        replay.rounds[-1].reply = item.reply
    return found
