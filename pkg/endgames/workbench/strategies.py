"""
Стратегии игроков и преобразования стратегий.

Стратегии: неизменяемые объекты; состояние партии передается снаружи,
поэтому одну стратегию можно использовать в нескольких партиях.
"""
import itertools
import logging
import math
import random

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Optional

from .exceptions import ProtocolError, UnsupportedError, WorkbenchError
from .games import (
    BANACH_MAZUR, END, Cover, MatchState, Round, StrategyHandle, adjudicate, ask_strategy, forfeit,
    locate, validate_move,
)
from .order_tree import ROOT, Node, RayDescriptor
from .spaces import (
    BasicOpen, Box, NestedSpace, OpenUnion, ProductSpace, SpaceModel, SubspaceModel,
    TreeSpace, base_space, pieces_of, refine_to_disjoint_basics,
)


logger = logging.getLogger(__name__)

ACTIONS = ('stay', 'deepen', 'hole', 'kill', 'enter')
GLUE_PUNCTURES = (
    RayDescriptor((), (0,)),
    RayDescriptor((), (1,)),
    RayDescriptor((0,), (1,)),
    RayDescriptor((1,), (0,)),
    RayDescriptor((0, 0), (1,)),
    RayDescriptor((0, 1), (0,)),
)


def _trace(space: SpaceModel, pieces: Iterable) -> list:
    """Оставляет элементы с непустым следом в (под)пространстве."""
    return [piece for piece in pieces if piece is not None and space.intersect(piece, piece) is not None]


def _dedupe(pieces: Iterable) -> list:
    return list(dict.fromkeys(pieces))


@dataclass(frozen=True)
class TypedCoverPiece:
    kind: str
    node: Node
    holes: tuple
    realized: Optional[BasicOpen]


def split_basic(space: NestedSpace, basic: BasicOpen, width: Optional[int] = None) -> tuple[list, Optional[BasicOpen]]:
    """Разбивает [U, F] по максимальным подбазисным множествам; второй элемент: остаток."""
    subs = space.maximal_subbasics(basic.anchor, width, avoid=basic.holes)
    if not subs:
        return [basic], None
    pieces = [p for p in (space.intersect(basic, space.normalize(sub)) for sub in subs) if p is not None]
    rest = space.normalize(basic.anchor, basic.holes + tuple(subs))
    return pieces, rest


def _tree_base(space: SpaceModel) -> TreeSpace:
    base = base_space(space)
    if not isinstance(base, TreeSpace):
        raise UnsupportedError(f'Стратегия работает только в пространствах деревьев, получено {base.name}')
    return base


class PitzStrategy(StrategyHandle):
    """Стационарная стратегия игрока II в пространстве лучей специального дерева."""
    player = 'II'
    name = 'pitz'

    def typed_pieces(self, space: TreeSpace, basic: BasicOpen, width: Optional[int] = None) -> list[TypedCoverPiece]:
        tree = space.tree
        anchor, holes = basic.anchor, basic.holes
        if anchor.is_high or not tree.children(anchor, 1):
            return [TypedCoverPiece('type1', anchor, holes, basic)]

        def realize(node: Node, extra: Iterable[Node]) -> Optional[BasicOpen]:
            return space.intersect(space.normalize(node, tuple(extra)), basic)

        def cut(hole: Node) -> Optional[Node]:
            top = tree.hat(hole)
            if top == ROOT:
                return None
            return Node(top.ray.prefix(len(anchor.word) + 1))

        cuts = {hole: cut(hole) for hole in holes}
        hats = {hole: tree.hat(hole) for hole in holes if tree.hat(hole) != ROOT}
        typed = []
        for successor in space.maximal_subbasics(anchor, width, avoid=holes):
            lam = set(holes) | {c for c in cuts.values() if c is not None and tree.leq(successor, c)}
            typed.append(TypedCoverPiece('type1', successor, tuple(lam), realize(successor, lam)))
        for hole in holes:
            node = cuts[hole]
            if node is None:
                continue
            pool = set(c for c in cuts.values() if c is not None) | set(hats.values()) | set(holes)
            lam = tuple(m for m in pool if tree.lt(node, m))
            typed.append(TypedCoverPiece('type2', node, lam, realize(node, lam)))
        for hole in holes:
            if cuts[hole] is None:
                continue
            top = hats[hole]
            pool = set(c for c in cuts.values() if c is not None) | set(holes)
            lam = tuple(m for m in pool if tree.lt(top, m))
            typed.append(TypedCoverPiece('type3', top, lam, realize(top, lam)))
        if tree.branching(anchor) is None:
            used = tuple(space.maximal_subbasics(anchor, width, avoid=holes))
            typed.append(TypedCoverPiece('rest', anchor, holes + used, space.normalize(anchor, holes + used)))
        return typed

    def cover(self, space: SpaceModel, basic: BasicOpen, width: Optional[int] = None) -> Cover:
        base = _tree_base(space)
        typed = self.typed_pieces(base, basic, width)
        pieces = _trace(space, _dedupe(p.realized for p in typed if p.kind != 'rest'))
        rest = next((p.realized for p in typed if p.kind == 'rest'), None)
        rest = rest if rest is not None and _trace(space, [rest]) else None
        return Cover(tuple(pieces), rest)

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        return self.cover(space, state.last_move, width)


class SubbasicSplitStrategy(StrategyHandle):
    """Разбиение по максимальным подбазисным множествам вложенной подбазы."""
    player = 'II'

    def __init__(self, width: Optional[int] = None, name: str = 'split'):
        self.width = width
        self.name = name

    def cover(self, space: SpaceModel, basic: BasicOpen, width: Optional[int] = None) -> Cover:
        base = base_space(space)
        if not isinstance(base, NestedSpace):
            raise UnsupportedError(f'Разбиение по подбазе не определено для {base.name}')
        pieces, rest = split_basic(base, basic, self.width or width)
        if isinstance(base, TreeSpace) and base.tree.branching(basic.anchor) is None:
            return Cover(tuple(_trace(space, pieces)), rest if rest and _trace(space, [rest]) else None)
        return Cover(tuple(_trace(space, pieces + ([rest] if rest else []))))

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        return self.cover(space, state.last_move, width)


class ProductSplitStrategy(StrategyHandle):
    """
    Стационарная стратегия в произведении дерева и коконечного пространства.

    mode: tree: делится первый сомножитель, point: второй, both: оба,
    trivial: покрытие из одного множества, alternate: tree на глубинах,
    кратных modulus, иначе point.
    """
    player = 'II'
    MODES = ('tree', 'point', 'both', 'trivial', 'alternate')

    def __init__(self, mode: str = 'point', modulus: int = 1, width: int = 1):
        if mode not in self.MODES:
            raise UnsupportedError(f'Неизвестный режим стратегии произведения: {mode}')
        self.mode = mode
        self.modulus = max(1, modulus)
        self.width = width
        self.name = f'product-{mode}-{self.modulus}-{width}'

    def _split(self, factor: SpaceModel, basic: Any) -> list:
        if not isinstance(factor, NestedSpace):
            return [basic]
        pieces, rest = split_basic(factor, basic, self.width)
        return pieces + ([rest] if rest else [])

    def cover(self, space: SpaceModel, box: Box) -> Cover:
        base = base_space(space)
        if not isinstance(base, ProductSpace) or len(base.factors) != 2:
            raise UnsupportedError('Стратегия определена для произведения двух пространств')
        mode = self.mode
        if mode == 'alternate':
            anchor = box.factors[0].anchor
            depth = 0 if not isinstance(anchor, Node) or anchor.is_high else len(anchor.word)
            mode = 'tree' if depth % self.modulus == 0 else 'point'
        left, right = [box.factors[0]], [box.factors[1]]
        if mode in ('tree', 'both'):
            left = self._split(base.factors[0], box.factors[0])
        if mode in ('point', 'both'):
            right = self._split(base.factors[1], box.factors[1])
        return Cover(tuple(_trace(space, (Box((a, b)) for a in left for b in right))))

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        return self.cover(space, state.last_move)


def product_split_family(size: int = 50, seed: int = 0) -> list[ProductSplitStrategy]:
    combos = list(itertools.product(ProductSplitStrategy.MODES, range(1, 5), range(1, 4)))
    if size < len(combos):
        combos = sorted(random.Random(seed).sample(combos, size))
    return [ProductSplitStrategy(mode, modulus, width) for mode, modulus, width in combos]


class GluedStrategy(StrategyHandle):
    """
    Склейка стратегий φ_i на открытых A_i = X ∖ {q_i} для G_δ-подпространства A = ⋂A_i.

    В раунде n из блока i разбиения ℕ элемент покрытия, содержащий q_i,
    заменяется кольцами вокруг q_i; кольца материализуются до бюджета ширины,
    остаток: символический.
    """
    player = 'II'
    stationary = False

    def __init__(self, punctures: tuple = GLUE_PUNCTURES, partition: str = 'mod',
                 modulus: Optional[int] = None, base: Optional[StrategyHandle] = None, name: str = 'glued'):
        if partition not in ('mod', 'diagonal'):
            raise UnsupportedError(f'Неизвестное разбиение натурального ряда: {partition}')
        self.punctures = tuple(punctures)
        self.partition = partition
        self.modulus = modulus or max(1, len(self.punctures))
        self.base = base or PitzStrategy()
        self.name = name
        self.finite_state = partition == 'mod' and self.base.finite_state

    def block(self, index: int) -> int:
        if self.partition == 'mod':
            return index % self.modulus
        diagonal = (math.isqrt(8 * index + 1) - 1) // 2
        return diagonal - (index - diagonal * (diagonal + 1) // 2)

    def _annuli(self, space: TreeSpace, piece: BasicOpen, puncture: RayDescriptor, levels: int) -> tuple[list, BasicOpen]:
        found = []
        start = len(piece.anchor.word)
        for depth in range(start, start + levels):
            stem = puncture.prefix(depth)
            for child in space.tree.children(Node(stem), space.width):
                if child.word != puncture.prefix(depth + 1):
                    part = space.intersect(piece, space.normalize(child))
                    if part is not None:
                        found.append(part)
        rest = space.intersect(piece, space.normalize(Node(puncture.prefix(start + levels))))
        return found, rest

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        parent = _tree_base(space)
        basic = state.last_move
        cover = self.base.cover(space, basic, width) if hasattr(self.base, 'cover') else self.base.move(space, state, width)
        block = self.block(len(state.rounds) - 1)
        if block >= len(self.punctures):
            return cover
        puncture = self.punctures[block]
        pieces, rest = list(cover.pieces), cover.rest
        for index, piece in enumerate(pieces):
            if piece.anchor.is_high or not parent.contains(piece, puncture):
                continue
            rings, inner = self._annuli(parent, piece, puncture, width or parent.width)
            rings = _trace(space, rings)
            if inner is not None and _trace(space, [inner]):
                if rest is not None:
                    rings.append(rest)
                rest = inner
            pieces[index:index + 1] = rings
            break
        return Cover(tuple(pieces), rest)

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        parent = base_space(space)
        basic = state.last_move
        inside = tuple(parent.contains(basic, q) for q in self.punctures)
        return (self.block(len(state.rounds) - 1) if self.partition == 'mod' else len(state.rounds), inside)


def punctured_pitz(puncture: RayDescriptor) -> GluedStrategy:
    """φ для открытого подпространства X ∖ {q}: каждый раунд вырезает окрестность q."""
    return GluedStrategy((puncture,), 'mod', 1, name='punctured-pitz')


class LiftedStrategy(StrategyHandle):
    """Переносит базисную стратегию в End-игру без ограничения: каждый кусок открытого множества покрывается отдельно."""
    player = 'II'

    def __init__(self, base: StrategyHandle):
        self.base = base
        self.name = f'lifted-{base.name}'
        self.stationary = base.stationary
        self.finite_state = base.finite_state

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        pieces, rests = [], []
        for piece in pieces_of(state.last_move):
            cover = self.base.move(space, MatchState(END, horizon=state.horizon).with_move(piece), width)
            pieces.extend(cover.pieces)
            if cover.rest is not None:
                rests.append(cover.rest)
        rest = rests.pop(0) if rests else None
        return Cover(tuple(pieces + rests), rest)


class BasisAdapted(StrategyHandle):
    """Измельчает покрытие базовой стратегии до элементов заданного базиса."""
    player = 'II'

    def __init__(self, base: StrategyHandle, basis: Any):
        self.base = base
        self.basis = basis
        self.name = f'{base.name}@{basis.name}'
        self.stationary = base.stationary
        self.finite_state = base.finite_state

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        cover = self.base.move(space, state, width)
        pieces = [part for piece in cover.pieces for part in self.basis.decompose(space, piece)]
        return Cover(tuple(pieces), cover.rest)

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        return self.base.state_key(space, state)


class TrivialStrategy(StrategyHandle):
    """II отвечает покрытием из одного множества (в Банахе–Мазуре: тем же множеством)."""
    player = 'II'
    name = 'trivial'

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        if state.game == BANACH_MAZUR:
            return pieces_of(state.last_move)[0]
        return Cover(tuple(pieces_of(state.last_move)))


class OverlapStrategy(StrategyHandle):
    """Нелегальная стратегия: элементы покрытия пересекаются."""
    player = 'II'
    name = 'overlap'

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        basic = state.last_move
        inner = base_space(space).step_toward(basic, None, 'deepen')
        return Cover((basic, inner))


class GapStrategy(StrategyHandle):
    """Нелегальная стратегия: из покрытия выброшен последний элемент."""
    player = 'II'
    name = 'gap'

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Cover:
        cover = SubbasicSplitStrategy().cover(space, state.last_move, width)
        return Cover(cover.pieces[:-1])


class ForfeitStrategy(StrategyHandle):
    player = 'II'
    name = 'forfeit'

    def __init__(self, player: str = 'II', after: int = 0):
        self.player = player
        self.after = after

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        if len(state.rounds) > self.after:
            raise ProtocolError('Стратегия отказывается ходить', round=len(state.rounds))
        if self.player == 'I':
            return space.whole() if not state.rounds else state.last_reply.pieces[0]
        return TrivialStrategy().move(space, state, width)


class ShrinkStrategy(StrategyHandle):
    """II в Банахе–Мазуре: переходит к первому дочернему подбазисному множеству."""
    player = 'II'
    name = 'shrink'

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        basic = pieces_of(state.last_move)[0]
        step = space.step_toward(basic, None, 'deepen')
        return pieces_of(step)[0]


class BMFromEnd(StrategyHandle):
    """II в Банахе–Мазуре из стационарной стратегии II в End-игре."""
    player = 'II'

    def __init__(self, end_strategy: StrategyHandle, tracking: Any = None):
        if not end_strategy.stationary:
            raise UnsupportedError('Перенос в игру Банаха–Мазура требует стационарной стратегии')
        self.end_strategy = end_strategy
        self.tracking = tracking
        self.name = f'bm-from-{end_strategy.name}'
        self.finite_state = end_strategy.finite_state

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        pieces = []
        for piece in pieces_of(state.last_move):
            cover = self.end_strategy.move(space, MatchState(END, horizon=state.horizon).with_move(piece), width)
            pieces.extend(cover.all_pieces())
        if not pieces:
            raise ProtocolError('Стратегия End-игры вернула пустое покрытие')
        if self.tracking is not None:
            for piece in pieces:
                if space.contains(piece, self.tracking):
                    return piece
        return pieces[0]

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        return self.end_strategy.state_key(space, state)


class TargetAutomaton(StrategyHandle):
    """
    Конечный автомат игрока I: выбирает элемент, содержащий цель (иначе первый),
    и применяет к нему действие расписания текущей фазы.
    """
    player = 'I'

    def __init__(self, target: Any = None, schedule: tuple = ('deepen',), name: str = 'target'):
        self.target = target
        self.schedule = tuple(schedule)
        self.name = name

    def _candidates(self, space: SpaceModel, state: MatchState) -> list:
        if not state.rounds:
            return [space.whole()]
        if state.game == BANACH_MAZUR:
            return list(pieces_of(state.last_reply))
        return list(state.last_reply.all_pieces())

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        candidates = self._candidates(space, state)
        chosen = candidates[0]
        if self.target is not None:
            chosen = next((p for p in candidates if space.aims_at(p, self.target)), chosen)
        action = self.schedule[len(state.rounds) % len(self.schedule)]
        return space.step_toward(chosen, self.target, action)

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        phase = (len(state.rounds) - 1) % len(self.schedule)
        return (phase, space.target_signature(pieces_of(state.last_move)[0], self.target))

    def describe(self) -> dict[str, Any]:
        payload = super().describe()
        payload['schedule'] = list(self.schedule)
        return payload


def leftmost_descent() -> TargetAutomaton:
    return TargetAutomaton(RayDescriptor((), (0,)), ('deepen',), 'leftmost')


def automaton_family(space: TreeSpace, count: int = 60, seed: int = 0,
                     actions: tuple = ACTIONS) -> list[TargetAutomaton]:
    """Детерминированное семейство автоматов игрока I со случайными целями и расписаниями."""
    if space.tree.is_finite:
        raise UnsupportedError(f'Дерево {space.tree.preset} конечно: лучей-целей нет')
    rng = random.Random(seed)
    letters = space.tree.alphabet or space.width
    family = []
    while len(family) < count:
        stem = tuple(rng.randrange(letters) for _ in range(rng.randrange(4)))
        cycle = tuple(rng.randrange(letters) for _ in range(1 + rng.randrange(3)))
        target = RayDescriptor(stem, cycle)
        tops = space.tree.tops_of(target)
        if tops and rng.random() < 0.5:
            target = target.with_top(rng.randrange(len(tops)))
        if not space.is_point(target):
            continue
        schedule = tuple(rng.choice(actions) for _ in range(1 + rng.randrange(3)))
        family.append(TargetAutomaton(target, schedule, f'auto-{len(family)}'))
    return family


class ScriptedPlayer(StrategyHandle):
    """Игрок I, играющий заранее заданные множества (последнее повторяется)."""
    player = 'I'

    def __init__(self, moves: list, name: str = 'scripted'):
        if not moves:
            raise UnsupportedError('Сценарий ходов пуст')
        self.moves = list(moves)
        self.name = name

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        item = self.moves[min(len(state.rounds), len(self.moves) - 1)]
        return space.parse_basic(item) if isinstance(item, str) else item

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        return (min(len(state.rounds) - 1, len(self.moves) - 1),)


class ProductCounterexample(StrategyHandle):
    """
    Выигрышная стратегия игрока I в произведении канторова пространства лучей
    и коконечного пространства: спуск вдоль луча R с растущим конечным F.
    """
    player = 'I'
    name = 'product-counterexample'

    def __init__(self, ray: RayDescriptor = RayDescriptor((), (0,))):
        self.ray = ray

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Box:
        if not isinstance(space, ProductSpace) or len(space.factors) != 2:
            raise UnsupportedError('Стратегия определена для произведения дерева и коконечного пространства')
        tree, points = space.factors
        if not isinstance(tree, TreeSpace) or not isinstance(points, NestedSpace):
            raise UnsupportedError('Стратегия определена для произведения дерева и коконечного пространства')
        if not state.rounds:
            return Box((tree.normalize(ROOT), points.whole()))
        focus = (self.ray, 0)
        piece = next((p for p in state.last_reply.all_pieces() if space.contains(p, focus)), None)
        if piece is None:
            raise ProtocolError('Покрытие не содержит точку (ε, 0)')
        left, right = piece.factors
        previous = pieces_of(state.last_move)[0].factors[0].anchor
        depth = max([len(left.anchor.word), len(previous.word)] + [len(h.word) for h in left.holes if not h.is_high]) + 1
        anchor = tree.normalize(Node(self.ray.prefix(depth)))
        holes = tuple(h for h in right.holes if isinstance(h, int))
        fresh = max(holes, default=0) + 1
        return Box((tree.intersect(left, anchor), points.normalize('X', holes + (fresh,))))


class EndFromBM(StrategyHandle):
    """Игрок I в End-игре из стратегии игрока I в Банахе–Мазуре (по базису)."""
    player = 'I'

    def __init__(self, bm_strategy: StrategyHandle, tracking: Any = None):
        self.bm_strategy = bm_strategy
        self.tracking = tracking
        self.name = f'end-from-{bm_strategy.name}'
        self.stationary = bm_strategy.stationary
        self.finite_state = bm_strategy.finite_state

    def _select(self, space: SpaceModel, cover: Cover) -> Any:
        pieces = cover.all_pieces()
        if self.tracking is not None:
            for piece in pieces:
                if space.contains(piece, self.tracking):
                    return piece
        return pieces[0]

    def shadow(self, space: SpaceModel, state: MatchState) -> MatchState:
        """Состояние теневой партии Банаха–Мазура: V_k: выбранный элемент покрытия 𝒰_k."""
        shadow = MatchState(BANACH_MAZUR, horizon=state.horizon)
        for index, item in enumerate(state.rounds):
            if item.reply is None:
                shadow.rounds.append(Round(index, item.move))
                break
            if index + 1 < len(state.rounds) and state.rounds[index + 1].chosen is not None:
                chosen = state.rounds[index + 1].chosen
            else:
                chosen = self._select(space, item.reply)
            shadow.rounds.append(Round(index, item.move, reply=chosen))
        return shadow

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        return self.bm_strategy.move(space, self.shadow(space, state), width)

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        return self.bm_strategy.state_key(space, self.shadow(space, state))


def pitz_tree_strategy(space: SpaceModel) -> PitzStrategy:
    _tree_base(space)
    return PitzStrategy()


def bm_from_end_strategy(space: SpaceModel, end_strategy: StrategyHandle, tracking: Any = None) -> BMFromEnd:
    return BMFromEnd(end_strategy, tracking)


def end_I_from_bm_I(space: SpaceModel, bm_strategy: StrategyHandle, tracking: Any = None) -> EndFromBM:
    return EndFromBM(bm_strategy, tracking)


def gdelta_glue_strategy(parent: SpaceModel, punctures: tuple = GLUE_PUNCTURES, partition: str = 'mod',
                         modulus: Optional[int] = None) -> tuple[SubspaceModel, GluedStrategy]:
    """Подпространство A = X ∖ {q_i} и склеенная стратегия игрока II на нем."""
    _tree_base(parent)
    subspace = SubspaceModel(parent, punctures=punctures, label=f'{parent.name}-gdelta')
    return subspace, GluedStrategy(punctures, partition, modulus)


def product_counterexample_strategy(space: SpaceModel) -> ProductCounterexample:
    if not isinstance(space, ProductSpace):
        raise UnsupportedError('Нужна модель произведения')
    return ProductCounterexample()


class _Interleaved(StrategyHandle):
    player = 'I'

    def __init__(self, source: StrategyHandle, shadow: MatchState):
        self.source = source
        self.shadow = shadow
        self.name = f'interleaved-{source.name}'
        self.stationary = source.stationary
        self.finite_state = source.finite_state

    def move(self, space: SpaceModel, state: MatchState, width: Optional[int] = None) -> Any:
        raise ProtocolError('Ходы игрока I вычисляются перемежением партий')

    def state_key(self, space: SpaceModel, state: MatchState) -> Hashable:
        return self.source.state_key(space, self.shadow)


def thm3_counter_play(space: SpaceModel, basis: Any, basis_prime: Any, player_one: StrategyHandle,
                      player_two: StrategyHandle, horizon: int = 32, width: Optional[int] = None) -> MatchState:
    """
    Перемежает две End-игры: стратегия I в базисе 𝓑 против стратегии II в базисе 𝓑′.

    Ответы II на элементы 𝓑′-разложения хода собираются в покрытие 𝒜_n,
    измельчаются до 𝓑-покрытия 𝒱_n и передаются стратегии I. Возвращается
    протокол 𝓑′-партии.
    """
    shadow = MatchState(END, {'I': player_one.describe(), 'II': {'name': 'refined'}}, horizon)
    interleaved = _Interleaved(player_one, shadow)
    match = MatchState(END, {'I': interleaved.describe(), 'II': player_two.describe()}, horizon)
    pending: dict[Any, Cover] = {}
    for index in range(horizon):
        opened, violation = ask_strategy(player_one, space, shadow, width)
        violation = violation or validate_move(space, shadow, opened, basis)
        if violation:
            return forfeit(match, 'I', violation)
        if pending:
            chosen = next((u for u in pending if space.open_subset(opened, u)), None)
            violation = validate_move(space, match, chosen, basis_prime)
            if violation:
                return forfeit(match, 'I', violation)
            previous = locate(space, match.last_reply, chosen) if match.rounds else None
            match.rounds.append(Round(len(match.rounds), chosen, chosen=previous))
            match.rounds[-1].reply = pending[chosen]
        shadow.rounds.append(Round(index, opened, chosen=locate(space, shadow.last_reply, opened) if index else None))
        if match.rounds:
            match.rounds[-1].key = (
                player_one.state_key(space, shadow),
                player_two.state_key(space, match),
                space.relative_key(match.rounds[-1].move),
            )
        pending = {}
        for piece in basis_prime.decompose(space, opened):
            reply, violation = ask_strategy(player_two, space, match.with_move(piece), width)
            violation = violation or validate_move(space, match.with_move(piece), reply, basis_prime)
            if violation:
                return forfeit(match, 'II', violation)
            pending[piece] = reply
        gathered = [p for reply in pending.values() for p in reply.all_pieces()]
        try:
            refined = refine_to_disjoint_basics(space, gathered, opened)
        except WorkbenchError as error:
            match.status = 'undetermined'
            match.evidence = {'reason': error.detail, 'refinement': error.as_dict()}
            return match
        if basis is not None:
            refined = [part for piece in refined for part in basis.decompose(space, piece)]
        shadow.rounds[-1].reply = Cover(tuple(refined))
    return adjudicate(space, match, interleaved, player_two)
