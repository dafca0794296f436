"""
Символьные модели нульмерных пространств и алгебра базисных множеств [U, F].

Базисное множество [U, F]: подбазисное открыто-замкнутое U без конечного
объединения попарно непересекающихся подбазисных множеств, строго лежащих в U.
Нормальная форма детерминирована, поэтому синтаксическое равенство совпадает
с равенством множеств.
"""
import itertools
import logging
import math

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Hashable, Iterable, Iterator, Optional

from .exceptions import (
    CoverageError, DomainMismatchError, EmptySetError, InvalidRayError,
    NestednessError, PresentationError, ProtocolError, UnsupportedError,
)
from .order_tree import ROOT, Height, Node, PresentedTree, RayDescriptor, parse_node


logger = logging.getLogger(__name__)

INFINITE = math.inf


class Relation(str, Enum):
    """Отношение подбазисных множеств во вложенном семействе."""
    EQUAL = 'equal'
    SUB = 'sub'
    SUPER = 'super'
    DISJOINT = 'disjoint'


class Comparison(str, Enum):
    DISJOINT = 'disjoint'
    A_IN_B = 'a<=b'
    B_IN_A = 'b<=a'
    EQUAL = 'equal'
    OVERLAP = 'overlap'


@dataclass(frozen=True)
class BasicOpen:
    anchor: Any
    holes: tuple = ()


@dataclass(frozen=True)
class Box:
    """Базисное множество произведения: кортеж базисных множеств сомножителей."""
    factors: tuple


@dataclass(frozen=True)
class OpenUnion:
    """Открытое множество: конечное объединение попарно непересекающихся базисных."""
    pieces: tuple


def pieces_of(move: Any) -> tuple:
    if isinstance(move, OpenUnion):
        return move.pieces
    return (move,)


def mul(a: float, b: float) -> float:
    """Умножение мощностей с соглашением 0·∞ = 0."""
    if a == 0 or b == 0:
        return 0
    return a * b


@dataclass
class LimitSet:
    """
    Пересечение убывающей цепи: внутренние и не внутренние точки.

    Если множество бесконечно, списки точек пусты, а region (если задан)
    равен базисному множеству, с которым пересечение совпадает.
    """
    interior: tuple = ()
    boundary: tuple = ()
    interior_count: float = 0
    boundary_count: float = 0
    shape: str = 'empty'
    region: Any = None
    description: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return self.interior_count + self.boundary_count

    def member(self, space: 'SpaceModel', point: Any) -> Optional[bool]:
        if point in self.boundary or point in self.interior:
            return True
        if self.region is not None:
            return space.contains(self.region, point)
        if self.interior_count == len(self.interior) and self.boundary_count == len(self.boundary):
            return False
        return None


@dataclass(frozen=True)
class TailCertificate:
    """Ключи позиций периодичны с периодом period начиная с раунда start."""
    start: int
    period: int


@dataclass
class Decomposition:
    verdict: str
    point: Any = None
    open_part: Any = None
    limit: Optional[LimitSet] = None
    reason: str = ''

    @property
    def unique(self) -> bool:
        return self.verdict == 'unique'

    def to_json(self, space: 'SpaceModel') -> dict[str, Any]:
        payload: dict[str, Any] = {'verdict': self.verdict, 'reason': self.reason}
        if self.point is not None:
            payload['point'] = space.point_json(self.point)
        if self.open_part is not None:
            payload['open'] = self.open_part
        if self.limit is not None:
            payload['limit'] = {
                'shape': self.limit.shape,
                'interior_count': _count_json(self.limit.interior_count),
                'boundary_count': _count_json(self.limit.boundary_count),
                'description': self.limit.description,
            }
        return payload


def _count_json(value: float) -> Any:
    return 'infinite' if value == INFINITE else int(value)


def decomposition_from_limit(space: 'SpaceModel', limit: LimitSet) -> Decomposition:
    """Единственное представление {x} ∪ A существует, если не внутренняя точка ровно одна либо L состоит из одной точки."""
    if limit.boundary_count >= 2:
        return Decomposition('no-decomposition', limit=limit, reason='несколько не внутренних точек')
    if limit.boundary_count == 1:
        rest = [space.point_json(p) for p in limit.interior]
        open_part = {'points': rest} if rest or not limit.interior_count else dict(limit.description)
        return Decomposition('unique', point=limit.boundary[0], open_part=open_part, limit=limit)
    if limit.total == 1:
        return Decomposition('unique', point=limit.interior[0], open_part={'points': []}, limit=limit)
    reason = 'пустое пересечение' if limit.total == 0 else 'все точки внутренние, их больше одной'
    return Decomposition('no-decomposition', limit=limit, reason=reason)


class SpaceModel(ABC):
    """Символьная модель пространства с алгеброй базисных множеств."""
    kind = 'abstract'

    @property
    def name(self) -> str:
        return self.kind

    @abstractmethod
    def whole(self) -> Any:
        pass

    @abstractmethod
    def intersect(self, a: Any, b: Any) -> Optional[Any]:
        """Пересечение двух базисных множеств; None: пусто."""
        pass

    @abstractmethod
    def difference(self, a: Any, b: Any) -> list:
        """a ∖ b в виде списка попарно непересекающихся базисных множеств."""
        pass

    @abstractmethod
    def contains(self, basic: Any, point: Any) -> bool:
        pass

    @abstractmethod
    def is_point(self, point: Any) -> bool:
        pass

    @abstractmethod
    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        pass

    @abstractmethod
    def describe(self, basic: Any) -> Any:
        pass

    @abstractmethod
    def point_json(self, point: Any) -> Any:
        pass

    @abstractmethod
    def sort_key(self, basic: Any) -> tuple:
        pass

    @abstractmethod
    def relative_key(self, basic: Any) -> Hashable:
        """Форма множества с точностью до автоморфизмов модели (для поиска периода)."""
        pass

    @abstractmethod
    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        pass

    @abstractmethod
    def witness_candidates(self, basic: Any) -> Iterator:
        pass

    @abstractmethod
    def is_isolated(self, point: Any) -> bool:
        pass

    @abstractmethod
    def singleton(self, basic: Any) -> Optional[Any]:
        pass

    @abstractmethod
    def parse_basic(self, text: str) -> Any:
        pass

    def step_toward(self, basic: Any, target: Any, action: str) -> Any:
        return basic

    def target_signature(self, basic: Any, target: Any) -> Hashable:
        return ('in' if target is not None and self.contains(basic, target) else 'out',)

    def witness_point(self, basic: Any) -> Any:
        for point in self.witness_candidates(basic):
            if self.contains(basic, point):
                return point
        raise EmptySetError('Не найдено точки-свидетеля', basic=self.describe(basic))

    def is_subset(self, a: Any, b: Any) -> bool:
        return not self.difference(a, b)

    def disjoint(self, a: Any, b: Any) -> bool:
        return self.intersect(a, b) is None

    def cmp(self, a: Any, b: Any) -> Comparison:
        if self.disjoint(a, b):
            return Comparison.DISJOINT
        a_in_b, b_in_a = self.is_subset(a, b), self.is_subset(b, a)
        if a_in_b and b_in_a:
            return Comparison.EQUAL
        if a_in_b:
            return Comparison.A_IN_B
        if b_in_a:
            return Comparison.B_IN_A
        return Comparison.OVERLAP

    def subtract(self, targets: Iterable, removers: Iterable) -> list:
        remainder = list(targets)
        for remover in removers:
            remainder = [piece for target in remainder for piece in self.difference(target, remover)]
            if not remainder:
                break
        return remainder

    def open_subset(self, a: Any, b: Any) -> bool:
        return not self.subtract(pieces_of(a), pieces_of(b))

    def contains_open(self, move: Any, point: Any) -> bool:
        return any(self.contains(piece, point) for piece in pieces_of(move))

    def describe_open(self, move: Any) -> Any:
        if isinstance(move, OpenUnion):
            return {'union': [self.describe(piece) for piece in move.pieces]}
        return self.describe(move)

    def aims_at(self, basic: Any, target: Any) -> bool:
        return self.contains(basic, target)


class NestedSpace(SpaceModel):
    """Пространство с вложенной нётеровой подбазой; множества: пары [U, F]."""
    whole_anchor: Any = 'X'

    @abstractmethod
    def canonical(self, anchor: Any) -> Any:
        pass

    @abstractmethod
    def relation(self, u: Any, v: Any) -> Relation:
        """Отношение канонических подбазисных множеств u и v."""
        pass

    @abstractmethod
    def anchor_empty(self, anchor: Any, holes: list) -> bool:
        """Покрывают ли (строго вложенные) дыры весь якорь."""
        pass

    @abstractmethod
    def anchor_key(self, anchor: Any) -> tuple:
        pass

    @abstractmethod
    def anchor_contains(self, anchor: Any, point: Any) -> bool:
        pass

    @abstractmethod
    def anchor_json(self, anchor: Any) -> Any:
        pass

    @abstractmethod
    def parse_anchor(self, text: str) -> Any:
        pass

    @abstractmethod
    def minimal_point(self, anchor: Any) -> Optional[Any]:
        """Точка, для которой anchor является наименьшим подбазисным множеством (если есть)."""
        pass

    @abstractmethod
    def maximal_subbasics(self, anchor: Any, width: Optional[int] = None, avoid: tuple = ()) -> list:
        """Максимальные подбазисные множества, строго лежащие в anchor (с бюджетом ширины)."""
        pass

    @abstractmethod
    def rho(self, anchor: Any) -> Iterator:
        """Конфинальная последовательность строгих надмножеств anchor (без всего пространства), по убыванию."""
        pass

    def whole(self) -> BasicOpen:
        return self.normalize(self.whole_anchor)

    def normalize(self, anchor: Any, holes: Iterable = ()) -> Optional[BasicOpen]:
        anchor = self.canonical(anchor)
        kept: dict[tuple, Any] = {}
        for hole in holes:
            hole = self.canonical(hole)
            relation = self.relation(hole, anchor)
            if relation is Relation.DISJOINT:
                continue
            if relation is not Relation.SUB:
                return None
            kept[self.anchor_key(hole)] = hole
        candidates = list(kept.values())
        maximal = [
            hole for hole in candidates
            if not any(other is not hole and self.relation(hole, other) is Relation.SUB for other in candidates)
        ]
        if self.anchor_empty(anchor, maximal):
            return None
        return self._finish(anchor, maximal)

    def _finish(self, anchor: Any, holes: list) -> BasicOpen:
        return BasicOpen(anchor, tuple(sorted(holes, key=self.anchor_key)))

    def intersect(self, a: Optional[BasicOpen], b: Optional[BasicOpen]) -> Optional[BasicOpen]:
        if a is None or b is None:
            return None
        match self.relation(a.anchor, b.anchor):
            case Relation.DISJOINT:
                return None
            case Relation.SUPER:
                anchor = b.anchor
            case _:
                anchor = a.anchor
        return self.normalize(anchor, a.holes + b.holes)

    def difference(self, a: BasicOpen, b: BasicOpen) -> list[BasicOpen]:
        if self.intersect(a, b) is None:
            return [a]
        pieces = []
        outside = self.normalize(a.anchor, a.holes + (b.anchor,))
        if outside is not None:
            pieces.append(outside)
        for hole in b.holes:
            piece = self.intersect(a, self.normalize(hole))
            if piece is not None:
                pieces.append(piece)
        return pieces

    def is_subset(self, a: BasicOpen, b: BasicOpen) -> bool:
        if not a.holes and not b.holes:
            return self.relation(a.anchor, b.anchor) in (Relation.SUB, Relation.EQUAL)
        return super().is_subset(a, b)

    def disjoint(self, a: BasicOpen, b: BasicOpen) -> bool:
        if not a.holes and not b.holes:
            return self.relation(a.anchor, b.anchor) is Relation.DISJOINT
        return super().disjoint(a, b)

    def contains(self, basic: BasicOpen, point: Any) -> bool:
        if not self.is_point(point):
            return False
        return self.anchor_contains(basic.anchor, point) and not any(
            self.anchor_contains(hole, point) for hole in basic.holes
        )

    def describe(self, basic: BasicOpen) -> dict[str, Any]:
        return {'anchor': self.anchor_json(basic.anchor), 'holes': [self.anchor_json(h) for h in basic.holes]}

    def sort_key(self, basic: BasicOpen) -> tuple:
        return (self.anchor_key(basic.anchor), tuple(self.anchor_key(h) for h in basic.holes))

    def relative_key(self, basic: BasicOpen) -> Hashable:
        return self.sort_key(basic)

    def parse_basic(self, text: str) -> BasicOpen:
        """Разбирает запись "<якорь> <дыры через запятую или ->"."""
        tokens = str(text).split()
        if not tokens or len(tokens) > 2:
            raise PresentationError(f'Ожидается "<якорь> <дыры>": {text!r}')
        anchor = self.parse_anchor(tokens[0])
        holes = []
        if len(tokens) == 2 and tokens[1] != '-':
            holes = [self.parse_anchor(part) for part in tokens[1].split(',') if part]
        basic = self.normalize(anchor, holes)
        if basic is None:
            raise EmptySetError(f'Множество {text!r} пусто')
        return basic

    def subbasic_family(self, depth: int, width: Optional[int] = None) -> list:
        family, frontier = [self.whole_anchor], [self.whole_anchor]
        for _ in range(depth):
            frontier = [child for anchor in frontier for child in self.maximal_subbasics(anchor, width)]
            family.extend(frontier)
        return family

    def step_toward(self, basic: BasicOpen, target: Any, action: str) -> BasicOpen:
        if action not in ('deepen', 'hole'):
            return basic
        for sub in self.maximal_subbasics(basic.anchor, avoid=basic.holes):
            candidate = self.intersect(basic, self.normalize(sub))
            if candidate is None:
                continue
            if target is None or self.contains(candidate, target):
                return candidate
        return basic

    def _stable_limit(self, basic: BasicOpen, points: Optional[list] = None) -> LimitSet:
        single = self.singleton(basic)
        description = {'open': self.describe(basic)}
        if single is not None:
            return LimitSet(interior=(single,), interior_count=1, shape='point', region=basic, description=description)
        if points is not None:
            inside = tuple(p for p in points if self.contains(basic, p))
            return LimitSet(interior=inside, interior_count=len(inside), shape='finite', region=basic,
                            description=description)
        return LimitSet(interior_count=INFINITE, shape='open', region=basic, description=description)


class TreeSpace(NestedSpace):
    """Пространство лучей (mode='rays') или ветвей (mode='branches') заданного дерева."""

    def __init__(self, tree: PresentedTree, mode: str = 'rays', width: Optional[int] = None):
        if mode not in ('rays', 'branches'):
            raise PresentationError(f'Неизвестный режим пространства дерева: {mode}')
        self.tree = tree
        self.mode = mode
        self.width = width or tree.width
        self.whole_anchor = ROOT

    @property
    def kind(self) -> str:
        return 'ray_space' if self.mode == 'rays' else 'branch_space'

    @property
    def name(self) -> str:
        return f'{self.tree.preset}-{self.mode}'

    def canonical(self, node: Node) -> Node:
        self.tree.require(node)
        if node.is_high:
            return Node(ray=node.ray, top=node.top)
        if self.tree.is_finite:
            while True:
                kids = self.tree.children(node)
                if len(kids) != 1:
                    return node
                node = kids[0]
        if self.tree.alphabet == 1:
            return ROOT
        return node

    def relation(self, u: Node, v: Node) -> Relation:
        if u == v:
            return Relation.EQUAL
        if self.tree.leq(u, v):
            return Relation.SUPER
        if self.tree.leq(v, u):
            return Relation.SUB
        return Relation.DISJOINT

    def _covered(self, node: Node, holes: list[Node]) -> bool:
        if any(self.tree.leq(hole, node) for hole in holes):
            return True
        if node.is_high:
            return False
        inner = [hole for hole in holes if not hole.is_high and self.tree.lt(node, hole)]
        branching = self.tree.branching(node)
        if not inner or not branching:
            return False
        return all(self._covered(child, inner) for child in self.tree.children(node))

    def anchor_empty(self, anchor: Node, holes: list[Node]) -> bool:
        if anchor.is_high:
            return False
        return self._covered(anchor, [hole for hole in holes if not hole.is_high])

    def _finish(self, anchor: Node, holes: list[Node]) -> BasicOpen:
        if not anchor.is_high and self.tree.alphabet != 1 and self.tree.branching(anchor) is not None:
            anchor, holes = self._tighten(anchor, holes)
        return super()._finish(anchor, holes)

    def _tighten(self, anchor: Node, holes: list[Node]) -> tuple[Node, list[Node]]:
        # якорь спускается к единственному открытому ребенку, дыры сливаются в максимальные покрытые узлы
        while True:
            finite = [hole for hole in holes if not hole.is_high]
            if finite:
                merged = self._maximal_covered(anchor, finite)
                holes = merged + [
                    hole for hole in holes
                    if hole.is_high and not any(self.tree.leq(node, hole) for node in merged)
                ]
                finite = merged
            kids = self.tree.children(anchor)
            if not kids:
                return anchor, holes
            open_kids = [child for child in kids if not self._covered(child, finite)]
            if len(open_kids) != 1 or self.canonical(open_kids[0]) == anchor:
                return anchor, holes
            anchor = self.canonical(open_kids[0])
            holes = [hole for hole in holes if self.tree.lt(anchor, hole)]

    def _maximal_covered(self, node: Node, finite: list[Node]) -> list[Node]:
        found = []
        for child in self.tree.children(node):
            if self._covered(child, finite):
                found.append(self.canonical(child))
            elif any(self.tree.lt(child, hole) for hole in finite):
                found.extend(self._maximal_covered(child, finite))
        return found

    def anchor_key(self, node: Node) -> tuple:
        return node.sort_key()

    def anchor_contains(self, node: Node, point: Any) -> bool:
        return self.tree.passes(point, node)

    def anchor_json(self, node: Node) -> str:
        return node.text(self.tree.alphabet)

    def parse_anchor(self, text: str) -> Node:
        return parse_node(text, self.tree.alphabet)

    def node_set(self, node: Node) -> BasicOpen:
        return self.normalize(node)

    def is_point(self, point: Any) -> bool:
        if self.tree.is_finite:
            return isinstance(point, Node) and self.tree.contains(point) and not self.tree.children(point)
        if not isinstance(point, RayDescriptor):
            return False
        try:
            tops = self.tree.tops_of(point)
        except InvalidRayError:
            return False
        return point.is_long or self.mode == 'rays' or not tops

    def is_isolated(self, point: Any) -> bool:
        if isinstance(point, Node) or point.is_long:
            return True
        return self.tree.alphabet == 1

    def singleton(self, basic: BasicOpen) -> Optional[Any]:
        anchor = basic.anchor
        if anchor.is_high:
            return anchor.ray.with_top(anchor.top)
        if self.tree.is_finite:
            return anchor if not self.tree.children(anchor) else None
        if self.tree.alphabet == 1:
            return RayDescriptor((), (0,))
        return None

    def minimal_point(self, anchor: Node) -> Optional[Any]:
        return self.singleton(BasicOpen(anchor))

    def maximal_subbasics(self, anchor: Node, width: Optional[int] = None, avoid: tuple = ()) -> list[Node]:
        if anchor.is_high or self.singleton(BasicOpen(anchor)) is not None:
            return []
        count = width or self.width
        for hole in avoid:
            if not hole.is_high and self.tree.lt(anchor, hole):
                count = max(count, hole.word[len(anchor.word)] + 1)
        return [self.canonical(child) for child in self.tree.children(anchor, count)]

    def rho(self, anchor: Node) -> Iterator[Node]:
        if anchor.is_high:
            prefixes = (Node(anchor.ray.prefix(i)) for i in itertools.count(1))
        else:
            prefixes = (Node(anchor.word[:i]) for i in range(1, len(anchor.word)))
        seen = set()
        for node in prefixes:
            candidate = self.canonical(node)
            if candidate in (anchor, ROOT, self.canonical(ROOT)) or candidate in seen:
                continue
            seen.add(candidate)
            yield candidate

    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        if self.tree.is_finite:
            return self.tree.leaves()
        letters = range(self.tree.alphabet or self.width)
        rays = set()
        for size in range(depth + 1):
            for stem in itertools.product(letters, repeat=size):
                for length in range(1, cycle_length + 1):
                    for cycle in itertools.product(letters, repeat=length):
                        rays.add(RayDescriptor(stem, cycle))
        points = []
        for ray in sorted(rays, key=RayDescriptor.sort_key):
            tops = self.tree.tops_of(ray)
            if self.mode == 'rays' or not tops:
                points.append(ray)
            points.extend(ray.with_top(top.top) for top in tops)
        return points

    def witness_candidates(self, basic: BasicOpen) -> Iterator:
        anchor = basic.anchor
        if anchor.is_high:
            yield anchor.ray.with_top(anchor.top)
            return
        finite = [hole for hole in basic.holes if not hole.is_high]
        node = anchor
        while True:
            inner = [hole for hole in finite if self.tree.lt(node, hole)]
            if not inner:
                break
            width = max(hole.word[len(node.word)] for hole in inner) + 2
            open_kids = [child for child in self.tree.children(node, width) if not self._covered(child, inner)]
            if not open_kids:
                return
            node = open_kids[0]
        if self.tree.is_finite:
            while kids := self.tree.children(node):
                node = kids[0]
            yield node
            return
        letters = self.tree.alphabet or 2
        cycles = [(0,)] if letters == 1 else [(0,), (1,), (0, 1)]
        for size in range(3):
            for suffix in itertools.product(range(letters), repeat=size):
                for cycle in cycles:
                    ray = RayDescriptor(node.word + suffix, cycle)
                    yield ray
                    for top in self.tree.tops_of(ray):
                        yield ray.with_top(top.top)

    def describe_point(self, point: Any) -> str:
        return self.point_json(point)

    def point_json(self, point: Any) -> str:
        return point.text(self.tree.alphabet)

    def relative_key(self, basic: BasicOpen) -> Hashable:
        if self.tree.is_finite:
            return self.sort_key(basic)
        anchor = basic.anchor
        if anchor.is_high:
            return ('high',)
        depth = len(anchor.word)
        shapes = []
        for hole in basic.holes:
            if hole.is_high:
                shapes.append((1, hole.ray.shift(depth).sort_key(), hole.top))
            else:
                shapes.append((0, hole.word[depth:]))
        return ('f', tuple(sorted(shapes)))

    def target_signature(self, basic: Any, target: Any) -> Hashable:
        if target is None:
            return ('none',)
        anchor = basic.anchor
        inside = self.contains(basic, target)
        if anchor.is_high:
            return ('high', inside)
        if isinstance(target, RayDescriptor) and self.tree.passes(target, anchor):
            return ('on', target.shift(len(anchor.word)), inside)
        return ('off', inside)

    def aims_at(self, basic: BasicOpen, target: Any) -> bool:
        return self.contains(basic, target)

    def toward(self, anchor: Node, target: Any) -> Optional[Node]:
        if target is None or anchor.is_high or not isinstance(target, RayDescriptor):
            return None
        if not self.tree.passes(target, anchor):
            return None
        child = Node(anchor.word + (target.letter(len(anchor.word)),))
        return child if self.tree.contains(child) else None

    def step_toward(self, basic: BasicOpen, target: Any, action: str) -> Any:
        anchor = basic.anchor
        if action == 'stay' or anchor.is_high:
            return basic
        kids = self.tree.children(anchor, self.width)
        if not kids:
            return basic
        toward = self.toward(anchor, target)
        rays_only = action in ('kill', 'enter')
        if rays_only and (self.tree.is_finite or not isinstance(target, RayDescriptor)):
            return basic
        match action:
            case 'deepen':
                return self.intersect(basic, self.normalize(toward or kids[0])) or basic
            case 'hole':
                for other in kids:
                    if other == toward:
                        continue
                    candidate = self.normalize(anchor, basic.holes + (other,))
                    if candidate is not None and (target is None or self.contains(candidate, target)):
                        return candidate
                return basic
            case 'kill':
                if target is None or not self.tree.passes(target, anchor):
                    return basic
                for top in self.tree.tops_of(target.omega_part()):
                    if top.top != target.top and top not in basic.holes:
                        candidate = self.normalize(anchor, basic.holes + (top,))
                        if candidate is not None:
                            return candidate
                return basic
            case 'enter':
                if target is None or not target.is_long or not self.tree.passes(target, anchor):
                    return basic
                top = Node(ray=target.omega_part(), top=target.top)
                return self.intersect(basic, self.normalize(top)) or basic
            case 'union':
                near = self.intersect(basic, self.normalize(toward or kids[0]))
                far = None
                for other in kids:
                    if other != (toward or kids[0]):
                        grandkids = self.tree.children(other, self.width)
                        if grandkids:
                            far = self.intersect(basic, self.normalize(grandkids[0]))
                        break
                if near is None or far is None or not self.disjoint(near, far):
                    return near or basic
                return OpenUnion(tuple(sorted((near, far), key=self.sort_key)))
        return basic

    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        first, later = chain[start], chain[start + period]
        if first == later:
            points = self.tree.leaves() if self.tree.is_finite else None
            return self._stable_limit(first, points)
        t_a, t_b = first.anchor, later.anchor
        if t_a.is_high or t_b.is_high or not self.tree.lt(t_a, t_b):
            raise ProtocolError('Хвост цепи не спускается вдоль луча', first=self.describe(first),
                                later=self.describe(later))
        ray = RayDescriptor(t_a.word, t_b.word[len(t_a.word):])
        killed = {
            hole.top for basic in chain[:start + period + 1]
            for hole in basic.holes if hole.is_high and hole.ray == ray
        }
        interior, boundary = [], []
        if self.is_point(ray):
            (interior if self.is_isolated(ray) else boundary).append(ray)
        surviving = [top for top in self.tree.tops_of(ray) if top.top not in killed]
        interior.extend(ray.with_top(top.top) for top in surviving)
        total = len(interior) + len(boundary)
        return LimitSet(
            interior=tuple(interior),
            boundary=tuple(boundary),
            interior_count=len(interior),
            boundary_count=len(boundary),
            shape='empty' if not total else ('point' if total == 1 else 'finite'),
            description={
                'ray': self.point_json(ray),
                'union_over_tops': [self.anchor_json(top) for top in surviving],
            },
        )


class CofiniteSpace(NestedSpace):
    """
    Точка 0 с коконечными окрестностями и изолированные точки 1, 2, ...

    Кардинал κ символический; конечное kappa лишь ограничивает перечисление
    точек при выборке.
    """
    kind = 'cofinite_point_space'

    def __init__(self, kappa: Optional[int] = None):
        if kappa is not None and kappa < 1:
            raise PresentationError('kappa должно быть ≥ 1')
        self.kappa = kappa

    @property
    def name(self) -> str:
        return 'cofinite' if self.kappa is None else f'cofinite-{self.kappa}'

    def canonical(self, anchor: Any) -> Any:
        if anchor == 'X' or (isinstance(anchor, int) and not isinstance(anchor, bool) and anchor >= 1):
            return anchor
        raise DomainMismatchError(f'Некорректный якорь коконечного пространства: {anchor!r}', anchor=anchor)

    def relation(self, u: Any, v: Any) -> Relation:
        if u == v:
            return Relation.EQUAL
        if u == 'X':
            return Relation.SUPER
        if v == 'X':
            return Relation.SUB
        return Relation.DISJOINT

    def anchor_empty(self, anchor: Any, holes: list) -> bool:
        return False

    def anchor_key(self, anchor: Any) -> tuple:
        return (0, 0) if anchor == 'X' else (1, anchor)

    def anchor_contains(self, anchor: Any, point: Any) -> bool:
        return anchor == 'X' or anchor == point

    def anchor_json(self, anchor: Any) -> Any:
        return anchor

    def parse_anchor(self, text: str) -> Any:
        text = str(text).strip()
        if text == 'X':
            return 'X'
        if not text.isdigit():
            raise PresentationError(f'Ожидается X или номер точки: {text!r}')
        return self.canonical(int(text))

    def fresh(self, holes: Iterable) -> int:
        taken = set(holes)
        return next(alpha for alpha in itertools.count(1) if alpha not in taken)

    def minimal_point(self, anchor: Any) -> Any:
        return 0 if anchor == 'X' else anchor

    def maximal_subbasics(self, anchor: Any, width: Optional[int] = None, avoid: tuple = ()) -> list:
        if anchor != 'X':
            return []
        taken = set(avoid)
        fresh = (alpha for alpha in itertools.count(1) if alpha not in taken)
        return list(itertools.islice(fresh, width or 1))

    def rho(self, anchor: Any) -> Iterator:
        return iter(())

    def is_point(self, point: Any) -> bool:
        return isinstance(point, int) and not isinstance(point, bool) and point >= 0

    def is_isolated(self, point: Any) -> bool:
        return point != 0

    def singleton(self, basic: BasicOpen) -> Optional[Any]:
        return None if basic.anchor == 'X' else basic.anchor

    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        return list(range(0, (self.kappa or depth) + 1))

    def witness_candidates(self, basic: BasicOpen) -> Iterator:
        yield 0 if basic.anchor == 'X' else basic.anchor

    def point_json(self, point: Any) -> Any:
        return point

    def relative_key(self, basic: BasicOpen) -> Hashable:
        return ('X',) if basic.anchor == 'X' else ('pt',)

    def target_signature(self, basic: BasicOpen, target: Any) -> Hashable:
        inside = target is not None and self.contains(basic, target)
        return (basic.anchor == 'X', inside, target == 0)

    def step_toward(self, basic: BasicOpen, target: Any, action: str) -> BasicOpen:
        if action not in ('deepen', 'hole') or basic.anchor != 'X':
            return basic
        if target not in (None, 0) and self.contains(basic, target):
            return self.normalize(target)
        return self.normalize('X', basic.holes + (self.fresh(basic.holes + ((target,) if target else ())),))

    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        first, later = chain[start], chain[start + period]
        if first == later:
            return self._stable_limit(first)
        if first.anchor == 'X' and later.anchor == 'X' and set(first.holes) < set(later.holes):
            return LimitSet(
                boundary=(0,),
                boundary_count=1,
                interior_count=INFINITE,
                shape='cofinite',
                description={'cofinite': {'excluded_grows': True, 'excluded_sample': list(later.holes)}},
            )
        raise ProtocolError('Хвост цепи коконечного пространства не убывает', first=first, later=later)


class FiniteDiscreteSpace(NestedSpace):
    """Дискретное пространство из n точек 0..n-1; подбаза: X и одноточечные множества."""
    kind = 'finite_discrete'

    def __init__(self, points: int):
        if points < 1:
            raise PresentationError('Дискретное пространство должно быть непустым')
        self.points = points

    @property
    def name(self) -> str:
        return f'discrete-{self.points}'

    def canonical(self, anchor: Any) -> Any:
        if anchor == 'X':
            return 'X'
        if isinstance(anchor, int) and not isinstance(anchor, bool) and 0 <= anchor < self.points:
            return 'X' if self.points == 1 else anchor
        raise DomainMismatchError(f'Точки {anchor!r} нет в пространстве', anchor=anchor)

    def relation(self, u: Any, v: Any) -> Relation:
        if u == v:
            return Relation.EQUAL
        if u == 'X':
            return Relation.SUPER
        if v == 'X':
            return Relation.SUB
        return Relation.DISJOINT

    def anchor_empty(self, anchor: Any, holes: list) -> bool:
        return anchor == 'X' and len(set(holes)) >= self.points

    def anchor_key(self, anchor: Any) -> tuple:
        return (0, 0) if anchor == 'X' else (1, anchor)

    def anchor_contains(self, anchor: Any, point: Any) -> bool:
        return anchor == 'X' or anchor == point

    def anchor_json(self, anchor: Any) -> Any:
        return anchor

    def parse_anchor(self, text: str) -> Any:
        text = str(text).strip()
        if text == 'X':
            return 'X'
        if not text.isdigit():
            raise PresentationError(f'Ожидается X или номер точки: {text!r}')
        return self.canonical(int(text))

    def minimal_point(self, anchor: Any) -> Optional[Any]:
        if anchor == 'X':
            return 0 if self.points == 1 else None
        return anchor

    def maximal_subbasics(self, anchor: Any, width: Optional[int] = None, avoid: tuple = ()) -> list:
        if anchor != 'X' or self.points == 1:
            return []
        return [point for point in range(self.points) if point not in avoid]

    def rho(self, anchor: Any) -> Iterator:
        return iter(())

    def is_point(self, point: Any) -> bool:
        return isinstance(point, int) and not isinstance(point, bool) and 0 <= point < self.points

    def is_isolated(self, point: Any) -> bool:
        return True

    def singleton(self, basic: BasicOpen) -> Optional[Any]:
        inside = [p for p in range(self.points) if self.contains(basic, p)]
        return inside[0] if len(inside) == 1 else None

    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        return list(range(self.points))

    def witness_candidates(self, basic: BasicOpen) -> Iterator:
        return iter(range(self.points))

    def point_json(self, point: Any) -> Any:
        return point

    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        first, later = chain[start], chain[start + period]
        if first != later:
            raise ProtocolError('Цепь в конечном пространстве обязана стабилизироваться')
        return self._stable_limit(first, self.sample_points())


class ExplicitSpace(NestedSpace):
    """Конечное пространство с явно перечисленным семейством подбазисных множеств."""
    kind = 'explicit'

    def __init__(self, points: Iterable, family: dict[str, Iterable], label: str = 'explicit'):
        self.points = tuple(points)
        self.family = {name: frozenset(members) for name, members in family.items()}
        self.family.setdefault('X', frozenset(self.points))
        if self.family['X'] != frozenset(self.points):
            raise PresentationError('Множество X должно совпадать со всем пространством')
        self.label = label
        self._names: dict[frozenset, str] = {}
        for name in sorted(self.family, key=lambda n: (n != 'X', n)):
            self._names.setdefault(self.family[name], name)

    @property
    def name(self) -> str:
        return self.label

    def canonical(self, anchor: Any) -> str:
        if anchor not in self.family:
            raise DomainMismatchError(f'Нет подбазисного множества {anchor!r}', anchor=anchor)
        return self._names[self.family[anchor]]

    def relation(self, u: str, v: str) -> Relation:
        a, b = self.family[u], self.family[v]
        if a == b:
            return Relation.EQUAL
        if a < b:
            return Relation.SUB
        if a > b:
            return Relation.SUPER
        if not a & b:
            return Relation.DISJOINT
        raise NestednessError(f'Множества {u} и {v} пересекаются, но не вложены', first=u, second=v)

    def anchor_empty(self, anchor: str, holes: list) -> bool:
        covered = frozenset().union(*(self.family[h] for h in holes)) if holes else frozenset()
        return self.family[anchor] <= covered

    def members(self, basic: BasicOpen) -> frozenset:
        return frozenset(p for p in self.points if self.contains(basic, p))

    def is_subset(self, a: BasicOpen, b: BasicOpen) -> bool:
        return self.members(a) <= self.members(b)

    def disjoint(self, a: BasicOpen, b: BasicOpen) -> bool:
        return not self.members(a) & self.members(b)

    def anchor_key(self, anchor: str) -> tuple:
        return (anchor != 'X', anchor)

    def anchor_contains(self, anchor: str, point: Any) -> bool:
        return point in self.family[anchor]

    def anchor_json(self, anchor: str) -> str:
        return anchor

    def parse_anchor(self, text: str) -> str:
        return self.canonical(str(text).strip())

    def _smallest_around(self, point: Any) -> frozenset:
        return min((s for s in self.family.values() if point in s), key=len)

    def minimal_point(self, anchor: str) -> Optional[Any]:
        own = self.family[anchor]
        minimal = [p for p in self.points if p in own and self._smallest_around(p) == own]
        if len(minimal) > 1:
            raise NestednessError(f'Точки {minimal} неотделимы подбазой', anchor=anchor)
        return minimal[0] if minimal else None

    def maximal_subbasics(self, anchor: str, width: Optional[int] = None, avoid: tuple = ()) -> list:
        own = self.family[anchor]
        inner = {s for s in self.family.values() if s < own}
        maximal = [s for s in inner if not any(s < other for other in inner)]
        names = sorted(self._names[s] for s in maximal)
        return [name for name in names if name not in avoid]

    def rho(self, anchor: str) -> Iterator:
        own = self.family[anchor]
        outer = sorted({s for s in self.family.values() if s > own and s != self.family['X']},
                       key=lambda s: (-len(s), self._names[s]))
        return (self._names[s] for s in outer)

    def is_point(self, point: Any) -> bool:
        return point in self.points

    def is_isolated(self, point: Any) -> bool:
        own = self._smallest_around(point)
        holes = [name for name, s in self.family.items() if s < own and point not in s]
        basic = self.normalize(self._names[own], holes)
        return basic is not None and self.singleton(basic) == point

    def singleton(self, basic: BasicOpen) -> Optional[Any]:
        inside = [p for p in self.points if self.contains(basic, p)]
        return inside[0] if len(inside) == 1 else None

    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        return list(self.points)

    def witness_candidates(self, basic: BasicOpen) -> Iterator:
        return iter(self.points)

    def point_json(self, point: Any) -> Any:
        return point

    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        first, later = chain[start], chain[start + period]
        if first != later:
            raise ProtocolError('Цепь в конечном пространстве обязана стабилизироваться')
        return self._stable_limit(first, list(self.points))


class ProductSpace(SpaceModel):
    """Конечное произведение моделей; базисные множества: коробки."""
    kind = 'product'

    def __init__(self, factors: Iterable[SpaceModel]):
        self.factors = tuple(factors)
        if not self.factors:
            raise PresentationError('Произведение требует хотя бы одного сомножителя')

    @property
    def name(self) -> str:
        return ' x '.join(factor.name for factor in self.factors)

    def box(self, *parts: Any) -> Optional[Box]:
        if len(parts) != len(self.factors) or any(part is None for part in parts):
            return None
        return Box(tuple(parts))

    def whole(self) -> Box:
        return Box(tuple(factor.whole() for factor in self.factors))

    def intersect(self, a: Optional[Box], b: Optional[Box]) -> Optional[Box]:
        if a is None or b is None:
            return None
        parts = []
        for factor, x, y in zip(self.factors, a.factors, b.factors):
            part = factor.intersect(x, y)
            if part is None:
                return None
            parts.append(part)
        return Box(tuple(parts))

    def difference(self, a: Box, b: Box) -> list[Box]:
        common = self.intersect(a, b)
        if common is None:
            return [a]
        pieces = []
        for index, factor in enumerate(self.factors):
            for part in factor.difference(a.factors[index], b.factors[index]):
                pieces.append(Box(common.factors[:index] + (part,) + a.factors[index + 1:]))
        return pieces

    def is_subset(self, a: Box, b: Box) -> bool:
        return all(f.is_subset(x, y) for f, x, y in zip(self.factors, a.factors, b.factors))

    def disjoint(self, a: Box, b: Box) -> bool:
        return any(f.disjoint(x, y) for f, x, y in zip(self.factors, a.factors, b.factors))

    def contains(self, box: Box, point: Any) -> bool:
        if not self.is_point(point):
            return False
        return all(f.contains(x, p) for f, x, p in zip(self.factors, box.factors, point))

    def is_point(self, point: Any) -> bool:
        return (isinstance(point, tuple) and len(point) == len(self.factors)
                and all(f.is_point(p) for f, p in zip(self.factors, point)))

    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        return list(itertools.product(*(f.sample_points(depth, cycle_length) for f in self.factors)))

    def describe(self, box: Box) -> dict[str, Any]:
        return {'box': [f.describe(x) for f, x in zip(self.factors, box.factors)]}

    def point_json(self, point: Any) -> list:
        return [f.point_json(p) for f, p in zip(self.factors, point)]

    def sort_key(self, box: Box) -> tuple:
        return tuple(f.sort_key(x) for f, x in zip(self.factors, box.factors))

    def relative_key(self, box: Box) -> Hashable:
        return tuple(f.relative_key(x) for f, x in zip(self.factors, box.factors))

    def witness_candidates(self, box: Box) -> Iterator:
        yield tuple(f.witness_point(x) for f, x in zip(self.factors, box.factors))

    def is_isolated(self, point: Any) -> bool:
        return all(f.is_isolated(p) for f, p in zip(self.factors, point))

    def singleton(self, box: Box) -> Optional[Any]:
        parts = [f.singleton(x) for f, x in zip(self.factors, box.factors)]
        return None if any(part is None for part in parts) else tuple(parts)

    def parse_basic(self, text: str) -> Box:
        """Коробка записывается сомножителями через '|': "0 - | X 1,2"."""
        parts = str(text).split('|')
        if len(parts) != len(self.factors):
            raise PresentationError(f'Ожидается {len(self.factors)} сомножителей через "|": {text!r}')
        return Box(tuple(f.parse_basic(part.strip()) for f, part in zip(self.factors, parts)))

    def target_signature(self, box: Box, target: Any) -> Hashable:
        targets = target if target is not None else (None,) * len(self.factors)
        return tuple(f.target_signature(x, t) for f, x, t in zip(self.factors, box.factors, targets))

    def step_toward(self, box: Box, target: Any, action: str) -> Box:
        targets = target if target is not None else (None,) * len(self.factors)
        parts = []
        for f, x, t in zip(self.factors, box.factors, targets):
            step = f.step_toward(x, t, action)
            parts.append(step if not isinstance(step, OpenUnion) else x)
        return Box(tuple(parts))

    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        limits = [
            factor.limit([box.factors[i] for box in chain], start, period)
            for i, factor in enumerate(self.factors)
        ]
        interior_count = 1
        for item in limits:
            interior_count = mul(interior_count, item.interior_count)
        boundary_count = 0
        for i, item in enumerate(limits):
            term = item.boundary_count
            for j, other in enumerate(limits):
                if j != i:
                    term = mul(term, other.interior_count if j < i else other.total)
            boundary_count += term
        interior, boundary = (), ()
        if all(item.total < INFINITE for item in limits):
            everything = list(itertools.product(*(item.interior + item.boundary for item in limits)))
            interior = tuple(itertools.product(*(item.interior for item in limits)))
            boundary = tuple(point for point in everything if point not in interior)
        region = None
        if all(item.region is not None for item in limits):
            region = Box(tuple(item.region for item in limits))
        return LimitSet(
            interior=interior,
            boundary=boundary,
            interior_count=interior_count,
            boundary_count=boundary_count,
            shape=' x '.join(item.shape for item in limits),
            region=region,
            description={'product': [item.description for item in limits]},
        )


class SubspaceModel(SpaceModel):
    """
    Подпространство: открыто-замкнутое clopen родителя без конечного
    множества выколотых точек punctures. Базисные множества: следы
    базисных множеств родителя.
    """

    def __init__(self, parent: SpaceModel, clopen: Any = None, punctures: Iterable = (), label: str = ''):
        self.parent = parent
        self.clopen = clopen
        self.punctures = tuple(punctures)
        self.label = label
        for point in self.punctures:
            if not parent.is_point(point):
                raise DomainMismatchError(f'Выколотая точка {point} не принадлежит пространству', point=point)

    @property
    def kind(self) -> str:
        return 'gdelta_subspace' if self.punctures else 'open_subspace'

    @property
    def name(self) -> str:
        return self.label or f'{self.parent.name}-{self.kind}'

    def admits(self, point: Any) -> bool:
        if not self.parent.is_point(point) or point in self.punctures:
            return False
        return self.clopen is None or self.parent.contains(self.clopen, point)

    def _trace_nonempty(self, basic: Any) -> bool:
        single = self.parent.singleton(basic)
        return single is None or self.admits(single)

    def whole(self) -> Any:
        return self.clopen if self.clopen is not None else self.parent.whole()

    def intersect(self, a: Any, b: Any) -> Optional[Any]:
        common = self.parent.intersect(a, b)
        if common is None or not self._trace_nonempty(common):
            return None
        return common

    def difference(self, a: Any, b: Any) -> list:
        return [piece for piece in self.parent.difference(a, b) if self._trace_nonempty(piece)]

    def contains(self, basic: Any, point: Any) -> bool:
        return self.admits(point) and self.parent.contains(basic, point)

    def is_point(self, point: Any) -> bool:
        return self.admits(point)

    def sample_points(self, depth: int = 4, cycle_length: int = 1) -> list:
        return [p for p in self.parent.sample_points(depth, cycle_length) if self.admits(p)]

    def describe(self, basic: Any) -> Any:
        return self.parent.describe(basic)

    def point_json(self, point: Any) -> Any:
        return self.parent.point_json(point)

    def sort_key(self, basic: Any) -> tuple:
        return self.parent.sort_key(basic)

    def relative_key(self, basic: Any) -> Hashable:
        return self.parent.relative_key(basic)

    def witness_candidates(self, basic: Any) -> Iterator:
        return (p for p in self.parent.witness_candidates(basic) if self.admits(p))

    def is_isolated(self, point: Any) -> bool:
        return self.parent.is_isolated(point)

    def singleton(self, basic: Any) -> Optional[Any]:
        single = self.parent.singleton(basic)
        return single if single is not None and self.admits(single) else None

    def parse_basic(self, text: str) -> Any:
        basic = self.parent.parse_basic(text)
        if not self._trace_nonempty(basic):
            raise EmptySetError(f'След множества {text!r} пуст')
        return basic

    def target_signature(self, basic: Any, target: Any) -> Hashable:
        return self.parent.target_signature(basic, target)

    def aims_at(self, basic: Any, target: Any) -> bool:
        return self.parent.contains(basic, target)

    def step_toward(self, basic: Any, target: Any, action: str) -> Any:
        step = self.parent.step_toward(basic, target, action)
        if all(self._trace_nonempty(piece) for piece in pieces_of(step)):
            return step
        return basic

    def limit(self, chain: list, start: int, period: int) -> LimitSet:
        inner = self.parent.limit(chain, start, period)
        interior = tuple(p for p in inner.interior if self.admits(p))
        boundary = tuple(p for p in inner.boundary if self.admits(p))

        def count(points: tuple, original: tuple, value: float) -> float:
            return value if value == INFINITE and not original else len(points)

        description = dict(inner.description)
        description['excluded'] = [self.parent.point_json(p) for p in self.punctures]
        return LimitSet(
            interior=interior,
            boundary=boundary,
            interior_count=count(interior, inner.interior, inner.interior_count),
            boundary_count=count(boundary, inner.boundary, inner.boundary_count),
            shape=inner.shape if len(interior) + len(boundary) or inner.total == INFINITE else 'empty',
            region=inner.region,
            description=description,
        )


def base_space(space: SpaceModel) -> SpaceModel:
    while isinstance(space, SubspaceModel):
        space = space.parent
    return space


def cmp_basic_opens(space: SpaceModel, a: Any, b: Any) -> Comparison:
    """
    Сравнивает два базисных множества.

    Raises:
        NestednessError: множества пересекаются, но не вложены.
    """
    result = space.cmp(a, b)
    if result is Comparison.OVERLAP:
        raise NestednessError('Множества пересекаются, но не вложены', first=space.describe(a),
                              second=space.describe(b))
    return result


def decompose_point_plus_open(space: SpaceModel, chain: list,
                              certificate: Optional[TailCertificate]) -> Decomposition:
    """
    Вычисляет пересечение убывающей цепи и раскладывает его в {x} ∪ A.

    Args:
        space (SpaceModel): Модель пространства.
        chain (list): Убывающая цепь базисных множеств.
        certificate (TailCertificate | None): Сертификат периодичности хвоста.

    Returns:
        Decomposition: unique, no-decomposition или not-adjudicable.

    Raises:
        ProtocolError: цепь не убывает или короче сертификата.
    """
    if certificate is None:
        return Decomposition('not-adjudicable', reason='нет сертификата конечности состояний')
    for index in range(len(chain) - 1):
        if not space.open_subset(chain[index + 1], chain[index]):
            raise ProtocolError('Цепь не убывает', round=index + 1)
    if len(chain) <= certificate.start + certificate.period:
        raise ProtocolError('Цепь короче сертификата', length=len(chain))
    limit = space.limit(chain, certificate.start, certificate.period)
    return decomposition_from_limit(space, limit)


def refine_to_disjoint_basics(space: SpaceModel, cover: Iterable, target: Any) -> list:
    """
    Измельчает покрытие до разбиения target на попарно непересекающиеся
    базисные множества: B̃_i = (target ∩ B_i) ∖ ⋃_{j<i} B_j.

    Меньшие множества идут первыми (по числу строго содержащих их элементов покрытия).

    Raises:
        CoverageError: покрытие не покрывает target; в witness: точка непокрытой части.
    """
    pieces = [piece for element in cover for piece in pieces_of(element)]

    def containers(piece: Any) -> int:
        return sum(1 for other in pieces if other != piece and space.is_subset(piece, other)
                   and not space.is_subset(other, piece))

    ordered = sorted(pieces, key=lambda piece: -containers(piece))
    result = []
    for index, piece in enumerate(ordered):
        part = space.intersect(target, piece)
        if part is None:
            continue
        result.extend(space.subtract([part], ordered[:index]))
    remainder = space.subtract([target], ordered)
    if remainder:
        witness = space.witness_point(remainder[0])
        raise CoverageError('Покрытие не покрывает множество', point=space.point_json(witness))
    return result


@dataclass
class SubbaseReport:
    members: int
    nested: bool = True
    nested_witness: Optional[tuple] = None
    noetherian: bool = True
    chain_depth: int = 0
    noetherian_witness: Optional[tuple] = None
    sigma_disjoint: bool = True
    antichains: int = 0
    sigma_witness: Optional[tuple] = None
    clopen: bool = True

    @property
    def passed(self) -> bool:
        return self.nested and self.noetherian and self.sigma_disjoint and self.clopen

    def to_json(self, space: SpaceModel) -> dict[str, Any]:
        def pair(witness: Optional[tuple]) -> Optional[list]:
            return None if witness is None else [space.describe(item) for item in witness]

        return {
            'members': self.members,
            'nested': self.nested,
            'nested_witness': pair(self.nested_witness),
            'noetherian': self.noetherian,
            'chain_depth': self.chain_depth,
            'noetherian_witness': pair(self.noetherian_witness),
            'sigma_disjoint': self.sigma_disjoint,
            'antichains': self.antichains,
            'sigma_witness': pair(self.sigma_witness),
            'clopen': self.clopen,
            'passed': self.passed,
        }


def default_family(space: SpaceModel, depth: Any) -> tuple[list, dict]:
    """Материализованное подбазисное семейство и индексы антицепей."""
    if isinstance(space, TreeSpace):
        tree = space.tree
        family, index = [], {}
        for node in tree.materialize(Height.parse(depth), space.width):
            basic = space.normalize(node)
            if basic not in index:
                family.append(basic)
                index[basic] = tree.antichain_index(space.canonical(node))
        return family, index
    if isinstance(space, NestedSpace):
        depth = Height.parse(depth)
        anchors = space.subbasic_family(depth.rest if not depth.omegas else 4)
        family = list(dict.fromkeys(space.normalize(anchor) for anchor in anchors))
        return family, {}
    raise NestednessError(f'Пространство {space.name} не задает подбазисного семейства')


def subbase_properties(space: SpaceModel, family: Optional[list] = None, depth: Any = 4,
                       index: Optional[dict] = None) -> SubbaseReport:
    """
    Проверяет вложенность, нётеровость и σ-дизъюнктность материализованного семейства.

    Нарушения не являются ошибками: отчет содержит пару или цепь-свидетель.
    """
    if family is None:
        family, default_index = default_family(space, depth)
        index = index or default_index
    members = list(dict.fromkeys(
        item if isinstance(item, (BasicOpen, Box)) else space.normalize(item) for item in family
    ))
    report = SubbaseReport(members=len(members))
    relation: dict[tuple[int, int], Comparison] = {}
    for i, j in itertools.combinations(range(len(members)), 2):
        result = space.cmp(members[i], members[j])
        relation[i, j] = result
        if result is Comparison.OVERLAP and report.nested:
            report.nested = False
            report.nested_witness = (members[i], members[j])

    def strictly_inside(i: int, j: int) -> bool:
        if i < j:
            return relation[i, j] is Comparison.A_IN_B
        return i != j and relation[j, i] is Comparison.B_IN_A

    supersets = {i: [j for j in range(len(members)) if strictly_inside(i, j)] for i in range(len(members))}
    for i, ups in supersets.items():
        report.chain_depth = max(report.chain_depth, len(ups) + 1)
        for a, b in itertools.combinations(ups, 2):
            if not (strictly_inside(a, b) or strictly_inside(b, a)) and report.noetherian:
                report.noetherian = False
                report.noetherian_witness = (members[i], members[a], members[b])
    levels = {
        i: (index[members[i]] if index and members[i] in index else len(supersets[i]))
        for i in range(len(members))
    }
    report.antichains = len(set(levels.values()))
    for i, j in itertools.combinations(range(len(members)), 2):
        if levels[i] == levels[j] and relation[i, j] is not Comparison.DISJOINT:
            report.sigma_disjoint = False
            report.sigma_witness = (members[i], members[j])
            break
    logger.debug('Подбаза %s: %d элементов, nested=%s', space.name, report.members, report.nested)
    return report


class Basis(ABC):
    """Базис, в котором ведется игра: допустимые множества и разложение по ним."""
    name = 'basis'

    @abstractmethod
    def admits(self, basic: Any) -> bool:
        pass

    def decompose(self, space: SpaceModel, basic: Any) -> list:
        if self.admits(basic):
            return [basic]
        raise UnsupportedError(f'Множество не раскладывается по базису {self.name}', basic=space.describe(basic))


class StandardBasis(Basis):
    name = 'standard'

    def admits(self, basic: Any) -> bool:
        return not isinstance(basic, OpenUnion)


class ParityBasis(Basis):
    """
    Базис из множеств, у которых якорь в сомножителе-дереве имеет четную высоту.

    Множество с нечетным якорем раскладывается по дочерним узлам.
    """
    name = 'parity'

    def __init__(self, factor: int = 0):
        self.factor = factor

    def _part(self, basic: Any) -> BasicOpen:
        return basic.factors[self.factor] if isinstance(basic, Box) else basic

    def admits(self, basic: Any) -> bool:
        if isinstance(basic, OpenUnion):
            return False
        anchor = self._part(basic).anchor
        return not isinstance(anchor, Node) or anchor.is_high or len(anchor.word) % 2 == 0

    def decompose(self, space: SpaceModel, basic: Any) -> list:
        if self.admits(basic):
            return [basic]
        base = base_space(space)
        tree = base.factors[self.factor] if isinstance(basic, Box) else base
        if not isinstance(tree, TreeSpace) or tree.tree.branching(self._part(basic).anchor) is None:
            raise UnsupportedError('Четный базис требует дерева с конечным ветвлением')
        part = self._part(basic)
        pieces = []
        for child in tree.maximal_subbasics(part.anchor, avoid=part.holes):
            piece = tree.intersect(part, tree.normalize(child))
            if piece is None:
                continue
            if isinstance(basic, Box):
                piece = Box(basic.factors[:self.factor] + (piece,) + basic.factors[self.factor + 1:])
            pieces.extend(self.decompose(space, piece))
        return pieces


@dataclass
class GeneratedBasis(Basis):
    """Базис [U, F], порожденный вложенным подбазисным семейством."""
    space: NestedSpace
    members: tuple
    name = 'generated'

    def meet(self, positives: Iterable, negatives: Iterable = ()) -> Optional[BasicOpen]:
        """Пересечение подбазисных множеств и дополнений; якорь: ⊆-минимальное из positives."""
        anchors = [self.space.canonical(anchor) for anchor in positives] or [self.space.whole_anchor]
        smallest = anchors[0]
        for anchor in anchors[1:]:
            match self.space.relation(anchor, smallest):
                case Relation.DISJOINT:
                    return None
                case Relation.SUB:
                    smallest = anchor
        return self.space.normalize(smallest, negatives)

    def enumerate(self, max_holes: int = 2) -> list[BasicOpen]:
        found = {}
        for anchor in self.members:
            inner = [m for m in self.members if self.space.relation(m, anchor) is Relation.SUB]
            for size in range(max_holes + 1):
                for holes in itertools.combinations(inner, size):
                    basic = self.space.normalize(anchor, holes)
                    if basic is not None:
                        found.setdefault(basic, None)
        return sorted(found, key=self.space.sort_key)

    def admits(self, basic: BasicOpen) -> bool:
        """
        Равно ли множество какому-нибудь [U, F] с U и F из семейства.

        Якорь нормальной формы может лежать ниже U; для каждого U над якорем
        дырами берутся все члены семейства внутри U, не пересекающие множество.
        """
        if not isinstance(basic, BasicOpen):
            return False
        for anchor in self.members:
            if self.space.relation(basic.anchor, anchor) not in (Relation.EQUAL, Relation.SUB):
                continue
            holes = [
                member for member in self.members
                if self.space.relation(member, anchor) is Relation.SUB
                and self.space.intersect(basic, self.space.normalize(member)) is None
            ]
            if self.space.normalize(anchor, holes) == basic:
                return True
        return False


def generated_basis(space: NestedSpace, family: Iterable, depth: Any = 4) -> GeneratedBasis:
    """
    Raises:
        NestednessError: семейство не вложено (нормальная форма не гарантирована).
    """
    family = list(family)
    report = subbase_properties(space, family, depth)
    if not report.nested:
        first, second = report.nested_witness
        raise NestednessError('Семейство не вложено', first=space.describe(first), second=space.describe(second))
    anchors = []
    for item in family:
        basic = item if isinstance(item, BasicOpen) else space.normalize(item)
        if basic.holes:
            raise NestednessError('Элемент семейства не подбазисный', member=space.describe(basic))
        anchors.append(basic.anchor)
    return GeneratedBasis(space, tuple(dict.fromkeys(anchors)))
