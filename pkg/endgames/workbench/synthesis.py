"""
Синтез дерева T_C по выигрышной стратегии игрока II.

Узлы дерева: нормализованные базисные множества [U, F], упорядоченные
обратным включением. Потомки узла: объединение разбиений K'[W, H] по
элементам покрытия ψ([U, F]); предельные узлы (вершины) навешиваются на
конечно заданные лучи дерева.
"""
import itertools
import logging

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Optional

from .exceptions import (
    ConfigurationError, EmptySetError, NestednessError, ProtocolError, UnsupportedError,
)
from .games import END, Cover, MatchState, StrategyHandle, ask_strategy, find_period, validate_move
from .order_tree import Node, RayDescriptor
from .spaces import (
    INFINITE, BasicOpen, Comparison, NestedSpace, Relation, SpaceModel, TreeSpace,
    decompose_point_plus_open, subbase_properties,
)


logger = logging.getLogger(__name__)

RHO_SCAN = 1000
TRACE_STEPS = 24
ABOVE_TOPS = 3


@dataclass(frozen=True)
class Dichotomy:
    """Случай i: у каждой точки есть меньшее подбазисное множество; случай ii: единственная точка x без него."""
    case: str
    point: Any = None


@dataclass
class KPrime:
    """Разбиение K'[U, F] с номером пункта построения (1–4)."""
    item: int
    pieces: tuple
    rest: Optional[BasicOpen] = None
    point: Any = None
    fallbacks: tuple = ()

    def all_pieces(self) -> tuple:
        return self.pieces + ((self.rest,) if self.rest is not None else ())


class Subbase:
    """
    Вложенная нётерова подбаза модели с таблицей конфинальных последовательностей ρ.

    Если rho_table не задана, ρ(U) берется из модели в порядке представления
    и запоминается.
    """

    def __init__(self, space: NestedSpace, rho_table: Optional[dict] = None, width: Optional[int] = None):
        if not isinstance(space, NestedSpace):
            raise UnsupportedError(f'Пространство {space.name} не задает вложенной подбазы')
        self.space = space
        self.width = width
        self.rho_table = None if rho_table is None else {
            space.canonical(anchor): tuple(space.canonical(item) for item in items)
            for anchor, items in rho_table.items()
        }
        self._consumed: dict[Any, list] = {}
        self._pending: dict[Any, Iterator] = {}

    @classmethod
    def from_json(cls, space: NestedSpace, payload: dict, width: Optional[int] = None) -> 'Subbase':
        """Таблица ρ в виде {"<якорь>": ["<якорь>", ...]}."""
        table = {
            space.parse_anchor(anchor): [space.parse_anchor(item) for item in items]
            for anchor, items in payload.items()
        }
        return cls(space, table, width)

    def rho(self, anchor: Any) -> Iterator:
        anchor = self.space.canonical(anchor)
        if self.rho_table is not None:
            if anchor not in self.rho_table:
                raise ConfigurationError(
                    f'В таблице ρ нет последовательности для {self.space.anchor_json(anchor)}',
                    anchor=self.space.anchor_json(anchor),
                )
            yield from self.rho_table[anchor]
            return
        consumed = self._consumed.setdefault(anchor, [])
        pending = self._pending.setdefault(anchor, itertools.islice(self.space.rho(anchor), RHO_SCAN))
        yield from consumed
        for item in pending:
            consumed.append(item)
            yield item

    def window_maximum(self, anchor: Any, ceiling: Any) -> Optional[Any]:
        """⊆-наибольший элемент ρ(anchor), строго лежащий в ceiling."""
        for candidate in self.rho(anchor):
            match self.space.relation(candidate, ceiling):
                case Relation.SUB:
                    return candidate
                case Relation.DISJOINT:
                    return None
        return None


def dichotomy_case(subbase: Subbase, basic: Optional[BasicOpen]) -> Dichotomy:
    """
    Определяет, какой из двух случаев выполняется для [U, F].

    Raises:
        EmptySetError: множество пусто.
    """
    space = subbase.space
    if basic is None:
        raise EmptySetError('Дихотомия определена только для непустых множеств')
    point = space.minimal_point(basic.anchor)
    if point is not None and space.contains(basic, point):
        return Dichotomy('ii', point)
    return Dichotomy('i')


def _layers(space: NestedSpace, basic: BasicOpen, enlarged: Iterable) -> list:
    """Слои W ∖ (дыры внутри W ∪ меньшие расширенные множества) для попарно вложенных W."""
    enlarged = list(dict.fromkeys(enlarged))
    pieces = []
    for top in enlarged:
        inner = [hole for hole in basic.holes if space.relation(hole, top) in (Relation.SUB, Relation.EQUAL)]
        inner += [other for other in enlarged if space.relation(other, top) is Relation.SUB]
        piece = space.normalize(top, inner)
        if piece is not None:
            pieces.append(piece)
    return pieces


def kprime_partition(subbase: Subbase, basic: BasicOpen, width: Optional[int] = None) -> KPrime:
    """
    Строит разбиение K'[U, F] по пунктам 1–4.

    Пункт 1 (случай i): максимальные подбазисные множества, пересекающие [U, F],
    без расширенных дыр U'_α и слои расширенных дыр. Пункт 2 (случай ii, F' ≠ ∅):
    U без расширенных дыр и слои. Пункт 3: одноточечное множество. Пункт 4:
    {U_y, [U, F] ∖ U_y}.

    Raises:
        EmptySetError: множество пусто.
        ConfigurationError: в таблице ρ нет нужной последовательности.
    """
    space = subbase.space
    width = width or subbase.width
    case = dichotomy_case(subbase, basic)
    if case.case == 'i':
        return _item_one(subbase, basic, width)
    enlarged, fallbacks = [], []
    for hole in basic.holes:
        wider = subbase.window_maximum(hole, basic.anchor)
        if wider is not None:
            enlarged.append(wider)
        else:
            fallbacks.append(hole)
    if enlarged:
        first = space.normalize(basic.anchor, [*enlarged, *fallbacks])
        pieces = ([first] if first is not None else []) + _layers(space, basic, enlarged)
        return KPrime(2, tuple(pieces), point=case.point)
    if space.singleton(basic) is not None:
        return KPrime(3, (basic,), point=case.point)
    for sub in space.maximal_subbasics(basic.anchor, width, avoid=basic.holes):
        near = space.intersect(basic, space.normalize(sub))
        if near is None:
            continue
        far = space.normalize(basic.anchor, basic.holes + (sub,))
        return KPrime(4, tuple(piece for piece in (near, far) if piece is not None), point=case.point)
    raise UnsupportedError('Не найдено подбазисное множество U_y', basic=space.describe(basic))


def _item_one(subbase: Subbase, basic: BasicOpen, width: Optional[int]) -> KPrime:
    space = subbase.space
    subs = space.maximal_subbasics(basic.anchor, width, avoid=basic.holes)
    hosts = [sub for sub in subs if space.intersect(basic, space.normalize(sub)) is not None]
    enlarged, fallbacks = [], []
    for hole in basic.holes:
        host = next((m for m in hosts if space.relation(hole, m) is Relation.SUB), None)
        if host is None:
            continue
        wider = subbase.window_maximum(hole, host)
        if wider is None:
            fallbacks.append(hole)
            wider = hole
        enlarged.append(wider)
    pieces = [space.normalize(host, enlarged) for host in hosts]
    pieces = [piece for piece in pieces if piece is not None] + _layers(space, basic, enlarged)
    rest = None
    if isinstance(space, TreeSpace) and space.tree.branching(basic.anchor) is None:
        rest = space.normalize(basic.anchor, basic.holes + tuple(subs))
    if fallbacks:
        logger.debug('U\' совпало с дырой для %d дыр в %s', len(fallbacks), space.describe(basic))
    return KPrime(1, tuple(pieces), rest=rest, fallbacks=tuple(fallbacks))


@dataclass
class SynthNode:
    key: tuple
    label: BasicOpen
    item: Optional[int]
    parent: Optional[tuple]
    level: int
    limit_of: Any = None
    loop: bool = False

    @property
    def name(self) -> str:
        if self.limit_of is not None:
            return f'top:{self.limit_of}:{self.key[-1]}'
        return '.'.join(map(str, self.key)) or 'ε'


@dataclass
class LimitAttachment:
    """Вершины K[A], навешенные на луч T_C, и разложение ⋂ = {x} ∪ A."""
    point: Any
    path: tuple
    verdict: str
    tops: tuple = ()
    symbolic: Optional[dict] = None
    above_tops: tuple = ()


@dataclass
class SynthTree:
    space: SpaceModel
    strategy: str
    depth: int
    nodes: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)
    limits: list = field(default_factory=list)
    fallbacks: list = field(default_factory=list)
    expander: Any = field(default=None, repr=False)

    @property
    def root(self) -> SynthNode:
        return self.nodes[()]

    def level(self, index: int) -> list[SynthNode]:
        return [node for node in self.nodes.values() if node.limit_of is None and node.level == index]

    def tops(self) -> list[SynthNode]:
        return [node for node in self.nodes.values() if node.limit_of is not None]

    def family(self) -> tuple[list, dict]:
        """Множества узлов и индекс антицепи (уровень; вершины: отдельные уровни над конечными)."""
        index = {}
        for node in self.nodes.values():
            level = node.level if node.limit_of is None else self.depth + 1 + node.level
            index.setdefault(node.label, level)
        return list(index), index

    def to_json(self) -> dict[str, Any]:
        space = self.space
        return {
            'space': space.name,
            'strategy': self.strategy,
            'depth': self.depth,
            'nodes': [
                {
                    'key': node.name,
                    'parent': None if node.parent is None else self.nodes[node.parent].name,
                    'level': node.level if node.limit_of is None else 'omega',
                    'item': node.item,
                    'set': space.describe(node.label),
                    'loop': node.loop,
                }
                for node in sorted(self.nodes.values(), key=_node_order)
            ],
            'limits': [
                {
                    'point': space.point_json(item.point),
                    'verdict': item.verdict,
                    'path': ['.'.join(map(str, key)) or 'ε' for key in item.path],
                    'tops': [space.describe(top) for top in item.tops],
                    'symbolic': item.symbolic,
                    'above_tops': list(item.above_tops),
                }
                for item in self.limits
            ],
            'fallbacks': [space.describe(hole) for hole in self.fallbacks],
        }


def _node_order(node: SynthNode) -> tuple:
    return (node.limit_of is not None, node.level, len(node.key), node.key)


class _Expander:
    """Запоминающее вычисление K[U, F] = ⋃ K'[W, H] по ψ([U, F])."""

    def __init__(self, subbase: Subbase, psi: StrategyHandle, width: Optional[int]):
        self.subbase = subbase
        self.psi = psi
        self.width = width
        self.cache: dict[BasicOpen, list[tuple[BasicOpen, int]]] = {}
        self.fallbacks: dict[Any, None] = {}

    def cover(self, basic: BasicOpen) -> Cover:
        space = self.subbase.space
        state = MatchState(END, horizon=1).with_move(basic)
        cover, violation = ask_strategy(self.psi, space, state, self.width)
        violation = violation or validate_move(space, state, cover)
        if violation:
            raise ProtocolError(
                f'Стратегия {self.psi.name} нарушила правило {violation.rule} в узле',
                node=space.describe(basic), rule=violation.rule,
            )
        return cover

    def expand(self, basic: BasicOpen) -> list[tuple[BasicOpen, int]]:
        if basic in self.cache:
            return self.cache[basic]
        space = self.subbase.space
        found: dict[BasicOpen, int] = {}
        for piece in self.cover(basic).all_pieces():
            partition = kprime_partition(self.subbase, piece, self.width)
            for hole in partition.fallbacks:
                self.fallbacks.setdefault(hole, None)
            for part in partition.all_pieces():
                found.setdefault(part, partition.item)
        children = sorted(found.items(), key=lambda pair: space.sort_key(pair[0]))
        state = MatchState(END, horizon=1).with_move(basic)
        violation = validate_move(space, state, Cover(tuple(part for part, _ in children)))
        if violation:
            raise ProtocolError(f'Потомки узла не разбивают его: {violation.rule}',
                                node=space.describe(basic), **violation.witness)
        self.cache[basic] = children
        return children

    def descend(self, point: Any, steps: int = TRACE_STEPS) -> list[tuple[tuple, BasicOpen]]:
        """Путь по T_C через узлы, содержащие точку; обрывается на петле пункта 3."""
        space = self.subbase.space
        label, key = space.whole(), ()
        path = [(key, label)]
        for _ in range(steps):
            children = self.expand(label)
            index = next((i for i, (child, _) in enumerate(children) if space.contains(child, point)), None)
            if index is None:
                break
            child = children[index][0]
            if child == label:
                break
            label, key = child, key + (index,)
            path.append((key, label))
        return path


def smallest_subbasic(space: NestedSpace, point: Any, steps: int = 64) -> Any:
    """Наименьшее подбазисное множество, содержащее изолированную точку."""
    if isinstance(space, TreeSpace) and isinstance(point, RayDescriptor) and point.is_long:
        return Node(ray=point.omega_part(), top=point.top)
    anchor = space.whole_anchor
    for _ in range(steps):
        inner = [sub for sub in space.maximal_subbasics(anchor, avoid=()) if space.anchor_contains(sub, point)]
        if not inner:
            return anchor
        anchor = inner[0]
    return anchor


def _attach(tree: SynthTree, expander: _Expander, point: Any) -> Optional[LimitAttachment]:
    space = expander.subbase.space
    path = expander.descend(point)
    labels = [label for _, label in path]
    keys = [(space.relative_key(label), space.target_signature(label, point)) for label in labels]
    certificate = find_period(keys)
    if certificate is None or labels[-1] == labels[certificate.start]:
        return None
    decomposition = decompose_point_plus_open(space, labels, certificate)
    attachment = LimitAttachment(decomposition.point, tuple(key for key, _ in path), decomposition.verdict)
    limit = decomposition.limit
    if not decomposition.unique or limit is None:
        return attachment
    rest = [p for p in limit.interior + limit.boundary if p != decomposition.point]
    if limit.total == INFINITE and not rest:
        attachment.symbolic = dict(limit.description)
        return attachment
    tops = [space.normalize(smallest_subbasic(space, p)) for p in rest]
    attachment.tops = tuple(sorted(dict.fromkeys(top for top in tops if top is not None), key=space.sort_key))
    items = []
    for top in attachment.tops:
        label = top
        for _ in range(ABOVE_TOPS):
            children = expander.expand(label)
            items.append(children[0][1] if len(children) == 1 else 0)
            if len(children) != 1 or children[0][0] == label:
                break
            label = children[0][0]
    attachment.above_tops = tuple(items)
    return attachment


def build_tc(subbase: Subbase, psi: StrategyHandle, depth: int = 4, width: Optional[int] = None,
             limit_points: Optional[Iterable] = None) -> SynthTree:
    """
    Строит T_C до глубины depth и навешивает вершины на лучи через выборочные точки.

    Args:
        subbase (Subbase): Специальная подбаза пространства.
        psi (StrategyHandle): Стационарная стратегия игрока II.
        depth (int): Число материализуемых уровней.
        width (int | None): Бюджет ширины покрытий.
        limit_points (Iterable | None): Конечно заданные точки, по лучам которых ищутся вершины.

    Returns:
        SynthTree: Дерево с потомками, пунктами построения и предельными узлами.

    Raises:
        ProtocolError: стратегия дала нелегальный ответ (в witness: узел).
        NestednessError: подбаза не вложена.
    """
    space = subbase.space
    if not psi.stationary:
        raise UnsupportedError(f'Синтез требует стационарной стратегии, {psi.name} не стационарна')
    report = subbase_properties(space, depth=min(depth, 3))
    if not report.passed:
        raise NestednessError('Подбаза пространства не специальная', report=report.to_json(space))
    expander = _Expander(subbase, psi, width or subbase.width)
    tree = SynthTree(space, psi.name, depth, expander=expander)
    tree.nodes[()] = SynthNode((), space.whole(), None, None, 0)
    frontier = [()]
    for level in range(1, depth + 1):
        next_frontier = []
        for key in frontier:
            parent = tree.nodes[key]
            children = expander.expand(parent.label)
            if len(children) == 1 and children[0][0] == parent.label:
                parent.loop = True
                tree.children[key] = []
                continue
            tree.children[key] = []
            for index, (label, item) in enumerate(children):
                child = key + (index,)
                tree.nodes[child] = SynthNode(child, label, item, key, level)
                tree.children[key].append(child)
                next_frontier.append(child)
        frontier = next_frontier
    if limit_points is None:
        limit_points = [p for p in space.sample_points(2, 2) if not space.is_isolated(p)]
    seen = set()
    for point in limit_points:
        attachment = _attach(tree, expander, point)
        if attachment is None or attachment.point in seen:
            continue
        seen.add(attachment.point)
        tree.limits.append(attachment)
        anchor_key = attachment.path[min(len(attachment.path), depth + 1) - 1]
        for index, top in enumerate(attachment.tops):
            key = anchor_key + ('top', space.point_json(attachment.point), index)
            tree.nodes[key] = SynthNode(key, top, 3, anchor_key, 0, limit_of=space.point_json(attachment.point))
    tree.fallbacks = list(expander.fallbacks)
    logger.info('T_C для %s построено: %d узлов, %d предельных присоединений',
                space.name, len(tree.nodes), len(tree.limits))
    return tree


@dataclass
class Bisimulation:
    """Сертификат совпадения решеток базисных множеств до глубины depth."""
    depth: int
    matched: int = 0
    correspondence: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict[str, Any]:
        return {
            'depth': self.depth,
            'matched': self.matched,
            'passed': self.passed,
            'correspondence': self.correspondence,
            'mismatches': self.mismatches,
        }


def tc_bisimulation(tree: SynthTree, depth: Optional[int] = None) -> Bisimulation:
    """
    Сравнивает порядок T_C с включением множеств и проверяет, что каждое
    подбазисное множество глубины ≤ depth: объединение узлов одного уровня.
    """
    space = tree.space
    depth = tree.depth if depth is None else min(depth, tree.depth)
    certificate = Bisimulation(depth)
    nodes = [node for node in tree.nodes.values() if node.limit_of is None and node.level <= depth]
    for node in sorted(nodes, key=_node_order):
        certificate.correspondence.append({'node': node.name, 'set': space.describe(node.label)})
    for a, b in itertools.combinations(nodes, 2):
        if b.key[:len(a.key)] == a.key:
            expected = Comparison.B_IN_A
        elif a.key[:len(b.key)] == b.key:
            expected = Comparison.A_IN_B
        else:
            expected = Comparison.DISJOINT
        relation = space.cmp(a.label, b.label)
        if relation is not expected:
            certificate.mismatches.append({'first': a.name, 'second': b.name, 'relation': relation.value})
    if isinstance(space, NestedSpace):
        for anchor in space.subbasic_family(depth):
            target = space.normalize(anchor)
            if not any(_is_union_of_level(space, target, tree.level(level)) for level in range(depth + 1)):
                certificate.mismatches.append({'subbasic': space.describe(target), 'reason': 'не объединение узлов'})
    certificate.matched = len(nodes) if certificate.passed else 0
    return certificate


def _is_union_of_level(space: SpaceModel, target: BasicOpen, level: list[SynthNode]) -> bool:
    inside = [node.label for node in level if space.is_subset(node.label, target)]
    return bool(inside) and not space.subtract([target], inside)


@dataclass
class SynthReport:
    subbase: dict
    local_basis: dict
    completeness: dict
    slices: dict
    fallbacks: list
    bisimulation: dict

    @property
    def passed(self) -> bool:
        return (self.subbase['passed'] and not self.local_basis['fail'] and not self.completeness['fail']
                and not self.slices['violations'])

    def to_json(self) -> dict[str, Any]:
        return {
            'subbase': self.subbase,
            'local_basis': self.local_basis,
            'completeness': self.completeness,
            'slices': self.slices,
            'fallbacks': self.fallbacks,
            'bisimulation': self.bisimulation,
            'passed': self.passed,
        }


def _tally() -> dict:
    return {'pass': 0, 'depth_limited': 0, 'fail': 0, 'witnesses': []}


def _sample_basics(space: NestedSpace, depth: int) -> list[BasicOpen]:
    anchors = space.subbasic_family(depth)
    basics = []
    for anchor in anchors:
        inner = [other for other in anchors if space.relation(other, anchor) is Relation.SUB]
        for holes in itertools.chain([()], ((hole,) for hole in inner)):
            basic = space.normalize(anchor, holes)
            if basic is not None:
                basics.append(basic)
    return list(dict.fromkeys(basics))


def _neighbourhoods(tree: SynthTree, point: Any) -> list[BasicOpen]:
    """Элементы V_x: узлы пути точки без вершин K[A_x]; для изолированных: содержащие ее вершины."""
    space = tree.space
    path = [label for _, label in tree.expander.descend(point)]
    tops = []
    for item in tree.limits:
        if item.point == point:
            tops.extend(top.anchor for top in item.tops)
    found = []
    for label in path:
        candidate = space.normalize(label.anchor, label.holes + tuple(tops))
        if candidate is not None and space.contains(candidate, point):
            found.append(candidate)
    found.extend(node.label for node in tree.tops() if space.contains(node.label, point))
    return found


def _descent_certified(tree: SynthTree, point: Any) -> bool:
    """Путь точки по T_C оборвался раньше предела шагов или имеет периодический хвост."""
    space = tree.space
    path = tree.expander.descend(point)
    if len(path) <= TRACE_STEPS:
        return True
    labels = [label for _, label in path]
    keys = [(space.relative_key(label), space.target_signature(label, point)) for label in labels]
    return find_period(keys) is not None


def verify_synth_subbase(tree: SynthTree, depth: int = 3, samples: Optional[list] = None) -> SynthReport:
    """
    Проверяет семейство узлов T_C: вложенность, нётеровость и σ-дизъюнктность,
    локальную базу в выборочных точках, полноту на выборочных замкнутых
    множествах и срезы T_U с фиксированным якорем.

    Нарушения не бросаются, а попадают в отчет со свидетелями.
    """
    space = tree.space
    family, index = tree.family()
    properties = subbase_properties(space, family, index=index).to_json(space)
    points = samples if samples is not None else space.sample_points(2, 2)
    basics = _sample_basics(space, min(depth, 2)) if isinstance(space, NestedSpace) else [space.whole()]

    local = _tally()
    for point in points:
        neighbourhoods = _neighbourhoods(tree, point)
        certified = None
        for basic in basics:
            if not space.contains(basic, point):
                continue
            if any(space.is_subset(v, basic) for v in neighbourhoods):
                local['pass'] += 1
                continue
            if certified is None:
                certified = _descent_certified(tree, point)
            if not certified:
                local['depth_limited'] += 1
                continue
            local['fail'] += 1
            local['witnesses'].append({'point': space.point_json(point), 'open': space.describe(basic)})

    completeness = _tally()
    for point in points:
        for basic, complement in itertools.product(basics[:8], (False, True)):
            outcome = _completeness_check(tree, point, basic, complement)
            completeness[outcome] += 1
            if outcome == 'fail':
                completeness['witnesses'].append({
                    'point': space.point_json(point),
                    'closed': {'set': space.describe(basic), 'complement': complement},
                })

    slices = _anchor_slices(tree)
    report = SynthReport(
        subbase=properties,
        local_basis=local,
        completeness=completeness,
        slices=slices,
        fallbacks=[space.describe(hole) for hole in tree.fallbacks],
        bisimulation=tc_bisimulation(tree).to_json(),
    )
    logger.info('Проверка T_C для %s: passed=%s', space.name, report.passed)
    return report


def _meets(space: SpaceModel, label: BasicOpen, basic: BasicOpen, complement: bool) -> bool:
    if complement:
        return bool(space.subtract([label], [basic]))
    return space.intersect(label, basic) is not None


def _completeness_check(tree: SynthTree, point: Any, basic: BasicOpen, complement: bool) -> str:
    """Цепь узлов пути точки, центрированная на Y, должна иметь непустое пересечение с Y."""
    space = tree.space
    labels = [label for _, label in tree.expander.descend(point)]
    if not all(_meets(space, label, basic, complement) for label in labels):
        return 'pass'
    keys = [(space.relative_key(label), space.target_signature(label, point)) for label in labels]
    certificate = find_period(keys)
    if certificate is None:
        return 'depth_limited'
    if labels[-1] == labels[certificate.start]:
        return 'pass'
    decomposition = decompose_point_plus_open(space, labels, certificate)
    limit = decomposition.limit
    if limit is None:
        return 'depth_limited'
    listed = limit.interior + limit.boundary
    if any(space.contains(basic, p) != complement for p in listed):
        return 'pass'
    if limit.total == INFINITE:
        return 'depth_limited'
    return 'fail'


def _anchor_slices(tree: SynthTree) -> dict:
    """Ниже каждого ⊆-максимального узла с якорем U узлы с тем же якорем образуют цепь."""
    space = tree.space
    by_anchor: dict[Any, list[SynthNode]] = {}
    for node in tree.nodes.values():
        if node.limit_of is None:
            by_anchor.setdefault(node.label.anchor, []).append(node)
    violations, chains = [], 0
    for anchor, members in by_anchor.items():
        keys = {node.key for node in members}
        maximal = [node for node in members if not any(node.key[:i] in keys for i in range(len(node.key)))]
        for top in maximal:
            below = [node for node in members if node is not top and node.key[:len(top.key)] == top.key]
            for a, b in itertools.combinations(below, 2):
                if a.key != b.key[:len(a.key)] and b.key != a.key[:len(b.key)]:
                    violations.append({'anchor': space.anchor_json(anchor), 'first': a.name, 'second': b.name})
                    break
            chains += 1
    return {'anchors': len(by_anchor), 'chains': chains, 'violations': violations}
