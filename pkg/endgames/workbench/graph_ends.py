"""
Локально конечные графы, концы по Халину на конечной глубине и доминирование.

Граф задается оракулом смежности; вычисления идут на усечении: шаре
заданного радиуса вокруг сепаратора и начальной вершины.
"""
import logging

from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Optional

import networkx as nx

from .exceptions import DomainMismatchError, InvalidWalkError, PresentationError, UnsupportedError
from .order_tree import parse_word, tree_from_preset
from .spaces import CofiniteSpace, FiniteDiscreteSpace, SpaceModel, TreeSpace


logger = logging.getLogger(__name__)

DEFAULT_RADIUS = 20
DEFAULT_BUDGET = 16

SAME = 'same-component'
SEPARATED = 'separated'
UNDETERMINED = 'undetermined'


class GraphPresentation(ABC):
    """Граф, заданный оракулом смежности и начальной вершиной."""
    preset = 'graph'
    origin: Hashable = None

    @abstractmethod
    def contains(self, vertex: Any) -> bool:
        pass

    @abstractmethod
    def neighbors(self, vertex: Any, budget: int = DEFAULT_BUDGET) -> list:
        """Соседи вершины; у вершин бесконечной степени: первые budget."""
        pass

    @abstractmethod
    def step(self, vertex: Any, move: str) -> Any:
        pass

    @abstractmethod
    def parse_vertex(self, text: str) -> Any:
        pass

    def truncated(self, vertex: Any, budget: int) -> bool:
        return False

    def vertex_key(self, vertex: Any) -> tuple:
        return tuple(vertex)

    def vertex_json(self, vertex: Any) -> Any:
        return list(vertex)

    def describe(self) -> dict[str, Any]:
        return {'preset': self.preset}

    def require(self, *vertices: Any) -> None:
        for vertex in vertices:
            if not self.contains(vertex):
                raise DomainMismatchError(f'Вершины {vertex!r} нет в графе {self.preset}', vertex=vertex)

    def ball(self, sources: Iterable, radius: int, budget: int = DEFAULT_BUDGET) -> tuple[nx.Graph, dict]:
        """Индуцированный подграф на вершинах на расстоянии ≤ radius от sources и расстояния."""
        sources = list(dict.fromkeys(sources))
        self.require(*sources)
        distance = {vertex: 0 for vertex in sources}
        queue = deque(sources)
        graph = nx.Graph()
        graph.add_nodes_from(sources)
        while queue:
            vertex = queue.popleft()
            for other in self.neighbors(vertex, budget):
                if other not in distance:
                    if distance[vertex] >= radius:
                        continue
                    distance[other] = distance[vertex] + 1
                    queue.append(other)
                graph.add_edge(vertex, other)
        return graph, distance

    def parse_walk(self, text: str) -> 'RayWalk':
        """Блуждание "<старт>/<ходы stem через запятую или ->/<ходы цикла>"."""
        parts = str(text).split('/')
        if len(parts) != 3:
            raise PresentationError(f'Ожидается "<старт>/<stem>/<цикл>": {text!r}')

        def moves(chunk: str) -> tuple:
            chunk = chunk.strip()
            return () if chunk in ('', '-') else tuple(item.strip() for item in chunk.split(','))

        walk = RayWalk(self.parse_vertex(parts[0]), moves(parts[1]), moves(parts[2]))
        walk.vertices(self, len(walk.stem) + 2 * len(walk.cycle))
        return walk


class Ladder(GraphPresentation):
    """Двусторонняя лестница ℤ × {0, 1}: два конца."""
    preset = 'ladder'
    origin = (0, 0)

    def contains(self, vertex: Any) -> bool:
        return isinstance(vertex, tuple) and len(vertex) == 2 and vertex[1] in (0, 1) and isinstance(vertex[0], int)

    def neighbors(self, vertex: Any, budget: int = DEFAULT_BUDGET) -> list:
        i, side = vertex
        return [(i - 1, side), (i + 1, side), (i, 1 - side)]

    def step(self, vertex: Any, move: str) -> Any:
        i, side = vertex
        match move:
            case 'R':
                return i + 1, side
            case 'L':
                return i - 1, side
            case 'X':
                return i, 1 - side
        raise InvalidWalkError(f'Недопустимый ход лестницы: {move!r}', move=move)

    def parse_vertex(self, text: str) -> Any:
        try:
            i, side = (int(part) for part in str(text).split(','))
        except ValueError:
            raise PresentationError(f'Ожидается вершина "i,s": {text!r}')
        vertex = (i, side)
        self.require(vertex)
        return vertex


class Grid(GraphPresentation):
    """Решетка ℤ²: один конец."""
    preset = 'grid'
    origin = (0, 0)
    MOVES = {'R': (1, 0), 'L': (-1, 0), 'U': (0, 1), 'D': (0, -1)}

    def contains(self, vertex: Any) -> bool:
        return isinstance(vertex, tuple) and len(vertex) == 2 and all(isinstance(c, int) for c in vertex)

    def neighbors(self, vertex: Any, budget: int = DEFAULT_BUDGET) -> list:
        i, j = vertex
        return [(i + di, j + dj) for di, dj in self.MOVES.values()]

    def step(self, vertex: Any, move: str) -> Any:
        if move not in self.MOVES:
            raise InvalidWalkError(f'Недопустимый ход решетки: {move!r}', move=move)
        di, dj = self.MOVES[move]
        return vertex[0] + di, vertex[1] + dj

    def parse_vertex(self, text: str) -> Any:
        try:
            i, j = (int(part) for part in str(text).split(','))
        except ValueError:
            raise PresentationError(f'Ожидается вершина "i,j": {text!r}')
        return i, j


class BinaryTreeGraph(GraphPresentation):
    """Бинарное дерево как граф на словах; его концы образуют канторово множество."""
    preset = 'binary_tree'
    origin = ()

    def contains(self, vertex: Any) -> bool:
        return isinstance(vertex, tuple) and all(letter in (0, 1) for letter in vertex)

    def neighbors(self, vertex: Any, budget: int = DEFAULT_BUDGET) -> list:
        found = [vertex + (0,), vertex + (1,)]
        return ([vertex[:-1]] if vertex else []) + found

    def step(self, vertex: Any, move: str) -> Any:
        match move:
            case '0' | '1':
                return vertex + (int(move),)
            case 'u' if vertex:
                return vertex[:-1]
        raise InvalidWalkError(f'Недопустимый ход в дереве из {vertex}: {move!r}', move=move)

    def vertex_key(self, vertex: Any) -> tuple:
        return (len(vertex), vertex)

    def vertex_json(self, vertex: Any) -> Any:
        return ''.join(map(str, vertex)) or 'ε'

    def parse_vertex(self, text: str) -> Any:
        vertex = parse_word(text)
        self.require(vertex)
        return vertex


class KappaRays(GraphPresentation):
    """
    Выделенный луч ξ = ('xi', n) и лучи ('ray', α, n), α = 1..κ.

    Первая вершина каждого луча α смежна со всеми вершинами ξ, поэтому
    доминирует ξ. kappa=None: символическое κ, перечисляемое до бюджета.
    """
    preset = 'kappa_rays'
    origin = ('xi', 0)

    def __init__(self, kappa: Optional[int] = None):
        if kappa is not None and kappa < 1:
            raise PresentationError('kappa должно быть ≥ 1')
        self.kappa = kappa

    def describe(self) -> dict[str, Any]:
        return {'preset': self.preset, 'kappa': 'symbolic' if self.kappa is None else self.kappa}

    def _alphas(self, budget: int) -> range:
        return range(1, (self.kappa if self.kappa is not None else budget) + 1)

    def contains(self, vertex: Any) -> bool:
        match vertex:
            case ('xi', int(n)):
                return n >= 0
            case ('ray', int(alpha), int(n)):
                return alpha >= 1 and n >= 0 and (self.kappa is None or alpha <= self.kappa)
        return False

    def neighbors(self, vertex: Any, budget: int = DEFAULT_BUDGET) -> list:
        match vertex:
            case ('xi', n):
                found = [('xi', n + 1)] + ([('xi', n - 1)] if n else [])
                return found + [('ray', alpha, 0) for alpha in self._alphas(budget)]
            case ('ray', alpha, 0):
                return [('ray', alpha, 1)] + [('xi', m) for m in range(budget + 1)]
            case ('ray', alpha, n):
                return [('ray', alpha, n - 1), ('ray', alpha, n + 1)]
        raise DomainMismatchError(f'Вершины {vertex!r} нет в графе', vertex=vertex)

    def truncated(self, vertex: Any, budget: int) -> bool:
        match vertex:
            case ('ray', _, 0):
                return True
            case ('xi', _):
                return self.kappa is None or self.kappa > budget
        return False

    def step(self, vertex: Any, move: str) -> Any:
        match vertex, move:
            case ('xi', n), 'f':
                return 'xi', n + 1
            case ('xi', n), 'b' if n:
                return 'xi', n - 1
            case ('ray', alpha, n), 'f':
                return 'ray', alpha, n + 1
            case ('ray', alpha, n), 'b' if n:
                return 'ray', alpha, n - 1
            case ('xi', _), _ if move.startswith('j') and move[1:].isdigit():
                target = ('ray', int(move[1:]), 0)
                self.require(target)
                return target
            case ('ray', _, 0), _ if move.startswith('x') and move[1:].isdigit():
                return 'xi', int(move[1:])
        raise InvalidWalkError(f'Недопустимый ход из {vertex}: {move!r}', move=move)

    def vertex_key(self, vertex: Any) -> tuple:
        return (0, 0, vertex[1]) if vertex[0] == 'xi' else (1, vertex[1], vertex[2])

    def vertex_json(self, vertex: Any) -> Any:
        return ':'.join(map(str, vertex))

    def parse_vertex(self, text: str) -> Any:
        parts = str(text).strip().split(':')
        try:
            vertex = (parts[0],) + tuple(int(part) for part in parts[1:])
        except ValueError:
            raise PresentationError(f'Ожидается "xi:n" или "ray:α:n": {text!r}')
        self.require(vertex)
        return vertex


def graph_from_preset(preset: str, spec: Optional[dict] = None) -> GraphPresentation:
    """
    Raises:
        PresentationError: неизвестный пресет или параметры.
    """
    spec = dict(spec or {})
    match preset:
        case 'ladder':
            graph = Ladder()
        case 'grid':
            graph = Grid()
        case 'binary_tree' | 'binary_tree_graph':
            graph = BinaryTreeGraph()
        case 'kappa_rays':
            kappa = spec.pop('kappa', None)
            if isinstance(kappa, str) and kappa in ('symbolic', 'omega_1', 'ω1'):
                kappa = None
            elif isinstance(kappa, str):
                if not kappa.isdigit():
                    raise PresentationError(f'kappa: число или symbolic: {kappa!r}')
                kappa = int(kappa)
            graph = KappaRays(kappa)
        case _:
            raise PresentationError(f'Неизвестный пресет графа: {preset}')
    if spec:
        raise PresentationError(f'Неизвестные параметры графа {preset}: {sorted(spec)}')
    return graph


@dataclass(frozen=True)
class RayWalk:
    """Финально периодическое блуждание: start, затем ходы stem и цикл cycle^ω."""
    start: Any
    stem: tuple = ()
    cycle: tuple = ()

    def move(self, index: int) -> str:
        if index < len(self.stem):
            return self.stem[index]
        if not self.cycle:
            raise InvalidWalkError('Блуждание без цикла конечно')
        return self.cycle[(index - len(self.stem)) % len(self.cycle)]

    def vertices(self, graph: GraphPresentation, count: int) -> list:
        """
        Raises:
            InvalidWalkError: блуждание выходит за пределы графа.
        """
        if not graph.contains(self.start):
            raise InvalidWalkError(f'Начало блуждания {self.start!r} вне графа', start=self.start)
        found = [self.start]
        for index in range(count):
            vertex = graph.step(found[-1], self.move(index))
            if not graph.contains(vertex):
                raise InvalidWalkError(f'Блуждание выходит из графа в вершину {vertex!r}', vertex=vertex)
            found.append(vertex)
        return found


@dataclass
class Component:
    index: int
    vertices: frozenset
    status: str
    parent: Optional[int] = None


@dataclass
class EndApprox:
    """Компоненты G − X на усечении; status: infinite, finite или undetermined."""
    separator: tuple
    components: list = field(default_factory=list)
    refinement_ok: bool = True

    def infinite(self) -> list[Component]:
        return [component for component in self.components if component.status == 'infinite']

    def component_of(self, vertex: Any) -> Optional[Component]:
        return next((c for c in self.components if vertex in c.vertices), None)

    def to_json(self, graph: GraphPresentation) -> dict[str, Any]:
        return {
            'separator': [graph.vertex_json(v) for v in self.separator],
            'components': [
                {
                    'index': c.index,
                    'status': c.status,
                    'size': len(c.vertices),
                    'sample': [graph.vertex_json(v) for v in sorted(c.vertices, key=graph.vertex_key)[:3]],
                    'parent': c.parent,
                }
                for c in self.components
            ],
            'infinite': len(self.infinite()),
            'refinement_ok': self.refinement_ok,
        }


def _components(graph: GraphPresentation, ball: nx.Graph, distance: dict, separator: Iterable,
                radius: int, budget: int) -> list[Component]:
    rest = ball.subgraph(set(ball.nodes) - set(separator))
    found = []
    for vertices in nx.connected_components(rest):
        if any(distance[v] >= radius for v in vertices):
            status = 'infinite'
        elif any(graph.truncated(v, budget) for v in vertices):
            status = 'undetermined'
        else:
            status = 'finite'
        found.append((frozenset(vertices), status))
    found.sort(key=lambda pair: min(graph.vertex_key(v) for v in pair[0]))
    return [Component(index, vertices, status) for index, (vertices, status) in enumerate(found)]


def end_partition(graph: GraphPresentation, separators: list, radius: int = DEFAULT_RADIUS,
                  budget: int = DEFAULT_BUDGET) -> list[EndApprox]:
    """
    Компоненты G − X для возрастающей цепи сепараторов на общем усечении.

    Компонента бесконечна, если достигает границы шара радиуса radius;
    конечная компонента, задевшая вершину с усеченной смежностью, помечается undetermined.

    Raises:
        PresentationError: сепараторы не возрастают.
        DomainMismatchError: вершина сепаратора не принадлежит графу.
    """
    separators = [tuple(dict.fromkeys(separator)) for separator in separators]
    for smaller, larger in zip(separators, separators[1:]):
        if not set(smaller) <= set(larger):
            raise PresentationError('Сепараторы должны возрастать по включению')
    sources = [graph.origin] + [v for separator in separators for v in separator]
    ball, distance = graph.ball(sources, radius, budget)
    chain: list[EndApprox] = []
    for separator in separators:
        approx = EndApprox(separator, _components(graph, ball, distance, separator, radius, budget))
        if chain:
            coarser = chain[-1]
            for component in approx.components:
                owners = {coarser.component_of(v).index for v in component.vertices}
                if len(owners) != 1:
                    approx.refinement_ok = False
                component.parent = min(owners)
        chain.append(approx)
        logger.debug('G − X для |X|=%d: %d компонент, бесконечных %d',
                     len(separator), len(approx.components), len(approx.infinite()))
    return chain


def _tail_component(graph: GraphPresentation, walk: RayWalk, approx: EndApprox,
                    distance: dict, radius: int) -> Optional[Component]:
    vertices = walk.vertices(graph, radius)
    separator = set(approx.separator)
    for start in range(len(walk.stem), len(vertices)):
        tail = [v for v in vertices[start:] if v in distance]
        if not tail or any(v in separator for v in tail):
            continue
        owners = {component.index for component in map(approx.component_of, tail) if component is not None}
        return approx.components[owners.pop()] if len(owners) == 1 else None
    return None


def rays_equivalent(graph: GraphPresentation, first: RayWalk, second: RayWalk, separator: Iterable = (),
                    radius: int = DEFAULT_RADIUS, budget: int = DEFAULT_BUDGET) -> str:
    """
    Лежат ли хвосты двух блужданий в одной компоненте G − X.

    Raises:
        InvalidWalkError: блуждание выходит из графа.
    """
    separator = tuple(separator)
    for walk in (first, second):
        walk.vertices(graph, len(walk.stem) + len(walk.cycle))
    ball, distance = graph.ball([graph.origin, first.start, second.start, *separator], radius, budget)
    approx = EndApprox(separator, _components(graph, ball, distance, separator, radius, budget))
    owners = [_tail_component(graph, walk, approx, distance, radius) for walk in (first, second)]
    if any(owner is None for owner in owners):
        return UNDETERMINED
    return SAME if owners[0].index == owners[1].index else SEPARATED


def dominates(graph: GraphPresentation, vertex: Any, walk: RayWalk, k: int,
              radius: int = DEFAULT_RADIUS, budget: int = DEFAULT_BUDGET) -> bool:
    """
    Есть ли k путей от vertex до луча, попарно не пересекающихся вне vertex (max-flow на усечении).

    Вершина на самом луче доминирует его при любом k.
    """
    graph.require(vertex)
    ray = walk.vertices(graph, radius)
    if vertex in ray:
        return True
    ball, _ = graph.ball([vertex, *ray], radius, max(budget, k))
    network = nx.DiGraph()
    for node in ball.nodes:
        if node != vertex:
            network.add_edge(('in', node), ('out', node), capacity=1)
    for a, b in ball.edges:
        for u, v in ((a, b), (b, a)):
            if v != vertex:
                network.add_edge(('out', u) if u != vertex else 'source', ('in', v))
    targets = set(ray) & set(ball.nodes)
    for node in targets:
        network.add_edge(('out', node), 'sink')
    if 'source' not in network or 'sink' not in network:
        return False
    value, _ = nx.maximum_flow(network, 'source', 'sink')
    logger.debug('Доминирование %s: %d непересекающихся путей', vertex, value)
    return value >= k


def end_space_model(graph: GraphPresentation, budget: int = DEFAULT_BUDGET,
                    radius: int = DEFAULT_RADIUS) -> SpaceModel:
    """
    Модель пространства концов известного пресета, сверенная с разбиением на компоненты.

    Raises:
        UnsupportedError: пресет без известной классификации.
    """
    match graph:
        case Ladder():
            expected, separator, model = 2, [(0, 0), (0, 1)], FiniteDiscreteSpace(2)
        case Grid():
            expected, separator, model = 1, [(0, 0)], FiniteDiscreteSpace(1)
        case BinaryTreeGraph():
            expected, separator, model = 2, [()], TreeSpace(tree_from_preset('binary'))
        case KappaRays():
            kappa = graph.kappa if graph.kappa is not None else budget
            hubs = [('ray', alpha, 0) for alpha in range(1, kappa + 1)]
            expected, separator, model = kappa + 1, hubs, CofiniteSpace(graph.kappa)
        case _:
            raise UnsupportedError(f'Нет классификации концов для графа {graph.preset}')
    approx = end_partition(graph, [separator], radius, budget)[0]
    found = len(approx.infinite())
    if found != expected:
        raise UnsupportedError(f'Классификация концов {graph.preset} не подтверждена на бюджете',
                               expected=expected, found=found)
    logger.info('Пространство концов %s: модель %s', graph.preset, model.name)
    return model
