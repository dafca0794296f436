"""
Конечно заданные порядковые деревья высоты < ω·2.

Узлы конечной высоты кодируются словами (кортежами букв), узлы высоты ω+n
задаются лучом (финально периодическим дескриптором), номером вершины-top и
подъемом n над ней.
"""
import itertools
import logging
import re

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Optional

from .exceptions import DomainMismatchError, InvalidRayError, PresentationError


logger = logging.getLogger(__name__)

Word = tuple[int, ...]

ROOT_ALIASES = ('', '-', 'ε', 'root')
RAY_KINDS = ('ray', 'branch', 'point')


@dataclass(frozen=True, order=True)
class Height:
    """Ординал вида ω·omegas + rest, omegas ∈ {0, 1}."""
    omegas: int = 0
    rest: int = 0

    def __post_init__(self):
        if self.omegas not in (0, 1) or self.rest < 0:
            raise PresentationError(f'Высота должна быть меньше ω·2: ({self.omegas}, {self.rest})')

    @classmethod
    def parse(cls, value: Any) -> 'Height':
        """
        Разбирает высоту из числа или строки вида "5", "omega", "omega+3", "ω+3".

        Raises:
            PresentationError: запись некорректна или высота ≥ ω·2.
        """
        if isinstance(value, Height):
            return value
        if isinstance(value, int):
            return cls(0, value)
        text = str(value).strip().lower().replace(' ', '').replace('ω', 'omega')
        if text.isdigit():
            return cls(0, int(text))
        if text.startswith('omega'):
            tail = text[len('omega'):]
            if not tail:
                return cls(1, 0)
            if tail.startswith('+') and tail[1:].isdigit():
                return cls(1, int(tail[1:]))
        raise PresentationError(f'Некорректная или слишком большая высота: {value!r}')

    def __str__(self) -> str:
        if not self.omegas:
            return str(self.rest)
        return 'omega' if not self.rest else f'omega+{self.rest}'


def word_text(word: Word, alphabet: Optional[int] = 2) -> str:
    if not word:
        return 'ε'
    if alphabet is not None and alphabet <= 10:
        return ''.join(map(str, word))
    return '.'.join(map(str, word))


def parse_word(text: str, alphabet: Optional[int] = 2) -> Word:
    """Разбирает слово: цифры подряд или буквы через точку; корень: '', '-', 'ε', 'root'."""
    text = str(text).strip()
    if text in ROOT_ALIASES:
        return ()
    try:
        if '.' in text or alphabet is None or alphabet > 10:
            letters = tuple(int(part) for part in text.split('.'))
        else:
            letters = tuple(int(char) for char in text)
    except ValueError:
        raise PresentationError(f'Некорректное слово: {text!r}')
    if any(letter < 0 for letter in letters):
        raise PresentationError(f'Отрицательная буква в слове: {text!r}')
    return letters


def _primitive_root(cycle: Word) -> Word:
    size = len(cycle)
    for period in range(1, size + 1):
        if size % period == 0 and cycle[:period] * (size // period) == cycle:
            return cycle[:period]
    return cycle


@dataclass(frozen=True)
class RayDescriptor:
    """
    Финально периодический луч stem·cycle^ω; при top ≠ None: длинный луч,
    продолженный через вершину-top с этим номером.

    Дескриптор нормализуется: цикл примитивен, а stem не заканчивается
    последней буквой цикла. Поэтому равенство дескрипторов совпадает
    с равенством лучей.
    """
    stem: Word = ()
    cycle: Word = (0,)
    top: Optional[int] = None
    kind: str = field(default='ray', compare=False)

    def __post_init__(self):
        stem = tuple(int(letter) for letter in self.stem)
        cycle = tuple(int(letter) for letter in self.cycle)
        if not cycle:
            raise InvalidRayError('Пустой цикл: цепь имеет максимальный элемент', stem=stem)
        if any(letter < 0 for letter in stem + cycle):
            raise InvalidRayError('Отрицательная буква в дескрипторе', stem=stem, cycle=cycle)
        if self.kind not in RAY_KINDS:
            raise InvalidRayError(f'Неизвестный вид дескриптора: {self.kind}')
        if self.top is not None and self.top < 0:
            raise InvalidRayError('Отрицательный номер вершины-top', top=self.top)
        cycle = _primitive_root(cycle)
        while stem and stem[-1] == cycle[-1]:
            stem = stem[:-1]
            cycle = (cycle[-1],) + cycle[:-1]
        object.__setattr__(self, 'stem', stem)
        object.__setattr__(self, 'cycle', cycle)

    def letter(self, index: int) -> int:
        if index < len(self.stem):
            return self.stem[index]
        return self.cycle[(index - len(self.stem)) % len(self.cycle)]

    def prefix(self, length: int) -> Word:
        return tuple(self.letter(i) for i in range(length))

    def shift(self, length: int) -> 'RayDescriptor':
        """Хвост луча после первых length букв (top сохраняется)."""
        if length <= len(self.stem):
            return RayDescriptor(self.stem[length:], self.cycle, self.top, self.kind)
        offset = (length - len(self.stem)) % len(self.cycle)
        return RayDescriptor((), self.cycle[offset:] + self.cycle[:offset], self.top, self.kind)

    def omega_part(self) -> 'RayDescriptor':
        if self.top is None:
            return self
        return RayDescriptor(self.stem, self.cycle, None, self.kind)

    def with_top(self, top: int) -> 'RayDescriptor':
        return RayDescriptor(self.stem, self.cycle, top, self.kind)

    @property
    def is_eventually_constant(self) -> bool:
        return len(self.cycle) == 1

    @property
    def is_long(self) -> bool:
        return self.top is not None

    def agrees_with(self, other: 'RayDescriptor') -> bool:
        """Сравнение развертками до границы stem + 2·cycle."""
        bound = max(len(self.stem), len(other.stem)) + 2 * len(self.cycle) * len(other.cycle)
        return self.top == other.top and self.prefix(bound) == other.prefix(bound)

    def sort_key(self) -> tuple:
        return (len(self.stem), self.stem, len(self.cycle), self.cycle, -1 if self.top is None else self.top)

    def text(self, alphabet: Optional[int] = 2) -> str:
        stem = '' if not self.stem else word_text(self.stem, alphabet)
        body = f'{stem}({word_text(self.cycle, alphabet)})'
        return body if self.top is None else f'{body}@{self.top}'

    def __str__(self) -> str:
        return self.text()


_RAY_PATTERN = re.compile(r'^(?P<stem>[0-9.]*)\((?P<cycle>[0-9.]+)\)(@(?P<top>\d+))?$')


def parse_ray(text: str, alphabet: Optional[int] = 2) -> RayDescriptor:
    """Разбирает луч вида "01(1)", "(01)@0"."""
    match = _RAY_PATTERN.match(str(text).strip())
    if match is None:
        raise InvalidRayError(f'Некорректная запись луча: {text!r}')
    stem = parse_word(match['stem'], alphabet) if match['stem'] else ()
    top = int(match['top']) if match['top'] is not None else None
    return RayDescriptor(stem, parse_word(match['cycle'], alphabet), top)


@dataclass(frozen=True)
class Node:
    """Узел дерева: слово конечной высоты или (луч, top, подъем) высоты ω+rise."""
    word: Word = ()
    ray: Optional[RayDescriptor] = None
    top: int = 0
    rise: int = 0

    def __post_init__(self):
        if self.ray is not None:
            object.__setattr__(self, 'ray', self.ray.omega_part())
            object.__setattr__(self, 'word', ())
        else:
            object.__setattr__(self, 'word', tuple(self.word))

    @property
    def is_high(self) -> bool:
        return self.ray is not None

    @property
    def height(self) -> Height:
        return Height(1, self.rise) if self.is_high else Height(0, len(self.word))

    def sort_key(self) -> tuple:
        if self.is_high:
            return (1, self.ray.sort_key(), self.top, self.rise)
        return (0, len(self.word), self.word)

    def text(self, alphabet: Optional[int] = 2) -> str:
        if not self.is_high:
            return word_text(self.word, alphabet)
        base = f'T{self.top}[{self.ray.text(alphabet)}]'
        return base if not self.rise else f'{base}+{self.rise}'

    def __str__(self) -> str:
        return self.text()


ROOT = Node(())

_HIGH_PATTERN = re.compile(r'^T(?P<top>\d+)\[(?P<ray>[^\]]+)\](\+(?P<rise>\d+))?$')


def parse_node(text: str, alphabet: Optional[int] = 2) -> Node:
    """Разбирает узел: слово либо "T0[(01)]", "T1[1(10)]+2" для высоких узлов."""
    text = str(text).strip()
    match = _HIGH_PATTERN.match(text)
    if match is None:
        return Node(parse_word(text, alphabet))
    return Node(
        ray=parse_ray(match['ray'], alphabet),
        top=int(match['top']),
        rise=int(match['rise'] or 0),
    )


@dataclass(frozen=True)
class PresentedTree:
    """
    Дерево, заданное пресетом.

    alphabet=None означает счетное ветвление (дерево Бэра), которое
    материализуется с бюджетом ширины width. tops > 0 добавляет над каждым
    нефинально-постоянным лучом столько вершин высоты ω, над которыми
    идут цепочки единственных последователей.
    """
    preset: str
    alphabet: Optional[int] = 2
    depth: Optional[int] = None
    tops: int = 0
    words: Optional[frozenset] = None
    width: int = 3
    params: tuple = ()

    @property
    def is_finite(self) -> bool:
        return self.depth is not None

    @property
    def is_pruned(self) -> bool:
        return self.depth is None and self.words is None

    def describe(self) -> dict[str, Any]:
        return {'preset': self.preset, 'params': dict(self.params), 'width': self.width}

    def contains(self, node: Node) -> bool:
        if node.is_high:
            if not self.tops or node.top >= self.tops or node.ray.is_eventually_constant:
                return False
            return self._letters_ok(node.ray.stem + node.ray.cycle)
        if self.words is not None:
            return node.word in self.words
        if self.depth is not None and len(node.word) > self.depth:
            return False
        return self._letters_ok(node.word)

    def _letters_ok(self, letters: Iterable[int]) -> bool:
        return self.alphabet is None or all(letter < self.alphabet for letter in letters)

    def require(self, *nodes: Node) -> None:
        for node in nodes:
            if not isinstance(node, Node) or not self.contains(node):
                raise DomainMismatchError(f'Узел {node} не принадлежит дереву {self.preset}', node=node)

    def branching(self, node: Node) -> Optional[int]:
        """Число детей узла; None: счетно много."""
        if node.is_high:
            return 1
        if self.words is not None:
            return len(self.children(node))
        if self.depth is not None and len(node.word) >= self.depth:
            return 0
        return self.alphabet

    def children(self, node: Node, width: Optional[int] = None) -> tuple[Node, ...]:
        if node.is_high:
            return (Node(ray=node.ray, top=node.top, rise=node.rise + 1),)
        if self.words is not None:
            size = len(node.word) + 1
            return tuple(
                Node(word) for word in sorted(self.words)
                if len(word) == size and word[:-1] == node.word
            )
        if self.depth is not None and len(node.word) >= self.depth:
            return ()
        count = self.alphabet if self.alphabet is not None else (width or self.width)
        return tuple(Node(node.word + (letter,)) for letter in range(count))

    def parent(self, node: Node) -> Optional[Node]:
        if node.is_high:
            return Node(ray=node.ray, top=node.top, rise=node.rise - 1) if node.rise else None
        return Node(node.word[:-1]) if node.word else None

    def leq(self, a: Node, b: Node) -> bool:
        if not a.is_high:
            if b.is_high:
                return b.ray.prefix(len(a.word)) == a.word
            return b.word[:len(a.word)] == a.word
        if not b.is_high:
            return False
        return a.ray == b.ray and a.top == b.top and a.rise <= b.rise

    def lt(self, a: Node, b: Node) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: Node, b: Node) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def is_limit(self, node: Node) -> bool:
        """Корень и вершины-top; корень: предельный узел с пустой конфинальной последовательностью."""
        return (node.is_high and node.rise == 0) or (not node.is_high and not node.word)

    def hat(self, node: Node) -> Node:
        """Наибольший предельный узел ≤ node."""
        if node.is_high:
            return Node(ray=node.ray, top=node.top)
        return ROOT

    def cofinal_sequence(self, node: Node, count: int) -> list[Node]:
        """Первые count членов зафиксированной конфинальной последовательности предельного узла."""
        if not self.is_limit(node):
            raise DomainMismatchError(f'Узел {node} не предельный', node=node)
        if not node.is_high:
            return []
        return [Node(node.ray.prefix(i)) for i in range(count)]

    def passes(self, point: Any, node: Node) -> bool:
        """Проходит ли точка (луч или лист) через узел."""
        if isinstance(point, Node):
            return self.leq(node, point)
        if not node.is_high:
            return point.prefix(len(node.word)) == node.word
        return point.top == node.top and point.omega_part() == node.ray

    def tops_of(self, ray: RayDescriptor) -> tuple[Node, ...]:
        """
        Вершины, строгий нижний конус которых совпадает с лучом.

        Raises:
            InvalidRayError: дерево конечно или буквы луча вне алфавита.
        """
        if self.is_finite:
            raise InvalidRayError('В конечном дереве нет лучей', tree=self.preset)
        if not self._letters_ok(ray.stem + ray.cycle):
            raise InvalidRayError(f'Луч {ray} не является цепью дерева {self.preset}', ray=ray)
        if ray.is_long:
            if ray.top >= self.tops or ray.is_eventually_constant:
                raise InvalidRayError(f'Длинный луч {ray} не проходит через вершину дерева', ray=ray)
            return ()
        if not self.tops or ray.is_eventually_constant:
            return ()
        return tuple(Node(ray=ray, top=index) for index in range(self.tops))

    def level(self, height: int, width: Optional[int] = None) -> list[Node]:
        if self.words is not None:
            return [Node(word) for word in sorted(self.words) if len(word) == height]
        if self.depth is not None and height > self.depth:
            return []
        count = self.alphabet if self.alphabet is not None else (width or self.width)
        return [Node(word) for word in itertools.product(range(count), repeat=height)]

    def irrational_rays(self, max_size: int, width: Optional[int] = None) -> list[RayDescriptor]:
        """Нефинально-постоянные лучи с |stem| + |cycle| ≤ max_size."""
        if self.is_finite:
            return []
        count = self.alphabet if self.alphabet is not None else (width or self.width)
        found = set()
        for cycle_size in range(2, max_size + 1):
            for stem_size in range(0, max_size - cycle_size + 1):
                for stem in itertools.product(range(count), repeat=stem_size):
                    for cycle in itertools.product(range(count), repeat=cycle_size):
                        ray = RayDescriptor(stem, cycle)
                        if not ray.is_eventually_constant and len(ray.stem) + len(ray.cycle) <= max_size:
                            found.add(ray)
        return sorted(found, key=RayDescriptor.sort_key)

    def materialize(self, height: Height, width: Optional[int] = None,
                    finite_cap: int = 4, ray_size: int = 4) -> list[Node]:
        """Все узлы высоты ≤ height (конечные уровни обрезаются finite_cap, если height ≥ ω)."""
        height = Height.parse(height)
        top_level = height.rest if not height.omegas else finite_cap
        if self.depth is not None:
            top_level = min(top_level, self.depth)
        nodes = [node for n in range(top_level + 1) for node in self.level(n, width)]
        if height.omegas and self.tops:
            for ray in self.irrational_rays(ray_size, width):
                for top in self.tops_of(ray):
                    nodes.extend(Node(ray=ray, top=top.top, rise=rise) for rise in range(height.rest + 1))
        return nodes

    def leaves(self) -> list[Node]:
        if not self.is_finite:
            return []
        nodes = [node for n in range(self.depth + 1) for node in self.level(n)]
        return [node for node in nodes if not self.children(node)]

    def antichain_index(self, node: Node) -> int:
        if not self.tops:
            return len(node.word)
        return 2 * node.rise + 1 if node.is_high else 2 * len(node.word)


@dataclass
class AntichainDecomposition:
    index: dict[Node, int]
    certified_depth: Height
    violations: list[tuple[Node, Node]] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return not self.violations

    @property
    def antichains(self) -> int:
        return len(set(self.index.values()))

    def classes(self) -> dict[int, list[Node]]:
        grouped: dict[int, list[Node]] = {}
        for node, value in self.index.items():
            grouped.setdefault(value, []).append(node)
        return {value: sorted(nodes, key=Node.sort_key) for value, nodes in sorted(grouped.items())}


def antichain_decomposition(tree: PresentedTree, depth: Any, width: Optional[int] = None,
                            finite_cap: int = 4, ray_size: int = 4) -> AntichainDecomposition:
    """
    Разбивает материализованные узлы высоты ≤ depth на антицепи и
    перепроверяет попарную несравнимость внутри каждого класса.
    """
    height = Height.parse(depth)
    nodes = tree.materialize(height, width, finite_cap, ray_size)
    decomposition = AntichainDecomposition(
        index={node: tree.antichain_index(node) for node in nodes},
        certified_depth=height,
    )
    for members in decomposition.classes().values():
        for a, b in itertools.combinations(members, 2):
            if tree.comparable(a, b):
                decomposition.violations.append((a, b))
    logger.debug('Антицепное разложение %s до %s: %d классов', tree.preset, height, decomposition.antichains)
    return decomposition


def basic_open_membership(tree: PresentedTree, basic: Any, point: Any) -> bool:
    """Принадлежит ли луч (или лист) множеству [t, F]."""
    tree.require(basic.anchor, *basic.holes)
    if isinstance(point, RayDescriptor) and not tree._letters_ok(point.stem + point.cycle):
        raise DomainMismatchError(f'Луч {point} не принадлежит дереву {tree.preset}', point=point)
    return tree.passes(point, basic.anchor) and not any(tree.passes(point, hole) for hole in basic.holes)


def iter_words(tree: PresentedTree, max_height: int, width: Optional[int] = None) -> Iterator[Node]:
    for height in range(max_height + 1):
        yield from tree.level(height, width)


def _int_param(spec: dict, key: str, minimum: int, default: Optional[int] = None) -> Optional[int]:
    value = spec.pop(key, default)
    if value is None:
        return None
    if isinstance(value, str) and value.lower() in ('omega', 'ω'):
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise PresentationError(f'Параметр {key} должен быть целым ≥ {minimum}: {value!r}')
    return value


def tree_from_preset(preset: str, spec: Optional[dict] = None, width: Optional[int] = None) -> PresentedTree:
    """
    Строит дерево по пресету: binary, baire, michael_line, finite, custom.

    Args:
        preset (str): Имя пресета.
        spec (dict | None): Параметры пресета.
        width (int | None): Бюджет ширины для счетного ветвления.

    Returns:
        PresentedTree: Заданное дерево.

    Raises:
        PresentationError: неизвестный пресет или некорректные параметры.
    """
    spec = dict(spec or {})
    params = tuple(sorted((key, str(value)) for key, value in spec.items()))
    width = _int_param(spec, 'width', 1, width or 3)
    match preset:
        case 'binary':
            tree = PresentedTree('binary', alphabet=2, width=width, params=params)
        case 'baire':
            tree = PresentedTree('baire', alphabet=None, width=width, params=params)
        case 'michael_line':
            tree = PresentedTree('michael_line', alphabet=2, tops=2, width=width, params=params)
        case 'finite':
            tree = _finite_tree(spec, width, params)
        case 'custom':
            tree = _custom_tree(spec, width, params)
        case _:
            raise PresentationError(f'Неизвестный пресет дерева: {preset}')
    if spec:
        raise PresentationError(f'Неизвестные параметры пресета {preset}: {sorted(spec)}')
    return tree


def _finite_tree(spec: dict, width: int, params: tuple) -> PresentedTree:
    if 'words' in spec:
        raw = spec.pop('words')
        if not isinstance(raw, (list, tuple)):
            raise PresentationError('words должен быть списком слов')
        words = frozenset(parse_word(item, alphabet=10) if isinstance(item, str)
                          else tuple(int(x) for x in item) for item in raw) | {()}
        for word in words:
            if word and word[:-1] not in words:
                raise PresentationError(f'Множество слов не замкнуто по префиксам: {word}')
        alphabet = max((max(word) for word in words if word), default=0) + 1
        depth = max(len(word) for word in words)
        return PresentedTree('finite', alphabet=alphabet, depth=depth, words=words, width=width, params=params)
    alphabet = _int_param(spec, 'alphabet', 1, 2)
    depth = _int_param(spec, 'depth', 0, 3)
    if alphabet is None or depth is None:
        raise PresentationError('Конечное дерево требует конечных alphabet и depth')
    return PresentedTree('finite', alphabet=alphabet, depth=depth, width=width, params=params)


def _custom_tree(spec: dict, width: int, params: tuple) -> PresentedTree:
    """
    height ограничивает высоты узлов: конечная n дает depth = n, omega запрещает
    вершины-top; omega+k не задается: цепочки над top бесконечны.
    """
    height = Height.parse(spec.pop('height')) if 'height' in spec else None
    alphabet = _int_param(spec, 'alphabet', 1, 2)
    depth = _int_param(spec, 'depth', 0, None)
    tops = _int_param(spec, 'tops', 0, 0)
    if height is not None:
        if height.omegas and height.rest:
            raise PresentationError(f'Высота {height} не задается: над вершинами-top идут бесконечные цепочки')
        if height.omegas and tops:
            raise PresentationError('Высота omega несовместима с вершинами-top')
        if not height.omegas:
            if depth is not None and depth != height.rest:
                raise PresentationError(f'Глубина {depth} противоречит высоте {height}')
            depth = height.rest
    if tops and (depth is not None or alphabet is None or alphabet < 2):
        raise PresentationError('Вершины-top допустимы только в бесконечном дереве с конечным алфавитом ≥ 2')
    return PresentedTree('custom', alphabet=alphabet, depth=depth, tops=tops, width=width, params=params)
