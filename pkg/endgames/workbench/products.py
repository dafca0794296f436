"""
Деревья как обратные системы, поуровневые произведения и конечные обратные пределы.
"""
import itertools
import logging

from dataclasses import dataclass, field
from typing import Any, Optional

from .exceptions import InvariantViolation, UnsupportedError
from .order_tree import Node, PresentedTree, word_text
from .spaces import Box, Comparison, ProductSpace, TreeSpace


logger = logging.getLogger(__name__)


@dataclass
class InverseSystem:
    """
    Последовательность конечных уровней и связующих отображений.

    maps[n] переводит уровень n+1 в уровень n; a^{nm}: композиция.
    explicit задает дополнительные отображения a^{nm} (m > n+1), которые
    сверяются с композицией при сертификации.
    """
    levels: list
    maps: list
    label: str = ''
    explicit: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def apply(self, n: int, m: int, element: Any) -> Any:
        """
        a^{nm}(element) для n ≤ m; a^{nn}: тождество.

        Raises:
            InvariantViolation: отображение не определено на элементе.
        """
        if n > m:
            raise InvariantViolation(f'Связующее отображение a^{{{n}{m}}} не определено при n > m', n=n, m=m)
        for level in range(m - 1, n - 1, -1):
            try:
                element = self.maps[level][element]
            except KeyError:
                raise InvariantViolation(f'Отображение уровня {level + 1} не определено на элементе',
                                         level=level + 1, element=element)
        return element

    def certify(self) -> None:
        """
        Raises:
            InvariantViolation: отображение не всюду определено, выходит за уровень
                или явное a^{nm} расходится с композицией.
        """
        if len(self.maps) != self.depth:
            raise InvariantViolation('Число связующих отображений не совпадает с числом уровней',
                                     levels=len(self.levels), maps=len(self.maps))
        for n, mapping in enumerate(self.maps):
            below = set(self.levels[n])
            for element in self.levels[n + 1]:
                if element not in mapping:
                    raise InvariantViolation('Связующее отображение не всюду определено', level=n + 1, element=element)
                if mapping[element] not in below:
                    raise InvariantViolation('Образ вне нижнего уровня', level=n + 1, element=element,
                                             image=mapping[element])
        for (n, m), mapping in self.explicit.items():
            for element in self.levels[m]:
                if mapping.get(element) != self.apply(n, m, element):
                    raise InvariantViolation('a^{mℓ} ∘ a^{nm} ≠ a^{nℓ}', n=n, m=m, element=element)

    def truncate(self, depth: int) -> 'InverseSystem':
        explicit = {key: value for key, value in self.explicit.items() if key[1] <= depth}
        return InverseSystem(self.levels[:depth + 1], self.maps[:depth], self.label, explicit)

    def describe(self) -> dict[str, Any]:
        return {'label': self.label, 'depth': self.depth, 'sizes': [len(level) for level in self.levels]}


def system_from_tree(tree: PresentedTree, depth: int, width: Optional[int] = None) -> InverseSystem:
    """
    Уровни образованы словами высоты n, связующее отображение отрезает последнюю букву.

    Raises:
        UnsupportedError: дерево конечно или выше ω.
    """
    if tree.is_finite:
        raise UnsupportedError(f'Дерево {tree.preset} конечно: высота не ω')
    if tree.tops:
        raise UnsupportedError(f'Дерево {tree.preset} выше ω: есть вершины-top')
    levels = [tuple(node.word for node in tree.level(n, width)) for n in range(depth + 1)]
    maps = [{word: word[:-1] for word in levels[n + 1]} for n in range(depth)]
    system = InverseSystem(levels, maps, tree.preset)
    system.certify()
    return system


def levelwise_product(systems: list[InverseSystem]) -> InverseSystem:
    """Уровень n есть произведение уровней n, связующие отображения действуют покоординатно."""
    if not systems:
        raise UnsupportedError('Произведение требует хотя бы одной системы')
    for system in systems:
        system.certify()
    depth = min(system.depth for system in systems)
    levels = [tuple(itertools.product(*(system.levels[n] for system in systems))) for n in range(depth + 1)]
    maps = [
        {element: tuple(system.maps[n][part] for system, part in zip(systems, element)) for element in levels[n + 1]}
        for n in range(depth)
    ]
    label = ' x '.join(system.label for system in systems)
    return InverseSystem(levels, maps, label)


def power_system(base: InverseSystem, depth: Optional[int] = None) -> InverseSystem:
    """
    Счетная степень системы по диагональной схеме: уровень n использует первые n сомножителей.

    Переход с уровня n+1 на n отбрасывает последний сомножитель и опускает остальные.
    """
    base.certify()
    depth = base.depth if depth is None else min(depth, base.depth)
    levels = [tuple(itertools.product(base.levels[n], repeat=n)) for n in range(depth + 1)]
    maps = [
        {element: tuple(base.maps[n][part] for part in element[:n]) for element in levels[n + 1]}
        for n in range(depth)
    ]
    return InverseSystem(levels, maps, f'{base.label}^N')


def inverse_limit_depth(system: InverseSystem, depth: int) -> list[tuple]:
    """
    Согласованные нити (x_0, …, x_d) с a^{nm}(x_m) = x_n.

    Raises:
        InvariantViolation: связующие отображения несогласованы (со свидетелем).
    """
    if depth > system.depth:
        raise UnsupportedError(f'Уровень {depth} не материализован', depth=depth, available=system.depth)
    system.certify()
    threads = []
    for element in system.levels[depth]:
        threads.append(tuple(system.apply(n, depth, element) for n in range(depth + 1)))
    return threads


@dataclass
class AssociatedTree:
    """Дерево системы: узлы уровня n суть элементы уровня n, предок узла равен образу связующего отображения."""
    system: InverseSystem

    def level(self, n: int) -> tuple:
        return self.system.levels[n]

    def parent(self, n: int, element: Any) -> Optional[Any]:
        return None if n == 0 else self.system.maps[n - 1][element]

    def children(self, n: int, element: Any) -> list:
        if n >= self.system.depth:
            return []
        return [child for child in self.system.levels[n + 1] if self.system.maps[n][child] == element]

    def leq(self, a: tuple[int, Any], b: tuple[int, Any]) -> bool:
        (n, x), (m, y) = a, b
        return n <= m and self.system.apply(n, m, y) == x


def associated_tree(system: InverseSystem) -> AssociatedTree:
    system.certify()
    return AssociatedTree(system)


@dataclass
class ProductCertificate:
    """Соответствие узлов дерева произведения и коробок произведения пространств ветвей."""
    depth: int
    matched: int = 0
    threads: int = 0
    factor_threads: list = field(default_factory=list)
    correspondence: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict[str, Any]:
        return {
            'depth': self.depth,
            'matched': self.matched,
            'threads': self.threads,
            'factor_threads': self.factor_threads,
            'passed': self.passed,
            'correspondence': self.correspondence,
            'mismatches': self.mismatches,
        }


def check_product_homeo(trees: list[PresentedTree], depth: int, width: Optional[int] = None) -> ProductCertificate:
    """
    Сравнивает пространство ветвей дерева поуровневого произведения с
    произведением пространств ветвей до глубины depth.

    Проверяются: биекция нитей произведения и кортежей нитей сомножителей,
    и совпадение порядка дерева с включением соответствующих коробок.
    """
    systems = [system_from_tree(tree, depth, width) for tree in trees]
    product = levelwise_product(systems)
    tree = associated_tree(product)
    space = ProductSpace([TreeSpace(item, mode='branches', width=width) for item in trees])
    certificate = ProductCertificate(depth)

    threads = inverse_limit_depth(product, depth)
    factor_threads = [inverse_limit_depth(system, depth) for system in systems]
    certificate.threads = len(threads)
    certificate.factor_threads = [len(items) for items in factor_threads]
    transposed = {tuple(zip(*thread)) for thread in threads}
    if transposed != set(itertools.product(*factor_threads)):
        certificate.mismatches.append({'reason': 'нити произведения не совпадают с кортежами нитей'})

    def box(element: tuple) -> Box:
        return Box(tuple(factor.normalize(Node(word)) for factor, word in zip(space.factors, element)))

    def text(element: tuple) -> list[str]:
        return [word_text(word, item.alphabet) for word, item in zip(element, trees)]

    nodes = [(n, element) for n in range(depth + 1) for element in tree.level(n)]
    boxes = {node: box(node[1]) for node in nodes}
    for a, b in itertools.combinations(nodes, 2):
        if tree.leq(a, b):
            expected = Comparison.B_IN_A
        elif tree.leq(b, a):
            expected = Comparison.A_IN_B
        else:
            expected = Comparison.DISJOINT
        relation = space.cmp(boxes[a], boxes[b])
        if relation is not expected:
            certificate.mismatches.append({'first': text(a[1]), 'second': text(b[1]), 'relation': relation.value})
    for element in tree.level(depth):
        certificate.correspondence.append({'node': text(element), 'box': space.describe(boxes[(depth, element)])})
    certificate.matched = len(tree.level(depth)) if certificate.passed else 0
    logger.info('Обмен предела и произведения для %s до глубины %d: passed=%s',
                product.label, depth, certificate.passed)
    return certificate
