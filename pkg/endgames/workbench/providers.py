import logging
import re

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional

import yaml

from django.conf import settings

from .exceptions import PresentationError, UnsupportedError
from .games import StrategyHandle
from .graph_ends import end_space_model, graph_from_preset
from .order_tree import parse_ray, tree_from_preset
from .spaces import (
    CofiniteSpace, ExplicitSpace, FiniteDiscreteSpace, ParityBasis, ProductSpace, SpaceModel, StandardBasis,
    SubspaceModel, TreeSpace, base_space,
)
from .strategies import (
    GLUE_PUNCTURES, ForfeitStrategy, GapStrategy, GluedStrategy, LiftedStrategy, OverlapStrategy,
    ShrinkStrategy, SubbasicSplitStrategy, TargetAutomaton, TrivialStrategy, automaton_family,
    bm_from_end_strategy, end_I_from_bm_I, leftmost_descent, pitz_tree_strategy, product_counterexample_strategy,
    product_split_family,
)


logger = logging.getLogger(__name__)

TREE_PRESETS = ('binary', 'baire', 'michael_line')
_TREE_SPACE = re.compile(r'^(?P<tree>binary|baire|michael_line|michael-line)-(?P<mode>rays|branches)$')
_SIZED = re.compile(r'^(?P<kind>discrete|cofinite|ends)-(?P<arg>[a-z0-9_]+)$')


def product_counterexample_space(width: Optional[int] = None) -> ProductSpace:
    """Канторово пространство лучей × коконечное пространство точек."""
    return ProductSpace([TreeSpace(tree_from_preset('binary'), width=width), CofiniteSpace()])


def gdelta_space(width: Optional[int] = None) -> SubspaceModel:
    """Пространство лучей двоичного дерева без точек q_0..q_5."""
    parent = TreeSpace(tree_from_preset('binary'), width=width)
    return SubspaceModel(parent, punctures=GLUE_PUNCTURES, label='binary-rays-gdelta')


class SpaceProvider(ABC):
    @abstractmethod
    def get_space(self, selector: str, width: Optional[int] = None) -> Optional[SpaceModel]:
        """
        Строит модель пространства по селектору.
        Возвращает модель или None, если селектор провайдеру неизвестен.
        """
        pass

    def names(self) -> list[str]:
        return []


class PresetSpaceProvider(SpaceProvider):
    """
    Встроенные пространства: <дерево>-rays|branches, discrete-n, cofinite[-k],
    ends-<граф>, product-counterexample, gdelta, one-point.
    """

    def get_space(self, selector: str, width: Optional[int] = None) -> Optional[SpaceModel]:
        if found := _TREE_SPACE.match(selector):
            tree = tree_from_preset(found['tree'].replace('-', '_'), width=width)
            return TreeSpace(tree, mode=found['mode'], width=width)
        match selector:
            case 'product-counterexample':
                return product_counterexample_space(width)
            case 'gdelta':
                return gdelta_space(width)
            case 'one-point':
                return FiniteDiscreteSpace(1)
            case 'cofinite':
                return CofiniteSpace()
        if found := _SIZED.match(selector):
            kind, arg = found['kind'], found['arg']
            if kind == 'ends':
                return end_space_model(graph_from_preset(arg), settings.WORKBENCH['BUDGET'])
            if not arg.isdigit():
                raise PresentationError(f'Ожидается число в селекторе {selector!r}')
            return FiniteDiscreteSpace(int(arg)) if kind == 'discrete' else CofiniteSpace(int(arg))
        return None

    def names(self) -> list[str]:
        trees = [f'{tree}-{mode}' for tree in TREE_PRESETS for mode in ('rays', 'branches')]
        return trees + ['discrete-2', 'cofinite', 'cofinite-5', 'one-point', 'product-counterexample', 'gdelta',
                        'ends-ladder', 'ends-binary_tree']


class YamlSpaceProvider(SpaceProvider):
    """
    Именованные пространства из YAML-файла пресетов.

    Формат записи:
        name:
          kind: explicit | tree
          points: [...]            # explicit
          family: {A: [...], ...}  # explicit
          preset: finite           # tree
          spec: {...}              # tree
          mode: rays | branches    # tree
    """

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path or settings.WORKBENCH['PRESETS'])
        self._entries: Optional[dict] = None

    def _load(self) -> dict:
        if self._entries is None:
            try:
                document = yaml.safe_load(self.path.read_text(encoding='utf-8')) or {}
            except FileNotFoundError:
                logger.warning('Файл пресетов %s не найден', self.path)
                document = {}
            except yaml.YAMLError as error:
                raise PresentationError(f'Файл пресетов {self.path} не разобран: {error}')
            self._entries = document.get('spaces', {}) or {}
        return self._entries

    def get_space(self, selector: str, width: Optional[int] = None) -> Optional[SpaceModel]:
        entry = self._load().get(selector)
        if entry is None:
            return None
        match entry.get('kind'):
            case 'explicit':
                return ExplicitSpace(entry['points'], entry.get('family', {}), label=selector)
            case 'tree':
                tree = tree_from_preset(entry['preset'], entry.get('spec'), width)
                return TreeSpace(tree, mode=entry.get('mode', 'rays'), width=width)
            case other:
                raise PresentationError(f'Неизвестный вид пространства {other!r} в пресете {selector}')

    def names(self) -> list[str]:
        return sorted(self._load())


class StrategyProvider(ABC):
    @abstractmethod
    def get_strategy(self, name: str, space: SpaceModel, player: str, seed: int = 0) -> Optional[StrategyHandle]:
        """
        Строит стратегию игрока player по имени из реестра.
        Возвращает стратегию или None, если имя провайдеру неизвестно.
        """
        pass


class BuiltinStrategyProvider(StrategyProvider):
    """
    Реестр стратегий.

    Игрок I: leftmost, product-ce, auto-<n>, ray:<дескриптор>, end-from-bm:<имя>, forfeit.
    Игрок II: pitz, split, trivial, overlap, gap, shrink, glued, lifted-pitz,
    sampled, bm-from-end:<имя>, forfeit.
    """

    def get_strategy(self, name: str, space: SpaceModel, player: str, seed: int = 0) -> Optional[StrategyHandle]:
        head, _, tail = name.partition(':')
        if player == 'I':
            return self._player_one(head, tail, space, seed)
        return self._player_two(head, tail, space, seed)

    def _player_one(self, head: str, tail: str, space: SpaceModel, seed: int) -> Optional[StrategyHandle]:
        match head:
            case 'leftmost':
                return leftmost_descent()
            case 'product-ce':
                return product_counterexample_strategy(space)
            case 'forfeit':
                return ForfeitStrategy('I')
            case 'ray':
                ray = parse_ray(tail, _tree_space(space).tree.alphabet)
                return TargetAutomaton(ray, ('deepen',), f'ray-{ray.text()}')
            case 'end-from-bm':
                source = self._player_one(*(tail or 'leftmost').partition(':')[::2], space, seed)
                return None if source is None else end_I_from_bm_I(space, source)
        if head.startswith('auto-') and head[5:].isdigit():
            index = int(head[5:])
            family = automaton_family(_tree_space(space), index + 1, seed)
            return family[index]
        return None

    def _player_two(self, head: str, tail: str, space: SpaceModel, seed: int) -> Optional[StrategyHandle]:
        match head:
            case 'pitz':
                return pitz_tree_strategy(space)
            case 'split':
                return SubbasicSplitStrategy()
            case 'trivial':
                return TrivialStrategy()
            case 'overlap':
                return OverlapStrategy()
            case 'gap':
                return GapStrategy()
            case 'shrink':
                return ShrinkStrategy()
            case 'forfeit':
                return ForfeitStrategy('II', int(tail) if tail.isdigit() else 0)
            case 'glued':
                return GluedStrategy(_punctures(space))
            case 'lifted-pitz':
                return LiftedStrategy(pitz_tree_strategy(space))
            case 'sampled':
                family = product_split_family(seed=seed)
                return family[seed % len(family)]
            case 'bm-from-end':
                source = self._player_two(*(tail or 'pitz').partition(':')[::2], space, seed)
                return None if source is None else bm_from_end_strategy(space, source)
        return None


def _tree_space(space: SpaceModel) -> TreeSpace:
    base = base_space(space)
    if not isinstance(base, TreeSpace):
        raise UnsupportedError(f'Автоматы игрока I определены только для пространств деревьев: {space.name}')
    return base


def _punctures(space: SpaceModel) -> tuple:
    if isinstance(space, SubspaceModel) and space.punctures:
        return space.punctures
    return GLUE_PUNCTURES


def basis_from_name(name: Optional[str]) -> Any:
    match name:
        case None | 'standard':
            return StandardBasis()
        case 'parity':
            return ParityBasis()
    raise PresentationError(f'Неизвестный базис: {name}')

