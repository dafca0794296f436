import itertools
import json
import logging

from pathlib import Path
from typing import Any, Optional

from .exceptions import PresentationError, UsageError, WorkbenchError
from .games import (
    MatchState, StrategyHandle, audit_transcript, find_period, play_bm_match, play_end_match, verify_limit_membership,
)
from .graph_ends import (
    SAME, SEPARATED, GraphPresentation, Grid, KappaRays, Ladder, RayWalk, dominates, end_partition,
    end_space_model, graph_from_preset, rays_equivalent,
)
from .order_tree import Height, antichain_decomposition, tree_from_preset
from .products import check_product_homeo, inverse_limit_depth, power_system, system_from_tree
from .providers import (
    BuiltinStrategyProvider, PresetSpaceProvider, SpaceProvider, StrategyProvider, YamlSpaceProvider,
    gdelta_space, product_counterexample_space,
)
from .spaces import (
    ExplicitSpace, GeneratedBasis, NestedSpace, ParityBasis, SpaceModel, StandardBasis, TreeSpace,
    decompose_point_plus_open, subbase_properties,
)
from .strategies import (
    BasisAdapted, BMFromEnd, EndFromBM, PitzStrategy, ProductCounterexample, automaton_family, gdelta_glue_strategy,
    product_split_family, thm3_counter_play,
)
from .synthesis import Subbase, build_tc, kprime_partition, tc_bisimulation, verify_synth_subbase


logger = logging.getLogger(__name__)

PARTITION_TREES = ('binary', 'michael_line')
UNDETERMINED_SHARE = 0.1
MEMBERSHIP_DEPTH = 8
SYNTH_CHECK_DEPTH = 3


class WorkbenchService:
    """
    Конвейеры команд стенда. Пространства и стратегии ищутся по цепочке
    провайдеров: первый провайдер, узнавший селектор, выигрывает.
    """

    def __init__(self, space_providers: Optional[list[SpaceProvider]] = None,
                 strategy_providers: Optional[list[StrategyProvider]] = None):
        self.space_providers = space_providers or [PresetSpaceProvider(), YamlSpaceProvider()]
        self.strategy_providers = strategy_providers or [BuiltinStrategyProvider()]

    def get_space(self, selector: str, width: Optional[int] = None) -> SpaceModel:
        for provider in self.space_providers:
            space = provider.get_space(selector, width)
            if space is not None:
                return space
        raise UsageError(f'Неизвестное пространство: {selector}', selector=selector)

    def get_strategy(self, name: str, space: SpaceModel, player: str, seed: int = 0) -> StrategyHandle:
        for provider in self.strategy_providers:
            handle = provider.get_strategy(name, space, player, seed)
            if handle is not None:
                return handle
        raise UsageError(f'Неизвестная стратегия игрока {player}: {name}', strategy=name)

    def examples(self) -> dict[str, Any]:
        return {
            'spaces': [name for provider in self.space_providers for name in provider.names()],
            'trees': ['binary', 'baire', 'michael_line', 'finite', 'custom'],
            'graphs': ['ladder', 'grid', 'binary_tree', 'kappa_rays'],
            'strategies': {
                'I': ['leftmost', 'product-ce', 'auto-<n>', 'ray:<stem(cycle)>', 'end-from-bm:<name>', 'forfeit'],
                'II': ['pitz', 'split', 'trivial', 'overlap', 'gap', 'shrink', 'glued', 'lifted-pitz', 'sampled',
                       'bm-from-end:<name>', 'forfeit'],
            },
            'suites': list(SUITES),
        }

    def play(self, space: str, pI: str, pII: str, game: str = 'end', horizon: int = 64,
             width: Optional[int] = None, seed: int = 0, **_) -> dict[str, Any]:
        model = self.get_space(space, width)
        player_one = self.get_strategy(pI, model, 'I', seed)
        player_two = self.get_strategy(pII, model, 'II', seed)
        match game:
            case 'bm':
                state = play_bm_match(model, player_one, player_two, horizon, width=width)
            case 'end_unrestricted':
                state = play_end_match(model, player_one, player_two, horizon, unrestricted=True, width=width)
            case _:
                state = play_end_match(model, player_one, player_two, horizon, width=width)
        violations = audit_transcript(model, state)
        transcript = state.to_json(model)
        transcript['audit'] = [item.to_json() for item in violations]
        return {'transcript': transcript, 'passed': not violations}

    def synth(self, space: str = 'binary-rays', strategy: str = 'pitz', depth: int = 4,
              width: Optional[int] = None, seed: int = 0, rho: Optional[str] = None, **_) -> dict[str, Any]:
        model = self.get_space(space, width)
        if not isinstance(model, NestedSpace):
            raise UsageError(f'Синтез T_C требует пространства с вложенной подбазой: {model.name}')
        psi = self.get_strategy(strategy, model, 'II', seed)
        if rho:
            try:
                table = json.loads(Path(rho).read_text(encoding='utf-8'))
            except (OSError, ValueError) as error:
                raise PresentationError(f'Таблица ρ не прочитана: {error}')
            subbase = Subbase.from_json(model, table, width)
        else:
            subbase = Subbase(model, width=width)
        tree = build_tc(subbase, psi, depth, width)
        checked_depth = min(depth, SYNTH_CHECK_DEPTH)
        report = verify_synth_subbase(tree, depth=checked_depth)
        bisimulation = tc_bisimulation(tree, depth)
        return {
            'tree': tree.to_json(),
            'checked_depth': checked_depth,
            'report': report.to_json(),
            'bisimulation': bisimulation.to_json(),
            'passed': report.passed and bisimulation.passed,
        }

    def product(self, trees: list[str], depth: int = 3, power: bool = False,
                width: Optional[int] = None, **_) -> dict[str, Any]:
        presented = [tree_from_preset(name, width=width) for name in trees]
        if power:
            system = power_system(system_from_tree(presented[0], depth, width), depth)
            threads = inverse_limit_depth(system, depth)
            return {'system': system.describe(), 'threads': len(threads), 'passed': True}
        certificate = check_product_homeo(presented, depth, width)
        return {'trees': list(trees), 'certificate': certificate.to_json(), 'passed': certificate.passed}

    def ends(self, graph: str, kappa: Optional[str] = None, separators: Optional[list[str]] = None,
             radius: int = 20, budget: int = 16, walks: Optional[list[str]] = None,
             vertex: Optional[str] = None, k: int = 3, **_) -> dict[str, Any]:
        presentation = graph_from_preset(graph, {'kappa': kappa} if kappa else None)
        chain = [parse_separator(presentation, text) for text in (separators or ['-'])]
        approximations = end_partition(presentation, chain, radius, budget)
        payload: dict[str, Any] = {
            'graph': presentation.describe(),
            'radius': radius,
            'budget': budget,
            'partition': [item.to_json(presentation) for item in approximations],
        }
        parsed = [presentation.parse_walk(text) for text in walks or []]
        if len(parsed) == 2:
            payload['equivalence'] = rays_equivalent(presentation, *parsed, chain[-1], radius, budget)
        if vertex:
            target = presentation.parse_vertex(vertex)
            payload['dominates'] = {
                'vertex': presentation.vertex_json(target),
                'k': k,
                'value': dominates(presentation, target, parsed[0], k, radius, budget),
            }
        try:
            model = end_space_model(presentation, budget, radius)
            payload['model'] = model.name
        except WorkbenchError as error:
            payload['model'] = None
            payload['model_error'] = error.as_dict()
        payload['passed'] = all(item.refinement_ok for item in approximations)
        return payload

    def verify(self, suite: str, **params) -> dict[str, Any]:
        logger.info('Запуск проверочного набора %s', suite)
        report = SUITES[suite](self, **params)
        report['suite'] = suite
        return report

    def verify_subbase(self, tree: str = 'binary', depth: Optional[str] = None,
                       width: Optional[int] = None, **_) -> dict[str, Any]:
        presented = tree_from_preset(tree, width=width)
        space = TreeSpace(presented, width=width)
        depth = depth or ('omega+3' if presented.tops else '6')
        report = subbase_properties(space, depth=depth)
        decomposition = antichain_decomposition(presented, depth, width)
        return {
            'tree': tree,
            'depth': str(Height.parse(depth)),
            'report': report.to_json(space),
            'antichains': {
                'count': decomposition.antichains,
                'violations': [[a.text(presented.alphabet), b.text(presented.alphabet)]
                               for a, b in decomposition.violations],
            },
            'passed': report.passed and not decomposition.violations,
        }

    def verify_strategy(self, count: int = 100, horizon: int = 64, seed: int = 0,
                        width: Optional[int] = None, **_) -> dict[str, Any]:
        results, failures = {}, []
        for name in PARTITION_TREES:
            space = TreeSpace(tree_from_preset(name, width=width), width=width)
            won = 0
            for automaton in automaton_family(space, count, seed):
                state = play_end_match(space, automaton, PitzStrategy(), horizon, width=width)
                mismatches = state.evidence.get('membership_mismatches', []) + resample_membership(space, state)
                violations = audit_transcript(space, state)
                if state.winner == 'II' and not mismatches and not violations:
                    won += 1
                    continue
                failures.append({
                    'tree': name,
                    'automaton': automaton.describe(),
                    'target': space.point_json(automaton.target),
                    'status': state.status,
                    'winner': state.winner,
                    'evidence': state.evidence,
                })
            results[name] = {'matches': count, 'won': won}
        return {'results': results, 'failures': failures, 'passed': not failures}

    def verify_partition(self, depth: Optional[str] = None, width: Optional[int] = None, **_) -> dict[str, Any]:
        levels = Height.parse(depth or 3).rest
        results, failures = {}, []
        totals = {1: 0, 2: 0, 3: 0, 4: 0}
        spaces = [TreeSpace(tree_from_preset(name, width=width), width=width) for name in PARTITION_TREES]
        spaces.append(ExplicitSpace([0, 1, 2], {'A': [1, 2], 'B': [1], 'C': [2]}, label='three-point'))
        for space in spaces:
            if isinstance(space, TreeSpace):
                nodes = space.tree.materialize(Height(0, levels), width)
                if space.tree.tops:
                    nodes += [node for node in space.tree.materialize(Height(1, 0), width, finite_cap=0,
                                                                      ray_size=3) if node.is_high]
                points = space.sample_points(levels, 2 if space.tree.tops else 1)
            else:
                nodes = list(space.family)
                points = space.sample_points()
            anchors = tuple(dict.fromkeys(space.canonical(node) for node in nodes))
            subbase = Subbase(space, width=width)
            items = {1: 0, 2: 0, 3: 0, 4: 0}
            checked = 0
            for basic in GeneratedBasis(space, anchors).enumerate(max_holes=2):
                checked += 1
                problem = partition_problem(subbase, basic, points, width)
                if isinstance(problem, int):
                    items[problem] += 1
                    totals[problem] += 1
                else:
                    failures.append({'space': space.name, 'set': space.describe(basic), **problem})
            results[space.name] = {'checked': checked, 'items': {str(k): v for k, v in items.items()}}
        return {
            'depth': levels,
            'results': results,
            'items': {str(k): v for k, v in totals.items()},
            'failures': failures,
            'passed': not failures,
        }

    def verify_synthesis(self, tree: str = 'binary', depth: Optional[str] = None,
                         width: Optional[int] = None, **_) -> dict[str, Any]:
        levels = Height.parse(depth or 4).rest
        space = TreeSpace(tree_from_preset(tree, width=width), width=width)
        synthesized = build_tc(Subbase(space, width=width), PitzStrategy(), levels, width)
        checked_depth = min(levels, SYNTH_CHECK_DEPTH)
        report = verify_synth_subbase(synthesized, depth=checked_depth)
        bisimulation = tc_bisimulation(synthesized, levels)
        return {
            'tree': tree,
            'depth': levels,
            'checked_depth': checked_depth,
            'nodes': len(synthesized.nodes),
            'report': report.to_json(),
            'bisimulation': {'matched': bisimulation.matched, 'mismatches': bisimulation.mismatches},
            'passed': report.passed and bisimulation.passed,
        }

    def verify_transfer(self, count: int = 50, horizon: int = 64, seed: int = 0,
                        width: Optional[int] = None, **_) -> dict[str, Any]:
        """
        End → BM: если pitz выигрывает End-игру против автомата, BM-стратегия
        из нее выигрывает индуцированную партию Банаха–Мазура.
        BM → End: если автомат I выигрывает BM-партию в G_δ-подпространстве,
        End-стратегия из него выигрывает End-партию против того же II.
        """
        directions = {}
        space = TreeSpace(tree_from_preset('binary', width=width), width=width)
        source = PitzStrategy()
        rows = []
        for automaton in automaton_family(space, count, seed):
            end = play_end_match(space, automaton, source, horizon, width=width)
            bm = play_bm_match(space, automaton, BMFromEnd(source), horizon, width=width)
            rows.append((end, bm, end.winner == 'II', bm.winner == 'II'))
        directions['end_to_bm'] = _transfer_summary(rows)

        subspace = gdelta_space(width)
        rows = []
        for automaton in automaton_family(space, count, seed + 1):
            bm = play_bm_match(subspace, automaton, BMFromEnd(source), horizon, width=width)
            end = play_end_match(subspace, EndFromBM(automaton), source, horizon, width=width)
            rows.append((bm, end, bm.winner == 'I', end.winner == 'I'))
        directions['bm_to_end'] = _transfer_summary(rows)
        passed = all(item['failures'] == 0 and item['undetermined_share'] <= UNDETERMINED_SHARE
                     for item in directions.values())
        return {'directions': directions, 'passed': passed}

    def verify_gluing(self, count: int = 50, horizon: int = 64, seed: int = 0,
                      width: Optional[int] = None, **_) -> dict[str, Any]:
        parent = TreeSpace(tree_from_preset('binary', width=width), width=width)
        subspace, glued = gdelta_glue_strategy(parent)
        played, won, failures = 0, 0, []
        for automaton in automaton_family(parent, count, seed):
            if not subspace.is_point(automaton.target):
                continue
            played += 1
            state = play_end_match(subspace, automaton, glued, horizon, width=width)
            if state.winner == 'II' and not audit_transcript(subspace, state):
                won += 1
                continue
            failures.append({
                'automaton': automaton.describe(),
                'target': parent.point_json(automaton.target),
                'status': state.status,
                'evidence': state.evidence,
            })
        return {'space': subspace.name, 'played': played, 'won': won, 'failures': failures,
                'passed': not failures and played > 0}

    def verify_product_ce(self, count: int = 50, horizon: int = 32, seed: int = 0,
                          width: Optional[int] = None, **_) -> dict[str, Any]:
        space = product_counterexample_space(width)
        family = product_split_family(count, seed)
        won, failures = 0, []
        for psi in family:
            state = play_end_match(space, ProductCounterexample(), psi, horizon, width=width)
            shape = counterexample_shape(state)
            if state.winner == 'I' and shape:
                won += 1
            else:
                failures.append({'strategy': psi.describe(), 'status': state.status, 'evidence': state.evidence})
        translated = []
        for psi in family[:min(len(family), 5)]:
            state = thm3_counter_play(space, StandardBasis(), ParityBasis(), ProductCounterexample(),
                                      BasisAdapted(psi, ParityBasis()), horizon, width)
            translated.append({'strategy': psi.name, 'winner': state.winner, 'status': state.status})
        passed = not failures and all(item['winner'] == 'I' for item in translated)
        return {'matches': len(family), 'won': won, 'failures': failures, 'translated': translated, 'passed': passed}

    def verify_exchange(self, depth: Optional[str] = None, width: Optional[int] = None, **_) -> dict[str, Any]:
        levels = Height.parse(depth or 3).rest
        width = width or 3
        results, passed = [], True
        for names in (('binary',), ('binary', 'binary'), ('binary', 'baire')):
            trees = [tree_from_preset(name, width=width) for name in names]
            certificate = check_product_homeo(trees, levels, width)
            expected = 1
            for tree in trees:
                expected *= len(tree.level(levels, width))
            ok = certificate.passed and certificate.threads == expected == certificate.matched
            passed = passed and ok
            results.append({'trees': list(names), 'threads': certificate.threads, 'expected': expected,
                            'matched': certificate.matched, 'passed': ok})
        return {'depth': levels, 'results': results, 'passed': passed}

    def verify_ends(self, radius: int = 20, budget: int = 16, **_) -> dict[str, Any]:
        checks = []

        def record(name: str, value: Any, expected: Any) -> None:
            checks.append({'check': name, 'value': value, 'expected': expected, 'passed': value == expected})

        def infinite(graph: GraphPresentation, separator: list) -> int:
            return len(end_partition(graph, [separator], radius, budget)[0].infinite())

        ladder, grid, kappa = Ladder(), Grid(), KappaRays(5)
        record('ladder-rung', infinite(ladder, [(0, 0), (0, 1)]), 2)
        record('grid-point', infinite(grid, [(0, 0)]), 1)
        record('grid-block', infinite(grid, [(i, j) for i in range(-2, 3) for j in range(-2, 3)]), 1)
        model = end_space_model(kappa, budget, radius)
        points = model.sample_points()
        record('kappa-points', len(points), 6)
        record('kappa-limit-points', sum(not model.is_isolated(p) for p in points), 1)
        record('kappa-domination', dominates(kappa, ('ray', 1, 0), RayWalk(('xi', 0), (), ('f',)), 5,
                                             radius, budget), True)
        record('ladder-domination', dominates(ladder, (-3, 1), RayWalk((0, 0), (), ('R',)), 4, radius, budget),
               False)
        forward, upper = RayWalk((0, 0), (), ('R',)), RayWalk((0, 1), (), ('R',))
        record('ladder-same', rays_equivalent(ladder, forward, upper, (), radius, budget), SAME)
        record('ladder-separated', rays_equivalent(ladder, forward, RayWalk((0, 0), (), ('L',)),
                                                   [(0, 0), (0, 1)], radius, budget), SEPARATED)
        tree = graph_from_preset('binary_tree')
        record('tree-separated', rays_equivalent(tree, RayWalk((), (), ('0',)), RayWalk((), (), ('1',)),
                                                 [()], radius, budget), SEPARATED)
        return {'checks': checks, 'passed': all(item['passed'] for item in checks)}


SUITES = {
    'subbase': WorkbenchService.verify_subbase,
    'strategy': WorkbenchService.verify_strategy,
    'partition': WorkbenchService.verify_partition,
    'synthesis': WorkbenchService.verify_synthesis,
    'transfer': WorkbenchService.verify_transfer,
    'gluing': WorkbenchService.verify_gluing,
    'product-ce': WorkbenchService.verify_product_ce,
    'exchange': WorkbenchService.verify_exchange,
    'ends': WorkbenchService.verify_ends,
}


def parse_separator(graph: GraphPresentation, text: str) -> list:
    """Вершины сепаратора через ';'; '-' или пустая строка задают пустой сепаратор."""
    text = str(text).strip()
    if text in ('', '-'):
        return []
    return [graph.parse_vertex(part) for part in text.split(';') if part.strip()]


def partition_problem(subbase: Subbase, basic: Any, points: list, width: Optional[int]) -> Any:
    """
    Номер пункта построения, если K'[U, F] разбивает basic на выборке точек;
    иначе описание нарушения.
    """
    space = subbase.space
    try:
        result = kprime_partition(subbase, basic, width)
    except WorkbenchError as error:
        return {'error': error.as_dict()}
    pieces = result.all_pieces()
    for a, b in itertools.combinations(pieces, 2):
        if not space.disjoint(a, b):
            return {'item': result.item, 'overlap': [space.describe(a), space.describe(b)]}
    for point in points:
        hits = sum(space.contains(piece, point) for piece in pieces)
        if hits != int(space.contains(basic, point)):
            return {'item': result.item, 'point': space.point_json(point), 'hits': hits}
    return result.item


def resample_membership(space: SpaceModel, state: MatchState, depth: int = MEMBERSHIP_DEPTH) -> list:
    """Повторная сверка пересечения с {x} ∪ A на точках глубины depth с однобуквенными циклами."""
    if state.status != 'adjudicated' or 'certificate' not in state.evidence:
        return []
    chain = state.chain()
    keys = [item.key for item in state.rounds if item.key is not None]
    decomposition = decompose_point_plus_open(space, chain, find_period(keys))
    return verify_limit_membership(space, chain, decomposition, depth=depth, cycle_length=1)


def counterexample_shape(state: MatchState) -> bool:
    """Пересечение вида {точка} × коконечное: ≥ 2 точек и ни одной внутренней."""
    decomposition = state.evidence.get('decomposition', {})
    limit = decomposition.get('limit', {})
    boundary = limit.get('boundary_count', 0)
    return (decomposition.get('verdict') == 'no-decomposition'
            and limit.get('shape') == 'point x cofinite'
            and limit.get('interior_count') == 0
            and (boundary == 'infinite' or boundary >= 2))


def _transfer_summary(rows: list) -> dict[str, Any]:
    adjudicable = [row for row in rows if row[0].status == 'adjudicated' and row[1].status == 'adjudicated']
    sources = [row for row in adjudicable if row[2]]
    failures = [row for row in sources if not row[3]]
    return {
        'matches': len(rows),
        'adjudicable': len(adjudicable),
        'source_wins': len(sources),
        'transferred': len(sources) - len(failures),
        'failures': len(failures),
        'undetermined_share': round(1 - len(adjudicable) / len(rows), 4) if rows else 0.0,
    }
