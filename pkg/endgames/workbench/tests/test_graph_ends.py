from django.test import SimpleTestCase

from workbench.exceptions import InvalidWalkError, PresentationError
from workbench.graph_ends import (
    SAME, SEPARATED, Grid, KappaRays, Ladder, RayWalk, dominates, end_partition, end_space_model,
    graph_from_preset, rays_equivalent,
)
from workbench.spaces import CofiniteSpace, FiniteDiscreteSpace


class EndPartitionTests(SimpleTestCase):
    def test_ladder_rung_separates_two_ends(self):
        approx = end_partition(Ladder(), [[(0, 0), (0, 1)]])[0]
        self.assertEqual(len(approx.infinite()), 2)

    def test_grid_has_one_end(self):
        block = [(i, j) for i in range(-2, 3) for j in range(-2, 3)]
        chain = end_partition(Grid(), [[(0, 0)], block])
        self.assertEqual([len(item.infinite()) for item in chain], [1, 1])
        self.assertTrue(all(item.refinement_ok for item in chain))

    def test_separators_must_increase(self):
        with self.assertRaises(PresentationError):
            end_partition(Ladder(), [[(0, 0)], [(1, 0)]])

    def test_kappa_rays_components(self):
        hubs = [('ray', alpha, 0) for alpha in range(1, 6)]
        approx = end_partition(KappaRays(5), [hubs])[0]
        self.assertEqual(len(approx.infinite()), 6)


class RayTests(SimpleTestCase):
    def setUp(self):
        self.ladder = Ladder()

    def test_parse_walk(self):
        walk = self.ladder.parse_walk('0,0/X/R')
        self.assertEqual(walk, RayWalk((0, 0), ('X',), ('R',)))
        self.assertEqual(walk.vertices(self.ladder, 3), [(0, 0), (0, 1), (1, 1), (2, 1)])

    def test_bad_move(self):
        with self.assertRaises(InvalidWalkError):
            self.ladder.parse_walk('0,0/-/U')

    def test_equivalence(self):
        forward, upper = RayWalk((0, 0), (), ('R',)), RayWalk((0, 1), (), ('R',))
        backward = RayWalk((0, 0), (), ('L',))
        self.assertEqual(rays_equivalent(self.ladder, forward, upper), SAME)
        self.assertEqual(rays_equivalent(self.ladder, forward, backward, [(0, 0), (0, 1)]), SEPARATED)

    def test_domination(self):
        kappa = KappaRays(5)
        self.assertTrue(dominates(kappa, ('ray', 1, 0), RayWalk(('xi', 0), (), ('f',)), 5))
        self.assertFalse(dominates(self.ladder, (-3, 1), RayWalk((0, 0), (), ('R',)), 4))


class EndSpaceModelTests(SimpleTestCase):
    def test_known_presets(self):
        self.assertIsInstance(end_space_model(Ladder()), FiniteDiscreteSpace)
        model = end_space_model(KappaRays(5))
        self.assertIsInstance(model, CofiniteSpace)
        self.assertEqual(len(model.sample_points()), 6)

    def test_kappa_parameter(self):
        self.assertIsNone(graph_from_preset('kappa_rays', {'kappa': 'symbolic'}).kappa)
        self.assertEqual(graph_from_preset('kappa_rays', {'kappa': '7'}).kappa, 7)
        with self.assertRaises(PresentationError):
            graph_from_preset('kappa_rays', {'kappa': 'many'})
        with self.assertRaises(PresentationError):
            graph_from_preset('ladder', {'kappa': 3})
