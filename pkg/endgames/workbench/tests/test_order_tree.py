from django.test import SimpleTestCase

from workbench.exceptions import DomainMismatchError, InvalidRayError, PresentationError
from workbench.order_tree import (
    ROOT, Height, Node, RayDescriptor, antichain_decomposition, basic_open_membership, parse_node, parse_ray,
    parse_word, tree_from_preset,
)
from workbench.spaces import BasicOpen


class HeightTests(SimpleTestCase):
    def test_parse_forms(self):
        self.assertEqual(Height.parse('5'), Height(0, 5))
        self.assertEqual(Height.parse('omega'), Height(1, 0))
        self.assertEqual(Height.parse('ω+3'), Height(1, 3))
        self.assertEqual(str(Height.parse('omega+3')), 'omega+3')

    def test_height_beyond_omega_two_rejected(self):
        for text in ('omega*2', 'omega+x', '-1'):
            with self.subTest(text=text), self.assertRaises(PresentationError):
                Height.parse(text)

    def test_order(self):
        self.assertLess(Height.parse(100), Height.parse('omega'))


class WordAndRayTests(SimpleTestCase):
    def test_root_aliases(self):
        for text in ('', '-', 'ε', 'root'):
            self.assertEqual(parse_word(text), ())

    def test_dotted_words_for_wide_alphabets(self):
        self.assertEqual(parse_word('010'), (0, 1, 0))
        self.assertEqual(parse_word('12.3', alphabet=None), (12, 3))

    def test_bad_word(self):
        with self.assertRaises(PresentationError):
            parse_word('0a')

    def test_descriptor_is_normalized(self):
        self.assertEqual(RayDescriptor((0, 1), (1,)), RayDescriptor((0,), (1,)))
        self.assertEqual(RayDescriptor((), (0, 1, 0, 1)).cycle, (0, 1))
        self.assertEqual(parse_ray('01(1)').text(), '0(1)')

    def test_empty_cycle_is_not_a_ray(self):
        with self.assertRaises(InvalidRayError):
            RayDescriptor((0,), ())

    def test_prefix_and_shift(self):
        ray = parse_ray('1(01)')
        self.assertEqual(ray.prefix(5), (1, 0, 1, 0, 1))
        self.assertEqual(ray.shift(2), parse_ray('(10)'))

    def test_long_ray(self):
        ray = parse_ray('(01)@1')
        self.assertTrue(ray.is_long)
        self.assertEqual(ray.omega_part(), parse_ray('(01)'))

    def test_high_node_round_trip_text(self):
        node = parse_node('T1[(01)]+2')
        self.assertTrue(node.is_high)
        self.assertEqual(node.text(), 'T1[(01)]+2')


class PresentedTreeTests(SimpleTestCase):
    def setUp(self):
        self.binary = tree_from_preset('binary')
        self.michael = tree_from_preset('michael_line')

    def test_order(self):
        self.assertTrue(self.binary.leq(Node((0,)), Node((0, 1))))
        self.assertFalse(self.binary.leq(Node((1,)), Node((0, 1))))
        self.assertFalse(self.binary.lt(Node((0,)), Node((0,))))

    def test_tops_only_over_irrational_rays(self):
        self.assertEqual(len(self.michael.tops_of(parse_ray('(01)'))), 2)
        self.assertEqual(self.michael.tops_of(parse_ray('0(1)')), ())
        self.assertEqual(self.binary.tops_of(parse_ray('(01)')), ())

    def test_high_node_sits_above_its_ray(self):
        top = Node(ray=parse_ray('(01)'), top=0)
        self.assertTrue(self.michael.leq(Node((0, 1, 0)), top))
        self.assertFalse(self.michael.leq(Node((1,)), top))
        self.assertEqual(self.michael.hat(Node(ray=parse_ray('(01)'), top=0, rise=3)), top)
        self.assertEqual(self.michael.hat(Node((0, 1))), ROOT)

    def test_finite_tree_has_no_rays(self):
        tree = tree_from_preset('finite', {'alphabet': 2, 'depth': 2})
        self.assertTrue(tree.is_finite)
        self.assertEqual(len(tree.leaves()), 4)
        with self.assertRaises(InvalidRayError):
            tree.tops_of(parse_ray('(0)'))

    def test_words_must_be_prefix_closed(self):
        with self.assertRaises(PresentationError):
            tree_from_preset('finite', {'words': ['00']})

    def test_baire_levels_follow_width(self):
        baire = tree_from_preset('baire', width=3)
        self.assertEqual(len(baire.level(2)), 9)
        self.assertEqual(len(baire.level(2, width=4)), 16)

    def test_unknown_preset_and_parameters(self):
        with self.assertRaises(PresentationError):
            tree_from_preset('ternary')
        with self.assertRaises(PresentationError):
            tree_from_preset('binary', {'tops': 1})

    def test_require_rejects_foreign_nodes(self):
        with self.assertRaises(DomainMismatchError):
            self.binary.require(Node((2,)))


class AntichainDecompositionTests(SimpleTestCase):
    def test_binary_levels(self):
        decomposition = antichain_decomposition(tree_from_preset('binary'), 5)
        self.assertTrue(decomposition.verified)
        self.assertEqual(decomposition.antichains, 6)

    def test_michael_line_above_omega(self):
        decomposition = antichain_decomposition(tree_from_preset('michael_line'), 'omega+3', ray_size=3)
        self.assertEqual(decomposition.violations, [])
        self.assertGreater(decomposition.antichains, 4)


class BasicOpenMembershipTests(SimpleTestCase):
    def setUp(self):
        self.binary = tree_from_preset('binary')

    def test_holes_are_excluded(self):
        basic = BasicOpen(ROOT, (parse_node('0'),))
        self.assertTrue(basic_open_membership(self.binary, basic, parse_ray('1(0)')))
        self.assertFalse(basic_open_membership(self.binary, basic, parse_ray('01(1)')))

    def test_foreign_ray(self):
        with self.assertRaises(DomainMismatchError):
            basic_open_membership(self.binary, BasicOpen(ROOT), parse_ray('(2)'))


class CustomTreeHeightTests(SimpleTestCase):
    def test_finite_height_bounds_depth(self):
        tree = tree_from_preset('custom', {'alphabet': 3, 'height': 2})
        self.assertTrue(tree.is_finite)
        self.assertEqual(tree.depth, 2)
        self.assertFalse(tree.contains(parse_node('000', alphabet=3)))

    def test_omega_height_is_unbounded(self):
        self.assertFalse(tree_from_preset('custom', {'height': 'omega'}).is_finite)

    def test_unsupported_heights(self):
        for spec in ({'height': 'omega+2', 'tops': 2}, {'height': 'omega', 'tops': 1}, {'height': 2, 'depth': 3}):
            with self.subTest(spec=spec):
                with self.assertRaises(PresentationError):
                    tree_from_preset('custom', spec)
