from django.test import SimpleTestCase

from workbench.exceptions import EmptySetError, NestednessError
from workbench.order_tree import ROOT, Node, parse_ray, tree_from_preset
from workbench.spaces import (
    BasicOpen, Box, CofiniteSpace, Comparison, ExplicitSpace, GeneratedBasis, ProductSpace, SubspaceModel,
    TreeSpace, cmp_basic_opens, generated_basis, subbase_properties,
)


def node(text: str) -> Node:
    return Node(tuple(int(char) for char in text))


class TreeSpaceTests(SimpleTestCase):
    def setUp(self):
        self.space = TreeSpace(tree_from_preset('binary'))

    def test_parse_basic(self):
        self.assertEqual(self.space.parse_basic('0 -'), BasicOpen(node('0')))
        self.assertEqual(self.space.parse_basic('ε 0,01'), BasicOpen(node('1')))
        self.assertEqual(self.space.parse_basic('ε 00'), BasicOpen(ROOT, (node('00'),)))

    def test_empty_set_is_rejected(self):
        with self.assertRaises(EmptySetError):
            self.space.parse_basic('0 0')

    def test_disjoint_holes_are_dropped(self):
        self.assertEqual(self.space.normalize(node('0'), [node('1')]), BasicOpen(node('0')))

    def test_cmp(self):
        parse = self.space.parse_basic
        self.assertIs(self.space.cmp(parse('0 -'), parse('01 -')), Comparison.B_IN_A)
        self.assertIs(self.space.cmp(parse('01 -'), parse('0 -')), Comparison.A_IN_B)
        self.assertIs(self.space.cmp(parse('0 -'), parse('1 -')), Comparison.DISJOINT)
        self.assertIs(self.space.cmp(parse('ε 0'), parse('0 -')), Comparison.DISJOINT)
        self.assertIs(self.space.cmp(parse('ε 00'), parse('0 -')), Comparison.OVERLAP)
        self.assertIs(self.space.cmp(parse('0 -'), parse('0 -')), Comparison.EQUAL)

    def test_membership(self):
        basic = self.space.parse_basic('ε 0')
        self.assertTrue(self.space.contains(basic, parse_ray('1(0)')))
        self.assertFalse(self.space.contains(basic, parse_ray('(0)')))

    def test_difference_covers_exactly(self):
        whole, inner = self.space.parse_basic('ε -'), self.space.parse_basic('0 01')
        pieces = self.space.difference(whole, inner)
        for point in self.space.sample_points(4, 2):
            inside = sum(self.space.contains(piece, point) for piece in pieces)
            expected = int(self.space.contains(whole, point) and not self.space.contains(inner, point))
            self.assertEqual(inside, expected, point)

    def test_michael_line_branches(self):
        space = TreeSpace(tree_from_preset('michael_line'), mode='branches')
        ray = parse_ray('(01)')
        self.assertFalse(space.is_point(ray))
        self.assertTrue(space.is_point(ray.with_top(0)))
        self.assertTrue(space.is_isolated(ray.with_top(0)))
        self.assertTrue(space.is_point(parse_ray('0(1)')))


class SubbasePropertiesTests(SimpleTestCase):
    def test_binary(self):
        report = subbase_properties(TreeSpace(tree_from_preset('binary')), depth=5)
        self.assertTrue(report.passed)
        self.assertTrue(report.nested)

    def test_michael_line_above_omega(self):
        space = TreeSpace(tree_from_preset('michael_line'))
        self.assertTrue(subbase_properties(space, depth='omega+3').passed)

    def test_overlapping_family_has_witness(self):
        space = ExplicitSpace([0, 1, 2], {'A': [0, 1], 'B': [1, 2]})
        report = subbase_properties(space, family=[space.normalize('A'), space.normalize('B')])
        self.assertFalse(report.nested)
        self.assertIsNotNone(report.nested_witness)

    def test_relation_of_crossing_sets(self):
        space = ExplicitSpace([0, 1, 2], {'A': [0, 1], 'B': [1, 2]})
        with self.assertRaises(NestednessError):
            space.relation('A', 'B')


class CofiniteSpaceTests(SimpleTestCase):
    def test_one_limit_point(self):
        space = CofiniteSpace(5)
        points = space.sample_points()
        self.assertEqual(points, [0, 1, 2, 3, 4, 5])
        self.assertEqual([p for p in points if not space.is_isolated(p)], [0])

    def test_cofinite_neighbourhoods(self):
        space = CofiniteSpace()
        basic = space.normalize('X', [1, 2])
        self.assertTrue(space.contains(basic, 0))
        self.assertFalse(space.contains(basic, 2))
        self.assertTrue(space.contains(basic, 7))


class ProductAndSubspaceTests(SimpleTestCase):
    def test_product_box(self):
        space = ProductSpace([TreeSpace(tree_from_preset('binary')), CofiniteSpace()])
        box = space.parse_basic('0 - | X 1')
        self.assertIsInstance(box, Box)
        self.assertTrue(space.contains(box, (parse_ray('(0)'), 0)))
        self.assertFalse(space.contains(box, (parse_ray('(0)'), 1)))
        self.assertEqual(space.name, 'binary-rays x cofinite')

    def test_punctured_subspace(self):
        parent = TreeSpace(tree_from_preset('binary'))
        subspace = SubspaceModel(parent, punctures=[parse_ray('(0)')])
        self.assertFalse(subspace.is_point(parse_ray('(0)')))
        self.assertTrue(subspace.is_point(parse_ray('(01)')))
        self.assertFalse(subspace.contains(parent.normalize(node('0')), parse_ray('(0)')))
        self.assertTrue(subspace.contains(parent.normalize(node('0')), parse_ray('0(1)')))


class GeneratedBasisTests(SimpleTestCase):
    def test_enumerated_sets_are_admitted(self):
        space = TreeSpace(tree_from_preset('binary'))
        anchors = tuple(space.canonical(n) for n in space.tree.materialize(2))
        basis = GeneratedBasis(space, anchors)
        found = basis.enumerate(max_holes=1)
        self.assertIn(space.parse_basic('ε 0'), found)
        self.assertTrue(all(basis.admits(item) for item in found))
        self.assertIsNone(basis.meet([node('0'), node('1')]))

    def test_generated_from_nested_family(self):
        space = TreeSpace(tree_from_preset('binary'))
        basis = generated_basis(space, [node('0'), node('01'), node('1')], depth=3)
        self.assertEqual(set(basis.members), {node('0'), node('01'), node('1')})
        self.assertTrue(basis.admits(space.normalize(node('0'), [node('01')])))
        self.assertTrue(basis.admits(space.normalize(node('00'))))
        self.assertFalse(basis.admits(space.normalize(node('000'))))

    def test_crossing_family_is_rejected(self):
        space = ExplicitSpace([0, 1, 2], {'A': [0, 1], 'B': [1, 2]})
        with self.assertRaises(NestednessError):
            generated_basis(space, ['A', 'B'])


class CmpBasicOpensTests(SimpleTestCase):
    def setUp(self):
        self.space = TreeSpace(tree_from_preset('binary'))

    def test_nested_outcomes(self):
        parse = self.space.parse_basic
        self.assertIs(cmp_basic_opens(self.space, parse('0 -'), parse('01 -')), Comparison.B_IN_A)
        self.assertIs(cmp_basic_opens(self.space, parse('0 -'), parse('1 -')), Comparison.DISJOINT)

    def test_overlap_raises(self):
        parse = self.space.parse_basic
        with self.assertRaises(NestednessError):
            cmp_basic_opens(self.space, parse('ε 00'), parse('0 -'))
