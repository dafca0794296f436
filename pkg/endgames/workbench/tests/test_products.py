from django.test import SimpleTestCase

from workbench.exceptions import InvariantViolation, UnsupportedError
from workbench.order_tree import tree_from_preset
from workbench.products import (
    InverseSystem, associated_tree, check_product_homeo, inverse_limit_depth, levelwise_product, power_system,
    system_from_tree,
)


class InverseSystemTests(SimpleTestCase):
    def setUp(self):
        self.binary = system_from_tree(tree_from_preset('binary'), 3)

    def test_levels_of_binary_tree(self):
        self.assertEqual(self.binary.describe()['sizes'], [1, 2, 4, 8])
        self.assertEqual(self.binary.apply(1, 3, (0, 1, 1)), (0,))
        self.assertEqual(len(inverse_limit_depth(self.binary, 3)), 8)

    def test_trees_of_other_heights_rejected(self):
        with self.assertRaises(UnsupportedError):
            system_from_tree(tree_from_preset('michael_line'), 2)
        with self.assertRaises(UnsupportedError):
            system_from_tree(tree_from_preset('finite', {'alphabet': 2, 'depth': 2}), 2)

    def test_partial_map_is_reported(self):
        system = InverseSystem([('a',), ('b', 'c')], [{'b': 'a'}], 'broken')
        with self.assertRaises(InvariantViolation):
            system.certify()

    def test_explicit_maps_must_compose(self):
        levels = [('a',), ('b',), ('c',)]
        system = InverseSystem(levels, [{'b': 'a'}, {'c': 'b'}], 'chain', explicit={(0, 2): {'c': 'x'}})
        with self.assertRaises(InvariantViolation):
            system.certify()

    def test_associated_tree(self):
        tree = associated_tree(self.binary)
        self.assertEqual(tree.children(1, (0,)), [(0, 0), (0, 1)])
        self.assertTrue(tree.leq((1, (0,)), (3, (0, 1, 1))))
        self.assertFalse(tree.leq((1, (1,)), (3, (0, 1, 1))))


class ProductTests(SimpleTestCase):
    def test_levelwise_product_sizes(self):
        product = levelwise_product([self.binary_system(), self.binary_system()])
        self.assertEqual(product.describe()['sizes'], [1, 4, 16])
        self.assertEqual(product.label, 'binary x binary')

    def test_power_system(self):
        power = power_system(self.binary_system(), 2)
        self.assertEqual(len(inverse_limit_depth(power, 2)), 16)

    def test_product_homeomorphism_certificates(self):
        binary, baire = tree_from_preset('binary'), tree_from_preset('baire', width=3)
        certificate = check_product_homeo([binary, binary], 3)
        self.assertTrue(certificate.passed)
        self.assertEqual((certificate.threads, certificate.matched), (64, 64))
        certificate = check_product_homeo([binary, baire], 3, width=3)
        self.assertTrue(certificate.passed)
        self.assertEqual(certificate.threads, 216)
        self.assertEqual(certificate.factor_threads, [8, 27])

    @staticmethod
    def binary_system() -> InverseSystem:
        return system_from_tree(tree_from_preset('binary'), 2)
