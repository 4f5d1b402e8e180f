# tests/test_tree_of_spheres.py
import itertools
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from utils.errors import RootHasNoPredecessor, SchemaError
from bubbles.tree_of_spheres import (RootedOrder, SphereTree, NodalConfig, DecoratedTree, Violation, ORDER, RS1,
                                     RS2, ATTACHMENT, INJECTIVITY, validate, arithmetic_genus, stability_check,
                                     predecessor, random_sphere_tree, remove_root, duplicate_attachment,
                                     incomparable_predecessors)


def tree_from_parents(parents, attach=None):
    elements = [0] + sorted(parents)
    attach = attach if attach is not None else {i: complex(i, 0) for i in parents}
    return SphereTree(RootedOrder.from_parents(parents, 0, elements), attach)


def axioms(violations):
    return {v.axiom for v in violations}


class TestValidate:
    def test_single_sphere(self):
        assert validate(tree_from_parents({})) == []

    def test_same_attachment_point(self):
        t = tree_from_parents({1: 0, 2: 0}, {1: 0.5j, 2: 0.5j})
        assert axioms(validate(t)) == {INJECTIVITY}

    def test_two_minimal_elements(self):
        t = SphereTree(RootedOrder([0, 1], {}), {})
        assert RS1 in axioms(validate(t))

    def test_missing_attachment(self):
        t = SphereTree(RootedOrder.from_parents({1: 0}, 0, [0, 1]), {})
        assert axioms(validate(t)) == {ATTACHMENT}

    def test_cycle_is_not_an_order(self):
        t = SphereTree(RootedOrder([0, 1, 2], {1: {0, 2}, 2: {0, 1}}), {1: 1j, 2: 2j})
        assert ORDER in axioms(validate(t))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 8))
    def test_random_trees_valid_and_genus_zero(self, seed, size):
        t = random_sphere_tree(np.random.default_rng(seed), size)
        assert validate(t) == []
        assert arithmetic_genus(t.nodal_config()) == 0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(2, 6))
    def test_mutations_detected(self, seed, size):
        t = random_sphere_tree(np.random.default_rng(seed), size)
        assert validate(remove_root(t))
        assert INJECTIVITY in axioms(validate(duplicate_attachment(t)))
        assert RS2 in axioms(validate(incomparable_predecessors(t)))

    def test_violation_json(self):
        v = Violation(RS1, (0, 1), "deux racines")
        assert v.to_json() == {"axiom": RS1, "witnesses": [0, 1], "message": "deux racines"}


class TestGenus:
    def test_one_sphere(self):
        assert arithmetic_genus(NodalConfig(genera=(0,), identified_pairs=())) == 0

    def test_two_spheres_two_nodes(self):
        pairs = (((0, 0j), (1, complex(np.inf))), ((0, 1 + 0j), (1, 0j)))
        assert arithmetic_genus(NodalConfig(genera=(0, 0), identified_pairs=pairs)) == 1

    def test_point_identified_twice(self):
        pairs = (((0, 0j), (1, 0j)), ((0, 0j), (2, 0j)))
        with pytest.raises(SchemaError):
            NodalConfig(genera=(0, 0, 0), identified_pairs=pairs)


class TestStability:
    def test_constant_with_two_nodes(self):
        t = tree_from_parents({1: 0, 2: 0})
        stable, offenders = stability_check(DecoratedTree.from_tree(t, {0: 0, 1: 1, 2: 1}))
        assert not stable and offenders == [0]

    def test_constant_with_three_nodes(self):
        t = tree_from_parents({1: 0, 2: 0, 3: 0})
        assert stability_check(DecoratedTree.from_tree(t, {0: 0, 1: 1, 2: 1, 3: 1})) == (True, [])

    def test_all_non_constant(self):
        t = tree_from_parents({1: 0})
        assert stability_check(DecoratedTree.from_tree(t, {0: 1, 1: 2}))[0]

    def test_marked_points_count(self):
        t = tree_from_parents({1: 0, 2: 0})
        assert stability_check(DecoratedTree.from_tree(t, {0: 0, 1: 1, 2: 1}, {0: 1}))[0]

    def test_enumerated_small_trees(self):
        # arbres à au plus 4 composantes, degrés 0 ou 1
        for size in range(1, 5):
            for choice in itertools.product(*[range(i) for i in range(1, size)]):
                parents = {i: p for i, p in zip(range(1, size), choice)}
                t = tree_from_parents(parents)
                assert validate(t) == []
                assert arithmetic_genus(t.nodal_config()) == 0
                for degrees in itertools.product((0, 1), repeat=size):
                    decor = DecoratedTree.from_tree(t, dict(enumerate(degrees)))
                    expected = [i for i in range(size) if degrees[i] == 0 and
                                sum(1 for p in parents.values() if p == i) + (i != 0) < 3]
                    assert stability_check(decor) == (not expected, expected)

    def test_decorated_json_round_trip(self):
        t = tree_from_parents({1: 0, 2: 1})
        decor = DecoratedTree.from_tree(t, {0: 1, 1: 0, 2: 2}, {1: 1})
        again = DecoratedTree.from_json(decor.to_json())
        assert again.decor == decor.decor
        assert again.tree.attach == t.attach


class TestPredecessor:
    def test_chain(self):
        assert predecessor(RootedOrder.from_parents({1: 0, 2: 1}, 0), 2) == 1

    def test_star(self):
        order = RootedOrder.from_parents({1: 0, 2: 0, 3: 0}, 0)
        assert {predecessor(order, i) for i in (1, 2, 3)} == {0}

    def test_deep_branch(self):
        order = RootedOrder.from_parents({1: 0, 2: 0, 3: 1, 4: 3, 5: 2}, 0)
        assert predecessor(order, 4) == 3
        assert predecessor(order, 5) == 2
        assert order.depth(4) == 3
        assert order.children(0) == [1, 2]

    def test_root(self):
        with pytest.raises(RootHasNoPredecessor):
            predecessor(RootedOrder.from_parents({1: 0}, 0), 0)

    def test_tree_json(self):
        with pytest.raises(SchemaError):
            SphereTree.from_json({"nodes": [0, 1], "root": 5})

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 9))
    def test_children_and_predecessor_agree(self, seed, size):
        order = random_sphere_tree(np.random.default_rng(seed), size).order
        for i in order.elements:
            assert all(predecessor(order, j) == i for j in order.children(i))
        non_root = [j for j in order.elements if j != order.root]
        assert sorted(j for i in order.elements for j in order.children(i)) == sorted(non_root)
