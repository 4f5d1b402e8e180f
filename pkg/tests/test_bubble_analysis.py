# tests/test_bubble_analysis.py
import numpy as np
import pytest
from utils.errors import NoConvergence, NoSolution, ZeroScale, SchemaError
from geometry.poly_core import MapTuple, P1Point, INFINITY, ORIGIN
from geometry.fs_geometry import Disk, FullSphere, Annulus, energy, fs_distance
from bubbles.extrapolation import neville_limit, last_two_extrapolants
from bubbles.bubble_analysis import (CurveFamily, RescaleStep, BubbleConfig, limit_tuple, extrapolate_limit,
                                     bubble_points, mass_profile, delta_for_mass, rescaled_family,
                                     build_bubble_tree, energy_profile, uniform_convergence, family_from_json,
                                     point_from_text)
from lab.corpus import planted_family, identity_curve

IDENTITY_ROWS = [[1, 0], [0, 1]]


def concentrating_rows(k):
    return [[1, 0, -k ** -2], [0, 1, 0]]


PLANTED_SEEDS = range(20)


def _planted_args(seed):
    rng = np.random.default_rng(seed)
    return rng, int(rng.integers(2, 5)), int(rng.integers(2, 4))


class TestExtrapolation:
    def test_polynomial_reproduced(self):
        h = np.array([0.1, 0.05, 0.02, 0.01])
        assert neville_limit(h, 3 + 2 * h - h ** 2) == pytest.approx(3)

    def test_vector_values(self):
        h = [0.1, 0.01]
        got = neville_limit(h, [np.array([1 + x, 2 - x]) for x in h])
        assert np.allclose(got, [1, 2])

    def test_error_estimate_from_last_two(self):
        h = np.array([0.1, 0.05, 0.02])
        best, previous = last_two_extrapolants(h, list(1 + h + h ** 2), 3)
        assert best == pytest.approx(1.0)
        assert abs(previous - 1) > 1e-4


class TestFamily:
    def test_k_increasing(self):
        with pytest.raises(SchemaError):
            CurveFamily([(10, IDENTITY_ROWS), (5, IDENTITY_ROWS), (20, IDENTITY_ROWS)])

    def test_three_samples_needed(self):
        with pytest.raises(SchemaError):
            CurveFamily([(1, IDENTITY_ROWS), (2, IDENTITY_ROWS)])

    def test_json_round_trip(self, concentrating):
        again = family_from_json(concentrating.to_json())
        assert np.allclose(again.ks, concentrating.ks)
        assert all(a.projectively_close(b) for a, b in zip(again.tuples, concentrating.tuples))

    def test_point_from_text(self):
        assert point_from_text("inf") == INFINITY
        assert point_from_text("0") == ORIGIN
        assert point_from_text("0.5,-1").affine(0) == pytest.approx(0.5 - 1j)


class TestLimit:
    def test_explicit_family(self):
        fam = CurveFamily.from_function(concentrating_rows, [10, 1e2, 1e3, 1e4])
        assert limit_tuple(fam).projectively_close(MapTuple.from_coeffs([[1, 0, 0], [0, 1, 0]]), 1e-6)

    def test_declared_limit(self):
        limit = MapTuple.from_coeffs([[2, 0], [0, 2]])
        fam = CurveFamily([(1, IDENTITY_ROWS)], declared_limit=limit)
        assert np.allclose(limit_tuple(fam).coeff_matrix, IDENTITY_ROWS)

    def test_alternating_family_diverges(self):
        samples = [(k, IDENTITY_ROWS if k % 2 else [[0, 1], [1, 0]]) for k in (1, 2, 3, 4)]
        with pytest.raises(NoConvergence):
            limit_tuple(CurveFamily(samples))

    def test_error_estimate_small(self, concentrating):
        _, err = extrapolate_limit(concentrating)
        assert err < 1e-6


class TestBubblePoints:
    def test_single_bubble(self, concentrating):
        masses, residual = bubble_points(concentrating)
        assert len(masses) == 1
        assert masses[0].point == ORIGIN and masses[0].algebraic_mult == 1
        assert residual.tuple.projectively_close(MapTuple.from_coeffs(IDENTITY_ROWS))

    def test_constant_family(self):
        fam = CurveFamily.from_function(lambda k: [[1, 0.5], [0.2, 1]], [1, 2, 3])
        masses, residual = bubble_points(fam)
        assert masses == []
        assert residual.tuple.projectively_close(MapTuple.from_coeffs([[1, 0.5], [0.2, 1]]))

    def test_planted_points_recovered(self):
        planted = planted_family(np.random.default_rng(3), 3, 2)
        masses, residual = bubble_points(planted.family)
        assert residual.degree == planted.residual_degree
        for point, mult in zip(planted.points, planted.multiplicities):
            assert any(b.point.is_close(point) and b.algebraic_mult == mult for b in masses)


class TestMassProfile:
    def test_concentrating_mass(self, concentrating):
        profile = mass_profile(concentrating, ORIGIN, (0.2, 0.1, 0.05))
        assert profile.mass == pytest.approx(1.0, abs=0.02)
        assert set(profile.table.columns) == {"delta", "k", "energy"}
        assert list(profile.limits.index) == [0.2, 0.1, 0.05]

    def test_no_concentration(self, concentrating):
        assert mass_profile(concentrating, P1Point(0.5, 1)).mass == pytest.approx(0.0, abs=1e-3)

    def test_double_mass(self, double_bubble):
        assert mass_profile(double_bubble, ORIGIN).mass == pytest.approx(2.0, abs=0.04)

    def test_deltas_decreasing(self, concentrating):
        with pytest.raises(SchemaError):
            mass_profile(concentrating, ORIGIN, (0.05, 0.1))


class TestDeltaForMass:
    def test_identity_half(self, identity):
        assert delta_for_mass(identity, 0, 0.5) == pytest.approx(1.0, rel=1e-8)

    def test_square_half(self, square):
        assert delta_for_mass(square, 0, 1.0) == pytest.approx(1.0, rel=1e-8)

    def test_mass_too_large(self, identity):
        with pytest.raises(NoSolution):
            delta_for_mass(identity, 0, 1.0)

    def test_constant(self, constant):
        with pytest.raises(NoSolution):
            delta_for_mass(constant, 0, 0.5)

    def test_energy_matches(self, square):
        delta = delta_for_mass(square, 0.3, 0.7, 1e-9)
        assert energy(square, Disk(0.3, delta), 1e-10).value == pytest.approx(0.7, abs=1e-8)

    @pytest.mark.parametrize("k", [1e3, 1e4])
    def test_radius_across_a_sibling_bubble(self, double_bubble, k):
        # le cercle de rayon δ traverse le cœur de la bulle voisine en +2/k
        curve = dict(zip(double_bubble.ks, double_bubble.curves()))[k]
        delta = delta_for_mass(curve, -2 / k, 1.5, 1e-8)
        assert 2 / k < delta < 8 / k
        assert energy(curve, Disk(-2 / k, delta), 1e-9).value == pytest.approx(1.5, abs=1e-7)


class TestRescale:
    def test_identity_step(self, concentrating):
        n = len(concentrating.samples)
        fam = rescaled_family(concentrating, RescaleStep((0j,) * n, (1.0,) * n, 0.5))
        assert all(a.projectively_close(b) for a, b in zip(fam.tuples, concentrating.tuples))

    def test_zero_scale(self, concentrating):
        n = len(concentrating.samples)
        with pytest.raises(ZeroScale):
            rescaled_family(concentrating, RescaleStep((0j,) * n, (0.0,) * n, 0.5))

    def test_bubble_limit(self, concentrating):
        scales = tuple(float(k) ** -2 for k in concentrating.ks)
        fam = rescaled_family(concentrating, RescaleStep((0j,) * len(scales), scales, 0.5))
        limit = limit_tuple(fam)
        assert limit.projectively_close(MapTuple.from_coeffs([[0, 0, -1], [0, 1, 0]]), 1e-6)
        masses, residual = bubble_points(fam)
        assert [(b.point, b.algebraic_mult) for b in masses] == [(INFINITY, 1)]
        assert residual.tuple.projectively_close(MapTuple.from_coeffs([[0, -1], [1, 0]]), 1e-6)

    def test_energy_preserved(self, concentrating):
        scales = tuple(0.5 / float(k) for k in concentrating.ks)
        fam = rescaled_family(concentrating, RescaleStep((0j,) * len(scales), scales, 0.5))
        for before, after, s in zip(concentrating.curves(), fam.curves(), scales):
            e_before = energy(before, Disk(0, s), 1e-9).value
            e_after = energy(after, Disk(0, 1), 1e-9).value
            assert e_after == pytest.approx(e_before, abs=2e-9)


class TestBubbleTree:
    def test_concentrating_family(self, concentrating):
        tree = build_bubble_tree(concentrating)
        root, child = tree.components
        assert root.limit_map.tuple.projectively_close(MapTuple.from_coeffs(IDENTITY_ROWS), 1e-6)
        assert root.degree == 1 and child.degree == 1
        assert child.parent == 0 and child.attach == ORIGIN
        assert child.node_gap <= 1e-3
        # le point ∞ de la bulle s'envoie sur l'image du point d'attache
        image = child.limit_map.tuple.evaluate_point(INFINITY)
        assert fs_distance(image, [0, 1]) <= 1e-3
        assert tree.degree_sum == 2
        assert tree.energy_sum(1e-8) == pytest.approx(2.0, abs=1e-5)
        assert tree.diagnostics == []

    def test_json_report(self, concentrating):
        doc = build_bubble_tree(concentrating).to_json()
        assert doc["schema"] == 1
        assert doc["conservation"]["degree_sum"] == 2
        assert doc["edges"][0]["parent"] == 0
        assert doc["decor"]["1"]["degree"] == 1

    def test_constant_in_k(self):
        fam = CurveFamily.from_function(lambda k: [[1, 0, 1], [0, 1, 0]], [1, 2, 3])
        tree = build_bubble_tree(fam)
        assert len(tree.components) == 1
        assert tree.degree_sum == 2

    def test_profiled_masses(self, concentrating):
        tree = build_bubble_tree(concentrating, BubbleConfig(profile_masses=True))
        assert tree.masses[0]["profiled_mass"] == pytest.approx(1.0, abs=0.02)

    def test_double_bubble_ghost(self, double_bubble):
        tree = build_bubble_tree(double_bubble)
        assert [c.degree for c in tree.components] == [1, 0, 1, 1]
        ghost = tree.components[1]
        assert ghost.parent == 0 and ghost.attach == ORIGIN and ghost.mass == 2
        assert [c.parent for c in tree.components[2:]] == [1, 1]
        assert tree.degree_sum == 3
        assert max(tree.node_gaps) <= 1e-3
        assert tree.diagnostics == []

    def test_planted_seeds_reach_double_points(self):
        mults = [planted_family(*_planted_args(seed)).multiplicities for seed in PLANTED_SEEDS]
        assert sum(2 in m for m in mults) >= 3

    @pytest.mark.parametrize("seed", PLANTED_SEEDS)
    def test_planted_degree_conservation(self, seed):
        planted = planted_family(*_planted_args(seed))
        tree = build_bubble_tree(planted.family)
        assert tree.degree_sum == planted.family.degree
        assert max(tree.node_gaps) <= 1e-3
        children = [c for c in tree.components if c.parent == 0]
        assert sorted(c.mass for c in children) == sorted(planted.multiplicities)
        for point in planted.points:
            assert any(c.attach.is_close(point) for c in children)


class TestSupplements:
    def test_energy_identity(self, concentrating):
        table, limit = energy_profile(concentrating, FullSphere(), 1e-8)
        assert np.allclose(table["energy"], 2.0, atol=1e-6)
        assert limit == pytest.approx(2.0, abs=1e-5)

    def test_uniform_convergence_away_from_bubble(self, concentrating):
        table = uniform_convergence(concentrating, Annulus(0, 0.5, 1.0), samples=128)
        assert table["sup_distance"].is_monotonic_decreasing
        assert table["sup_distance"].iloc[-1] < 1e-6
