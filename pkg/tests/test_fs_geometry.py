# tests/test_fs_geometry.py
import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from utils.errors import ZeroVector, RegionError
from geometry.poly_core import MapTuple, RationalCurve
from geometry.fs_geometry import (Disk, Annulus, FullSphere, SphereComplement, parse_region, region_from_json,
                                  fs_distance, g_distance, energy_density, energy, sup_density,
                                  density_peak, image_diameter, boundary_length, density_grid)
from lab.corpus import monomial_curve, random_curve, double_bubble_family

vectors = st.lists(st.builds(complex, st.floats(-1, 1), st.floats(-1, 1)), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3)


class TestRegions:
    def test_parse(self):
        assert parse_region("full") == FullSphere()
        assert parse_region("disk:0,0,1") == Disk(0, 1)
        assert parse_region("annulus:1,2,0.5,1,1") == Annulus(1 + 2j, 0.5, 1, 1)

    @pytest.mark.parametrize("spec", ["disk:0,0,-1", "annulus:0,0,1,0.5", "disk:0,0", "square:1", "disk:0,0,1,2"])
    def test_parse_rejects(self, spec):
        with pytest.raises(RegionError):
            parse_region(spec)

    def test_complement_requires_disjoint_disks(self):
        with pytest.raises(RegionError):
            SphereComplement((Disk(0, 1), Disk(0.5, 1)))
        with pytest.raises(RegionError):
            SphereComplement((Disk(0, 0.1), Disk(1, 0.1, chart=1)))

    def test_json_round_trip(self):
        for region in (FullSphere(), Disk(0.5j, 0.2, 1), Annulus(0, 0.1, 0.3),
                       SphereComplement((Disk(0, 0.1), Disk(1, 0.2)))):
            assert region_from_json(region.to_json()) == region


class TestDistance:
    def test_examples(self):
        assert fs_distance([1, 0], [1, 0]) == 0
        assert fs_distance([1, 0], [0, 1]) == pytest.approx(math.pi / 2)
        assert fs_distance([1, 0], [1, 1]) == pytest.approx(math.pi / 4)
        assert fs_distance([1, 1j], [2j, -2]) == pytest.approx(0, abs=1e-15)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            fs_distance([0, 0], [1, 0])

    def test_g_metric_scaling(self):
        assert g_distance([1, 0], [0, 1]) == pytest.approx(math.sqrt(math.pi) / 2)

    @settings(max_examples=60, deadline=None)
    @given(vectors, vectors, vectors)
    def test_metric_axioms(self, p, q, r):
        assert fs_distance(p, q) == pytest.approx(fs_distance(q, p), abs=1e-12)
        assert fs_distance(p, r) <= fs_distance(p, q) + fs_distance(q, r) + 1e-10
        assert 0 <= fs_distance(p, q) <= math.pi / 2 + 1e-12


class TestDensity:
    def test_identity_at_origin(self, identity):
        assert energy_density(identity, 0) == pytest.approx(1 / math.pi)

    def test_constant(self, constant):
        assert energy_density(constant, 0.3 + 0.1j) == 0

    def test_square_on_unit_circle(self, square):
        assert energy_density(square, np.exp(0.7j)) == pytest.approx(1 / math.pi)

    def test_chart_consistency(self, identity):
        w = 0.4 + 0.3j
        # invariance par z ↔ 1/z pour l'identité
        assert energy_density(identity, w, 1) == pytest.approx(energy_density(identity, w, 0))


class TestEnergy:
    def test_identity_full_sphere(self, identity):
        result = energy(identity, FullSphere(), 1e-8)
        assert result.value == pytest.approx(1.0, abs=1e-7)
        assert result.err_estimate <= 1e-8

    @pytest.mark.parametrize("degree", [1, 2, 3, 4, 5])
    def test_degree_equals_energy(self, degree):
        assert energy(monomial_curve(degree), FullSphere(), 1e-7).value == pytest.approx(degree, abs=1e-5)

    @pytest.mark.parametrize("delta", [0.1, 0.5, 1.0, 2.0])
    def test_identity_disks(self, identity, delta):
        expected = delta ** 2 / (1 + delta ** 2)
        assert energy(identity, Disk(0, delta), 1e-9).value == pytest.approx(expected, abs=1e-8)

    def test_square_unit_disk(self, square):
        assert energy(square, Disk(0, 1), 1e-9).value == pytest.approx(1.0, abs=1e-6)

    def test_cells_agree_with_flux(self, square):
        flux = energy(square, Disk(0.2, 0.7), 1e-8).value
        cells = energy(square, Disk(0.2, 0.7), 1e-8, method="cells").value
        assert cells == pytest.approx(flux, abs=1e-6)

    def test_annulus_and_complement(self, identity):
        annulus = energy(identity, Annulus(0, 0.5, 1), 1e-9).value
        assert annulus == pytest.approx(0.5 - 0.2, abs=1e-8)
        rest = energy(identity, SphereComplement((Disk(0, 1),)), 1e-9).value
        assert rest == pytest.approx(0.5, abs=1e-8)

    def test_constant_curve(self, constant):
        assert energy(constant, FullSphere()).value == 0

    def test_sharp_concentration(self):
        k = 1e4
        c = RationalCurve(MapTuple.from_coeffs([[1, 0, -k ** -2], [0, 1, 0]]))
        assert energy(c, FullSphere(), 1e-8).value == pytest.approx(2.0, abs=1e-6)
        assert energy(c, Disk(0, 0.01), 1e-8).value == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("k", [1e3, 1e4])
    def test_circle_through_a_sibling_bubble(self, k):
        c = double_bubble_family(ks=(k, 2 * k, 3 * k)).curves()[0]
        # le cercle traverse le cœur de la bulle sœur en +2/k : la moitié de sa masse est dedans
        result = energy(c, Disk(-2 / k, 4 / k), 1e-7)
        assert result.value == pytest.approx(1.5, abs=0.01)
        assert result.err_estimate <= 2e-7

    @pytest.mark.parametrize("seed", range(4))
    def test_chart_one_disk_is_outer_region(self, seed):
        c = random_curve(np.random.default_rng(seed), 3, 3)
        total = energy(c, FullSphere(), 1e-9).value
        inner = energy(c, Disk(0, 1), 1e-9).value
        assert energy(c, Disk(0, 1, chart=1), 1e-9).value == pytest.approx(total - inner, abs=1e-7)

    @pytest.mark.parametrize("seed", range(4))
    def test_disk_seen_from_both_charts(self, seed):
        c = random_curve(np.random.default_rng(seed), 2, 3)
        # w ↦ 1/w envoie le disque |w − 2| ≤ 1 sur le disque |z − 2/3| ≤ 1/3
        far = energy(c, Disk(2, 1, chart=1), 1e-9).value
        assert far == pytest.approx(energy(c, Disk(2 / 3, 1 / 3), 1e-9).value, abs=1e-7)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 1.0), st.floats(1.05, 3.0))
    def test_monotone_in_radius(self, seed, r, factor):
        c = random_curve(np.random.default_rng(seed), 2, 2)
        small = energy(c, Disk(0.1, r), 1e-8).value
        large = energy(c, Disk(0.1, r * factor), 1e-8).value
        assert small <= large + 1e-7


class TestSupDensity:
    def test_identity(self, identity):
        z, value = sup_density(identity, Disk(0, 2))
        assert abs(z) < 1e-6
        assert value == pytest.approx(1 / math.pi, rel=1e-12)

    def test_square_maximum_circle(self, square):
        z, value = sup_density(square, Disk(0, 2))
        assert abs(z) == pytest.approx(3 ** -0.25, abs=1e-3)
        assert value == pytest.approx(3 * math.sqrt(3) / (4 * math.pi), rel=1e-8)

    def test_constant(self, constant):
        assert sup_density(constant, Disk(0, 1))[1] == 0

    def test_unbounded_rejected(self, identity):
        with pytest.raises(RegionError):
            sup_density(identity, FullSphere())


class TestDensityPeak:
    def test_identity(self, identity):
        assert abs(density_peak(identity, 0.05 + 0.02j)) < 1e-8

    @pytest.mark.parametrize("c", [0.3, -1 + 0.5j, 2j])
    def test_translated_identity(self, c):
        curve = RationalCurve(MapTuple.from_coeffs([[1, -c], [0, 1]]))
        assert density_peak(curve, c + 0.03 - 0.01j) == pytest.approx(c, abs=1e-8)

    def test_bubble_core(self):
        # cœur d'échelle k⁻² de [u² − k⁻² v², uv]
        k = 100.0
        curve = RationalCurve(MapTuple.from_coeffs([[1, 0, -k ** -2], [0, 1, 0]]))
        assert abs(density_peak(curve, 3e-6 + 2e-6j)) < 1e-10

    def test_zero_density_left_in_place(self, square):
        assert density_peak(square, 0j) == 0


class TestImageAndLength:
    def test_constant_diameter(self, constant):
        assert image_diameter(constant, FullSphere()) == 0

    def test_identity_full_sphere_diameter(self, identity):
        assert image_diameter(identity, FullSphere(), 1000) == pytest.approx(math.pi / 2, rel=0.01)

    def test_identity_small_disk_diameter(self, identity):
        assert image_diameter(identity, Disk(0, 0.01), 1000) == pytest.approx(0.02, rel=0.1)

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 3.0])
    def test_identity_latitude_length(self, identity, r):
        assert boundary_length(identity, 0, r) == pytest.approx(2 * math.pi * r / (1 + r * r), rel=1e-7)
        assert boundary_length(identity, 0, r, normalized=True) == pytest.approx(
            2 * math.pi * r / (1 + r * r) / math.sqrt(math.pi), rel=1e-7)

    def test_square_unit_circle_length(self, square):
        assert boundary_length(square, 0, 1) == pytest.approx(2 * math.pi, rel=1e-7)

    def test_constant_length(self, constant):
        assert boundary_length(constant, 0, 1) == 0

    def test_density_grid(self, identity):
        grid = density_grid(identity, extent=1.0, res=5)
        assert list(grid.columns) == ["x", "y", "rho"]
        assert len(grid) == 25
        center = grid[(grid.x == 0) & (grid.y == 0)]
        assert center.rho.iloc[0] == pytest.approx(1 / math.pi)
