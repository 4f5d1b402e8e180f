# tests/conftest.py
import numpy as np
import pytest
from geometry.poly_core import MapTuple, RationalCurve
from lab.corpus import identity_curve, monomial_curve, constant_curve, concentrating_family, double_bubble_family


@pytest.fixture
def identity():
    return identity_curve()


@pytest.fixture
def square():
    """z ↦ z², n-uplet [u², v²]"""
    return monomial_curve(2)


@pytest.fixture
def cube():
    return monomial_curve(3)


@pytest.fixture
def constant():
    return constant_curve()


@pytest.fixture
def scaled_identity():
    """z ↦ 0.05·z"""
    return RationalCurve(MapTuple.from_coeffs([[0.05, 0], [0, 1]]))


@pytest.fixture
def scaled_square():
    """z ↦ 0.05·z²"""
    return RationalCurve(MapTuple.from_coeffs([[0.05, 0, 0], [0, 0, 1]]))


@pytest.fixture(scope="session")
def concentrating():
    """[u² − k⁻² v², uv] pour k = 10², 10³, 10⁴"""
    return concentrating_family()


@pytest.fixture(scope="session")
def double_bubble():
    return double_bubble_family()


@pytest.fixture
def rng():
    return np.random.default_rng(7)
