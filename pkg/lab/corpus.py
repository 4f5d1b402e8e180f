# lab/corpus.py
import logging
from dataclasses import dataclass
import numpy as np
from utils.config import Config
from utils.errors import NotCoprime
from geometry.poly_core import HomogPoly, MapTuple, RationalCurve, P1Point, substitute_affine
from geometry.fs_geometry import Disk, image_diameter
from bubbles.bubble_analysis import CurveFamily

logger = logging.getLogger(__name__)

PLANTED_KS = (1e2, 3e2, 1e3, 3e3, 1e4)
PLANTED_MAX_MULT = 2


def unit_disk(rng, size):
    """Complexes uniformes dans le disque unité"""
    r = np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))


def random_tuple(rng, degree, n):
    return MapTuple.from_coeffs(unit_disk(rng, (n, degree + 1)))


def random_curve(rng, degree, n, attempts=20):
    """Courbe rationnelle à coefficients uniformes dans le disque unité"""
    for _ in range(attempts):
        try:
            return RationalCurve(random_tuple(rng, degree, n))
        except NotCoprime:
            logger.debug("Tirage non premier entre eux rejeté")
    raise NotCoprime(f"aucun tirage premier entre eux après {attempts} essais")


def identity_curve():
    return RationalCurve(MapTuple.from_coeffs([[1, 0], [0, 1]]))


def monomial_curve(degree):
    """z ↦ z^d, n-uplet [u^d, v^d]"""
    rows = np.zeros((2, degree + 1), dtype=complex)
    rows[0, 0] = 1
    rows[1, -1] = 1
    return RationalCurve(MapTuple.from_coeffs(rows))


def constant_curve(n=2):
    return RationalCurve(MapTuple.from_coeffs([[1.0]] + [[0.5]] * (n - 1)))


def scaled_curve(c, s):
    """Courbe z ↦ c(s·z)"""
    return RationalCurve(substitute_affine(c.tuple, 0, s), check=False)


def shrink_to_diameter(c, radius, cap=None, max_halvings=60):
    """Précompose par z ↦ s·z (s = 2^-j) jusqu'à ce que l'image de Disk(0, radius) soit de diamètre ≤ cap"""
    cap = Config.IMAGE_DIAMETER_CAP if cap is None else cap
    s = 1.0
    current = c
    for _ in range(max_halvings):
        if image_diameter(current, Disk(0, radius), 256) <= cap:
            return current, s
        s /= 2.0
        current = scaled_curve(c, s)
    return current, s


@dataclass(frozen=True)
class Corpus:
    """Corpus déterministe de courbes aléatoires"""
    seed: int
    count: int
    degree_range: tuple = (1, 4)
    n_range: tuple = (2, 4)

    def curves(self):
        """
        Courbes du corpus, identiques pour une même graine

        Returns:
            list: RationalCurve, dans l'ordre du corpus
        """
        rng = np.random.default_rng(self.seed)
        out = []
        for _ in range(self.count):
            degree = int(rng.integers(self.degree_range[0], self.degree_range[1] + 1))
            n = int(rng.integers(self.n_range[0], self.n_range[1] + 1))
            out.append(random_curve(rng, degree, n))
        logger.info(f"Corpus de {len(out)} courbes généré (graine {self.seed})")
        return out

    def trig_polynomials(self, order=8):
        """Coefficients a_k (k = −K..K) de polynômes trigonométriques de moyenne nulle"""
        rng = np.random.default_rng(self.seed)
        out = []
        for _ in range(self.count):
            a = unit_disk(rng, 2 * order + 1)
            a[order] = 0
            out.append(a)
        return out


@dataclass(frozen=True)
class PlantedFamily:
    family: CurveFamily
    points: tuple
    multiplicities: tuple
    residual_degree: int


def _planted_points(rng, count, attempts=1000):
    points = []
    for _ in range(attempts):
        if len(points) == count:
            break
        r = rng.uniform(0.2, 0.9)
        z = r * np.exp(2j * np.pi * rng.random())
        if all(abs(z - q) >= 0.2 for q in points):
            points.append(complex(z))
    return points


def planted_family(rng, degree, n, ks=PLANTED_KS, max_points=2, max_mult=PLANTED_MAX_MULT, attempts=20):
    """
    Famille R_{k;i} = Π_j Π_q (u − (p_j + c_{ijq}·e^{iφ_j}/k)·v) · S_i.

    Les facteurs (u − p_j v)^{d_j} apparaissent à la limite ; les décalages
    c_{ijq} = 1 + i + n·q distincts d'une entrée à l'autre rendent chaque
    échantillon premier entre eux. Près d'une bulle de multiplicité m, les
    coefficients ne portent la courbe qu'à eps·k^m près : max_mult borne m.
    """
    max_mult = degree if max_mult is None else max_mult
    for _ in range(attempts):
        count = int(rng.integers(1, min(max_points, degree) + 1))
        points = _planted_points(rng, count)
        mults, budget = [], degree
        for j in range(count):
            reserve = count - j - 1
            mults.append(int(rng.integers(1, min(max_mult, budget - reserve) + 1)))
            budget -= mults[-1]
        d0 = degree - sum(mults)
        residual = random_curve(rng, d0, n).tuple if d0 > 0 else MapTuple.from_coeffs(
            unit_disk(rng, (n, 1)) + 0.1)
        phases = np.exp(2j * np.pi * rng.random(count))

        def sample(k):
            rows = []
            for i in range(n):
                roots = [P1Point(p + (1 + i + n * q) * phases[j] / k, 1)
                         for j, (p, m) in enumerate(zip(points, mults)) for q in range(m)]
                rows.append(HomogPoly.from_roots(roots) * residual.polys[i])
            return MapTuple(rows)

        try:
            fam = CurveFamily([(k, sample(k)) for k in ks])
        except NotCoprime:
            logger.debug("Famille plantée non première entre elles, nouveau tirage")
            continue
        return PlantedFamily(family=fam, points=tuple(P1Point(p, 1) for p in points),
                             multiplicities=tuple(mults), residual_degree=d0)
    raise NotCoprime(f"aucune famille plantée valide après {attempts} essais")


def concentrating_family(ks=(1e2, 1e3, 1e4)):
    """[u² − k⁻² v², uv] : une bulle de degré 1 en 0"""
    return CurveFamily.from_function(lambda k: [[1, 0, -k ** -2], [0, 1, 0]], ks)


def double_bubble_family(ks=PLANTED_KS):
    """[u(u − v/k)(u + v/k), v(u − 2v/k)(u + 2v/k)] : masse 2 en 0, portée par une bulle fantôme"""
    return CurveFamily.from_function(lambda k: [[1, 0, -k ** -2, 0], [0, 1, 0, -4 * k ** -2]], ks)
