# geometry/fs_geometry.py
"""
Géométrie de Fubini–Study de ℙⁿ⁻¹ et énergie des courbes rationnelles.

La forme ω est normalisée pour qu'une droite soit d'aire 1 ; la densité
d'énergie est ρ = (1/π)(‖r‖²‖r'‖² − |⟨r', r⟩|²)/‖r‖⁴ = (1/4π) Δ log ‖r‖².
La distance fs_distance est la distance standard (diamètre π/2) ; la
métrique g associée à ω vérifie d_g = fs_distance/√π.
"""
import math
import logging
from dataclasses import dataclass, field
from itertools import combinations
import numpy as np
import pandas as pd
from scipy.stats import qmc
from utils.config import Config
from utils.errors import ZeroVector, RegionError, InputError
from utils.serialization import encode_complex, decode_complex
from geometry.quadrature import (adaptive_line, adaptive_polar, periodic_breakpoints)

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
TIE_TOL = 1e-9
ZOOM_POINTS = 9
PEAK_STENCIL = 0.2
PEAK_STEPS = 4
_STENCIL = np.array([0, 1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])


# ----------------------------------------------------------------------
# Régions
# ----------------------------------------------------------------------

def _check_chart(chart):
    if chart not in (0, 1):
        raise RegionError(f"carte 0 ou 1 attendue, reçu {chart}")


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    chart: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'center', complex(self.center))
        object.__setattr__(self, 'radius', float(self.radius))
        _check_chart(self.chart)
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise RegionError(f"rayon strictement positif attendu, reçu {self.radius}")

    bounded = True

    @property
    def outer_radius(self):
        return self.radius

    @property
    def diameter(self):
        return 2.0 * self.radius

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) <= self.radius

    def to_json(self):
        return {"disk": {"center": encode_complex(self.center), "r": self.radius, "chart": self.chart}}


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_in: float
    r_out: float
    chart: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'center', complex(self.center))
        object.__setattr__(self, 'r_in', float(self.r_in))
        object.__setattr__(self, 'r_out', float(self.r_out))
        _check_chart(self.chart)
        if not (0 < self.r_in < self.r_out and math.isfinite(self.r_out)):
            raise RegionError(f"0 < r_in < r_out attendu, reçu {self.r_in}, {self.r_out}")

    bounded = True

    @property
    def outer_radius(self):
        return self.r_out

    @property
    def diameter(self):
        return 2.0 * self.r_out

    def contains(self, z):
        dist = np.abs(np.asarray(z) - self.center)
        return (dist >= self.r_in) & (dist <= self.r_out)

    def to_json(self):
        return {"annulus": {"center": encode_complex(self.center), "r_in": self.r_in,
                            "r_out": self.r_out, "chart": self.chart}}


@dataclass(frozen=True)
class FullSphere:
    bounded = False

    def to_json(self):
        return {"full": {}}


@dataclass(frozen=True)
class SphereComplement:
    disks: tuple = field(default_factory=tuple)

    bounded = False

    def __post_init__(self):
        disks = tuple(self.disks)
        object.__setattr__(self, 'disks', disks)
        if not all(isinstance(d, Disk) for d in disks):
            raise RegionError("le complémentaire se définit par des disques")
        if len({d.chart for d in disks}) > 1:
            raise RegionError("les disques retirés doivent être dans une même carte")
        for d1, d2 in combinations(disks, 2):
            if abs(d1.center - d2.center) < d1.radius + d2.radius:
                raise RegionError("les disques retirés doivent être disjoints")

    def to_json(self):
        return {"complement": {"disks": [d.to_json()["disk"] for d in self.disks]}}


def _disk_from_fields(payload):
    try:
        return Disk(decode_complex(payload["center"], 'center'), payload["r"], int(payload.get("chart", 0)))
    except (KeyError, TypeError) as e:
        raise RegionError(f"disque mal formé : {e}") from e


def region_from_json(obj):
    """Région depuis son objet JSON étiqueté"""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise RegionError("objet région à une seule clé attendu")
    tag, payload = next(iter(obj.items()))
    if tag == "full":
        return FullSphere()
    if tag == "disk":
        return _disk_from_fields(payload)
    if tag == "annulus":
        try:
            return Annulus(decode_complex(payload["center"], 'center'), payload["r_in"], payload["r_out"],
                           int(payload.get("chart", 0)))
        except (KeyError, TypeError) as e:
            raise RegionError(f"couronne mal formée : {e}") from e
    if tag == "complement":
        return SphereComplement(tuple(_disk_from_fields(d) for d in payload.get("disks", [])))
    raise RegionError(f"type de région inconnu : {tag}")


def parse_region(spec):
    """
    Région depuis une chaîne de la ligne de commande.

    Formats : "full", "disk:cx,cy,r[,chart]", "annulus:cx,cy,rin,rout[,chart]".
    """
    spec = spec.strip()
    if spec == "full":
        return FullSphere()
    kind, _, rest = spec.partition(':')
    try:
        values = [float(v) for v in rest.split(',')] if rest else []
    except ValueError as e:
        raise RegionError(f"région illisible : {spec}") from e
    if kind == "disk" and len(values) in (3, 4):
        chart = int(values[3]) if len(values) == 4 else 0
        return Disk(complex(values[0], values[1]), values[2], chart)
    if kind == "annulus" and len(values) in (4, 5):
        chart = int(values[4]) if len(values) == 5 else 0
        return Annulus(complex(values[0], values[1]), values[2], values[3], chart)
    raise RegionError(f"région illisible : {spec}")


# ----------------------------------------------------------------------
# Métrique
# ----------------------------------------------------------------------

def _unit(p):
    p = np.asarray(p, dtype=complex).ravel()
    norm = np.linalg.norm(p)
    if norm == 0:
        raise ZeroVector("vecteur homogène nul")
    return p / norm


def fs_distance(p, q):
    """
    Distance de Fubini–Study standard entre deux points de ℙⁿ⁻¹, dans [0, π/2].

    Calculée par atan2(‖p∧q‖, |⟨p, q⟩|), précise aussi pour des points proches.
    """
    p, q = _unit(p), _unit(q)
    if p.size != q.size:
        raise InputError("les deux points doivent avoir le même nombre de coordonnées")
    inner = abs(np.vdot(p, q))
    wedge = math.sqrt(sum(abs(p[i] * q[j] - p[j] * q[i]) ** 2 for i, j in combinations(range(p.size), 2)))
    return math.atan2(wedge, inner)


def g_distance(p, q):
    """Distance de la métrique g associée à la forme normalisée ω"""
    return fs_distance(p, q) / SQRT_PI


# ----------------------------------------------------------------------
# Densité et énergie
# ----------------------------------------------------------------------

def energy_density(c, z, chart=0):
    """
    Densité d'énergie ρ(z) par unité d'aire de Lebesgue dans la carte.

    Le numérateur est la somme des |R_i R_j' − R_j R_i'|² (identité de
    Lagrange), formée à partir des valeurs et des dérivées évaluées en z.
    """
    z = np.asarray(z, dtype=complex)
    vals = c.evaluate(z, chart)
    ders = np.stack([np.polyval(der, z) for der in c.derivative_matrix(chart)])
    norm2 = np.sum(np.abs(vals) ** 2, axis=0)
    wr2 = np.zeros(z.shape)
    for i, j in combinations(range(c.n), 2):
        wr2 = wr2 + np.abs(vals[i] * ders[j] - vals[j] * ders[i]) ** 2
    rho = wr2 / (math.pi * norm2 ** 2)
    return float(rho) if rho.ndim == 0 else rho


def _flux_integrand(c, center, radius, chart):
    rows = c.chart_matrix(chart)
    ders = c.derivative_matrix(chart)

    def integrand(theta):
        e = np.exp(1j * theta)
        z = center + radius * e
        num = np.zeros(theta.shape, dtype=complex)
        norm2 = np.zeros(theta.shape)
        for row, der in zip(rows, ders):
            val = np.polyval(row, z)
            num += np.conj(val) * np.polyval(der, z)
            norm2 += np.abs(val) ** 2
        return 2.0 * np.real(num * radius * e) / norm2

    return integrand


def _circle_hints(c, center, radius, chart):
    """Angles des racines d'entrées proches du cercle et leur distance au cercle"""
    angles, gaps = [], []
    for h in c.hint_points(chart):
        offset = h - center
        gap = abs(abs(offset) - radius)
        if gap < 0.5 * radius and abs(offset) > 0:
            angles.append(math.atan2(offset.imag, offset.real))
            gaps.append(gap / radius)
    return angles, gaps


def _disk_flux(c, center, radius, chart, tol):
    """E(disque) = (1/4π)∮ r ∂_r log ‖r‖² dθ (réduction de Green)"""
    angles, gaps = _circle_hints(c, center, radius, chart)
    result = adaptive_line(_flux_integrand(c, complex(center), radius, chart),
                           periodic_breakpoints(angles, gaps), 4.0 * math.pi * tol)
    return result.value / (4.0 * math.pi), result.err_estimate / (4.0 * math.pi), result.cells


def _disk_cells(c, center, r_in, r_out, chart, tol):
    result = adaptive_polar(lambda z: energy_density(c, z, chart), center, r_in, r_out,
                            c.hint_points(chart), tol)
    return result.value, result.err_estimate, result.cells


@dataclass(frozen=True)
class EnergyResult:
    value: float
    err_estimate: float
    cells: int

    def to_json(self):
        return {"value": self.value, "err_estimate": self.err_estimate, "cells": self.cells}


def _combine(parts, signs):
    value = math.fsum(s * p[0] for s, p in zip(signs, parts))
    err = math.fsum(p[1] for p in parts)
    cells = sum(p[2] for p in parts)
    return EnergyResult(value=max(0.0, value), err_estimate=err, cells=cells)


def energy(c, region, tol=None, method='flux'):
    """
    Énergie E(c; région) à une tolérance absolue donnée.

    Args:
        c (RationalCurve): courbe
        region: Disk, Annulus, FullSphere ou SphereComplement
        tol (float): tolérance absolue (défaut Config.QUAD_TOL)
        method (str): 'flux' (intégrale de bord, défaut) ou 'cells' (cellules polaires)

    Returns:
        EnergyResult: valeur, estimation d'erreur, cellules utilisées
    """
    tol = Config.QUAD_TOL if tol is None else tol
    if not tol > 0:
        raise InputError(f"tolérance strictement positive attendue, reçu {tol}")
    if method not in ('flux', 'cells'):
        raise InputError(f"méthode de quadrature inconnue : {method}")
    if c.is_constant:
        return EnergyResult(0.0, 0.0, 0)

    def disk(center, r_in, r_out, chart, part_tol):
        if method == 'flux':
            outer = _disk_flux(c, center, r_out, chart, part_tol / 2)
            if r_in == 0:
                return outer
            inner = _disk_flux(c, center, r_in, chart, part_tol / 2)
            return outer[0] - inner[0], outer[1] + inner[1], outer[2] + inner[2]
        return _disk_cells(c, center, r_in, r_out, chart, part_tol)

    if isinstance(region, Disk):
        return _combine([disk(region.center, 0.0, region.radius, region.chart, tol)], [1])
    if isinstance(region, Annulus):
        return _combine([disk(region.center, region.r_in, region.r_out, region.chart, tol)], [1])
    if isinstance(region, FullSphere):
        parts = [disk(0j, 0.0, 1.0, 0, tol / 2), disk(0j, 0.0, 1.0, 1, tol / 2)]
        return _combine(parts, [1, 1])
    if isinstance(region, SphereComplement):
        share = tol / (2 + len(region.disks))
        parts = [disk(0j, 0.0, 1.0, 0, share), disk(0j, 0.0, 1.0, 1, share)]
        parts += [disk(d.center, 0.0, d.radius, d.chart, share) for d in region.disks]
        return _combine(parts, [1, 1] + [-1] * len(region.disks))
    raise RegionError(f"région non prise en charge : {region!r}")


# ----------------------------------------------------------------------
# Supremum de la densité
# ----------------------------------------------------------------------

def _zoom(c, region, start, half_width, value):
    """Raffinement local strict du maximum sur des grilles 9×9 de plus en plus fines"""
    best, best_val = complex(start), value
    offsets = np.linspace(-1.0, 1.0, ZOOM_POINTS)
    grid = offsets[None, :] + 1j * offsets[:, None]
    h = half_width
    while True:
        scale = 1.0 / math.sqrt(math.pi * best_val) if best_val > 0 else math.inf
        stop = max(min(1e-6 * region.diameter, 1e-9 * scale), 8 * np.finfo(float).eps * max(abs(best), 1e-300))
        if h <= stop:
            return best, best_val
        z = best + h * grid
        vals = np.where(region.contains(z), energy_density(c, z, region.chart), -np.inf)
        idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[idx] > best_val:
            best, best_val = complex(z[idx]), float(vals[idx])
        h /= 4.0


def sup_density(c, region, grid=None):
    """
    Argmax et max approchés de la densité sur une région bornée d'une carte.

    Candidats : maximum d'une grille grossière et racines des entrées situées
    dans la région ; chacun est raffiné isolément. Les ex aequo (à 1e-9 près
    en relatif) sont départagés par le plus petit (Re, Im).

    Returns:
        tuple: (point complexe dans la carte de la région, valeur)
    """
    if not getattr(region, 'bounded', False):
        raise RegionError("sup_density exige une région bornée dans une carte")
    if c.is_constant:
        return complex(region.center), 0.0
    grid = grid or Config.SUP_GRID
    radius = region.outer_radius
    axis = np.linspace(-radius, radius, grid)
    zs = region.center + axis[None, :] + 1j * axis[:, None]
    vals = np.where(region.contains(zs), energy_density(c, zs, region.chart), -np.inf)
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    step = 2.0 * radius / (grid - 1)

    starts = [(complex(zs[idx]), step)]
    hints = [h for h in c.hint_points(region.chart) if region.contains(h)]
    for i, h in enumerate(hints):
        others = [abs(h - o) for j, o in enumerate(hints) if j != i and abs(h - o) > 0]
        window = min(step, 0.5 * min(others)) if others else step
        starts.append((complex(h), window))

    refined = []
    for z0, window in starts:
        refined.append(_zoom(c, region, z0, window, energy_density(c, z0, region.chart)))
    top = max(v for _, v in refined)
    ties = [(z, v) for z, v in refined if v >= top * (1 - TIE_TOL)]
    z_best, v_best = min(ties, key=lambda item: (item[0].real, item[0].imag))
    logger.debug(f"Supremum de densité {v_best:.6e} en {z_best:.6e}")
    return z_best, v_best


def density_peak(c, z0, value=None, chart=0, steps=PEAK_STEPS):
    """
    Sommet de la densité près d'un maximum local z0.

    Pas de Newton sur des différences centrées de pas fixe
    h = 0,2·(π ρ(z0))^{-1/2} ; le point renvoyé dépend régulièrement de la
    courbe. Un hessien non défini négatif ou un pas plus long que h arrête
    l'itération.
    """
    z = complex(z0)
    value = energy_density(c, z, chart) if value is None else value
    if not value > 0:
        return z
    h = PEAK_STENCIL / math.sqrt(math.pi * value)
    for _ in range(steps):
        f0, fe, fw, fn, fs, fne, fse, fnw, fsw = energy_density(c, z + h * _STENCIL, chart)
        grad = np.array([fe - fw, fn - fs]) / (2.0 * h)
        hxy = (fne - fse - fnw + fsw) / (4.0 * h * h)
        hess = np.array([[fe - 2.0 * f0 + fw, 0.0], [0.0, fn - 2.0 * f0 + fs]]) / (h * h)
        hess[0, 1] = hess[1, 0] = hxy
        if not (hess[0, 0] < 0 and np.linalg.det(hess) > 0):
            break
        step = -np.linalg.solve(hess, grad)
        if np.hypot(*step) > h:
            break
        z += complex(step[0], step[1])
    return z


# ----------------------------------------------------------------------
# Diamètre de l'image, longueur de bord, grilles
# ----------------------------------------------------------------------

def _halton(count):
    if count <= 0:
        return np.empty((0, 2))
    return qmc.Halton(d=2, scramble=False).random(count)


def _circle(center, radius, count):
    theta = 2.0 * math.pi * np.arange(count) / max(count, 1)
    return center + radius * np.exp(1j * theta)


def _sample_disk(center, r_in, r_out, count):
    boundary = count // 4
    u = _halton(count - boundary)
    r = np.sqrt(r_in ** 2 + u[:, 0] * (r_out ** 2 - r_in ** 2))
    inner = center + r * np.exp(2j * math.pi * u[:, 1])
    if r_in > 0:
        rims = [_circle(center, r_out, boundary - boundary // 2), _circle(center, r_in, boundary // 2)]
    else:
        rims = [_circle(center, r_out, boundary)]
    return np.concatenate([inner] + rims)


def sample_region(region, samples):
    """Échantillon déterministe à faible discrépance : liste de (points, carte)"""
    if isinstance(region, Disk):
        return [(_sample_disk(region.center, 0.0, region.radius, samples), region.chart)]
    if isinstance(region, Annulus):
        return [(_sample_disk(region.center, region.r_in, region.r_out, samples), region.chart)]
    half = samples // 2
    parts = [(_sample_disk(0j, 0.0, 1.0, samples - half), 0), (_sample_disk(0j, 0.0, 1.0, half), 1)]
    if isinstance(region, FullSphere):
        return parts
    if isinstance(region, SphereComplement):
        kept = []
        for zs, chart in parts:
            mask = np.ones(zs.shape, dtype=bool)
            for d in region.disks:
                pts = zs if chart == d.chart else np.where(zs == 0, np.inf, 1.0 / np.where(zs == 0, 1, zs))
                mask &= ~d.contains(pts)
            kept.append((zs[mask], chart))
        return kept
    raise RegionError(f"région non prise en charge : {region!r}")


def image_diameter(c, region, samples=1000):
    """
    Minorant du diamètre (distance standard) de l'image de la région.

    Plus grande distance entre images d'un échantillon déterministe.
    """
    if samples < 2:
        raise InputError("au moins deux échantillons sont nécessaires")
    if c.is_constant:
        return 0.0
    vectors = [c.evaluate(zs, chart).T for zs, chart in sample_region(region, samples) if zs.size]
    v = np.vstack(vectors)
    v = v / np.linalg.norm(v, axis=1)[:, None]
    gram = np.abs(v @ v.conj().T)
    i, j = np.unravel_index(int(np.argmin(gram)), gram.shape)
    return fs_distance(v[i], v[j])


def boundary_length(c, center, radius, chart=0, normalized=False, rel_tol=1e-8):
    """
    Longueur de l'image du cercle |z − center| = radius.

    Args:
        normalized (bool): longueur pour la métrique g de la forme normalisée
            (sinon métrique standard)

    Returns:
        float: longueur
    """
    if not radius > 0:
        raise RegionError(f"rayon strictement positif attendu, reçu {radius}")
    if c.is_constant:
        return 0.0
    center = complex(center)
    factor = 1.0 if normalized else SQRT_PI

    def speed(theta):
        z = center + radius * np.exp(1j * theta)
        return factor * np.sqrt(energy_density(c, z, chart)) * radius

    angles, gaps = _circle_hints(c, center, radius, chart)
    result = adaptive_line(speed, periodic_breakpoints(angles, gaps), 1e-300, rel_tol=rel_tol)
    return result.value


def density_grid(c, extent=2.0, res=64, chart=0, center=0j):
    """Grille (x, y, rho) de la densité sur un carré de la carte"""
    axis = np.linspace(-extent, extent, res)
    x, y = np.meshgrid(center.real + axis, center.imag + axis)
    rho = energy_density(c, x + 1j * y, chart)
    return pd.DataFrame({"x": x.ravel(), "y": y.ravel(), "rho": np.asarray(rho).ravel()})
