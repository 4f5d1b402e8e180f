# bubbles/bubble_analysis.py
"""
Moteur de limites de Gromov pour des familles polynomiales k ↦ f_k.

Limite coefficient par coefficient, points de bulle et masses par
factorisation, profils de masse par quadrature, rayons δ(μ), changement
d'échelle exact et construction récursive de l'arbre de bulles.
"""
import math
import logging
from dataclasses import dataclass, field
import numpy as np
import pandas as pd
from utils.config import Config
from utils.errors import (NoConvergence, NoSolution, DepthExceeded, ConservationError,
                          SchemaError, ZeroScale, InputError)
from utils.serialization import encode_complex, decode_complex, SCHEMA_VERSION
from geometry.poly_core import (MapTuple, RationalCurve, P1Point, INFINITY, common_factor,
                                normalize, substitute_affine)
from geometry.fs_geometry import (Disk, FullSphere, energy, sup_density, density_peak, fs_distance, g_distance,
                                  sample_region)
from bubbles.extrapolation import neville_limit, last_two_extrapolants
from bubbles.tree_of_spheres import RootedOrder, SphereTree, DecoratedTree, stability_check

logger = logging.getLogger(__name__)

EXTRAPOLATION_DEPTH = 5
BRACKET_REL = 1e-13
MASS_SLACK = 10.0
DEFAULT_DELTAS = (0.2, 0.1, 0.05)


class CurveFamily:
    """Suite échantillonnée k ↦ f_k (k strictement croissant), limite déclarée facultative"""

    def __init__(self, samples, declared_limit=None, validate=True):
        samples = [(float(k), t if isinstance(t, MapTuple) else MapTuple(t)) for k, t in samples]
        ks = [k for k, _ in samples]
        if any(not (math.isfinite(k) and k > 0) for k in ks):
            raise SchemaError("les paramètres k doivent être réels strictement positifs", 'samples.k')
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise SchemaError("k strictly increasing", 'samples.k')
        if len(samples) < 3 and declared_limit is None:
            raise SchemaError("au moins trois échantillons sans limite déclarée", 'samples')
        shapes = {(t.n, t.degree) for _, t in samples}
        if declared_limit is not None:
            shapes.add((declared_limit.n, declared_limit.degree))
        if len(shapes) != 1:
            raise SchemaError("common degree", 'samples')
        if validate:
            for _, t in samples:
                RationalCurve(t)
        self.samples = tuple(samples)
        self.declared_limit = declared_limit
        self.n, self.degree = shapes.pop()

    @classmethod
    def from_function(cls, func, ks, declared_limit=None, validate=True):
        """Famille échantillonnée depuis une fonction k ↦ lignes de coefficients"""
        return cls([(k, MapTuple.from_coeffs(func(k))) for k in ks], declared_limit, validate)

    @property
    def ks(self):
        return np.array([k for k, _ in self.samples])

    @property
    def tuples(self):
        return [t for _, t in self.samples]

    def curves(self):
        return [RationalCurve(t, check=False) for t in self.tuples]

    def swapped(self):
        limit = self.declared_limit.swapped() if self.declared_limit is not None else None
        return CurveFamily([(k, t.swapped()) for k, t in self.samples], limit, validate=False)

    def to_json(self):
        doc = {"schema": SCHEMA_VERSION, "kind": "family", "n": self.n, "degree": self.degree,
               "samples": [{"k": k, "tuple": t.to_json()} for k, t in self.samples]}
        if self.declared_limit is not None:
            doc["limit"] = self.declared_limit.to_json()
        return doc

    def __repr__(self):
        return f"CurveFamily(n={self.n}, degree={self.degree}, samples={len(self.samples)})"


@dataclass(frozen=True)
class BubbleMass:
    point: P1Point
    mass: float
    algebraic_mult: int

    def to_json(self):
        return {"point": self.point.to_json(), "mass": self.mass, "algebraic_mult": self.algebraic_mult}


@dataclass(frozen=True)
class RescaleStep:
    centers: tuple
    scales: tuple
    mu: float

    def to_json(self):
        return {"centers": [encode_complex(z) for z in self.centers], "scales": list(self.scales), "mu": self.mu}


# ----------------------------------------------------------------------
# Limite et points de bulle
# ----------------------------------------------------------------------

def extrapolate_limit(fam, tol=None):
    """
    Limite normalisée de la famille et estimation relative de son erreur.

    Chaque échantillon est divisé par son coefficient à la position du plus
    grand coefficient du dernier échantillon, puis extrapolé en h = 1/k.
    """
    tol = Config.LIMIT_TOL if tol is None else tol
    if fam.declared_limit is not None:
        return normalize(fam.declared_limit), 0.0
    h = 1.0 / fam.ks
    shape = fam.tuples[0].coeff_matrix.shape
    mats = np.stack([t.coeff_matrix.ravel() for t in fam.tuples])
    mags = np.abs(mats[-1])
    pivot = int(np.flatnonzero(mags >= (1 - 1e-12) * mags.max())[0])
    divisors = mats[:, pivot]
    if np.any(np.abs(divisors) <= 1e-12 * np.max(np.abs(mats), axis=1)):
        raise NoConvergence("le coefficient pivot s'annule sur un échantillon : suite non convergente")
    scaled = mats / divisors[:, None]
    diffs = np.max(np.abs(np.diff(scaled, axis=0)), axis=1)
    if diffs.size >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > tol:
        raise NoConvergence(f"différences successives non décroissantes : {diffs.tolist()}")
    best, previous = last_two_extrapolants(h, list(scaled), EXTRAPOLATION_DEPTH)
    top = np.max(np.abs(best))
    err = float(np.max(np.abs(best - previous)) / top)
    if err >= tol:
        raise NoConvergence(f"extrapolation non stabilisée : écart {err:.3e} ≥ {tol:.1e}")
    best = np.where(np.abs(best) < tol * top, 0, best)
    logger.debug(f"Limite extrapolée sur {min(len(h), EXTRAPOLATION_DEPTH)} échantillons, erreur {err:.3e}")
    return normalize(MapTuple.from_coeffs(best.reshape(shape))), err


def limit_tuple(fam, tol=None):
    """Limite normalisée de la famille dans 𝔛_{n,d}"""
    return extrapolate_limit(fam, tol)[0]


def bubble_points(fam, tol=None):
    """
    Points de bulle et application limite résiduelle.

    Returns:
        tuple: (liste de BubbleMass, RationalCurve résiduelle g)
    """
    limit, err = extrapolate_limit(fam, tol)
    fac = common_factor(limit, noise=err)
    masses = [BubbleMass(point=pt, mass=float(m), algebraic_mult=m) for pt, m in fac.roots]
    logger.info(f"{len(masses)} point(s) de bulle, degré résiduel {fac.residual.degree}")
    return masses, RationalCurve(fac.residual, check=False)


# ----------------------------------------------------------------------
# Profils de masse et rayons δ(μ)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MassProfile:
    table: pd.DataFrame
    limits: pd.Series
    mass: float
    uncertainty: float

    def to_json(self):
        return {
            "table": self.table.to_dict(orient="records"),
            "limits": [{"delta": d, "energy": v} for d, v in self.limits.items()],
            "mass": self.mass,
            "uncertainty": self.uncertainty,
        }


def mass_profile(fam, z_star, deltas=DEFAULT_DELTAS, tol=None):
    """
    Masse concentrée en z* : limite en δ → 0 de la limite en k → ∞ de E(f_k; B_δ(z*)).

    La limite en k est extrapolée linéairement en 1/k sur les deux plus grands
    k ; la limite en δ est extrapolée polynomialement en δ². L'incertitude est
    l'écart entre les deux dernières valeurs en δ.
    """
    deltas = [float(d) for d in deltas]
    if not deltas or any(d <= 0 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise SchemaError("rayons strictement positifs et décroissants attendus", 'deltas')
    tol = Config.QUAD_TOL if tol is None else tol
    chart = z_star.preferred_chart()
    center = z_star.affine(chart)
    picked = list(zip(fam.ks, fam.curves()))[-2:]
    rows, limits = [], []
    for delta in deltas:
        values = []
        for k, curve in picked:
            e = energy(curve, Disk(center, delta, chart), tol).value
            values.append(e)
            rows.append({"delta": delta, "k": float(k), "energy": e})
        hs = [1.0 / k for k, _ in picked]
        limits.append(float(neville_limit(hs, values)) if len(values) > 1 else values[0])
    mass, _ = last_two_extrapolants([d * d for d in deltas], limits, len(limits))
    uncertainty = abs(limits[-1] - limits[-2]) if len(limits) > 1 else math.inf
    logger.info(f"Masse estimée en {z_star} : {float(mass):.6f} ± {uncertainty:.2e}")
    return MassProfile(table=pd.DataFrame(rows), limits=pd.Series(limits, index=deltas, name="limit"),
                       mass=float(mass), uncertainty=float(uncertainty))


def delta_for_mass(c, center, mu, tol=None):
    """
    Rayon δ tel que E(c; Disk(center, δ)) = μ (carte 0).

    Encadrement par doublements puis bisection géométrique sur δ ↦ E,
    croissante, jusqu'à une largeur relative BRACKET_REL ; la quadrature
    est menée à tol. Le δ renvoyé vérifie |E − μ| ≤ 10·tol, sinon
    NoSolution (saut d'énergie plus étroit que l'encadrement).
    """
    tol = Config.QUAD_TOL if tol is None else tol
    if c.is_constant:
        raise NoSolution("une courbe constante ne porte aucune énergie")
    if not 0 < mu < c.degree:
        raise NoSolution(f"μ = {mu} hors de ]0, {c.degree}[")
    center = complex(center)

    def mass_in(delta):
        return energy(c, Disk(center, delta), tol).value

    hi = 1.0
    while mass_in(hi) < mu:
        hi *= 2.0
        if hi > 1e12:
            raise NoSolution(f"μ = {mu} non atteint par des disques de rayon ≤ 1e12")
    lo = hi / 2.0
    while mass_in(lo) >= mu:
        lo /= 2.0
        if lo < 1e-300:
            raise NoSolution("μ atteint par des disques arbitrairement petits")
    for _ in range(200):
        if hi / lo - 1.0 <= BRACKET_REL:
            break
        mid = math.sqrt(lo * hi)
        if mass_in(mid) < mu:
            lo = mid
        else:
            hi = mid
    delta = 0.5 * (lo + hi)
    miss = abs(mass_in(delta) - mu)
    if miss > MASS_SLACK * tol:
        raise NoSolution(f"E(δ) = μ inatteignable : écart {miss:.3e} en δ = {delta:.6e}")
    return delta


def rescaled_family(fam, step):
    """Famille des f_k ∘ (z_k + δ_k·w), renormalisée ; la coprimalité est conservée"""
    if len(step.centers) != len(fam.samples) or len(step.scales) != len(fam.samples):
        raise SchemaError("un centre et une échelle par échantillon", 'step')
    if any(not s > 0 for s in step.scales):
        raise ZeroScale("échelles strictement positives attendues")
    samples = [(k, substitute_affine(t, z, s)) for (k, t), z, s in zip(fam.samples, step.centers, step.scales)]
    return CurveFamily(samples, validate=False)


# ----------------------------------------------------------------------
# Arbre de bulles
# ----------------------------------------------------------------------

@dataclass
class BubbleConfig:
    mass_tol: float = field(default_factory=lambda: Config.MASS_TOL)
    connect_tol: float = field(default_factory=lambda: Config.CONNECT_TOL)
    quad_tol: float = field(default_factory=lambda: Config.QUAD_TOL)
    hbar: float = field(default_factory=lambda: Config.HBAR)
    limit_tol: float = field(default_factory=lambda: Config.LIMIT_TOL)
    profile_masses: bool = False
    deltas: tuple = DEFAULT_DELTAS


@dataclass
class Component:
    index: int
    parent: object
    attach: object
    limit_map: RationalCurve
    mass: int
    depth: int
    node_gap: object = None
    step: object = None
    bubbles: list = field(default_factory=list)

    @property
    def degree(self):
        return 0 if self.limit_map.is_constant else self.limit_map.degree

    def to_json(self):
        return {
            "id": self.index,
            "parent": self.parent,
            "attach": self.attach.to_json() if self.attach is not None else None,
            "degree": self.degree,
            "mass": self.mass,
            "depth": self.depth,
            "node_gap": self.node_gap,
            "tuple": normalize(self.limit_map.tuple).to_json(),
            "rescale": self.step.to_json() if self.step is not None else None,
        }


@dataclass
class BubbleTree:
    components: list
    tree: SphereTree
    decorated: DecoratedTree
    expected_degree: int
    masses: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def degree_sum(self):
        return sum(c.degree for c in self.components)

    @property
    def node_gaps(self):
        return [c.node_gap for c in self.components if c.node_gap is not None]

    def energy_sum(self, tol=None):
        """Somme des énergies totales des applications limites (par quadrature)"""
        return math.fsum(energy(c.limit_map, FullSphere(), tol).value for c in self.components)

    def to_json(self):
        doc = {"schema": SCHEMA_VERSION, "kind": "bubble-tree"}
        doc.update(self.decorated.to_json())
        doc["components"] = [c.to_json() for c in self.components]
        doc["masses"] = self.masses
        doc["conservation"] = {
            "expected_degree": self.expected_degree,
            "degree_sum": self.degree_sum,
            "max_node_gap": max(self.node_gaps, default=0.0),
        }
        doc["diagnostics"] = self.diagnostics
        return doc


class _TreeBuilder:
    """Construction récursive : une composante par famille remise à l'échelle"""

    def __init__(self, cfg, degree):
        self.cfg = cfg
        self.degree = degree
        self.max_depth = int(math.floor(degree / cfg.hbar + 1e-12))
        self.components = []
        self.masses = []
        self.diagnostics = []

    def expand(self, fam, parent, attach, mass, depth, step=None):
        limit, err = extrapolate_limit(fam, self.cfg.limit_tol)
        fac = common_factor(limit, noise=err)
        residual = RationalCurve(fac.residual, check=False)
        is_root = parent is None
        if is_root:
            bubbles = list(fac.roots)
        else:
            bubbles = [(pt, m) for pt, m in fac.roots if not pt.is_close(INFINITY)]
        finite_mass = sum(m for _, m in bubbles)
        own_degree = 0 if residual.is_constant else residual.degree
        if own_degree + finite_mass != mass:
            raise ConservationError(
                f"conservation du degré violée : {own_degree} + {finite_mass} ≠ {mass} (composante {len(self.components)})")

        index = len(self.components)
        component = Component(index=index, parent=parent, attach=attach, limit_map=residual,
                              mass=mass, depth=depth, step=step)
        if not is_root:
            parent_map = self.components[parent].limit_map
            gap = fs_distance(parent_map.tuple.evaluate_point(attach), residual.tuple.evaluate_point(INFINITY))
            component.node_gap = gap
            if gap > self.cfg.connect_tol:
                raise ConservationError(f"écart au nœud {gap:.3e} > {self.cfg.connect_tol:.1e} (composante {index})")
        self.components.append(component)
        logger.info(f"Composante {index} (profondeur {depth}) : degré {own_degree}, {len(bubbles)} bulle(s)")

        for pt, m in bubbles:
            component.bubbles.append(BubbleMass(point=pt, mass=float(m), algebraic_mult=m))
            entry = {"component": index, "point": pt.to_json(), "algebraic_mult": m, "mass": float(m)}
            if is_root and self.cfg.profile_masses:
                profile = mass_profile(fam, pt, self.cfg.deltas, self.cfg.quad_tol)
                entry["profiled_mass"] = profile.mass
                entry["uncertainty"] = profile.uncertainty
                if abs(profile.mass - m) > self.cfg.mass_tol:
                    self.diagnostics.append(f"MASS_MISMATCH composante {index} en {pt}: {profile.mass:.4f} ≠ {m}")
            self.masses.append(entry)

        for pt, m in bubbles:
            if depth + 1 > self.max_depth:
                raise DepthExceeded(f"profondeur {depth + 1} > d/ħ = {self.max_depth}")
            chart = pt.preferred_chart()
            chart_fam = fam if chart == 0 else fam.swapped()
            center = pt.affine(chart)
            others = [q for q, _ in bubbles if q is not pt]
            radius = 0.5 * min([1.0] + [pt.distance(q) for q in others])
            child_step = self._rescale_step(chart_fam, center, radius, m)
            child_fam = rescaled_family(chart_fam, child_step)
            self.expand(child_fam, index, pt, m, depth + 1, child_step)

    def _rescale_step(self, fam, center, radius, mass):
        mu = mass - self.cfg.hbar / 2.0
        centers, scales = [], []
        for curve in fam.curves():
            z_k, peak = sup_density(curve, Disk(center, radius))
            z_k = density_peak(curve, z_k, peak)
            centers.append(z_k)
            scales.append(delta_for_mass(curve, z_k, mu, self.cfg.quad_tol))
        logger.debug(f"Échelles de bulle autour de {center}: {scales}")
        return RescaleStep(centers=tuple(centers), scales=tuple(scales), mu=mu)


def build_bubble_tree(fam, cfg=None):
    """
    Arbre de bulles de la limite de Gromov de la famille.

    La racine porte l'application résiduelle de la limite ; chaque point de
    bulle de masse m est zoomé (centre au maximum de densité, rayon tel que
    l'énergie vaille m − ħ/2) et traité récursivement. Un facteur commun en
    w = ∞ d'une limite remise à l'échelle est le nœud avec le parent.

    Returns:
        BubbleTree: composantes, arbre décoré, table des masses, diagnostics
    """
    cfg = cfg or BubbleConfig()
    builder = _TreeBuilder(cfg, fam.degree)
    builder.expand(fam, None, None, fam.degree, 0)
    components = builder.components

    parents = {c.index: c.parent for c in components if c.parent is not None}
    attach = {c.index: c.attach.affine(0) for c in components if c.parent is not None}
    tree = SphereTree(RootedOrder.from_parents(parents, 0, [c.index for c in components]), attach)
    decorated = DecoratedTree.from_tree(tree, {c.index: c.degree for c in components})
    diagnostics = list(builder.diagnostics)

    stable, offenders = stability_check(decorated)
    if not stable:
        if offenders == [0]:
            diagnostics.append("UNSTABLE_ROOT")
            logger.warning("Racine constante avec moins de 3 points spéciaux : aucune reparamétrisation tentée")
        else:
            raise ConservationError(f"composantes fantômes instables : {offenders}")

    result = BubbleTree(components=components, tree=tree, decorated=decorated, expected_degree=fam.degree,
                        masses=builder.masses, diagnostics=diagnostics)
    if result.degree_sum != fam.degree:
        raise ConservationError(f"somme des degrés {result.degree_sum} ≠ {fam.degree}")
    return result


# ----------------------------------------------------------------------
# Compléments : identité d'énergie et convergence hors des bulles
# ----------------------------------------------------------------------

def energy_profile(fam, region, tol=None):
    """Énergies E(f_k; région) le long de la famille et leur limite extrapolée en 1/k"""
    rows = [{"k": float(k), "energy": energy(curve, region, tol).value}
            for k, curve in zip(fam.ks, fam.curves())]
    table = pd.DataFrame(rows)
    depth = min(len(rows), EXTRAPOLATION_DEPTH)
    limit = float(neville_limit(1.0 / table["k"].values[-depth:], table["energy"].values[-depth:]))
    return table, limit


def uniform_convergence(fam, region, samples=256, tol=None):
    """
    Écart sup (métrique g) entre f_k et l'application limite sur une région
    éloignée des points de bulle.
    """
    masses, residual = bubble_points(fam, tol)
    for b in masses:
        if not b.point.is_infinity and getattr(region, 'bounded', False) \
                and np.any(region.contains(np.array([b.point.affine(region.chart)]))):
            raise InputError(f"la région contient le point de bulle {b.point}")
    rows = []
    for k, curve in zip(fam.ks, fam.curves()):
        sup = 0.0
        for zs, chart in sample_region(region, samples):
            values = curve.evaluate(zs, chart).T
            limits = residual.evaluate(zs, chart).T
            sup = max([sup] + [g_distance(a, b) for a, b in zip(values, limits)])
        rows.append({"k": float(k), "sup_distance": sup})
    return pd.DataFrame(rows)


def family_from_json(doc):
    """Famille depuis un document JSON déjà validé dans sa forme générale"""
    try:
        samples = [(s["k"], MapTuple.from_json(s["tuple"], 'samples.tuple')) for s in doc["samples"]]
    except (KeyError, TypeError) as e:
        raise SchemaError(f"échantillon mal formé : {e}", 'samples') from e
    limit = MapTuple.from_json(doc["limit"], 'limit') if doc.get("limit") is not None else None
    return CurveFamily(samples, limit)


def point_from_text(text):
    """Point de ℙ¹ depuis "re,im", "re" ou "inf" """
    text = text.strip()
    if text == "inf":
        return INFINITY
    try:
        parts = [float(v) for v in text.split(',')]
    except ValueError as e:
        raise InputError(f"point illisible : {text}") from e
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise InputError(f"point illisible : {text}")
    return P1Point.from_affine(decode_complex(parts))
