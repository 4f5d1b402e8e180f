# lab/inequality_lab.py
"""
Mesures des estimations analytiques sur des courbes rationnelles explicites.

Chaque opération renvoie un FitReport : table brute des mesures, ajustement
par moindres carrés (échelle logarithmique, intervalle de confiance de
Student) et drapeaux de réussite calculés exactement à partir des seuils.
Les seuils sont empiriques : un échec hors de ces fenêtres n'est pas un
contre-exemple, seulement une mesure non concluante.
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
import pandas as pd
from scipy import stats
from scipy.optimize import brentq
from utils.config import Config
from utils.errors import ConstantCurve, ImageTooLarge, NonzeroMean, NoSolution, SchemaError, RegionError
from geometry.poly_core import preimages
from geometry.fs_geometry import (Disk, Annulus, FullSphere, energy, energy_density, g_distance,
                                  image_diameter, boundary_length)
from geometry.quadrature import gauss_rule
from bubbles.bubble_analysis import bubble_points, mass_profile, build_bubble_tree
from lab.corpus import scaled_curve

logger = logging.getLogger(__name__)

ORDER_REL_TOL = 0.05
ISOPERIMETRIC_FACTOR = 1.1
ISOPERIMETRIC_RADIUS = 0.1
GENERAL_DECAY_SLOPE = -0.9
QUADRATURE_AGREEMENT = 1e-8
QUANTIZATION_TOL = 1e-5
ANGULAR_NODES = 64
RADIAL_ORDER = 32
DEFAULT_DELTAS = (0.04, 0.02, 0.01)
DEFAULT_T_VALUES = (0.0, 0.5, 1.0, 1.5, 2.0)


@dataclass
class FitReport:
    name: str
    table: pd.DataFrame
    fit: dict = field(default_factory=dict)
    assertions: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.assertions.values())

    def to_json(self):
        return {
            "check": self.name,
            "passed": self.passed,
            "assertions": dict(self.assertions),
            "fit": dict(self.fit),
            "table": self.table.to_dict(orient="records"),
        }


def least_squares(x, y, level=0.95):
    """
    Droite des moindres carrés y = pente·x + ordonnée.

    Returns:
        dict: pente, ordonnée et, à partir de 5 points, l'intervalle de
        confiance de la pente (loi de Student à N − 2 degrés de liberté)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return {"slope": None, "intercept": None, "slope_ci": None}
    if x.size >= 5:
        coef, cov = np.polyfit(x, y, 1, cov=True)
        se = math.sqrt(max(cov[0, 0], 0.0))
        quantile = stats.t.ppf(0.5 + level / 2, x.size - 2)
        ci = [float(coef[0] - quantile * se), float(coef[0] + quantile * se)]
    else:
        coef = np.polyfit(x, y, 1)
        ci = None
    return {"slope": float(coef[0]), "intercept": float(coef[1]), "slope_ci": ci}


def map_in_order(func, items):
    """Évalue func sur chaque élément, éventuellement en parallèle ; l'ordre du corpus est conservé"""
    items = list(items)
    if Config.MAX_WORKERS <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as pool:
        return list(pool.map(func, items))


def combine_reports(name, reports, fit=None):
    """Agrège des rapports par courbe : tables concaténées (colonne sample), assertions combinées par ET"""
    tables, assertions = [], {}
    for i, report in enumerate(reports):
        table = report.table.copy()
        table.insert(0, "sample", i)
        tables.append(table)
        for key, ok in report.assertions.items():
            assertions[key] = assertions.get(key, True) and bool(ok)
    table = pd.concat(tables, ignore_index=True) if tables else pd.DataFrame()
    summary = {"samples": len(reports), "failures": sum(not r.passed for r in reports)}
    summary.update(fit or {})
    return FitReport(name=name, table=table, fit=summary, assertions=assertions)


# ----------------------------------------------------------------------
# Inégalité de la moyenne
# ----------------------------------------------------------------------

def mean_value_ratio(c, R, energy_cap=None, tol=1e-10):
    """
    Rapport 2ρ(0)·πR²/(16·E(B_R)) après contraction z ↦ s·z (s = 2^-j)
    jusqu'à E(B_R) ≤ energy_cap.

    Returns:
        dict: scale, energy, density0, ratio
    """
    if not R > 0:
        raise RegionError(f"rayon strictement positif attendu, reçu {R}")
    energy_cap = Config.ENERGY_CAP if energy_cap is None else energy_cap
    if c.is_constant:
        return {"scale": 1.0, "energy": 0.0, "density0": 0.0, "ratio": 0.0}
    scale, current = 1.0, c
    e = energy(current, Disk(0, R), tol).value
    for _ in range(60):
        if e <= energy_cap:
            break
        scale /= 2.0
        current = scaled_curve(c, scale)
        e = energy(current, Disk(0, R), tol).value
    rho0 = energy_density(current, 0j)
    ratio = 2.0 * rho0 * math.pi * R * R / (16.0 * e) if e > 0 else 0.0
    return {"scale": scale, "energy": e, "density0": rho0, "ratio": ratio}


def mean_value_report(corpus, R=1.0, energy_cap=None):
    """
    Inégalité de la moyenne sur le corpus.

    Critère :
    - ratio ≤ 1 pour toute courbe avec E(B_R) ≤ energy_cap
    """
    energy_cap = Config.ENERGY_CAP if energy_cap is None else energy_cap
    rows = map_in_order(lambda c: mean_value_ratio(c, R, energy_cap), corpus.curves())
    table = pd.DataFrame(rows, columns=["scale", "energy", "density0", "ratio"])
    capped = table[table["energy"] <= energy_cap]
    assertions = {f"ratio ≤ 1 pour E(B_R) ≤ {energy_cap}": bool((capped["ratio"] <= 1.0).all())}
    fit = {"R": R, "max_ratio": float(table["ratio"].max()) if len(table) else 0.0,
           "mean_ratio": float(table["ratio"].mean()) if len(table) else 0.0}
    return FitReport(name="mean-value", table=table, fit=fit, assertions=assertions)


# ----------------------------------------------------------------------
# Limite d'ordre et monotonie
# ----------------------------------------------------------------------

def _check_deltas(deltas):
    deltas = [float(d) for d in deltas]
    if not deltas or any(d <= 0 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise SchemaError("rayons strictement positifs et décroissants attendus", 'deltas')
    return deltas


def _local_cap(point, chart, others):
    z0 = point.affine(chart)
    gaps = [abs(q.affine(chart) - z0) for q in others]
    gaps = [g for g in gaps if math.isfinite(g)]
    return 0.5 * min(gaps) if gaps else 1e3


def _radial_boundary(dist, delta, cap):
    """Rayon r(θ) où la distance à la cible atteint δ le long d'un rayon"""
    hi = min(1.0, cap)
    while dist(hi) < delta:
        if hi >= cap:
            raise NoSolution(f"la préimage de la boule de rayon {delta} n'est pas locale")
        hi = min(2.0 * hi, cap)
    lo = hi / 2.0
    while dist(lo) >= delta:
        lo /= 2.0
        if lo < 1e-300:
            raise NoSolution("rayon de préimage nul")
    return brentq(lambda r: dist(r) - delta, lo, 2.0 * lo, xtol=1e-15, rtol=1e-14)


def preimage_energy(c, x, delta, found=None):
    """
    Énergie de la préimage de la g-boule B_δ(x).

    La préimage est assemblée autour de chaque antécédent : le bord est
    trouvé rayon par rayon (brentq), l'intégrale radiale par Gauss–Legendre
    et l'intégrale angulaire par la règle des trapèzes.
    """
    found = preimages(c, x) if found is None else found
    x = np.asarray(x, dtype=complex)
    nodes, weights = gauss_rule(RADIAL_ORDER)
    thetas = 2.0 * math.pi * np.arange(ANGULAR_NODES) / ANGULAR_NODES
    total = 0.0
    for point, _ in found:
        chart = point.preferred_chart()
        z0 = point.affine(chart)
        cap = _local_cap(point, chart, [q for q, _ in found if q is not point])
        for theta in thetas:
            e = complex(math.cos(theta), math.sin(theta))

            def dist(r):
                return g_distance(c.evaluate(z0 + r * e, chart), x)

            rb = _radial_boundary(dist, delta, cap)
            r = 0.5 * rb * (nodes + 1.0)
            rho = energy_density(c, z0 + r * e, chart)
            total += 0.5 * rb * float(np.dot(weights, rho * r))
    return total * 2.0 * math.pi / ANGULAR_NODES


def _order_table(c, x, deltas):
    if c.is_constant:
        raise ConstantCurve("la préimage d'une boule par une courbe constante n'est pas définie")
    found = preimages(c, x)
    order = sum(m for _, m in found)
    rows = []
    for delta in deltas:
        e = preimage_energy(c, x, delta, found)
        rows.append({"delta": delta, "energy": e, "ratio": e / (math.pi * delta * delta)})
    return order, pd.DataFrame(rows)


def order_limit_check(c, x, deltas=DEFAULT_DELTAS):
    """
    Limite de E(préimage de B_δ(x))/(πδ²) quand δ → 0, comparée à ord_x(c).

    Critère :
    - le rapport au plus petit δ est à 5 % de ord_x
    """
    deltas = _check_deltas(deltas)
    order, table = _order_table(c, x, deltas)
    last = float(table["ratio"].iloc[-1])
    assertions = {f"rapport à δ = {deltas[-1]} à 5 % de ord_x = {order}":
                  abs(last - order) <= ORDER_REL_TOL * order}
    fit = {"order": order, "ratio_at_min_delta": last}
    return FitReport(name="order-limit", table=table, fit=fit, assertions=assertions)


def monotonicity_profile(c, x, deltas=(0.2, 0.1, 0.05, 0.02)):
    """
    Profil R(δ) = E/(πδ²) et constante C ajustée sur log R ≈ log R₀ − C·δ².

    Critère :
    - R(δ_min) ≥ ord_x·(1 − 0.05)

    La monotonie de R(δ)·e^{Cδ²} est rapportée, pas exigée.
    """
    deltas = _check_deltas(deltas)
    order, table = _order_table(c, x, deltas)
    d2 = table["delta"].to_numpy() ** 2
    fit_line = least_squares(d2, np.log(table["ratio"].to_numpy()))
    constant = -fit_line["slope"] if fit_line["slope"] is not None else 0.0
    weighted = table["ratio"].to_numpy() * np.exp(constant * d2)
    table["weighted"] = weighted
    last = float(table["ratio"].iloc[-1])
    ci = fit_line["slope_ci"]
    fit = {"order": order, "C": constant, "C_ci": [-ci[1], -ci[0]] if ci else None,
           "log_R0": fit_line["intercept"],
           "monotone": bool(np.all(np.diff(weighted) <= 1e-9 * np.max(np.abs(weighted))))}
    assertions = {f"R(δ_min) ≥ {order}·(1 − {ORDER_REL_TOL})": last >= order * (1 - ORDER_REL_TOL)}
    return FitReport(name="monotonicity", table=table, fit=fit, assertions=assertions)


# ----------------------------------------------------------------------
# Cylindres et isopérimétrie
# ----------------------------------------------------------------------

def cylinder_decay_fit(c, center, r_in, r_out, T_values=DEFAULT_T_VALUES, slope_window=None, tol=1e-13):
    """
    Décroissance de l'énergie des anneaux intérieurs e^T·r_in ≤ |z − center| ≤ e^-T·r_out.

    Critères :
    - pente de log E en T ≤ −0.9
    - pente dans slope_window si fournie (par exemple [−2.1, −1.9] pour ε·z)

    Args:
        T_values (list): profondeurs, 0 ≤ T < ln(r_out/r_in)/2

    Returns:
        FitReport: table (T, r_in, r_out, energy), pente et intervalle de confiance
    """
    half = math.log(r_out / r_in) / 2.0 if 0 < r_in < r_out else 0.0
    if half <= 0:
        raise RegionError(f"0 < r_in < r_out attendu, reçu {r_in}, {r_out}")
    T_values = [float(t) for t in T_values]
    if any(not 0 <= t < half for t in T_values):
        raise SchemaError(f"profondeurs dans [0, {half:.4f}[ attendues", 'T_values')
    if not c.is_constant:
        diameter = image_diameter(c, Annulus(center, r_in, r_out), 512)
        if diameter > Config.IMAGE_DIAMETER_CAP:
            raise ImageTooLarge(f"diamètre de l'image {diameter:.4f} > {Config.IMAGE_DIAMETER_CAP}")
    rows = []
    for t in T_values:
        inner, outer = r_in * math.exp(t), r_out * math.exp(-t)
        e = 0.0 if c.is_constant else energy(c, Annulus(center, inner, outer), tol).value
        rows.append({"T": t, "r_in": inner, "r_out": outer, "energy": e})
    table = pd.DataFrame(rows)
    if c.is_constant or (table["energy"] <= 0).any():
        return FitReport(name="cylinder", table=table, fit={"slope": None},
                         assertions={f"pente ≤ {GENERAL_DECAY_SLOPE}": True})
    fit = least_squares(table["T"], np.log(table["energy"]))
    assertions = {f"pente ≤ {GENERAL_DECAY_SLOPE}": fit["slope"] <= GENERAL_DECAY_SLOPE}
    if slope_window is not None:
        lo, hi = slope_window
        assertions[f"pente dans [{lo}, {hi}]"] = lo <= fit["slope"] <= hi
    return FitReport(name="cylinder", table=table, fit=fit, assertions=assertions)


def isoperimetric_report(c, center, radii, tol=1e-13):
    """
    Rapports E(B_r)/ℓ_g(γ_r)² (longueur pour la métrique g de la forme normalisée).

    Critère :
    - rapport ≤ 1.1/(4π) pour r ≤ 0.1
    """
    if c.is_constant:
        raise ConstantCurve("longueur de bord nulle pour une courbe constante")
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii):
        raise SchemaError("rayons strictement positifs attendus", 'radii')
    diameter = image_diameter(c, Disk(center, max(radii)), 512)
    if diameter > Config.IMAGE_DIAMETER_CAP:
        raise ImageTooLarge(f"diamètre de l'image {diameter:.4f} > {Config.IMAGE_DIAMETER_CAP}")
    bound = ISOPERIMETRIC_FACTOR / (4.0 * math.pi)
    rows = []
    for r in radii:
        e = energy(c, Disk(center, r), tol).value
        length = boundary_length(c, center, r, normalized=True, rel_tol=1e-12)
        rows.append({"r": r, "energy": e, "length": length, "ratio": e / length ** 2})
    table = pd.DataFrame(rows)
    small = table[table["r"] <= ISOPERIMETRIC_RADIUS]
    assertions = {f"E/ℓ² ≤ {ISOPERIMETRIC_FACTOR}/(4π) pour r ≤ {ISOPERIMETRIC_RADIUS}":
                  bool((small["ratio"] <= bound).all())}
    fit = {"bound": bound, "max_ratio": float(table["ratio"].max()),
           "normalized_max": float(table["ratio"].max() * 4.0 * math.pi)}
    return FitReport(name="isoperimetric", table=table, fit=fit, assertions=assertions)


# ----------------------------------------------------------------------
# Poincaré
# ----------------------------------------------------------------------

def poincare_check(coeffs):
    """
    Inégalité de Poincaré pour f(θ) = Σ a_k e^{ikθ}, k ∈ [−K, K], a₀ = 0.

    Les intégrales (1/2π)∫|f|² et (1/2π)∫|f'|² sont calculées par les
    coefficients et par la règle des trapèzes à 4K + 4 nœuds (exacte ici).

    Critères :
    - accord coefficients/quadrature à 1e-8
    - ∫|f|² ≤ ∫|f'|²
    """
    a = np.asarray(coeffs, dtype=complex).ravel()
    if a.size % 2 == 0:
        raise SchemaError("2K + 1 coefficients attendus (k = −K..K)", 'coeffs')
    order = a.size // 2
    if abs(a[order]) > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
        raise NonzeroMean(f"a₀ = {a[order]} ≠ 0")
    ks = np.arange(-order, order + 1)
    coef_f = float(np.sum(np.abs(a) ** 2))
    coef_df = float(np.sum(np.abs(ks * a) ** 2))
    nodes = 4 * order + 4
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    waves = np.exp(1j * np.outer(theta, ks))
    quad_f = float(np.mean(np.abs(waves @ a) ** 2))
    quad_df = float(np.mean(np.abs(waves @ (1j * ks * a)) ** 2))
    agree = max(abs(quad_f - coef_f), abs(quad_df - coef_df)) <= QUADRATURE_AGREEMENT * max(1.0, coef_df)
    table = pd.DataFrame({"k": ks, "abs_a": np.abs(a), "a2": np.abs(a) ** 2, "ka2": np.abs(ks * a) ** 2})
    fit = {"f2_coefficients": coef_f, "df2_coefficients": coef_df, "f2_quadrature": quad_f,
           "df2_quadrature": quad_df, "ratio": coef_f / coef_df if coef_df > 0 else None}
    assertions = {
        "accord coefficients/quadrature à 1e-8": bool(agree),
        "∫|f|² ≤ ∫|f'|²": coef_f <= coef_df * (1 + 1e-12),
    }
    return FitReport(name="poincare", table=table, fit=fit, assertions=assertions)


# ----------------------------------------------------------------------
# Quantification de l'énergie et identité des masses
# ----------------------------------------------------------------------

def energy_quantization(c, hbar=None, tol=1e-9):
    """
    Énergie totale d'une courbe non constante.

    Critères :
    - E(ℙ¹) = degré à 1e-5
    - E(ℙ¹) ≥ ħ
    """
    hbar = Config.HBAR if hbar is None else hbar
    if c.is_constant:
        raise ConstantCurve("une courbe constante ne porte aucune énergie")
    result = energy(c, FullSphere(), tol)
    table = pd.DataFrame([{"degree": c.degree, "n": c.n, "energy": result.value, "cells": result.cells}])
    assertions = {
        "E = degré à 1e-5": abs(result.value - c.degree) <= QUANTIZATION_TOL,
        f"E ≥ ħ = {hbar}": result.value >= hbar * (1 - QUANTIZATION_TOL),
    }
    return FitReport(name="energy-quantization", table=table, fit={"error": result.value - c.degree},
                     assertions=assertions)


def mass_identity(planted, mass_tol=None, build_tree=True):
    """
    Masses d'une famille plantée contre les multiplicités algébriques.

    Critères :
    - chaque point planté est retrouvé à τ_pt avec sa multiplicité
    - masse mesurée (profil en δ) à mass_tol de la multiplicité
    - somme des degrés de l'arbre de bulles = degré
    """
    mass_tol = Config.MASS_TOL if mass_tol is None else mass_tol
    fam = planted.family
    found, _ = bubble_points(fam)
    rows, recovered = [], True
    for point, mult in zip(planted.points, planted.multiplicities):
        match = [b for b in found if b.point.is_close(point, Config.TAU_PT)]
        algebraic = match[0].algebraic_mult if match else 0
        recovered &= algebraic == mult
        profile = mass_profile(fam, point)
        rows.append({"point": complex(point.affine(0)), "planted": mult, "algebraic": algebraic,
                     "mass": profile.mass, "uncertainty": profile.uncertainty})
    table = pd.DataFrame(rows)
    table["point"] = table["point"].map(lambda z: [z.real, z.imag])
    assertions = {
        "points plantés retrouvés": bool(recovered) and len(found) == len(planted.points),
        f"masse à {mass_tol} de la multiplicité": bool(
            (np.abs(table["mass"] - table["planted"]) <= mass_tol).all()),
    }
    fit = {"degree": fam.degree}
    if build_tree:
        tree = build_bubble_tree(fam)
        fit["degree_sum"] = tree.degree_sum
        assertions["somme des degrés = degré"] = tree.degree_sum == fam.degree
    return FitReport(name="mass-identity", table=table, fit=fit, assertions=assertions)
