# geometry/quadrature.py
"""
Quadratures adaptatives de Gauss–Legendre avec estimation d'erreur par
doublement d'ordre. Le découpage est déterministe : pour une tolérance
donnée, le résultat est reproductible bit à bit.
"""
import math
import logging
from dataclasses import dataclass
import numpy as np
from numpy.polynomial.legendre import leggauss
from utils.config import Config
from utils.errors import QuadratureBudgetExceeded

logger = logging.getLogger(__name__)

BASE_ORDER = 8
LINE_PIECES = 16
ANGULAR_PIECES = 8
GRADING_DEPTH = 52
CELL_GRADING_DEPTH = 16
CENTER_GRADING_DEPTH = 30
ROUNDING_FLOOR = 1e-15
NOISE_REL = 1e-6
STALL_RATIO = 0.125
ERR_SLACK = 2.0

_RULES = {}


def gauss_rule(order):
    """Nœuds et poids de Gauss–Legendre sur [-1, 1] (mis en cache)"""
    if order not in _RULES:
        _RULES[order] = leggauss(order)
    return _RULES[order]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    err_estimate: float
    cells: int


def graded_offsets(gap, span, depth=GRADING_DEPTH):
    """Décalages géométriques span·2^-j jusqu'à l'échelle du défaut gap"""
    if span <= 0:
        return np.empty(0)
    gap = max(gap, span * 2.0 ** -depth)
    levels = min(depth, int(math.ceil(math.log2(span / gap))) + 2)
    return span * 2.0 ** -np.arange(1, levels + 1)


def _merge_breakpoints(points, lo, hi):
    pts = np.unique(np.clip(np.asarray(points, dtype=float), lo, hi))
    tol = 1e-15 * max(1.0, abs(lo), abs(hi))
    keep = [pts[0]]
    for p in pts[1:]:
        if p - keep[-1] > tol:
            keep.append(p)
    if hi - keep[-1] <= tol:
        keep[-1] = hi
    else:
        keep.append(hi)
    keep[0] = lo
    return np.array(keep)


def _check_total(err, value, tol, rel_tol, what):
    """L'erreur totale estimée doit rester sous la tolérance demandée"""
    limit = max(tol, rel_tol * abs(value), ROUNDING_FLOOR * abs(value))
    if err > ERR_SLACK * limit:
        raise QuadratureBudgetExceeded(f"{what} : erreur estimée {err:.3e} > tolérance {limit:.3e}")


def adaptive_line(func, breakpoints, tol, rel_tol=0.0, cap=None, order=BASE_ORDER):
    """
    Intégrale de func (vectorisée) sur [breakpoints[0], breakpoints[-1]].

    Un intervalle est accepté quand son erreur tient dans sa part de
    tolérance, ou quand elle est au niveau du bruit d'arrondi de func :
    petite devant ∫|func| sur l'intervalle et non réduite par la dernière
    bissection. L'erreur totale est contrôlée à la fin.

    Args:
        func (callable): fonction réelle de tableaux numpy
        breakpoints (array): points de coupure initiaux, croissants
        tol (float): erreur absolue visée
        rel_tol (float): erreur relative visée (la plus permissive l'emporte)
        cap (int): nombre maximal de sous-intervalles

    Returns:
        QuadratureResult: valeur, estimation d'erreur, nombre d'intervalles
    """
    cap = cap or Config.CELL_CAP
    lo, hi = float(breakpoints[0]), float(breakpoints[-1])
    total = hi - lo
    x1, w1 = gauss_rule(order)
    x2, w2 = gauss_rule(2 * order)
    pending = [(p, q, math.inf) for p, q in zip(breakpoints[:-1], breakpoints[1:])]
    accepted = []

    while pending:
        if len(accepted) + len(pending) > cap:
            raise QuadratureBudgetExceeded(f"plafond de {cap} intervalles atteint")
        a = np.array([p[0] for p in pending])
        b = np.array([p[1] for p in pending])
        parent = np.array([p[2] for p in pending])
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        f1 = func(mid[:, None] + half[:, None] * x1[None, :])
        f2 = func(mid[:, None] + half[:, None] * x2[None, :])
        low = half * (f1 @ w1)
        high = half * (f2 @ w2)
        mass = half * (np.abs(f2) @ w2)
        errs = np.abs(high - low)

        estimate = math.fsum([v for _, _, v, _ in accepted]) + math.fsum(high)
        budget = max(tol, rel_tol * abs(estimate), ROUNDING_FLOOR * abs(estimate))
        refine = []
        for i in range(len(pending)):
            width = b[i] - a[i]
            resolved = errs[i] <= budget * width / total or width <= 1e-14 * max(1.0, abs(a[i]), abs(b[i]))
            noisy = errs[i] <= NOISE_REL * mass[i] and errs[i] > STALL_RATIO * parent[i]
            if resolved or noisy:
                accepted.append((a[i], b[i], high[i], errs[i]))
            else:
                refine.append((a[i], mid[i], errs[i]))
                refine.append((mid[i], b[i], errs[i]))
        pending = refine

    accepted.sort(key=lambda item: item[0])
    value = math.fsum(v for _, _, v, _ in accepted)
    err = math.fsum(e for _, _, _, e in accepted)
    _check_total(err, value, tol, rel_tol, "quadrature sur une ligne")
    return QuadratureResult(value=value, err_estimate=err, cells=len(accepted))


def periodic_breakpoints(angles, gaps, pieces=LINE_PIECES):
    """Découpage de [0, 2π] raffiné géométriquement autour des angles donnés"""
    two_pi = 2.0 * math.pi
    pts = list(np.linspace(0.0, two_pi, pieces + 1))
    for theta, gap in zip(angles, gaps):
        theta = theta % two_pi
        pts.append(theta)
        for off in graded_offsets(gap, math.pi):
            pts.append((theta + off) % two_pi)
            pts.append((theta - off) % two_pi)
    return _merge_breakpoints(pts, 0.0, two_pi)


def adaptive_polar(density, center, r_in, r_out, hints, tol, cap=None, order=BASE_ORDER):
    """
    Intégrale de density sur la couronne r_in ≤ |z − center| ≤ r_out.

    Cellules polaires (r, θ), règle de Gauss–Legendre tensorielle par cellule,
    erreur par doublement d'ordre, division en quatre des cellules dont
    l'erreur dépasse leur part de tolérance (au prorata de l'aire).
    """
    cap = cap or Config.CELL_CAP
    center = complex(center)
    two_pi = 2.0 * math.pi

    radial = list(np.linspace(r_in, r_out, 5))
    angular = list(np.linspace(0.0, two_pi, ANGULAR_PIECES + 1))
    for h in hints:
        rho_h = abs(h - center)
        if rho_h <= 1e-3 * r_out and r_in == 0:
            radial.extend(r_out * 2.0 ** -np.arange(1, CENTER_GRADING_DEPTH + 1))
            continue
        if not (r_in - 0.5 * r_out <= rho_h <= 1.5 * r_out):
            continue
        theta = math.atan2((h - center).imag, (h - center).real) % two_pi
        angular.append(theta)
        for off in graded_offsets(1e-12 * r_out, math.pi, CELL_GRADING_DEPTH):
            angular.append((theta + off) % two_pi)
            angular.append((theta - off) % two_pi)
        radial.append(rho_h)
        for off in graded_offsets(1e-12 * r_out, r_out, CELL_GRADING_DEPTH):
            radial.extend([rho_h + off, rho_h - off])
    radial = _merge_breakpoints([r for r in radial if r_in <= r <= r_out], r_in, r_out)
    angular = _merge_breakpoints(angular, 0.0, two_pi)

    pending = [(r0, r1, t0, t1) for r0, r1 in zip(radial[:-1], radial[1:])
               for t0, t1 in zip(angular[:-1], angular[1:])]
    total_area = 0.5 * (r_out ** 2 - r_in ** 2) * two_pi
    x1, w1 = gauss_rule(order)
    x2, w2 = gauss_rule(2 * order)
    accepted = []

    def tensor(cells, x, w):
        r0, r1, t0, t1 = (cells[:, k][:, None, None] for k in range(4))
        hr, mr = 0.5 * (r1 - r0), 0.5 * (r1 + r0)
        ht, mt = 0.5 * (t1 - t0), 0.5 * (t1 + t0)
        r = mr + hr * x[None, :, None]
        t = mt + ht * x[None, None, :]
        f = density(center + r * np.exp(1j * t)) * r
        return (hr * ht)[:, 0, 0] * np.einsum('cij,i,j->c', f, w, w)

    while pending:
        if len(accepted) + len(pending) > cap:
            raise QuadratureBudgetExceeded(f"plafond de {cap} cellules atteint")
        cells = np.array(pending)
        low = tensor(cells, x1, w1)
        high = tensor(cells, x2, w2)
        errs = np.abs(high - low)
        refine = []
        for i, (r0, r1, t0, t1) in enumerate(pending):
            area = 0.5 * (r1 ** 2 - r0 ** 2) * (t1 - t0)
            tiny = (r1 - r0) <= 1e-14 * max(1.0, r1) or (t1 - t0) <= 1e-14
            if errs[i] <= tol * area / total_area or tiny:
                accepted.append((r0, t0, high[i], errs[i]))
            else:
                rm, tm = 0.5 * (r0 + r1), 0.5 * (t0 + t1)
                refine.extend([(r0, rm, t0, tm), (r0, rm, tm, t1), (rm, r1, t0, tm), (rm, r1, tm, t1)])
        pending = refine

    accepted.sort(key=lambda item: (item[0], item[1]))
    value = math.fsum(v for _, _, v, _ in accepted)
    err = math.fsum(e for _, _, _, e in accepted)
    logger.debug(f"Quadrature polaire : {len(accepted)} cellules, erreur estimée {err:.3e}")
    _check_total(err, value, tol, 0.0, "quadrature polaire")
    return QuadratureResult(value=value, err_estimate=err, cells=len(accepted))
