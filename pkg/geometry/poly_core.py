# geometry/poly_core.py
"""
Algèbre des n-uplets de polynômes homogènes en (u, v).

Convention : coeffs[j] multiplie u^(d-j) v^j. Dans la carte 0 (z = u/v) le
tableau est directement l'ordre décroissant de np.polyval ; dans la carte 1
(w = v/u) il faut l'inverser. Le point [1, 0] est z = ∞.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
import numpy as np
from utils.config import Config
from utils.errors import (ZeroPolynomial, ZeroTuple, ZeroScale, ZeroVector,
                          ConstantCurve, NotCoprime, SchemaError)
from utils.serialization import encode_coefficients, decode_coefficients, encode_complex

logger = logging.getLogger(__name__)

# Gain appliqué au bruit relatif des coefficients pour le rayon de regroupement
NOISE_GAIN = 1e3
# Seuil relatif d'annulation des coefficients de Taylor (ordre local)
ORDER_TOL = 1e-8
# Seuil relatif sous lequel un mineur est considéré identiquement nul
MINOR_TOL = 1e-14


class HomogPoly:
    """Polynôme homogène de degré d en (u, v)"""

    __slots__ = ('degree', 'coeffs')

    def __init__(self, coeffs, degree=None):
        arr = np.array(coeffs, dtype=complex).ravel()
        if degree is None:
            degree = arr.size - 1
        if degree < 0 or arr.size != degree + 1:
            raise SchemaError(f"un polynôme de degré {degree} doit avoir {degree + 1} coefficients", 'coeffs')
        if not np.all(np.isfinite(arr)):
            raise SchemaError("coefficients finis attendus", 'coeffs')
        arr.flags.writeable = False
        self.degree = int(degree)
        self.coeffs = arr

    @classmethod
    def zero(cls, degree):
        """Sentinelle du polynôme nul de degré donné"""
        return cls(np.zeros(degree + 1, dtype=complex), degree)

    @classmethod
    def from_roots(cls, points, scale=1.0):
        """Produit des facteurs linéaires (b·u − a·v) pour chaque racine [a, b]"""
        coeffs = np.array([scale], dtype=complex)
        for pt in points:
            coeffs = np.convolve(coeffs, [pt.b, -pt.a])
        return cls(coeffs)

    @property
    def is_zero(self):
        return not np.any(self.coeffs)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        d = self.degree
        return sum(c * u ** (d - j) * v ** j for j, c in enumerate(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, HomogPoly):
            return HomogPoly(np.convolve(self.coeffs, other.coeffs))
        return HomogPoly(self.coeffs * complex(other), self.degree)

    __rmul__ = __mul__

    def allclose(self, other, tol=1e-10):
        return self.degree == other.degree and np.max(np.abs(self.coeffs - other.coeffs)) <= tol

    def to_json(self):
        return encode_coefficients(self.coeffs)

    @classmethod
    def from_json(cls, values, field=None):
        return cls(decode_coefficients(values, field))

    def __repr__(self):
        return f"HomogPoly(degree={self.degree}, coeffs={np.round(self.coeffs, 12).tolist()})"


class P1Point:
    """Point de ℙ¹ en coordonnées homogènes, normalisé en norme max 1"""

    __slots__ = ('a', 'b')

    def __init__(self, a, b):
        a, b = complex(a), complex(b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise SchemaError("coordonnées homogènes finies attendues", 'point')
        scale = max(abs(a), abs(b))
        if scale == 0:
            raise ZeroVector("le point [0, 0] n'existe pas dans ℙ¹")
        self.a = a / scale
        self.b = b / scale

    @classmethod
    def from_affine(cls, z, chart=0):
        """Point de coordonnée affine z dans la carte donnée (∞ accepté)"""
        z = complex(z)
        if np.isinf(z):
            return cls(1, 0) if chart == 0 else cls(0, 1)
        return cls(z, 1) if chart == 0 else cls(1, z)

    @property
    def is_infinity(self):
        return self.b == 0

    def affine(self, chart=0):
        if chart == 0:
            return complex(np.inf) if self.b == 0 else self.a / self.b
        return complex(np.inf) if self.a == 0 else self.b / self.a

    def preferred_chart(self):
        """Carte dans laquelle la coordonnée affine est de module ≤ 1"""
        return 0 if abs(self.b) >= abs(self.a) else 1

    def distance(self, other):
        return abs(self.a * other.b - other.a * self.b)

    def is_close(self, other, tol=None):
        return self.distance(other) <= (Config.TAU_PT if tol is None else tol)

    def __eq__(self, other):
        return isinstance(other, P1Point) and self.is_close(other)

    __hash__ = None

    def sort_key(self):
        z = self.affine(0)
        if np.isinf(z):
            return (1, 0.0, 0.0)
        return (0, round(abs(z), 12), float(np.angle(z)))

    def to_json(self):
        return "inf" if self.is_infinity else encode_complex(self.affine(0))

    def __repr__(self):
        return "P1Point(∞)" if self.is_infinity else f"P1Point({self.affine(0):.12g})"


INFINITY = P1Point(1, 0)
ORIGIN = P1Point(0, 1)


class MapTuple:
    """Élément de 𝔛_{n,d} : n polynômes homogènes de même degré, non tous nuls"""

    __slots__ = ('polys',)

    def __init__(self, polys):
        polys = tuple(p if isinstance(p, HomogPoly) else HomogPoly(p) for p in polys)
        if len(polys) < 2:
            raise SchemaError("un n-uplet a au moins deux entrées", 'tuple')
        if len({p.degree for p in polys}) != 1:
            raise SchemaError("common degree", 'tuple')
        if all(p.is_zero for p in polys):
            raise ZeroTuple("toutes les entrées sont nulles")
        self.polys = polys

    @classmethod
    def from_coeffs(cls, rows):
        return cls([HomogPoly(r) for r in rows])

    @property
    def n(self):
        return len(self.polys)

    @property
    def degree(self):
        return self.polys[0].degree

    @property
    def coeff_matrix(self):
        return np.vstack([p.coeffs for p in self.polys])

    def chart_matrix(self, chart=0):
        m = self.coeff_matrix
        return m if chart == 0 else m[:, ::-1]

    def evaluate(self, z, chart=0):
        """Valeurs r_i(z) de la carte affine ; forme (n,) + forme de z"""
        z = np.asarray(z, dtype=complex)
        return np.stack([np.polyval(row, z) for row in self.chart_matrix(chart)])

    def evaluate_point(self, pt):
        return np.array([p(pt.a, pt.b) for p in self.polys], dtype=complex)

    def swapped(self):
        """Échange de u et v (changement de carte z ↔ 1/z)"""
        return MapTuple([HomogPoly(p.coeffs[::-1]) for p in self.polys])

    @property
    def is_constant(self):
        s = np.linalg.svd(self.coeff_matrix, compute_uv=False)
        return s.size < 2 or s[1] <= 1e-12 * s[0]

    def projectively_close(self, other, tol=1e-8):
        if self.n != other.n or self.degree != other.degree:
            return False
        return np.max(np.abs(normalize(self).coeff_matrix - normalize(other).coeff_matrix)) <= tol

    def to_json(self):
        return [p.to_json() for p in self.polys]

    @classmethod
    def from_json(cls, rows, field='tuple'):
        if not isinstance(rows, list) or len(rows) < 2:
            raise SchemaError("un n-uplet a au moins deux entrées", field)
        return cls([HomogPoly.from_json(r, field) for r in rows])

    def __repr__(self):
        return f"MapTuple(n={self.n}, degree={self.degree})"


class RationalCurve:
    """Application rationnelle ℙ¹ → ℙⁿ⁻¹ : n-uplet sans facteur linéaire commun"""

    __slots__ = ('tuple', '_cache')

    def __init__(self, tuple_, check=True):
        if not isinstance(tuple_, MapTuple):
            tuple_ = MapTuple(tuple_)
        if check:
            fac = common_factor(tuple_)
            if fac.roots:
                raise NotCoprime(f"racines communes : {[pt for pt, _ in fac.roots]}")
        self.tuple = tuple_
        self._cache = {}

    @property
    def n(self):
        return self.tuple.n

    @property
    def degree(self):
        return self.tuple.degree

    @property
    def is_constant(self):
        return self.tuple.is_constant

    def swapped(self):
        return RationalCurve(self.tuple.swapped(), check=False)

    def evaluate(self, z, chart=0):
        return self.tuple.evaluate(z, chart)

    def chart_matrix(self, chart=0):
        return self.tuple.chart_matrix(chart)

    def derivative_matrix(self, chart=0):
        key = ('der', chart)
        if key not in self._cache:
            self._cache[key] = [np.polyder(row) if row.size > 1 else np.zeros(1, complex)
                                for row in self.chart_matrix(chart)]
        return self._cache[key]

    def hint_points(self, chart=0):
        """Racines finies des entrées dans la carte : zones où la densité peut se concentrer"""
        key = ('hints', chart)
        if key not in self._cache:
            pts = []
            for row in self.chart_matrix(chart):
                nz = np.flatnonzero(row)
                if nz.size == 0:
                    continue
                core = row[nz[0]:]
                if core.size > 1:
                    pts.extend(np.roots(core).tolist())
            self._cache[key] = np.array(pts, dtype=complex)
        return self._cache[key]

    def to_json(self):
        return self.tuple.to_json()

    def __repr__(self):
        return f"RationalCurve(n={self.n}, degree={self.degree})"


@dataclass(frozen=True)
class Factorization:
    roots: tuple
    residual: MapTuple
    remainder_norm: float = 0.0

    @property
    def factor_degree(self):
        return sum(m for _, m in self.roots)


def evaluate(p, pt):
    """Valeur de p au représentant normalisé du point"""
    return complex(p(pt.a, pt.b))


# ----------------------------------------------------------------------
# Racines et regroupement
# ----------------------------------------------------------------------

def _merge_radius(size, noise):
    return max(Config.TAU_ROOT, (NOISE_GAIN * noise) ** (1.0 / size))


def _refine(core, zs):
    """Un pas de Newton sur les racines isolées"""
    if zs.size == 0:
        return zs
    dcore = np.polyder(core)
    out = zs.copy()
    for i, z in enumerate(zs):
        others = np.delete(zs, i)
        if others.size and np.min(np.abs(others - z)) <= 1e-3 * max(1.0, abs(z)):
            continue
        f = np.polyval(core, z)
        df = np.polyval(dcore, z)
        if df == 0:
            continue
        znew = z - f / df
        if abs(np.polyval(core, znew)) <= abs(f):
            out[i] = znew
    return out


def _raw_roots(p):
    """Racines non regroupées : (point, exacte) ; exactes = zéros de tête ou de queue"""
    c = p.coeffs
    nz = np.flatnonzero(c)
    lead, last = int(nz[0]), int(nz[-1])
    core = c[lead:last + 1]
    items = []
    if core.size > 1:
        zs = _refine(core, np.roots(core))
        items.extend((P1Point(z, 1), False) for z in zs)
    items.extend((ORIGIN, True) for _ in range(p.degree - last))
    items.extend((INFINITY, True) for _ in range(lead))
    return items


def _centroid(items):
    exact = [pt for pt, is_exact in items if is_exact]
    if exact:
        return exact[0]
    chart = items[0][0].preferred_chart()
    return P1Point.from_affine(np.mean([pt.affine(chart) for pt, _ in items]), chart)


def _spread(items):
    center = _centroid(items)
    return max(pt.distance(center) for pt, _ in items)


def _link(items, threshold):
    """Composantes connexes par lien simple au seuil donné"""
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(len(items)), 2):
        if items[i][0].distance(items[j][0]) <= threshold:
            parent[find(i)] = find(j)
    groups = {}
    for i in range(len(items)):
        groups.setdefault(find(i), []).append(items[i])
    return list(groups.values())


def _cluster(items, noise):
    """Regroupe les racines : un amas de taille m est accepté si son étalement ≤ rayon(m)"""

    def visit(group, level):
        out = []
        for comp in _link(group, 2.0 * _merge_radius(level, noise)):
            if len(comp) == 1 or _spread(comp) <= _merge_radius(len(comp), noise):
                out.append(comp)
            elif level > 1:
                out.extend(visit(comp, min(level, len(comp)) - 1))
            else:
                out.extend([item] for item in comp)
        return out

    if not items:
        return []
    return visit(items, len(items))


def roots(p, noise=None):
    """
    Racines de p sur ℙ¹ avec multiplicités.

    Args:
        p (HomogPoly): polynôme non nul
        noise (float): bruit relatif des coefficients (défaut Config.ROOT_NOISE)

    Returns:
        list: paires (P1Point, multiplicité), dont la somme des multiplicités vaut d
    """
    if p.is_zero:
        raise ZeroPolynomial("le polynôme nul n'a pas de racines isolées")
    noise = Config.ROOT_NOISE if noise is None else max(noise, Config.ROOT_NOISE)
    clusters = _cluster(_raw_roots(p), noise)
    found = [(_centroid(c), len(c)) for c in clusters]
    return sorted(found, key=lambda item: item[0].sort_key())


def _common_roots(polys, noise):
    nonzero = [p for p in polys if not p.is_zero]
    if not nonzero:
        raise ZeroTuple("toutes les entrées sont nulles")
    root_sets = [roots(p, noise) for p in nonzero]
    common = []
    for pt, mult in root_sets[0]:
        matched = [(pt, pt.is_infinity or pt.distance(ORIGIN) == 0)]
        for rs in root_sets[1:]:
            near = [(pt.distance(q), q, mq) for q, mq in rs if pt.is_close(q)]
            if not near:
                mult = 0
                break
            _, q, mq = min(near, key=lambda item: item[0])
            matched.append((q, q.is_infinity or q.distance(ORIGIN) == 0))
            mult = min(mult, mq)
        if mult:
            common.append((_centroid(matched), mult))
    return common


def _synthetic_division(coeffs, pt):
    """Division par le facteur linéaire de racine pt ; renvoie (quotient, reste)"""
    chart = pt.preferred_chart()
    c = coeffs if chart == 0 else coeffs[::-1]
    z0 = pt.affine(chart)
    q = np.empty(c.size - 1, dtype=complex)
    acc = 0j
    for j in range(c.size - 1):
        acc = c[j] + z0 * acc
        q[j] = acc
    rem = c[-1] + z0 * acc
    return (q if chart == 0 else q[::-1]), rem


def _deflate(polys, common):
    degree = polys[0].degree - sum(m for _, m in common)
    residual, remainder = [], 0.0
    for p in polys:
        if p.is_zero:
            residual.append(HomogPoly.zero(degree))
            continue
        c = np.array(p.coeffs)
        scale = np.max(np.abs(c))
        for pt, mult in common:
            for _ in range(mult):
                c, rem = _synthetic_division(c, pt)
                remainder += abs(rem) / scale
        residual.append(HomogPoly(c, degree))
    return residual, remainder


def common_factor(t, noise=None):
    """
    Facteur linéaire commun d'un n-uplet.

    Les racines communes sont l'intersection des racines des entrées non
    nulles (à τ_pt près), de multiplicité minimale ; le résidu est obtenu par
    division synthétique au centre de chaque amas.

    Returns:
        Factorization: racines communes, résidu et norme du reste écarté
    """
    polys = list(t.polys)
    common = sorted(_common_roots(polys, noise), key=lambda item: item[0].sort_key())
    if not common:
        return Factorization(roots=(), residual=t, remainder_norm=0.0)
    residual, remainder = _deflate(polys, common)
    if remainder > 1e-6:
        logger.warning(f"Reste de division élevé lors de l'extraction du facteur commun: {remainder:.3e}")
    else:
        logger.debug(f"Facteur commun extrait, reste {remainder:.3e}")
    return Factorization(roots=tuple(common), residual=MapTuple(residual), remainder_norm=remainder)


def normalize(t):
    """Représentant canonique : norme sup 1, premier coefficient maximal réel positif"""
    m = t.coeff_matrix
    flat = m.ravel()
    mags = np.abs(flat)
    top = mags.max()
    if top == 0:
        raise ZeroTuple("impossible de normaliser le n-uplet nul")
    pivot = int(np.flatnonzero(mags >= (1 - 1e-12) * top)[0])
    scale = flat[pivot]
    out = flat.copy() if scale == 1 else flat / scale
    out[pivot] = 1.0
    return MapTuple.from_coeffs(out.reshape(m.shape))


def _compose(coeffs, a, b):
    """Coefficients décroissants de p(a + b·w) pour p donné en ordre décroissant"""
    q = np.array([b, a], dtype=complex)
    acc = np.array([coeffs[0]], dtype=complex)
    # longueur fixe : les coefficients dominants nuls sont conservés
    for c in coeffs[1:]:
        acc = np.convolve(acc, q)
        acc[-1] += c
    return acc


def substitute_affine(t, a, b):
    """
    Substitution z = a + b·w dans la carte affine, renormalisée.

    R̃_i(w_u, w_v) = R_i(b·w_u + a·w_v, w_v) ; le degré est conservé.
    """
    a, b = complex(a), complex(b)
    if b == 0:
        raise ZeroScale("l'échelle b de la substitution affine est nulle")
    return normalize(MapTuple([HomogPoly(_compose(p.coeffs, a, b), t.degree) for p in t.polys]))


# ----------------------------------------------------------------------
# Ordres locaux et préimages
# ----------------------------------------------------------------------

def local_order(c, z0):
    """
    Ordre d'annulation de la différentielle de c en z0 (0 si c est constante).

    On fixe l'entrée pivot i0 de plus grande valeur en z0 ; les mineurs
    R_i·x_i0 − R_i0·x_i avec x = c(z0) s'annulent en z0, et l'ordre est le plus
    petit indice de Taylor non nul (≥ 1) sur l'ensemble des mineurs.
    """
    if c.is_constant:
        return 0
    chart = z0.preferred_chart()
    zc = z0.affine(chart)
    rows = c.chart_matrix(chart)
    vals = np.array([np.polyval(r, zc) for r in rows])
    i0 = int(np.argmax(np.abs(vals)))
    order = None
    for i in range(c.n):
        if i == i0:
            continue
        minor = rows[i] * vals[i0] - rows[i0] * vals[i]
        taylor = _compose(minor, zc, 1.0)[::-1]
        scale = np.max(np.abs(taylor))
        if scale == 0:
            continue
        above = np.flatnonzero(np.abs(taylor[1:]) > ORDER_TOL * scale)
        if above.size:
            order = int(above[0]) + 1 if order is None else min(order, int(above[0]) + 1)
    return order if order is not None else 0


def _target_vector(x, n):
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != n:
        raise SchemaError(f"un point de ℙ^{n - 1} a {n} coordonnées", 'x')
    if not np.any(x):
        raise ZeroVector("le point cible est nul")
    return x / np.max(np.abs(x))


def preimages(c, x, noise=None):
    """
    Solutions de c(z) = x avec multiplicités.

    Ce sont les racines communes des mineurs R_i(z)·x_j − R_j(z)·x_i.

    Returns:
        list: paires (P1Point, multiplicité) ; la somme est ord_x
    """
    if c.is_constant:
        raise ConstantCurve("la préimage d'un point par une courbe constante est vide ou ℙ¹")
    x = _target_vector(x, c.n)
    polys = c.tuple.polys
    scale = max(np.max(np.abs(p.coeffs)) for p in polys)
    minors = []
    for i, j in combinations(range(c.n), 2):
        coeffs = polys[i].coeffs * x[j] - polys[j].coeffs * x[i]
        coeffs[np.abs(coeffs) <= MINOR_TOL * scale] = 0
        minors.append(HomogPoly(coeffs, c.degree))
    if all(m.is_zero for m in minors):
        raise ConstantCurve("tous les mineurs sont nuls")
    found = _common_roots(minors, noise)
    return sorted(found, key=lambda item: item[0].sort_key())


def target_order(c, x, noise=None):
    """ord_x : somme des multiplicités des préimages de x"""
    return sum(m for _, m in preimages(c, x, noise))
