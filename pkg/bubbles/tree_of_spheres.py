# bubbles/tree_of_spheres.py
"""
Combinatoire des domaines nodaux de genre 0 : ensembles ordonnés enracinés,
points d'attache, genre arithmétique et stabilité des arbres décorés.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
import numpy as np
from utils.config import Config
from utils.errors import RootHasNoPredecessor, SchemaError
from utils.serialization import encode_complex, decode_complex

logger = logging.getLogger(__name__)

ORDER = 'ORDER'
RS1 = 'RS1'
RS2 = 'RS2'
ATTACHMENT = 'ATTACHMENT'
INJECTIVITY = 'INJECTIVITY'


@dataclass(frozen=True)
class Violation:
    axiom: str
    witnesses: tuple
    message: str

    def to_json(self):
        return {"axiom": self.axiom, "witnesses": list(self.witnesses), "message": self.message}


class RootedOrder:
    """Ordre strict donné par la liste des prédécesseurs de chaque élément"""

    def __init__(self, elements, predecessors):
        self.elements = tuple(elements)
        self.predecessors = {e: frozenset(predecessors.get(e, ())) for e in self.elements}

    @classmethod
    def from_parents(cls, parents, root, elements=None):
        """Ordre engendré par une application enfant → parent (un cycle reste visible)"""
        elements = list(elements) if elements is not None else [root] + [c for c in parents if c != root]
        preds = {}
        for e in elements:
            chain, seen, cur = set(), set(), e
            while cur in parents and cur not in seen:
                seen.add(cur)
                cur = parents[cur]
                chain.add(cur)
            preds[e] = chain
        return cls(elements, preds)

    def minimal_elements(self):
        return [e for e in self.elements if not self.predecessors[e]]

    @property
    def root(self):
        minimal = self.minimal_elements()
        return minimal[0] if len(minimal) == 1 else None

    def depth(self, i):
        return len(self.predecessors[i])

    def predecessor(self, i):
        """Prédécesseur immédiat p(i) : le plus grand des éléments ≺ i"""
        if i not in self.predecessors:
            raise SchemaError(f"élément inconnu : {i}", 'order')
        preds = self.predecessors[i]
        if not preds:
            raise RootHasNoPredecessor(f"la racine {i} n'a pas de prédécesseur")
        return max(preds, key=lambda h: (len(self.predecessors.get(h, ())), str(h)))

    def children(self, i):
        return [j for j in self.elements if self.predecessors[j] and self.predecessor(j) == i]


@dataclass(frozen=True)
class SphereTree:
    order: RootedOrder
    attach: dict = field(default_factory=dict)

    @property
    def root(self):
        return self.order.root

    def edges(self):
        return [(i, self.order.predecessor(i), self.attach.get(i)) for i in self.order.elements
                if self.order.predecessors[i]]

    def nodal_config(self):
        """Surface nodale : une sphère par élément, le point ∞ de i collé à z_i sur p(i)"""
        index = {e: k for k, e in enumerate(self.order.elements)}
        pairs = [((index[p], complex(z)), (index[i], complex(np.inf))) for i, p, z in self.edges()]
        return NodalConfig(genera=(0,) * len(index), identified_pairs=tuple(pairs))

    def to_json(self):
        return {
            "nodes": list(self.order.elements),
            "root": self.root,
            "edges": [{"child": i, "parent": p, "z": encode_complex(z)} for i, p, z in self.edges()],
        }

    @classmethod
    def from_json(cls, doc):
        try:
            nodes = list(doc["nodes"])
            root = doc["root"]
            edges = doc.get("edges", [])
            parents = {e["child"]: e["parent"] for e in edges}
            attach = {e["child"]: decode_complex(e["z"], 'edges.z') for e in edges}
        except (KeyError, TypeError) as e:
            raise SchemaError(f"arbre mal formé : {e}", 'tree') from e
        if root not in nodes:
            raise SchemaError("la racine doit figurer parmi les nœuds", 'root')
        ordered = [root] + [n for n in nodes if n != root]
        return cls(RootedOrder.from_parents(parents, root, ordered), attach)


@dataclass(frozen=True)
class NodalConfig:
    genera: tuple
    identified_pairs: tuple

    def __post_init__(self):
        counts = Counter()
        for first, second in self.identified_pairs:
            for comp, z in (first, second):
                if not 0 <= comp < len(self.genera):
                    raise SchemaError(f"composante inconnue : {comp}", 'identified_pairs')
                counts[(comp, _point_key(z))] += 1
        doubled = [k for k, v in counts.items() if v > 1]
        if doubled:
            raise SchemaError("un point ne peut être identifié qu'à un seul autre point", 'identified_pairs')


def _point_key(z):
    z = complex(z)
    if np.isinf(z):
        return ('inf',)
    step = Config.TAU_PT
    return (round(z.real / step), round(z.imag / step))


def arithmetic_genus(config):
    """(2 − χ + |S|)/2 avec χ = Σ(2 − 2g) et |S| = 2 × nombre de paires"""
    chi = sum(2 - 2 * g for g in config.genera)
    special = 2 * len(config.identified_pairs)
    return (2 - chi + special) // 2


def validate(t):
    """
    Violations des axiomes d'un arbre de sphères (liste vide si valide).

    Axiomes : ordre strict (ORDER), racine unique (RS1), prédécesseurs deux à
    deux comparables (RS2), attache de chaque non-racine (ATTACHMENT) et
    injectivité de (p(i), z_i) (INJECTIVITY).
    """
    order = t.order
    known = set(order.elements)
    preds = order.predecessors
    found = []

    for i in order.elements:
        if i in preds[i]:
            found.append(Violation(ORDER, (i,), f"{i} ≺ {i} : ordre non irréflexif"))
        for h in sorted(preds[i] - known, key=str):
            found.append(Violation(ORDER, (i, h), f"prédécesseur inconnu {h} de {i}"))
        for h in sorted(preds[i] & known, key=str):
            if h != i and i in preds[h]:
                found.append(Violation(ORDER, (i, h), f"{i} et {h} se précèdent mutuellement"))
            for g in sorted(preds[h] - preds[i] - {i}, key=str):
                found.append(Violation(ORDER, (i, h, g), f"transitivité : {g} ≺ {h} ≺ {i}"))

    minimal = order.minimal_elements()
    if len(minimal) != 1:
        found.append(Violation(RS1, tuple(minimal), f"{len(minimal)} éléments minimaux au lieu d'un"))
        root = None
    else:
        root = minimal[0]
        for h in order.elements:
            if h != root and root not in preds[h]:
                found.append(Violation(RS1, (root, h), f"la racine {root} ne précède pas {h}"))

    comparable_ok = set()
    for i in order.elements:
        ok = True
        for h1, h2 in combinations(sorted(preds[i] & known, key=str), 2):
            if h1 not in preds[h2] and h2 not in preds[h1]:
                found.append(Violation(RS2, (i, h1, h2), f"{h1} et {h2} précèdent {i} sans être comparables"))
                ok = False
        if ok and preds[i] and preds[i] <= known:
            comparable_ok.add(i)

    if root is not None:
        for i in order.elements:
            if i != root and i not in t.attach:
                found.append(Violation(ATTACHMENT, (i,), f"point d'attache manquant pour {i}"))
        by_parent = {}
        for i in order.elements:
            if i in comparable_ok and i in t.attach:
                by_parent.setdefault(order.predecessor(i), []).append(i)
        for parent, kids in by_parent.items():
            for i1, i2 in combinations(kids, 2):
                z1, z2 = complex(t.attach[i1]), complex(t.attach[i2])
                if abs(z1 - z2) <= Config.TAU_PT * max(1.0, abs(z1)):
                    found.append(Violation(INJECTIVITY, (i1, i2),
                                           f"{i1} et {i2} attachés au même point de {parent}"))
    return found


@dataclass(frozen=True)
class ComponentDecor:
    degree: int
    constant: bool
    special_point_count: int


@dataclass(frozen=True)
class DecoratedTree:
    tree: SphereTree
    decor: dict

    @classmethod
    def from_tree(cls, tree, degrees, marked=None):
        """Décoration : nœuds vers les enfants, nœud vers le parent et points marqués"""
        marked = marked or {}
        order = tree.order
        decor = {}
        for i in order.elements:
            nodes = len(order.children(i)) + (1 if order.predecessors[i] else 0)
            degree = int(degrees.get(i, 0))
            decor[i] = ComponentDecor(degree=degree, constant=degree == 0,
                                      special_point_count=nodes + int(marked.get(i, 0)))
        return cls(tree, decor)

    def to_json(self):
        doc = self.tree.to_json()
        order = self.tree.order
        doc["decor"] = {
            str(i): {"degree": d.degree,
                     "marked": d.special_point_count - len(order.children(i)) - (1 if order.predecessors[i] else 0)}
            for i, d in self.decor.items()
        }
        return doc

    @classmethod
    def from_json(cls, doc):
        tree = SphereTree.from_json(doc)
        raw = doc.get("decor", {})
        if not isinstance(raw, dict):
            raise SchemaError("decor doit être un objet", 'decor')
        degrees, marked = {}, {}
        for i in tree.order.elements:
            entry = raw.get(str(i), {})
            degrees[i] = entry.get("degree", 0)
            marked[i] = entry.get("marked", 0)
            if not isinstance(degrees[i], int) or degrees[i] < 0:
                raise SchemaError("degré entier positif ou nul attendu", f'decor.{i}.degree')
        return cls.from_tree(tree, degrees, marked)


def stability_check(t):
    """
    Stabilité : toute composante constante de genre 0 porte au moins 3 points spéciaux.

    Returns:
        tuple: (stable, liste des composantes fautives)
    """
    offenders = [i for i, d in t.decor.items() if d.constant and d.special_point_count < 3]
    if offenders:
        logger.info(f"Composantes instables : {offenders}")
    return not offenders, offenders


def predecessor(t, i):
    return t.predecessor(i)


# ----------------------------------------------------------------------
# Générateur aléatoire et mutations
# ----------------------------------------------------------------------

def random_sphere_tree(rng, size):
    """Arbre à attache uniforme : le nœud i choisit son parent parmi 0..i−1"""
    parents = {i: int(rng.integers(0, i)) for i in range(1, size)}
    attach = {i: complex(rng.normal(), rng.normal()) for i in range(1, size)}
    return SphereTree(RootedOrder.from_parents(parents, 0, range(size)), attach)


def remove_root(t):
    """Retire la racine de l'ensemble sans toucher aux listes de prédécesseurs"""
    root = t.root
    elements = [e for e in t.order.elements if e != root]
    return SphereTree(RootedOrder(elements, {e: t.order.predecessors[e] for e in elements}),
                      {e: z for e, z in t.attach.items() if e != root})


def duplicate_attachment(t):
    """Ajoute un frère attaché au même point qu'un nœud existant"""
    source = next(e for e in t.order.elements if t.order.predecessors[e])
    new = max(t.order.elements) + 1
    preds = dict(t.order.predecessors)
    preds[new] = t.order.predecessors[source]
    attach = dict(t.attach)
    attach[new] = t.attach[source]
    return SphereTree(RootedOrder(list(t.order.elements) + [new], preds), attach)


def incomparable_predecessors(t):
    """Ajoute deux enfants x, y de la racine et un nœud précédé à la fois par x et y"""
    root = t.root
    x = max(t.order.elements) + 1
    y, z = x + 1, x + 2
    preds = dict(t.order.predecessors)
    preds[x] = frozenset({root})
    preds[y] = frozenset({root})
    preds[z] = frozenset({root, x, y})
    attach = dict(t.attach)
    attach.update({x: complex(10.0, 0.0), y: complex(11.0, 0.0), z: complex(12.0, 0.0)})
    return SphereTree(RootedOrder(list(t.order.elements) + [x, y, z], preds), attach)
