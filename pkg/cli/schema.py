# cli/schema.py
"""
Documents d'entrée versionnés ("schema": 1) : courbe, famille, arbre ou
configuration de vérification. Le type est lu dans "kind" ou déduit des
champs présents.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from utils.errors import InputError, SchemaError, ParseError
from utils.serialization import loads, check_schema_version
from geometry.poly_core import MapTuple
from bubbles.bubble_analysis import family_from_json
from bubbles.tree_of_spheres import DecoratedTree
from lab.checks import CHECKS

logger = logging.getLogger(__name__)

KINDS = ("curve", "family", "tree", "verify-config")
# un rapport d'arbre de bulles se relit comme un arbre décoré
_ALIASES = {"bubble-tree": "tree"}
_MARKERS = (("tuple", "curve"), ("samples", "family"), ("nodes", "tree"), ("checks", "verify-config"))


@dataclass(frozen=True)
class InputDocument:
    kind: str
    payload: dict
    value: object
    source: str = '<entrée>'


def infer_kind(doc):
    kind = doc.get("kind")
    if kind is not None:
        kind = _ALIASES.get(kind, kind)
        if kind not in KINDS:
            raise SchemaError(f"kind parmi {list(KINDS) + list(_ALIASES)}", 'kind')
        return kind
    for marker, kind in _MARKERS:
        if marker in doc:
            return kind
    raise SchemaError("champ kind absent et non déductible", 'kind')


def _curve(doc):
    t = MapTuple.from_json(doc.get("tuple"), 'tuple')
    if "n" in doc and doc["n"] != t.n:
        raise SchemaError(f"n = {doc['n']} ne correspond pas aux {t.n} entrées", 'n')
    if "degree" in doc and doc["degree"] != t.degree:
        raise SchemaError("common degree", 'degree')
    return t


def _family(doc):
    if not isinstance(doc.get("samples"), list) or not doc["samples"]:
        raise SchemaError("liste d'échantillons non vide attendue", 'samples')
    fam = family_from_json(doc)
    if "n" in doc and doc["n"] != fam.n:
        raise SchemaError(f"n = {doc['n']} ne correspond pas aux échantillons", 'n')
    if "degree" in doc and doc["degree"] != fam.degree:
        raise SchemaError("common degree", 'degree')
    return fam


def _verify_config(doc):
    checks = doc.get("checks")
    if not isinstance(checks, list) or not checks:
        raise SchemaError("liste de vérifications non vide attendue", 'checks')
    entries = []
    for k, entry in enumerate(checks):
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict) or entry.get("name") not in CHECKS:
            raise SchemaError(f"nom de vérification parmi {sorted(CHECKS)}", f'checks.{k}.name')
        for key in ("seed", "samples"):
            if key in entry and (not isinstance(entry[key], int) or entry[key] < 0):
                raise SchemaError("entier positif attendu", f'checks.{k}.{key}')
        if not isinstance(entry.get("params", {}), dict):
            raise SchemaError("objet attendu", f'checks.{k}.params')
        entries.append(entry)
    return entries


_BUILDERS = {
    "curve": _curve,
    "family": _family,
    "tree": DecoratedTree.from_json,
    "verify-config": _verify_config,
}


def parse_document(doc, source='<entrée>'):
    """Validation d'un document déjà décodé"""
    check_schema_version(doc)
    kind = infer_kind(doc)
    value = _BUILDERS[kind](doc)
    logger.debug(f"Document {kind} chargé depuis {source}")
    return InputDocument(kind=kind, payload=doc, value=value, source=source)


def load(path):
    """
    Charger et valider un fichier d'entrée

    Args:
        path (str): chemin du fichier JSON

    Returns:
        InputDocument: document validé
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise InputError(f"lecture impossible de {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} n'est pas un texte UTF-8 : octet invalide en position {e.start}") from e
    return parse_document(loads(text, str(path)), str(path))


def expect(document, *kinds):
    if document.kind not in kinds:
        raise SchemaError(f"document de type {' ou '.join(kinds)} attendu, reçu {document.kind}", 'kind')
    return document.value
