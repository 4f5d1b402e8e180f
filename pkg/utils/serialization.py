# utils/serialization.py
import json
import math
import numpy as np
import logging
from utils.errors import ParseError, SchemaError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def encode_complex(z):
    """Encoder un nombre complexe en paire [re, im] (le point ∞ devient "inf")"""
    z = complex(z)
    if math.isinf(z.real) or math.isinf(z.imag):
        return "inf"
    return [encode_float(z.real), encode_float(z.imag)]


def decode_complex(value, field=None):
    """Décoder une paire [re, im] (ou un réel seul) en complexe"""
    if isinstance(value, bool):
        raise SchemaError("nombre complexe attendu sous la forme [re, im]", field)
    if value == "inf":
        return complex(math.inf, 0.0)
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2 \
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        return complex(float(value[0]), float(value[1]))
    raise SchemaError("nombre complexe attendu sous la forme [re, im]", field)


def encode_float(x):
    """Flottant JSON ; les non-finis deviennent des chaînes"""
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def encode_coefficients(coeffs):
    return [encode_complex(c) for c in np.asarray(coeffs).ravel()]


def decode_coefficients(values, field=None):
    if not isinstance(values, list) or not values:
        raise SchemaError("liste de coefficients non vide attendue", field)
    return np.array([decode_complex(v, field) for v in values], dtype=complex)


def to_jsonable(obj):
    """Convertir récursivement les types numpy et complexes en types JSON"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if hasattr(obj, 'to_json'):
        return to_jsonable(obj.to_json())
    return obj


def dumps(document):
    """Sérialisation déterministe d'un rapport"""
    return json.dumps(to_jsonable(document), indent=2, allow_nan=False, ensure_ascii=False)


def loads(text, source='<entrée>'):
    """Parser un document JSON en signalant la position de l'erreur"""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"JSON invalide dans {source}: {e.msg}")
        raise ParseError(f"JSON invalide dans {source}: {e.msg}", line=e.lineno, column=e.colno) from e


def check_schema_version(document):
    if not isinstance(document, dict):
        raise SchemaError("le document doit être un objet JSON")
    version = document.get('schema')
    if version != SCHEMA_VERSION:
        raise SchemaError(f"version de schéma {SCHEMA_VERSION} attendue", 'schema')
    return document
