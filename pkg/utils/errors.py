# utils/errors.py
"""Hiérarchie d'exceptions du projet ; chaque famille porte son code de sortie CLI."""


class GromovError(Exception):
    """Classe de base de toutes les erreurs du projet"""
    exit_code = 1


class InputError(GromovError):
    """Entrée invalide (document, polynôme, région...)"""
    exit_code = 2


class NumericalError(GromovError):
    """Budget numérique épuisé ou procédure non convergente"""
    exit_code = 3


# Erreurs d'entrée
class ZeroPolynomial(InputError):
    pass


class ZeroTuple(InputError):
    pass


class ZeroScale(InputError):
    pass


class ZeroVector(InputError):
    pass


class ConstantCurve(InputError):
    pass


class NotCoprime(InputError):
    pass


class RegionError(InputError):
    pass


class ImageTooLarge(InputError):
    pass


class NonzeroMean(InputError):
    pass


class RootHasNoPredecessor(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (ligne {line}, colonne {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(InputError):
    def __init__(self, constraint, field=None):
        self.constraint = constraint
        self.field = field
        where = f" [{field}]" if field else ""
        super().__init__(f"{constraint}{where}")


# Erreurs numériques
class QuadratureBudgetExceeded(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NoSolution(NumericalError):
    pass


class DepthExceeded(NumericalError):
    pass


class ConservationError(NumericalError):
    pass
