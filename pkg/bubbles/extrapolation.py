# bubbles/extrapolation.py
"""Extrapolation polynomiale vers 0 (tableau de Neville) pour des suites vectorielles"""
import numpy as np


def neville_limit(nodes, values):
    """
    Valeur en 0 du polynôme interpolant (nodes[i], values[i]).

    Args:
        nodes (array): abscisses distinctes (pas h = 1/k, δ², ...)
        values (list): valeurs scalaires ou tableaux de même forme

    Returns:
        ndarray: extrapolation en 0
    """
    h = np.asarray(nodes, dtype=float)
    level = [np.asarray(v) for v in values]
    if len(level) != h.size or not level:
        raise ValueError("autant de valeurs que de nœuds sont nécessaires")
    n = len(level)
    for m in range(1, n):
        level = [(h[i + m] * level[i] - h[i] * level[i + 1]) / (h[i + m] - h[i]) for i in range(n - m)]
    return level[0]


def last_two_extrapolants(nodes, values, depth):
    """
    Extrapolants sur les `depth` et `depth − 1` derniers points.

    Leur écart sert d'estimation d'erreur.
    """
    depth = min(depth, len(values))
    best = neville_limit(nodes[-depth:], values[-depth:])
    previous = neville_limit(nodes[-(depth - 1):], values[-(depth - 1):]) if depth > 1 else best
    return best, previous
