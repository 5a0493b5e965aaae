"""Overflow-safe scalar primitives used across the objective formulas."""

import numpy as np


def softplus(z):
    """log(1 + e^z), exact for large |z| without overflow."""
    z = np.asarray(z, dtype=float)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def sigmoid(z):
    """1 / (1 + e^-z), evaluated on the side that cannot overflow."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_expm1(y):
    """log(e^y - 1) for y > 0; linearizes to y once e^-y is negligible."""
    y = np.asarray(y, dtype=float)
    small = y <= 30.0
    out = np.where(small, np.log(np.expm1(np.where(small, y, 1.0))), y)
    return out
