"""The four parametric families on the positive half axis.

Each family is known through the quantities the estimators actually
consume:

* the density score ``u(x) = p'(x) / p(x)``, which is free of the
  normalization constant,
* the distribution function where it exists in closed form (all
  families except the exponential-polynomial model),
* an exact sampler.

Families and parameter spaces:

* ``EXPONENTIAL``  rate ``theta > 0``,   ``p(x) ∝ exp(-theta x)``
* ``RAYLEIGH``     scale ``theta > 0``,  ``p(x) ∝ x exp(-x^2 / (2 theta^2))``
* ``BURR``         shape ``(c, k) > 0``, ``p(x) ∝ x^(c-1) (1 + x^c)^(-k-1)``
* ``EXP_POLY``     ``(theta1, theta3)``, ``theta3 < 0``,
  ``p(x) ∝ exp(theta1 x + theta3 x^3)`` with intractable normalizer
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._stable import log_expm1, sigmoid, softplus
from .errors import DomainError, UnsupportedFamilyError

__all__ = [
    "Family",
    "ParamVector",
    "Sample",
    "exponential",
    "rayleigh",
    "burr",
    "exp_poly",
    "in_param_space",
    "score",
    "log_unnormalized_density",
    "cdf",
    "inverse_cdf",
    "sample",
]


class Family(enum.Enum):
    EXPONENTIAL = "exponential"
    RAYLEIGH = "rayleigh"
    BURR = "burr"
    EXP_POLY = "exp_poly"


PARAM_DIM = {
    Family.EXPONENTIAL: 1,
    Family.RAYLEIGH: 1,
    Family.BURR: 2,
    Family.EXP_POLY: 2,
}


def in_param_space(family: Family, values) -> bool:
    """Decide membership of ``values`` in the family's parameter space."""
    values = tuple(float(v) for v in values)
    if len(values) != PARAM_DIM[family]:
        return False
    if not all(np.isfinite(values)):
        return False
    if family is Family.EXPONENTIAL or family is Family.RAYLEIGH:
        return values[0] > 0.0
    if family is Family.BURR:
        return values[0] > 0.0 and values[1] > 0.0
    return values[1] < 0.0  # EXP_POLY: theta1 free, theta3 negative


@dataclass(frozen=True)
class ParamVector:
    """A family-tagged parameter point, validated on construction."""

    family: Family
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not in_param_space(self.family, self.values):
            raise DomainError(
                f"{self.values} is outside the parameter space of {self.family.value}"
            )

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @classmethod
    def unchecked(cls, family: Family, values) -> "ParamVector":
        """Carry a raw estimate that may lie outside the parameter space.

        Only for reporting estimator output verbatim; every evaluation
        entry point still validates through the normal constructor.
        """
        obj = object.__new__(cls)
        object.__setattr__(obj, "family", family)
        object.__setattr__(obj, "values", tuple(float(v) for v in values))
        return obj


def exponential(theta: float) -> ParamVector:
    return ParamVector(Family.EXPONENTIAL, (theta,))


def rayleigh(theta: float) -> ParamVector:
    return ParamVector(Family.RAYLEIGH, (theta,))


def burr(c: float, k: float) -> ParamVector:
    return ParamVector(Family.BURR, (c, k))


def exp_poly(theta1: float, theta3: float) -> ParamVector:
    return ParamVector(Family.EXP_POLY, (theta1, theta3))


@dataclass(frozen=True)
class Sample:
    """An ordered batch of strictly positive observations.

    ``values`` is stored ascending so order statistics are available by
    index.  Use :meth:`from_data` for unsorted input.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise DomainError("sample must be a nonempty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        if np.any(arr <= 0.0):
            raise DomainError("sample contains nonpositive values")
        if np.any(np.diff(arr) < 0.0):
            raise DomainError("sample values must be sorted ascending")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_data(cls, data) -> "Sample":
        return cls(np.sort(np.asarray(data, dtype=float)))

    @property
    def n(self) -> int:
        return self.values.size

    def order_statistic(self, j: int) -> float:
        """j-th smallest observation, 1-based."""
        return float(self.values[j - 1])


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
        raise DomainError("evaluation points must be finite and positive")
    return x


def score(params: ParamVector, x):
    """Density score u(x) = p'(x)/p(x); scalar in, scalar out."""
    xa = _check_x(x)
    t = params.values
    if params.family is Family.EXPONENTIAL:
        out = np.full_like(xa, -t[0])
    elif params.family is Family.RAYLEIGH:
        out = 1.0 / xa - xa / t[0] ** 2
    elif params.family is Family.BURR:
        c, k = t
        # c (k+1) x^(c-1) / (1 + x^c) == c (k+1) sigmoid(c log x) / x, overflow-free
        out = ((c - 1.0) - c * (k + 1.0) * sigmoid(c * np.log(xa))) / xa
    else:
        t1, t3 = t
        out = t1 + 3.0 * t3 * xa**2
    return out if np.ndim(x) else float(out)


def log_unnormalized_density(params: ParamVector, x):
    """log p(x) up to the additive normalization constant."""
    xa = _check_x(x)
    t = params.values
    if params.family is Family.EXPONENTIAL:
        out = -t[0] * xa
    elif params.family is Family.RAYLEIGH:
        out = np.log(xa) - xa**2 / (2.0 * t[0] ** 2)
    elif params.family is Family.BURR:
        c, k = t
        out = (c - 1.0) * np.log(xa) - (k + 1.0) * softplus(c * np.log(xa))
    else:
        t1, t3 = t
        out = t1 * xa + t3 * xa**3
    return out if np.ndim(x) else float(out)


def cdf(params: ParamVector, x):
    """Distribution function; unavailable for the exp-poly family."""
    if params.family is Family.EXP_POLY:
        raise UnsupportedFamilyError(
            "the exponential-polynomial family has no closed-form distribution function"
        )
    xa = _check_x(x)
    t = params.values
    if params.family is Family.EXPONENTIAL:
        out = -np.expm1(-t[0] * xa)
    elif params.family is Family.RAYLEIGH:
        out = -np.expm1(-(xa**2) / (2.0 * t[0] ** 2))
    else:
        c, k = t
        out = -np.expm1(-k * softplus(c * np.log(xa)))
    return out if np.ndim(x) else float(out)


def inverse_cdf(params: ParamVector, u):
    """Quantile function for the three closed-form families."""
    if params.family is Family.EXP_POLY:
        raise UnsupportedFamilyError(
            "the exponential-polynomial family has no closed-form quantile function"
        )
    ua = np.asarray(u, dtype=float)
    if np.any(ua <= 0.0) or np.any(ua >= 1.0):
        raise DomainError("u must lie strictly inside (0, 1)")
    t = params.values
    if params.family is Family.EXPONENTIAL:
        out = -np.log1p(-ua) / t[0]
    elif params.family is Family.RAYLEIGH:
        out = t[0] * np.sqrt(-2.0 * np.log1p(-ua))
    else:
        c, k = t
        # ((1-u)^(-1/k) - 1)^(1/c) through logs to survive extreme quantiles
        y = -np.log1p(-ua) / k
        out = np.exp(log_expm1(y) / c)
    return out if np.ndim(u) else float(out)


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    # rng.random() covers [0, 1); push the (measure-zero) exact zeros into (0, 1)
    return np.maximum(rng.random(n), 2.0**-53)


def _sample_exp_poly(params: ParamVector, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact rejection sampler with an exponential envelope.

    The log ratio of target to proposal is concave on (0, inf), so the
    envelope constant is the value at its unique stationary point (or at
    the origin when the ratio is decreasing from the start).
    """
    t1, t3 = params.values
    if t1 < 0.0:
        lam = -t1
    else:
        mode = np.sqrt(t1 / (-3.0 * t3)) if t1 > 0.0 else 0.0
        lam = 1.0 / (mode + (-t3) ** (-1.0 / 3.0))
    m = t1 + lam
    if m > 0.0:
        x_star = np.sqrt(m / (-3.0 * t3))
        log_envelope = (2.0 / 3.0) * m * x_star - np.log(lam)
    else:
        log_envelope = -np.log(lam)

    out = np.empty(n)
    filled = 0
    accept_rate = 0.5  # running estimate used to size the next batch
    while filled < n:
        want = n - filled
        batch = max(256, int(np.ceil(1.5 * want / accept_rate)))
        x = -np.log1p(-_open_uniform(rng, batch)) / lam
        log_accept = t1 * x + t3 * x**3 + lam * x - np.log(lam) - log_envelope
        keep = np.log(_open_uniform(rng, batch)) <= log_accept
        got = x[keep]
        take = min(got.size, want)
        out[filled : filled + take] = got[:take]
        filled += take
        accept_rate = max(keep.mean(), 1.0 / batch)
    return out


def sample(params: ParamVector, n: int, rng: np.random.Generator) -> Sample:
    """Draw n i.i.d. observations; returned sorted, deterministic per stream."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    if params.family is Family.EXP_POLY:
        values = _sample_exp_poly(params, n, rng)
    else:
        values = inverse_cdf(params, _open_uniform(rng, n))
    return Sample(np.sort(values))
