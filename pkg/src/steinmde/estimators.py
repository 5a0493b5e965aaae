"""Parameter estimators: the minimum-distance fits and their competitors.

The minimum-distance ("stein") fits minimize the weighted L^2 norm of
the empirical CDF contrast from :mod:`steinmde.objective`.  They are
closed-form for the exponential family (quadratic in theta), the
Rayleigh family (quadratic in 1/theta^2), and the exp-poly family
(bivariate quadratic form); the Burr fit is a bounded 2-d quasi-Newton
minimization.

Competitors per family:

* exponential: maximum likelihood, the minimum-MSE rescaling of it, and
  the minimum Cramer-von Mises distance fit;
* Rayleigh: maximum likelihood, the (unbiased) moment fit, the
  moment-type ratio fit arising in the strong-weight-decay limit, and
  Cramer-von Mises;
* Burr: profile maximum likelihood via safeguarded Newton, and
  Cramer-von Mises;
* exp-poly (non-normalized): score matching (closed form) and
  noise-contrastive estimation with an exponential noise source, run
  entirely in log space so no objective evaluation can overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._stable import sigmoid, softplus
from .errors import (
    DegenerateSampleError,
    DomainError,
    SampleTooSmallError,
    SingularMomentsError,
    SingularSystemError,
)
from .models import (
    Family,
    ParamVector,
    Sample,
    _open_uniform,
    burr,
    exp_poly,
    exponential,
    rayleigh,
)
from .objective import (
    LqWeightConfig,
    exp_poly_l2_coeffs,
    exponential_l2_coeffs,
    l2_closed_burr,
    l2_closed_exp_poly,
    lq_norm_quadrature,
    rayleigh_l2_coeffs,
)
from .optim import minimize_bounded, newton_root_1d

__all__ = [
    "EstimateReport",
    "NceConfig",
    "fit_stein_exponential",
    "fit_mle_exponential",
    "fit_mse_exponential",
    "fit_stein_rayleigh",
    "fit_mle_rayleigh",
    "fit_moment_rayleigh",
    "fit_am_rayleigh",
    "fit_stein_burr",
    "fit_mle_burr",
    "fit_cvm",
    "fit_stein_exppoly",
    "fit_score_matching_exppoly",
    "fit_nce_exppoly",
    "fit_stein_generic",
    "VALID_ESTIMATORS",
    "resolve",
]

# Boundary used wherever "strictly negative" must be handed to a box
# optimizer, and for the exp-poly boundary refit.
NEGATIVE_CEILING = -1e-8

_POSITIVE_FLOOR = 1e-8
_BURR_FLOOR = 1e-6


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one fit.

    ``objective_at_opt`` is the value of the criterion the estimator
    minimized (NaN for plug-in formulas that minimize nothing
    explicitly).  ``params`` lies in the parameter space whenever
    ``converged`` is true.  ``aux`` carries estimator-specific extras,
    e.g. the fitted log-normalization constant of the NCE fit.
    """

    params: ParamVector
    objective_at_opt: float
    converged: bool
    fallback_used: bool = False
    iterations: int = 0
    aux: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NceConfig:
    """Noise-contrastive estimation settings.

    ``nu`` is the noise-to-data sample size multiple, ``rng`` the stream
    the noise is drawn from, ``initial`` the optimizer start for
    (theta1, theta3, log-normalizer).
    """

    nu: int = 10
    rng: np.random.Generator = None
    initial: tuple[float, float, float] = (0.0, -0.1, 0.0)
    theta3_max: float = NEGATIVE_CEILING

    def __post_init__(self):
        if self.nu < 1:
            raise DomainError("noise multiple nu must be at least 1")
        if not self.initial[1] < 0.0:
            raise DomainError("initial theta3 must be negative")
        if self.rng is None:
            raise DomainError("an explicit noise rng is required for reproducibility")


# --------------------------------------------------------------------- #
# exponential family
# --------------------------------------------------------------------- #


def fit_stein_exponential(s: Sample, a: float) -> EstimateReport:
    """Closed-form minimizer of the L^2 contrast norm: -c1 / (2 c2)."""
    c2, c1, c0 = exponential_l2_coeffs(s, a)
    if not (np.isfinite(c2) and np.isfinite(c1) and c2 > 0.0):
        raise DegenerateSampleError("quadratic coefficient of the objective is not positive")
    theta = -c1 / (2.0 * c2)
    if not theta > 0.0:
        raise DegenerateSampleError("linear coefficient of the objective is not negative")
    value = c2 * theta**2 + c1 * theta + c0
    return EstimateReport(exponential(theta), value, converged=True)


def fit_mle_exponential(s: Sample) -> EstimateReport:
    theta = s.n / float(np.sum(s.values))
    return EstimateReport(exponential(theta), math.nan, converged=True)


def fit_mse_exponential(s: Sample) -> EstimateReport:
    """Minimum-MSE rescaling of the likelihood fit; needs n >= 3."""
    if s.n < 3:
        raise SampleTooSmallError("minimum-MSE fit requires at least 3 observations")
    theta = (s.n - 2) / float(np.sum(s.values))
    return EstimateReport(exponential(theta), math.nan, converged=True)


# --------------------------------------------------------------------- #
# Rayleigh family
# --------------------------------------------------------------------- #


def fit_stein_rayleigh(s: Sample, a: float) -> EstimateReport:
    """Closed-form minimizer: sqrt(-2 c2 / c1) in the 1/theta^2 quadratic."""
    c2, c1, c0 = rayleigh_l2_coeffs(s, a)
    if not (np.isfinite(c2) and np.isfinite(c1) and c2 > 0.0 and c1 < 0.0):
        raise DegenerateSampleError("objective coefficients violate their sign laws")
    theta = math.sqrt(-2.0 * c2 / c1)
    w = theta**-2
    return EstimateReport(rayleigh(theta), c2 * w**2 + c1 * w + c0, converged=True)


def fit_mle_rayleigh(s: Sample) -> EstimateReport:
    theta = math.sqrt(float(np.sum(s.values**2)) / (2.0 * s.n))
    return EstimateReport(rayleigh(theta), math.nan, converged=True)


def fit_moment_rayleigh(s: Sample) -> EstimateReport:
    theta = math.sqrt(2.0 / math.pi) * float(np.mean(s.values))
    return EstimateReport(rayleigh(theta), math.nan, converged=True)


def fit_am_rayleigh(s: Sample) -> EstimateReport:
    """Moment-type ratio fit sqrt(mean X / mean 1/X) from the strong-decay limit."""
    theta = math.sqrt(float(np.mean(s.values)) / float(np.mean(1.0 / s.values)))
    return EstimateReport(rayleigh(theta), math.nan, converged=True)


# --------------------------------------------------------------------- #
# Burr family
# --------------------------------------------------------------------- #


def fit_stein_burr(s: Sample, a: float, init=(1.0, 1.0)) -> EstimateReport:
    """Bounded quasi-Newton minimization of the closed-form L^2 objective."""
    x0 = init.as_array() if isinstance(init, ParamVector) else np.asarray(init, dtype=float)
    res = minimize_bounded(
        lambda v: l2_closed_burr(v[0], v[1], s, a),
        x0=x0,
        lower=(_BURR_FLOOR, _BURR_FLOOR),
        upper=(math.inf, math.inf),
    )
    return EstimateReport(
        burr(res.point[0], res.point[1]),
        res.value,
        converged=res.converged,
        iterations=res.iterations,
    )


def _burr_profile_score(s: Sample):
    """Profile likelihood equation for the first Burr shape, overflow-free."""
    x = s.values
    log_x = np.log(x)
    sum_log = float(np.sum(log_x))
    n = s.n

    def f(c: float) -> float:
        t = c * log_x
        sp = float(np.sum(softplus(t)))  # sum log(1 + x^c)
        sg = float(np.sum(sigmoid(t) * log_x))  # sum x^c log x / (1 + x^c)
        return n / c + sum_log - (n / sp + 1.0) * sg

    return f


def burr_profile_k(s: Sample, c: float) -> float:
    """Plug-in second shape given the first: n / sum log(1 + x^c)."""
    return s.n / float(np.sum(softplus(c * np.log(s.values))))


def fit_mle_burr(s: Sample) -> EstimateReport:
    """Profile maximum likelihood: Newton on the first shape, then plug-in.

    Non-convergence (no root of the profile equation inside the working
    bracket, or a stalled iteration) is flagged, not raised; small-sample
    Burr likelihoods genuinely lack a maximum now and then.
    """
    f = _burr_profile_score(s)
    try:
        res = newton_root_1d(f, x0=1.0, tol=1e-10, max_iter=200, bracket=(1e-3, 1e3))
        c_hat = float(res.point[0])
        converged = res.converged
        iterations = res.iterations
        residual = abs(res.value)
    except DegenerateSampleError:
        raise
    except Exception:  # NoSignChangeError and kin: report, do not propagate
        c_hat, converged, iterations, residual = 1.0, False, 0, math.inf
    k_hat = burr_profile_k(s, c_hat)
    return EstimateReport(
        burr(c_hat, k_hat),
        math.nan,
        converged=converged,
        iterations=iterations,
        aux={"profile_residual": residual},
    )


# --------------------------------------------------------------------- #
# minimum Cramer-von Mises distance
# --------------------------------------------------------------------- #


def _cvm_objective(family: Family, s: Sample):
    x = s.values
    n = s.n
    w = (2.0 * np.arange(1, n + 1) - 1.0) / n - 2.0
    if family is Family.EXPONENTIAL:

        def f(v):
            theta = v[0]
            e = np.exp(-theta * x)
            return float(np.mean(e * e + e * w))

    elif family is Family.RAYLEIGH:

        def f(v):
            theta = v[0]
            z = x**2 / (2.0 * theta**2)
            return float(np.mean(w * np.exp(-z) + np.exp(-2.0 * z)))

    elif family is Family.BURR:
        log_x = np.log(x)

        def f(v):
            c, k = v
            surv = np.exp(-k * softplus(c * log_x))  # (1 + x^c)^(-k)
            return float(np.mean(surv * (w + surv)))

    else:
        raise DomainError(f"no Cramer-von Mises objective for {family.value}")
    return f


def fit_cvm(family: Family, s: Sample, init: ParamVector | None = None) -> EstimateReport:
    """Minimum Cramer-von Mises distance fit, started at maximum likelihood."""
    if init is None:
        if family is Family.EXPONENTIAL:
            init = fit_mle_exponential(s).params
        elif family is Family.RAYLEIGH:
            init = fit_mle_rayleigh(s).params
        elif family is Family.BURR:
            ml = fit_mle_burr(s)
            init = ml.params if ml.converged else burr(1.0, 1.0)
        else:
            raise DomainError(f"no Cramer-von Mises fit for {family.value}")
    obj = _cvm_objective(family, s)
    x0 = init.as_array()
    lower = np.full(x0.shape, _POSITIVE_FLOOR)
    res = minimize_bounded(obj, x0=x0, lower=lower, upper=np.full(x0.shape, math.inf))
    params = ParamVector(family, tuple(res.point))
    return EstimateReport(
        params, res.value, converged=res.converged, iterations=res.iterations
    )


# --------------------------------------------------------------------- #
# exponential-polynomial family (non-normalized)
# --------------------------------------------------------------------- #


def fit_stein_exppoly(s: Sample, a: float) -> EstimateReport:
    """Stationary point of the bivariate quadratic objective.

    When the unconstrained solution has a nonnegative cubic coefficient
    (outside the model space) the quadratic is re-minimized on the
    boundary theta3 = -1e-8 and the report is flagged ``fallback_used``.
    """
    lin2, cub2, lin_cub, lin, cub, const = exp_poly_l2_coeffs(s, a)
    det = 4.0 * lin2 * cub2 - lin_cub**2
    if not np.isfinite(det) or det <= 0.0:
        raise SingularSystemError("normal equations of the quadratic objective are singular")
    theta1 = (lin_cub * cub - 2.0 * cub2 * lin) / det
    theta3 = (lin_cub * lin - 2.0 * lin2 * cub) / det
    fallback = False
    if theta3 >= 0.0:
        if not lin2 > 0.0:
            raise SingularSystemError("boundary refit impossible: leading coefficient <= 0")
        theta3 = NEGATIVE_CEILING
        theta1 = -(lin_cub * theta3 + lin) / (2.0 * lin2)
        fallback = True
    value = (
        lin2 * theta1**2
        + cub2 * theta3**2
        + lin_cub * theta1 * theta3
        + lin * theta1
        + cub * theta3
        + const
    )
    return EstimateReport(
        exp_poly(theta1, theta3), value, converged=True, fallback_used=fallback
    )


def score_matching_objective(theta1: float, theta3: float, s: Sample) -> float:
    """The non-negative score-matching criterion (no normalizer involved)."""
    x = s.values
    poly = theta1 * x + 3.0 * theta3 * x**3
    return float(np.mean(2.0 * theta1 * x + 12.0 * theta3 * x**3 + 0.5 * poly**2))


def fit_score_matching_exppoly(s: Sample) -> EstimateReport:
    """Closed-form score-matching fit from the first six power sums.

    The formula is explicit and unconstrained; if it lands outside the
    model space (nonnegative cubic coefficient) the report carries the
    raw value with ``converged=False`` so batch drivers can count it.
    """
    x = s.values
    m1, m2, m3, m4, m6 = (float(np.sum(x**k)) for k in (1, 2, 3, 4, 6))
    den = 3.0 * m4**2 - 3.0 * m2 * m6
    if den == 0.0 or not np.isfinite(den):
        raise SingularMomentsError("moment system of the score-matching fit is singular")
    theta3 = (4.0 * m2 * m3 - 2.0 * m1 * m4) / den
    theta1 = -2.0 * m1 / m2 - (3.0 * m4 / m2) * theta3
    value = score_matching_objective(theta1, theta3, s)
    if theta3 < 0.0:
        return EstimateReport(exp_poly(theta1, theta3), value, converged=True)
    raw = ParamVector.unchecked(Family.EXP_POLY, (theta1, theta3))
    return EstimateReport(raw, value, converged=False)


def nce_objective_factory(s: Sample, noise: np.ndarray, nu: int, lam: float):
    """Logistic discrimination objective, in log space throughout.

    Every exponential is reached only through log1p(exp(.)), so the
    value is finite for any parameter point and any data magnitude.
    """
    x = s.values
    t_n = noise.size
    log_k = math.log(nu * lam)

    def j(v: np.ndarray) -> float:
        theta1, theta3, c = v
        zx = log_k - (lam + theta1) * x - theta3 * x**3 - c
        zy = log_k - (lam + theta1) * noise - theta3 * noise**3 - c
        val = float(np.mean(softplus(zx)) + (nu / t_n) * np.sum(softplus(-zy)))
        if not np.isfinite(val):
            raise ArithmeticError("noise-contrastive objective left the finite range")
        return val

    return j


def fit_nce_exppoly(s: Sample, cfg: NceConfig) -> EstimateReport:
    """Noise-contrastive fit with Exp(n / sum X) noise, nu * n noise draws.

    Treats the log-normalizer as a third free parameter; at the optimum
    the fitted density is approximately normalized.
    """
    lam = s.n / float(np.sum(s.values))
    t_n = cfg.nu * s.n
    noise = -np.log1p(-_open_uniform(cfg.rng, t_n)) / lam
    obj = nce_objective_factory(s, noise, cfg.nu, lam)
    res = minimize_bounded(
        obj,
        x0=np.asarray(cfg.initial, dtype=float),
        lower=(-math.inf, -math.inf, -math.inf),
        upper=(math.inf, cfg.theta3_max, math.inf),
    )
    theta1, theta3, c = res.point
    return EstimateReport(
        exp_poly(theta1, theta3),
        res.value,
        converged=res.converged,
        iterations=res.iterations,
        aux={"log_norm": float(c)},
    )


# --------------------------------------------------------------------- #
# generic minimum-distance fit (any q >= 1, quadrature objective)
# --------------------------------------------------------------------- #

_GENERIC_BOUNDS = {
    Family.EXPONENTIAL: ((_POSITIVE_FLOOR,), (math.inf,)),
    Family.RAYLEIGH: ((_POSITIVE_FLOOR,), (math.inf,)),
    Family.BURR: ((_BURR_FLOOR, _BURR_FLOOR), (math.inf, math.inf)),
    Family.EXP_POLY: ((-math.inf, -math.inf), (math.inf, NEGATIVE_CEILING)),
}


def fit_stein_generic(
    family: Family, s: Sample, cfg: LqWeightConfig, init: ParamVector
) -> EstimateReport:
    """Numeric minimum-distance fit through the quadrature objective.

    Slower than the specialized q = 2 paths but valid for any exponent
    q >= 1 (and, via the quadrature hooks, for other weights).
    """
    lower, upper = _GENERIC_BOUNDS[family]

    def obj(v):
        return lq_norm_quadrature(ParamVector(family, tuple(v)), s, cfg).value

    res = minimize_bounded(obj, x0=init.as_array(), lower=lower, upper=upper)
    return EstimateReport(
        ParamVector(family, tuple(res.point)),
        res.value,
        converged=res.converged,
        iterations=res.iterations,
    )


# --------------------------------------------------------------------- #
# estimator registry (shared by the Monte Carlo engine and the CLI)
# --------------------------------------------------------------------- #

VALID_ESTIMATORS = {
    Family.EXPONENTIAL: ("ml", "mse", "cvm", "stein"),
    Family.RAYLEIGH: ("ml", "mom", "am", "cvm", "stein"),
    Family.BURR: ("ml", "cvm", "stein"),
    Family.EXP_POLY: ("sm", "nce", "stein"),
}


def resolve(family: Family, estimator_id: str):
    """Return ``fit(sample, tuning, noise_rng) -> EstimateReport``.

    ``tuning`` is the weight decay for "stein" fits and the noise
    multiple for "nce"; other estimators ignore it.
    """
    if estimator_id not in VALID_ESTIMATORS[family]:
        raise DomainError(f"estimator {estimator_id!r} is not defined for {family.value}")

    if estimator_id == "stein":

        def fit(s, tuning, noise_rng=None):
            if tuning is None:
                raise DomainError("the minimum-distance fit needs a weight decay value")
            if family is Family.EXPONENTIAL:
                return fit_stein_exponential(s, tuning)
            if family is Family.RAYLEIGH:
                return fit_stein_rayleigh(s, tuning)
            if family is Family.BURR:
                return fit_stein_burr(s, tuning)
            return fit_stein_exppoly(s, tuning)

    elif estimator_id == "nce":

        def fit(s, tuning, noise_rng=None):
            nu = 10 if tuning is None else int(tuning)
            return fit_nce_exppoly(s, NceConfig(nu=nu, rng=noise_rng))

    elif estimator_id == "cvm":

        def fit(s, tuning, noise_rng=None):
            return fit_cvm(family, s)

    else:
        plain = {
            (Family.EXPONENTIAL, "ml"): fit_mle_exponential,
            (Family.EXPONENTIAL, "mse"): fit_mse_exponential,
            (Family.RAYLEIGH, "ml"): fit_mle_rayleigh,
            (Family.RAYLEIGH, "mom"): fit_moment_rayleigh,
            (Family.RAYLEIGH, "am"): fit_am_rayleigh,
            (Family.BURR, "ml"): fit_mle_burr,
            (Family.EXP_POLY, "sm"): fit_score_matching_exppoly,
        }[(family, estimator_id)]

        def fit(s, tuning, noise_rng=None):
            return plain(s)

    return fit
