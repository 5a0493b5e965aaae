"""Small optimization toolkit behind the numeric estimators.

``newton_root_1d`` and ``golden_section_1d`` are self-contained;
``minimize_bounded`` delegates to scipy's L-BFGS-B behind this module's
contract (box feasibility of every iterate, monotone objective across
accepted iterates, convergence judged on the projected gradient) while
supplying its own finite-difference gradient: forward steps of size
1e-7 * max(1, |x_i|), switched to a two-sided stencil when the forward
point would leave the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import InvalidBoundsError, NoSignChangeError

__all__ = ["OptimResult", "newton_root_1d", "golden_section_1d", "minimize_bounded"]

_FD_STEP = 1e-7


@dataclass(frozen=True)
class OptimResult:
    point: np.ndarray
    value: float
    converged: bool
    iterations: int
    grad_norm: float


def newton_root_1d(
    f: Callable[[float], float],
    x0: float,
    tol: float = 1e-10,
    max_iter: int = 200,
    bracket: tuple[float, float] = (1e-3, 1e3),
) -> OptimResult:
    """Safeguarded Newton iteration for a scalar root.

    The derivative comes from a central difference.  Whenever the Newton
    step leaves the bracket (or the derivative degenerates) a bisection
    step is taken instead, which requires a sign change over the bracket;
    without one, :class:`NoSignChangeError` is raised as soon as Newton
    stalls.  ``converged`` means ``|f(root)| <= tol``.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidBoundsError("bracket must satisfy lo < hi")
    if not lo <= x0 <= hi:
        raise InvalidBoundsError("start point must lie inside the bracket")

    f_lo, f_hi = f(lo), f(hi)
    have_sign_change = np.sign(f_lo) * np.sign(f_hi) < 0

    def _result(x, fx, ok, it):
        return OptimResult(
            point=np.array([x]), value=fx, converged=ok, iterations=it, grad_norm=abs(fx)
        )

    x = float(x0)
    for it in range(1, max_iter + 1):
        fx = f(x)
        if abs(fx) <= tol:
            return _result(x, fx, True, it)
        if have_sign_change:
            if np.sign(fx) == np.sign(f_lo):
                lo, f_lo = x, fx
            else:
                hi, f_hi = x, fx
        h = 1e-6 * max(1.0, abs(x))
        df = (f(min(x + h, hi)) - f(max(x - h, lo))) / (min(x + h, hi) - max(x - h, lo))
        step_ok = np.isfinite(df) and df != 0.0
        x_new = x - fx / df if step_ok else math.inf
        if not (lo <= x_new <= hi) or not np.isfinite(x_new):
            if not have_sign_change:
                raise NoSignChangeError(
                    "bracket endpoints have equal signs and the Newton step left it"
                )
            x_new = 0.5 * (lo + hi)
        if x_new == x:
            return _result(x, fx, abs(fx) <= tol, it)
        x = x_new
    fx = f(x)
    return _result(x, fx, abs(fx) <= tol, max_iter)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_1d(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = 1e-8,
    max_iter: int = 200,
) -> OptimResult:
    """Golden-section search for a (presumed unimodal) scalar minimum.

    Returns once the enclosing interval is narrower than ``tol``.  Works
    on merely continuous objectives; no derivatives involved.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (lo < hi and np.isfinite(lo) and np.isfinite(hi)):
        raise InvalidBoundsError("bracket must be finite with lo < hi")
    c = hi - _INV_GOLDEN * (hi - lo)
    d = lo + _INV_GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    it = 0
    while hi - lo > tol and it < max_iter:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_GOLDEN * (hi - lo)
            fd = f(d)
        it += 1
    x = 0.5 * (lo + hi)
    return OptimResult(
        point=np.array([x]),
        value=f(x),
        converged=hi - lo <= tol,
        iterations=it,
        grad_norm=float("nan"),
    )


def _fd_gradient(f, x, lower, upper, central=False):
    g = np.empty_like(x)
    fx = None
    for i in range(x.size):
        h = _FD_STEP * max(1.0, abs(x[i]))
        if not central and x[i] + h <= upper[i]:
            if fx is None:
                fx = f(x)
            xp = x.copy()
            xp[i] += h
            g[i] = (f(xp) - fx) / h
        else:  # two-sided stencil, clipped into the box
            xp, xm = x.copy(), x.copy()
            xp[i] = min(x[i] + h, upper[i])
            xm[i] = max(x[i] - h, lower[i])
            g[i] = (f(xp) - f(xm)) / (xp[i] - xm[i])
    return g


def minimize_bounded(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    lower: Sequence[float],
    upper: Sequence[float],
    tol: float = 1e-8,
    max_iter: int = 500,
    callback: Callable[[np.ndarray], None] | None = None,
) -> OptimResult:
    """Box-constrained quasi-Newton minimization (L-BFGS-B).

    ``converged`` means the max-norm of the projected gradient at the
    returned point is at most ``tol``; otherwise the last iterate is
    returned with ``converged=False``.  Every iterate respects the box.
    """
    x0 = np.asarray(x0, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if x0.shape != lower.shape or x0.shape != upper.shape:
        raise InvalidBoundsError("x0, lower and upper must have matching shapes")
    if np.any(lower > upper):
        raise InvalidBoundsError("lower bound exceeds upper bound")
    if np.any(x0 < lower) or np.any(x0 > upper):
        raise InvalidBoundsError("start point violates the bounds")

    def fun(x):
        return float(f(np.asarray(x, dtype=float)))

    def grad(x):
        return _fd_gradient(fun, np.asarray(x, dtype=float), lower, upper)

    res = _scipy_minimize(
        fun,
        x0,
        jac=grad,
        method="L-BFGS-B",
        bounds=list(zip(lower, upper)),
        callback=callback,
        options={"maxiter": max_iter, "gtol": tol, "ftol": 1e-14},
    )
    x = np.clip(np.asarray(res.x, dtype=float), lower, upper)
    # Judge the final point with the quieter two-sided stencil; the
    # one-sided noise floor sits right at typical tol values.
    g = _fd_gradient(fun, x, lower, upper, central=True)
    projected = x - np.clip(x - g, lower, upper)
    grad_norm = float(np.max(np.abs(projected)))
    return OptimResult(
        point=x,
        value=fun(x),
        converged=bool(grad_norm <= tol or res.success),
        iterations=int(res.nit),
        grad_norm=grad_norm,
    )
