"""Independent oracles used by the test suite.

The closed-form coefficient oracles below evaluate the pairwise double
sums literally over (j, k) index pairs, with naive powers instead of the
production log-space forms.  They share no code with the package's
prefix-sum implementations.
"""

import numpy as np
from scipy.integrate import quad


# --------------------------------------------------------------------- #
# literal pairwise-sum versions of the closed-form objectives
# --------------------------------------------------------------------- #


def literal_exponential_coeffs(x, a):
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    j = np.arange(1, n + 1)
    e = np.exp(-a * x)
    jj, kk = np.triu_indices(n, k=1)
    cross = np.sum(x[jj] * e[kk])
    c2 = (
        2 / a**3
        + (2 / (a**2 * n**2)) * np.sum(e * (x * (-n + j - 1) - (2 * n - 2 * j + 1) / a))
        - (2 / (a**2 * n**2)) * cross
    )
    c1 = (
        (2 / (a * n**2)) * np.sum(e * (x * (-n + j - 1) - (n - 2 * j + 1) / a))
        - (2 / (a * n**2)) * cross
    )
    c0 = np.sum(e * (2 * j - 1)) / (a * n**2)
    return c2, c1, c0


def literal_rayleigh_coeffs(x, a):
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    j1 = np.arange(1, n + 1)
    e = np.exp(-a * x)
    ome = 1 - e
    J, K = np.triu_indices(n, k=1)
    xj, xk, ej, ek, omej = x[J], x[K], e[J], e[K], ome[J]
    c2 = (2 / n**2) * np.sum(
        xj * xk * (2 / a**3) * omej - (xj**2 * xk / a**2) * (ej + ek)
    ) + (1 / n**2) * np.sum((2 * x**2 / a**3) * ome - (2 * x**3 / a**2) * e)
    c1 = (2 / n**2) * np.sum(
        (xj**2 * ek / a) * (1 / (a * xk) - 1)
        + (xj * ej / a) * (xj / (a * xk) - xk)
        - (2 / a**3) * omej * (xk / xj + xj / xk)
    ) + (1 / n**2) * np.sum((2 * e / a) * x * (2 * j1 / a - x) - (4 / a**3) * ome)
    c0 = (2 / n**2) * np.sum(
        (xj / (a * xk)) * ej + (2 / (a**3 * xj * xk)) * omej
    ) + (1 / n**2) * np.sum(
        (2 / (a**3 * x**2)) * ome + (e / a) * (4 * j1 - 1 - (2 / (a * x)) * (2 * j1 - 1))
    )
    return c2, c1, c0


def literal_burr_l2(c, k, x, a):
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    j1 = np.arange(1, n + 1)
    e = np.exp(-a * x)
    A = c * (k + 1) * x ** (c - 1) / (1 + x**c) - (c - 1) / x
    B = -c * (k + 1) * x**c / (1 + x**c)
    J, L = np.triu_indices(n, k=1)
    cross = np.sum(
        A[L]
        * (
            (2 * A[J] / a**3) * (1 - e[J])
            + (B[J] / a**2) * (e[J] + e[L])
            + ((c - 2) / a**2) * e[J]
            - (x[J] / a) * e[J]
        )
        + (B[J] / a) * e[L]
    )
    single = np.sum(
        A**2 * (-2 * x / a**2 * e - 2 / a**3 * e + 2 / a**3)
        + (2 * (j1 - 1) * c / a**2) * A * e
        + (2 * B / a) * e
    )
    return (
        (2 / n**2) * cross
        + (1 / n**2) * single
        + (2 * c / (a * n**2)) * np.sum(j1 * e)
        - np.sum(e) / (a * n**2)
    )


def literal_exp_poly_coeffs(x, a):
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    j1 = np.arange(1, n + 1)
    e = np.exp(-a * x)
    ome = 1 - e
    J, K = np.triu_indices(n, k=1)
    xj, xk, ej, ek, omej = x[J], x[K], e[J], e[K], ome[J]
    lin2 = (
        2 / a**3
        + (1 / n**2) * np.sum(e * (-2 * x / a**2 - (2 / a**3) * (2 * n - 2 * j1 + 1)))
        + (2 / n**2) * np.sum(-(xj / a**2) * (ek + ej))
    )
    cub2 = (1 / n**2) * np.sum(-18 * x**5 / a**2 * e + 18 * x**4 / a**3 * ome) + (
        2 / n**2
    ) * np.sum(
        -(9 * xj**3 * xk**2 / a**2) * (ek + ej) + (18 * xj**2 * xk**2 / a**3) * omej
    )
    lin_cub = (1 / n**2) * np.sum(-12 * x**3 / a**2 * e + 12 * x**2 / a**3 * ome) + (
        2 / n**2
    ) * np.sum(
        (ek + ej) * (-3 * xj * xk**2 / a**2 - 3 * xj**3 / a**2)
        + (6 / a**3) * omej * (xj**2 + xk**2)
    )
    lin = (1 / n**2) * np.sum(e * (2 * x / a + 2 * (n - 2 * j1 + 1) / a**2)) + (
        2 / n**2
    ) * np.sum((xj / a) * (ek + ej))
    cub = (2 / n**2) * np.sum(
        (3 * xj**3 / a) * ek + (3 * xj * xk**2 / a) * ej + (3 * xk**2 / a**2) * (ej - ek)
    ) + (1 / n**2) * np.sum(6 * x**3 / a * e)
    const = np.sum((2 * j1 - 1) * e) / (a * n**2)
    return lin2, cub2, lin_cub, lin, cub, const


# --------------------------------------------------------------------- #
# argmin oracles
# --------------------------------------------------------------------- #


def grid_argmin_1d(f_vec, lo, hi, points=100_000):
    """Argmin over a uniform grid; ``f_vec`` maps an array to an array."""
    xs = np.linspace(lo, hi, points)
    return float(xs[np.argmin(f_vec(xs))]), (hi - lo) / (points - 1)


def refine_argmin_2d(f, lower, upper, levels=3, pts=41, margin=3):
    """Nested uniform-grid argmin refinement for a scalar f(u, v).

    ``margin`` is the refinement window half-width in coarse cells; wide
    enough that a diagonal valley cannot escape the next-level box.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    best = None
    for _ in range(levels):
        us = np.linspace(lo[0], hi[0], pts)
        vs = np.linspace(lo[1], hi[1], pts)
        vals = np.array([[f(u, v) for v in vs] for u in us])
        iu, iv = np.unravel_index(np.argmin(vals), vals.shape)
        best = (us[iu], vs[iv])
        du, dv = us[1] - us[0], vs[1] - vs[0]
        lo = np.array(
            [max(lower[0], best[0] - margin * du), max(lower[1], best[1] - margin * dv)]
        )
        hi = np.array(
            [min(upper[0], best[0] + margin * du), min(upper[1], best[1] + margin * dv)]
        )
    spacing = (du, dv)
    return np.array(best), spacing


def score_matching_numeric_argmin(x):
    """Minimize the score-matching criterion directly, analytic gradient.

    The criterion is quadratic in (theta1, theta3); minimizing it as a
    function checks the production code's solved form.
    """
    from scipy.optimize import minimize

    x = np.asarray(x, dtype=float)

    def obj(v):
        poly = v[0] * x + 3 * v[1] * x**3
        return float(np.mean(2 * v[0] * x + 12 * v[1] * x**3 + 0.5 * poly**2))

    def grad(v):
        poly = v[0] * x + 3 * v[1] * x**3
        return np.array(
            [float(np.mean(2 * x + poly * x)), float(np.mean(12 * x**3 + poly * 3 * x**3))]
        )

    res = minimize(
        obj,
        x0=np.array([0.0, -0.1]),
        jac=grad,
        method="L-BFGS-B",
        bounds=[(None, None), (None, -1e-12)],
        options={"gtol": 1e-14, "ftol": 1e-16, "maxiter": 2000},
    )
    return res.x


def bisect_root(f, lo, hi, tol=1e-12, max_iter=400):
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    assert np.sign(f_lo) != np.sign(f_hi), "bisection oracle needs a sign change"
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0 or hi - lo < tol:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------- #
# numeric CDF of the exponential-polynomial family
# --------------------------------------------------------------------- #


def exp_poly_numeric_cdf(theta1, theta3, xs):
    """F(x) on a grid by adaptive quadrature of the unnormalized density."""
    xs = np.asarray(xs, dtype=float)
    hi = float(xs.max()) * 1.05
    grid = np.linspace(0.0, hi, 4001)

    def dens(v):
        return np.exp(theta1 * v + theta3 * v**3)

    segs = [
        quad(dens, grid[i], grid[i + 1], epsabs=1e-12, epsrel=1e-10)[0]
        for i in range(grid.size - 1)
    ]
    cum = np.concatenate([[0.0], np.cumsum(segs)])
    tail = quad(dens, hi, np.inf, epsabs=1e-12, epsrel=1e-10)[0]
    return np.interp(xs, grid, cum / (cum[-1] + tail))


def ks_statistic(sorted_values, cdf_values):
    n = sorted_values.size
    j = np.arange(1, n + 1)
    return float(max(np.max(j / n - cdf_values), np.max(cdf_values - (j - 1) / n)))


def batch_means_se(errors, n_batches=40):
    """Alternative Monte Carlo SE estimate from batch means."""
    errors = errors[~np.isnan(errors[:, 0])]
    d = errors.shape[0]
    edges = np.linspace(0, d, n_batches + 1, dtype=int)
    means = np.array([errors[lo:hi].mean(axis=0) for lo, hi in zip(edges[:-1], edges[1:])])
    return means.std(axis=0, ddof=1) / np.sqrt(n_batches)
