"""Replication engine for bias / MSE studies.

One *cell* is a (family, true parameter, sample size, estimator, tuning)
combination.  For replication k the data come from the stream addressed
by ``(seed, k, 0)`` and any estimator-internal noise from ``(seed, k,
1)``, so results are a pure function of the cell and seed: independent
of execution order and of how many workers run the cell.

Failed fits (non-converged, or a raised :class:`EstimationError`) are
excluded from the bias / MSE averages and surface in
``failure_count`` instead of being hidden or propagated.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError
from .estimators import resolve
from .models import Family, ParamVector, sample
from .rng import substream

__all__ = ["McSummary", "run_cell", "run_cell_detailed", "mc_standard_error"]


@dataclass(frozen=True)
class McSummary:
    """Aggregate of one Monte Carlo cell."""

    family: Family
    theta0: ParamVector
    n: int
    estimator_id: str
    tuning: float | None
    D: int
    bias: tuple[float, ...]
    mse: tuple[float, ...]
    failure_count: int
    seed: int


def _replicate_range(family, theta0, n, estimator_id, tuning, seed, start, stop):
    """Errors (estimate - truth) for replications [start, stop); NaN rows mark failures."""
    fitter = resolve(family, estimator_id) if isinstance(estimator_id, str) else estimator_id
    truth = theta0.as_array()
    errors = np.full((stop - start, truth.size), np.nan)
    for k in range(start, stop):
        s = sample(theta0, n, substream(seed, k, 0))
        try:
            report = fitter(s, tuning, substream(seed, k, 1))
        except EstimationError:
            continue
        if report.converged:
            errors[k - start] = report.params.as_array() - truth
    return errors


def run_cell_detailed(
    family: Family,
    theta0: ParamVector,
    n: int,
    estimator_id,
    tuning: float | None,
    D: int,
    seed: int,
    workers: int = 1,
) -> tuple[McSummary, np.ndarray]:
    """Run one cell and return the summary plus the per-replication errors.

    The error array has shape (D, dim); failed replications are NaN
    rows.  ``estimator_id`` may also be a callable
    ``fit(sample, tuning, noise_rng) -> EstimateReport``.
    """
    if D < 1:
        raise ValueError("replication count D must be at least 1")
    if workers <= 1 or D < 4:
        errors = _replicate_range(family, theta0, n, estimator_id, tuning, seed, 0, D)
    else:
        n_chunks = min(D, 4 * workers)
        edges = np.linspace(0, D, n_chunks + 1, dtype=int)
        errors = np.empty((D, theta0.as_array().size))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                (
                    lo,
                    hi,
                    pool.submit(
                        _replicate_range,
                        family,
                        theta0,
                        n,
                        estimator_id,
                        tuning,
                        seed,
                        int(lo),
                        int(hi),
                    ),
                )
                for lo, hi in zip(edges[:-1], edges[1:])
            ]
            for lo, hi, fut in futures:
                errors[lo:hi] = fut.result()

    ok = ~np.isnan(errors[:, 0])
    kept = errors[ok]
    if kept.size:
        bias = tuple(float(v) for v in kept.mean(axis=0))
        mse = tuple(float(v) for v in (kept**2).mean(axis=0))
    else:
        dim = theta0.as_array().size
        bias = tuple([float("nan")] * dim)
        mse = tuple([float("nan")] * dim)
    summary = McSummary(
        family=family,
        theta0=theta0,
        n=n,
        estimator_id=estimator_id if isinstance(estimator_id, str) else "<callable>",
        tuning=tuning,
        D=D,
        bias=bias,
        mse=mse,
        failure_count=int(D - ok.sum()),
        seed=int(seed),
    )
    return summary, errors


def run_cell(
    family: Family,
    theta0: ParamVector,
    n: int,
    estimator_id,
    tuning: float | None,
    D: int,
    seed: int,
    workers: int = 1,
) -> McSummary:
    summary, _ = run_cell_detailed(family, theta0, n, estimator_id, tuning, D, seed, workers)
    return summary


def mc_standard_error(summary: McSummary, per_rep_errors: np.ndarray) -> np.ndarray:
    """Monte Carlo standard error of the bias entries: std / sqrt(#kept)."""
    ok = ~np.isnan(per_rep_errors[:, 0])
    kept = per_rep_errors[ok]
    if kept.shape[0] < 2:
        return np.full(per_rep_errors.shape[1], np.nan)
    return kept.std(axis=0, ddof=1) / np.sqrt(kept.shape[0])
