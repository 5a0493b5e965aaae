"""Batch front-end: ``steinmde {fit,bench,tables}``.

``fit`` estimates parameters for one data file (one positive real per
line) and prints a single JSON report.  ``bench`` runs the Monte Carlo
grid described by a config file.  ``tables`` runs one of the eight
built-in benchmark presets (bias and MSE grids for the four families).

Config files are plain ``key = value`` text; ``#`` starts a comment.
List values are separated by ``;`` and vector-valued entries use
spaces, e.g.::

    family     = burr
    theta0     = 0.8 2; 2 5; 5 0.8
    n          = 10; 25; 50
    estimators = ml; cvm; stein
    a          = 0.25; 0.5; 1; 2; 3
    reps       = 10000
    seed       = 20240817

Outputs are deterministic given (config, seed): rerunning writes
byte-identical files.  Exit codes: 0 success, 1 configuration error,
2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DataFileError, EstimationError
from .estimators import VALID_ESTIMATORS, resolve
from .models import Family, ParamVector, Sample
from .montecarlo import McSummary, run_cell
from .rng import substream

__all__ = ["ExperimentConfig", "parse_config", "run_experiment", "fit_once", "main"]

COORD_LABELS = {
    Family.EXPONENTIAL: ("theta",),
    Family.RAYLEIGH: ("theta",),
    Family.BURR: ("c", "k"),
    Family.EXP_POLY: ("theta1", "theta3"),
}

DEFAULT_REPS = 10_000  # desk scale; the full studies used 100,000
DEFAULT_SEED = 20240817


@dataclass(frozen=True)
class ExperimentConfig:
    family: Family
    theta0: tuple[ParamVector, ...]
    n: tuple[int, ...]
    estimators: tuple[str, ...]
    a_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 3.0)
    nu: int = 10
    reps: int = DEFAULT_REPS
    seed: int = DEFAULT_SEED
    name: str = "bench"

    def __post_init__(self):
        if not self.estimators:
            raise ConfigError("estimator list is empty")
        for est in self.estimators:
            if est not in VALID_ESTIMATORS[self.family]:
                raise ConfigError(
                    f"estimator {est!r} is not valid for family {self.family.value!r}"
                )
        if "stein" in self.estimators and not self.a_grid:
            raise ConfigError("the stein estimator needs a nonempty weight-decay grid")
        if any(a <= 0 for a in self.a_grid):
            raise ConfigError("weight-decay values must be positive")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")
        if not self.theta0 or not self.n:
            raise ConfigError("theta0 and n lists must be nonempty")

    def columns(self) -> list[tuple[str, str, float | None]]:
        """(column label, estimator id, tuning) triples, in display order."""
        cols = []
        for est in self.estimators:
            if est == "stein":
                cols.extend((f"stein_a{_num(a)}", "stein", a) for a in self.a_grid)
            elif est == "nce":
                cols.append((f"nce_nu{self.nu}", "nce", float(self.nu)))
            else:
                cols.append((est, est, None))
        return cols


def _num(v: float) -> str:
    return f"{v:g}"


_KNOWN_KEYS = ("family", "theta0", "n", "estimators", "a", "nu", "reps", "seed")


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read a key-value config file; errors carry line numbers."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = (lineno, value)

    def need(key):
        if key not in raw:
            raise ConfigError(f"{path}: missing required key {key!r}")
        return raw[key]

    lineno, famtext = need("family")
    try:
        family = Family(famtext)
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: unknown family {famtext!r}") from None

    def floats(key, text, lineno):
        try:
            return [float(tok) for tok in text.split()]
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: field {key!r}: {exc}") from None

    lineno, text = need("theta0")
    theta0 = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        try:
            theta0.append(ParamVector(family, tuple(floats("theta0", chunk, lineno))))
        except EstimationError as exc:
            raise ConfigError(f"{path}:{lineno}: field 'theta0': {exc}") from None

    lineno, text = need("n")
    try:
        nlist = [int(tok) for tok in text.replace(";", " ").split()]
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: field 'n': expected integers") from None
    if any(v < 1 for v in nlist):
        raise ConfigError(f"{path}:{lineno}: field 'n': sample sizes must be >= 1")

    lineno, text = need("estimators")
    estimators = tuple(filter(None, (c.strip() for c in text.split(";"))))

    kwargs = {}
    if "a" in raw:
        lineno, text = raw["a"]
        kwargs["a_grid"] = tuple(floats("a", text.replace(";", " "), lineno))
    if "nu" in raw:
        lineno, text = raw["nu"]
        try:
            kwargs["nu"] = int(text)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: field 'nu': expected an integer") from None
    if "reps" in raw:
        lineno, text = raw["reps"]
        try:
            kwargs["reps"] = int(text)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: field 'reps': expected an integer") from None
    if "seed" in raw:
        lineno, text = raw["seed"]
        try:
            kwargs["seed"] = int(text)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: field 'seed': expected an integer") from None

    return ExperimentConfig(
        family=family,
        theta0=tuple(theta0),
        n=tuple(nlist),
        estimators=estimators,
        name=path.stem,
        **kwargs,
    )


# --------------------------------------------------------------------- #
# experiment execution and rendering
# --------------------------------------------------------------------- #


def _g17(v: float) -> str:
    return f"{v:.17g}"


def run_experiment(
    cfg: ExperimentConfig,
    fmt: str = "csv",
    out_dir: str | Path = ".",
    workers: int = 1,
    metrics: tuple[str, ...] = ("bias", "mse"),
) -> dict:
    """Run every cell of the grid and write the table artifacts.

    Writes ``<name>_cells.csv`` (long format, 17 significant digits,
    lossless round-trip) plus one wide table per requested metric in
    ``fmt``.  Returns the summaries and written paths.
    """
    if fmt not in ("csv", "md", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns = cfg.columns()
    labels = COORD_LABELS[cfg.family]

    summaries: dict[tuple, McSummary] = {}
    for theta0 in cfg.theta0:
        for n in cfg.n:
            for label, est, tuning in columns:
                tun = tuning if est in ("stein", "nce") else None
                summaries[(theta0, n, label)] = run_cell(
                    cfg.family, theta0, n, est, tun, cfg.reps, cfg.seed, workers=workers
                )

    footer = f"seed={cfg.seed} reps={cfg.reps} version={__version__}"
    paths = {}

    cells_path = out_dir / f"{cfg.name}_cells.csv"
    with cells_path.open("w") as fh:
        fh.write("family,theta0,n,estimator,tuning,coord,D,seed,bias,mse,failures\n")
        for (theta0, n, label), summ in summaries.items():
            t0 = "/".join(_g17(v) for v in theta0.values)
            tun = "" if summ.tuning is None else _g17(summ.tuning)
            for i, coord in enumerate(labels):
                fh.write(
                    f"{cfg.family.value},{t0},{n},{label},{tun},{coord},{summ.D},"
                    f"{summ.seed},{_g17(summ.bias[i])},{_g17(summ.mse[i])},"
                    f"{summ.failure_count}\n"
                )
        fh.write(f"# {footer}\n")
    paths["cells"] = cells_path

    for metric in metrics:
        rows = []
        for theta0 in cfg.theta0:
            for n in cfg.n:
                for i, coord in enumerate(labels):
                    row = {
                        "theta0": "/".join(_g17(v) for v in theta0.values),
                        "n": n,
                        "coord": coord,
                    }
                    for label, _, _ in columns:
                        value = getattr(summaries[(theta0, n, label)], metric)[i]
                        row[label] = value
                    rows.append(row)
        path = out_dir / f"{cfg.name}_{metric}.{fmt}"
        _write_table(path, rows, [c[0] for c in columns], fmt, footer)
        paths[metric] = path

    return {"summaries": list(summaries.values()), "paths": paths}


def _write_table(path: Path, rows, value_cols, fmt: str, footer: str):
    keys = ["theta0", "n", "coord"] + value_cols
    if fmt == "csv":
        with path.open("w") as fh:
            fh.write(",".join(keys) + "\n")
            for row in rows:
                rendered = [
                    _g17(row[k]) if isinstance(row[k], float) else str(row[k]) for k in keys
                ]
                fh.write(",".join(rendered) + "\n")
            fh.write(f"# {footer}\n")
    elif fmt == "md":
        with path.open("w") as fh:
            fh.write("| " + " | ".join(keys) + " |\n")
            fh.write("|" + "|".join("---" for _ in keys) + "|\n")
            for row in rows:
                rendered = [
                    f"{row[k]:.4f}" if isinstance(row[k], float) else str(row[k])
                    for k in keys
                ]
                fh.write("| " + " | ".join(rendered) + " |\n")
            fh.write(f"\n{footer}\n")
    else:
        payload = {"meta": footer, "columns": keys, "rows": rows}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------- #
# single fits
# --------------------------------------------------------------------- #


def read_data_file(path: str | Path) -> Sample:
    """Parse a newline-delimited file of positive reals."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DataFileError(f"cannot read data file {path}: {exc}") from exc
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise DataFileError(f"line {lineno}: not a number: {text!r}") from None
        if not math.isfinite(v) or v <= 0.0:
            raise DataFileError(f"line {lineno}: nonpositive value")
        values.append(v)
    if not values:
        raise DataFileError("data file contains no observations")
    return Sample.from_data(values)


def fit_once(
    family: Family, data_path: str | Path, estimator_id: str, tuning: float | None, seed: int = 0
) -> dict:
    """Fit one estimator to one data file; returns the printable report."""
    if estimator_id not in VALID_ESTIMATORS[family]:
        raise ConfigError(
            f"estimator {estimator_id!r} is not valid for family {family.value!r}"
        )
    s = read_data_file(data_path)
    fitter = resolve(family, estimator_id)
    report = fitter(s, tuning, substream(seed, 0, 1))
    return {
        "family": family.value,
        "estimator": estimator_id,
        "tuning": tuning,
        "n": s.n,
        "params": dict(zip(COORD_LABELS[family], report.params.values)),
        "objective": None if math.isnan(report.objective_at_opt) else report.objective_at_opt,
        "converged": report.converged,
        "fallback_used": report.fallback_used,
        "iterations": report.iterations,
        **({"aux": report.aux} if report.aux else {}),
    }


# --------------------------------------------------------------------- #
# benchmark presets (odd numbers: bias; even numbers: MSE)
# --------------------------------------------------------------------- #

_N_GRID = (10, 25, 50, 100, 200)
_A_GRID = (0.25, 0.5, 1.0, 2.0, 3.0)


def preset_config(table: int, reps: int, seed: int) -> tuple[ExperimentConfig, str]:
    """Benchmark preset by number; returns the grid and the metric."""
    if table in (1, 2):
        fam, t0, ests, a = (
            Family.EXPONENTIAL,
            ((0.5,), (2.0,), (5.0,), (10.0,)),
            ("ml", "mse", "cvm", "stein"),
            _A_GRID,
        )
    elif table in (3, 4):
        fam, t0, ests, a = (
            Family.RAYLEIGH,
            ((0.5,), (2.0,), (5.0,), (10.0,)),
            ("ml", "mom", "am", "cvm", "stein"),
            _A_GRID,
        )
    elif table in (5, 6):
        fam, t0, ests, a = (
            Family.BURR,
            ((0.8, 2.0), (2.0, 5.0), (5.0, 0.8)),
            ("ml", "cvm", "stein"),
            _A_GRID,
        )
    elif table in (7, 8):
        fam, t0, ests, a = (
            Family.EXP_POLY,
            ((1.0, -0.05), (0.0, -0.5), (-0.5, -3.0)),
            ("sm", "nce", "stein"),
            _A_GRID + (5.0,),
        )
    else:
        raise ConfigError(f"table number must be 1..8, got {table}")
    cfg = ExperimentConfig(
        family=fam,
        theta0=tuple(ParamVector(fam, v) for v in t0),
        n=_N_GRID,
        estimators=ests,
        a_grid=a,
        reps=reps,
        seed=seed,
        name=f"table{table}",
    )
    return cfg, "bias" if table % 2 else "mse"


# --------------------------------------------------------------------- #
# argument parsing and entry point
# --------------------------------------------------------------------- #


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are config errors
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="steinmde", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_fit = sub.add_parser("fit", help="fit one estimator to a data file")
    p_fit.add_argument("--family", required=True, choices=[f.value for f in Family])
    p_fit.add_argument("--data", required=True, help="file with one positive real per line")
    p_fit.add_argument("--estimator", required=True, help="ml, mse, cvm, mom, am, sm, nce or stein")
    p_fit.add_argument("--a", type=float, default=None, help="weight decay for the stein fit")
    p_fit.add_argument("--nu", type=int, default=None, help="noise multiple for the nce fit")
    p_fit.add_argument("--seed", type=int, default=0, help="seed for estimator-internal noise")

    p_bench = sub.add_parser("bench", help="run the Monte Carlo grid from a config file")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_bench.add_argument("--reps", type=int, default=None, help="override the replication count")
    p_bench.add_argument("--format", choices=("csv", "md", "json"), default="csv")
    p_bench.add_argument("--out", default=".", help="output directory")
    p_bench.add_argument("--workers", type=int, default=1)

    p_tab = sub.add_parser("tables", help="run a built-in benchmark preset (1..8)")
    p_tab.add_argument("--table", type=int, required=True)
    p_tab.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_tab.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p_tab.add_argument("--format", choices=("csv", "md", "json"), default="csv")
    p_tab.add_argument("--out", default=".")
    p_tab.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "fit":
            tuning = args.a if args.estimator == "stein" else (
                float(args.nu) if (args.estimator == "nce" and args.nu is not None) else None
            )
            report = fit_once(Family(args.family), args.data, args.estimator, tuning, args.seed)
            print(json.dumps(report, sort_keys=True))
        elif args.verb == "bench":
            cfg = parse_config(args.config)
            if args.seed is not None:
                cfg = ExperimentConfig(
                    **{**cfg.__dict__, "seed": args.seed}
                )
            if args.reps is not None:
                cfg = ExperimentConfig(**{**cfg.__dict__, "reps": args.reps})
            result = run_experiment(cfg, fmt=args.format, out_dir=args.out, workers=args.workers)
            for path in result["paths"].values():
                print(path)
        else:
            cfg, metric = preset_config(args.table, args.reps, args.seed)
            result = run_experiment(
                cfg, fmt=args.format, out_dir=args.out, workers=args.workers, metrics=(metric,)
            )
            for path in result["paths"].values():
                print(path)
    except (ConfigError, DataFileError) as exc:
        print(f"steinmde: error: {exc}", file=sys.stderr)
        return 1
    except EstimationError as exc:
        print(f"steinmde: runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
