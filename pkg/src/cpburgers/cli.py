"""Command-line interface: single solves, refinement sweeps, Prabhakar
function values and the property suites.

Configuration comes from a flat ``key=value`` file (``--config``) and/or
command-line flags; flags win over the file, and the file wins over the
built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from collections.abc import Iterable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TextIO

import numpy as np

from cpburgers import verify
from cpburgers.cpkernel import CpParams
from cpburgers.discretization import U0_SIGNS, SpaceGrid
from cpburgers.errors import CPBurgersError, NumericalError, ParameterError
from cpburgers.manufactured import (
    ConvergenceReport,
    ConvergenceRow,
    max_error,
    problem_from_label,
)
from cpburgers.mlf import PrabhakarTriplet, prabhakar_series
from cpburgers.solver import NewtonSettings, ProblemSpec, SolveReport, solve

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

CSV_HEADER = ("level", "xi", "theta", "time_ms", "iterations")


# {{{ configuration

@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.5
    rho: float = 0.8
    gamma: float = 0.5
    omega: float = -0.5
    L: float = 1.0
    T: float = 1.0
    M: int = 64
    N: int = 64
    it_acc: float = 1.0e-8
    max_step: int = 500
    problem: str = "example1"
    sweep_axis: str = "time"
    sweep_levels: tuple[int, ...] = (8, 16, 32, 64)
    output_path: str = "-"
    output_format: str = "table"
    u0_sign: str = "consistent"
    jobs: int = 1

    def __post_init__(self) -> None:
        _validated("alpha", lambda: self.cp)
        _validated("M", lambda: SpaceGrid(self.M, self.L))
        _validated("maxstep", lambda: self.settings)
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ParameterError(f"T: final time must be positive, got {self.T}")
        if self.N < 1:
            raise ParameterError(f"N: at least one time step is required, got {self.N}")
        if self.sweep_axis not in ("time", "space"):
            raise ParameterError(f"sweep.axis: expected 'time' or 'space', got {self.sweep_axis!r}")
        if not self.sweep_levels:
            raise ParameterError("sweep.levels: at least one level is required")
        smallest = 3 if self.sweep_axis == "space" else 1
        if self.sweep_levels[0] < smallest:
            raise ParameterError(
                f"sweep.levels: {self.sweep_axis} levels must be >= {smallest}, "
                f"got {self.sweep_levels[0]}")
        if any(b <= a for a, b in zip(self.sweep_levels, self.sweep_levels[1:])):
            raise ParameterError(
                f"sweep.levels: levels must be strictly increasing, got {list(self.sweep_levels)}")
        if self.output_format not in ("csv", "table"):
            raise ParameterError(
                f"output.format: expected 'csv' or 'table', got {self.output_format!r}")
        if self.u0_sign not in U0_SIGNS:
            raise ParameterError(f"u0sign: expected one of {U0_SIGNS}, got {self.u0_sign!r}")
        if self.jobs < 1:
            raise ParameterError(f"jobs: expected a positive integer, got {self.jobs}")

    @property
    def cp(self) -> CpParams:
        return CpParams(self.alpha, self.rho, self.gamma, self.omega)

    @property
    def settings(self) -> NewtonSettings:
        return NewtonSettings(max_step=self.max_step, it_acc=self.it_acc)


def _validated(key: str, build) -> None:
    try:
        build()
    except ParameterError as exc:
        msg = str(exc)
        raise ParameterError(msg if msg.startswith(key) else f"{key}: {msg}") from None


def _int(key: str, text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ParameterError(f"{key}: expected an integer, got {text!r}") from None
    if not value.is_integer():
        raise ParameterError(f"{key}: expected an integer, got {text!r}")
    return int(value)


def _float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"{key}: expected a number, got {text!r}") from None


def _levels(key: str, text: str) -> tuple[int, ...]:
    return tuple(_int(key, part) for part in text.replace(",", " ").split())


#: config key -> (RunConfig field, converter)
KEYS = {
    "alpha": ("alpha", _float),
    "rho": ("rho", _float),
    "gamma": ("gamma", _float),
    "omega": ("omega", _float),
    "L": ("L", _float),
    "T": ("T", _float),
    "M": ("M", _int),
    "N": ("N", _int),
    "itacc": ("it_acc", _float),
    "maxstep": ("max_step", _int),
    "problem": ("problem", lambda key, text: text),
    "sweep.axis": ("sweep_axis", lambda key, text: text),
    "sweep.levels": ("sweep_levels", _levels),
    "output.path": ("output_path", lambda key, text: text),
    "output.format": ("output_format", lambda key, text: text),
    "u0sign": ("u0_sign", lambda key, text: text),
    "jobs": ("jobs", _int),
}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Read ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read configuration file {path}: {exc}") from None
    return parse_config_text(text, source=str(path))


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParameterError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        values[key.strip()] = value.strip()
    return values


def parse_config(file_values: Mapping[str, str] | None = None,
                 flag_values: Mapping[str, str] | None = None) -> RunConfig:
    """Merge defaults, file values and flag values (in increasing priority)."""
    merged = dict(file_values or {})
    merged.update(flag_values or {})

    unknown = sorted(set(merged) - set(KEYS))
    if unknown:
        raise ParameterError(
            f"unknown configuration key(s) {', '.join(unknown)}; "
            f"known keys: {', '.join(KEYS)}")

    kwargs = {}
    for key, text in merged.items():
        name, convert = KEYS[key]
        kwargs[name] = convert(key, str(text).strip())
    return RunConfig(**kwargs)

# }}}


# {{{ running

def _problem_spec(cfg: RunConfig) -> tuple[ProblemSpec, object, SpaceGrid]:
    cp = cfg.cp
    grid = SpaceGrid(cfg.M, cfg.L)
    problem = problem_from_label(cfg.problem, cp, cfg.L, cfg.T)
    spec = ProblemSpec(cp=cp, grid=grid, T=cfg.T, N=cfg.N, phi=problem.phi, f=problem.source)
    return spec, problem, grid


def run_solve(cfg: RunConfig) -> tuple[SolveReport, float]:
    """Solve once; returns the report and the maximum error against the exact solution."""
    spec, problem, grid = _problem_spec(cfg)
    report = solve(spec, cfg.settings, u0_sign=cfg.u0_sign)
    return report, max_error(report, problem, grid)


def _sweep_level(cfg: RunConfig, level: int) -> tuple[float, float, int]:
    if cfg.sweep_axis == "time":
        cfg = replace(cfg, N=level)
    else:
        cfg = replace(cfg, M=level)
    report, xi = run_solve(cfg)
    return xi, 1000.0 * report.wall_time, report.total_iterations


def run_converge(cfg: RunConfig) -> ConvergenceReport:
    """Solve at every sweep level and collect error, order, time and iterations.

    A failing level stops the sweep; rows of the levels before it are kept
    and :attr:`ConvergenceReport.failure` describes the failure.
    """
    results = []
    failure = None
    levels = cfg.sweep_levels
    if cfg.jobs > 1 and len(levels) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(levels))) as pool:
            futures = [pool.submit(_sweep_level, cfg, lv) for lv in levels]
            for lv, fut in zip(levels, futures):
                try:
                    results.append(fut.result())
                except NumericalError as exc:
                    failure = f"level {lv} failed: {exc}"
                    break
            for fut in futures:
                fut.cancel()
    else:
        for lv in levels:
            try:
                results.append(_sweep_level(cfg, lv))
            except NumericalError as exc:
                failure = f"level {lv} failed: {exc}"
                break

    report = ConvergenceReport.from_runs(
        cfg.sweep_axis, cfg.alpha, levels[:len(results)],
        [r[0] for r in results], [r[1] for r in results], [r[2] for r in results])
    report.failure = failure
    return report

# }}}


# {{{ output

def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".17g")


def write_csv(report: ConvergenceReport, fh: TextIO) -> None:
    """Rows with 17 significant digits; a failure becomes a trailing ``#`` line."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in report.rows:
        writer.writerow([r.level, _fmt(r.xi), _fmt(r.theta), _fmt(r.time_ms), r.iterations])
    if report.failure is not None:
        fh.write(f"# {report.failure}\n")


def read_csv(fh: TextIO | str, *, axis: str = "time",
             alpha: float = math.nan) -> ConvergenceReport:
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    lines = fh.read().splitlines()
    failure = None
    body = []
    for line in lines:
        if line.startswith("#"):
            failure = line[1:].strip()
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ParameterError(f"expected CSV header {','.join(CSV_HEADER)}")
    parsed = [ConvergenceRow(int(lv), float(xi), float(th) if th else None, float(tm), int(it))
              for lv, xi, th, tm, it in rows[1:]]
    return ConvergenceReport(axis=axis, alpha=alpha, rows=parsed, failure=failure)


def format_table(report: ConvergenceReport) -> str:
    name = "N" if report.axis == "time" else "M"
    header = ("alpha", name, "Xi", "Theta", "time (ms)", "iterations")
    body = [(f"{report.alpha:g}", str(r.level), f"{r.xi:.5e}",
             "" if r.theta is None else f"{r.theta:.5f}",
             f"{r.time_ms:.1f}", str(r.iterations)) for r in report.rows]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in [header, *body]]
    if report.failure is not None:
        lines.append(f"failed: {report.failure}")
    return "\n".join(lines) + "\n"


def _open_output(path: str):
    if path == "-":
        return _NoClose(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        self.fh.flush()

# }}}


# {{{ argument parsing

class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2, which is reserved for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


#: flag dest -> config key
FLAG_KEYS = {
    "alpha": "alpha", "rho": "rho", "gamma": "gamma", "omega": "omega",
    "L": "L", "T": "T", "M": "M", "N": "N", "itacc": "itacc", "maxstep": "maxstep",
    "problem": "problem", "axis": "sweep.axis", "levels": "sweep.levels",
    "output": "output.path", "format": "output.format", "u0sign": "u0sign", "jobs": "jobs",
}


def _config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (overrides --config)")
    add = g.add_argument
    add("--config", metavar="FILE", help="key=value configuration file")
    add("--alpha", help="derivative order in (0, 1) [0.5]")
    add("--rho", help="kernel parameter rho [0.8]")
    add("--gamma", help="kernel parameter gamma [0.5]")
    add("--omega", help="kernel parameter omega [-0.5]")
    add("--L", dest="L", help="length of the space interval [1]")
    add("--T", dest="T", help="final time [1]")
    add("-M", dest="M", help="number of space intervals [64]")
    add("-N", dest="N", help="number of time steps [64]")
    add("--itacc", help="iteration stopping threshold [1e-8]")
    add("--maxstep", help="iteration cap per time level [500]")
    add("--problem", help="example1, example2 or power:<nu>:<profile>[:<offset>]")
    add("--axis", help="sweep axis: time or space [time]")
    add("--levels", help="comma-separated sweep levels [8,16,32,64]")
    add("-o", "--output", help="output path, '-' for stdout [-]")
    add("--format", help="csv or table [table]")
    add("--u0sign", help="sign of the u^0 history term: consistent or literal")
    add("-j", "--jobs", help="parallel solves in a sweep [1]")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpburgers", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one problem and report its error")
    _config_flags(p)

    p = sub.add_parser("converge", help="grid refinement study")
    _config_flags(p)

    p = sub.add_parser("mlf", help="evaluate the Prabhakar function")
    _config_flags(p)
    p.add_argument("--a", type=float, help="defaults to rho")
    p.add_argument("--b", type=float, help="defaults to 2 - alpha")
    p.add_argument("--g", type=float, help="defaults to -gamma")
    p.add_argument("--z", type=float, help="defaults to omega T^rho")
    p.add_argument("--tol", type=float, default=1.0e-16)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", action="append", choices=list(verify.SUITES),
                   help="run only this suite (repeatable)")
    p.add_argument("--seed", type=int, default=20241017)
    p.add_argument("--tamper", choices=["delta"], help=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    flags = {key: getattr(args, dest) for dest, key in FLAG_KEYS.items()
             if getattr(args, dest) is not None}
    return parse_config(file_values, flags)

# }}}


# {{{ commands

def _cmd_solve(args) -> int:
    cfg = config_from_args(args)
    report, xi = run_solve(cfg)
    spec, problem, grid = _problem_spec(cfg)
    with _open_output(cfg.output_path) as fh:
        if cfg.output_format == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("x", "u", "exact"))
            exact = problem.exact(grid.x, cfg.T)
            for x, u, e in zip(grid.x, report.levels[-1], exact):
                writer.writerow((_fmt(x), _fmt(u), _fmt(e)))
        else:
            fh.write(f"problem     {cfg.problem}\n"
                     f"alpha       {cfg.alpha:g}\n"
                     f"M, N        {cfg.M}, {cfg.N}\n"
                     f"Xi          {xi:.6e}\n"
                     f"iterations  {report.total_iterations}\n"
                     f"time (ms)   {1000.0 * report.wall_time:.1f}\n")
    return EXIT_OK


def _cmd_converge(args) -> int:
    cfg = config_from_args(args)
    report = run_converge(cfg)
    with _open_output(cfg.output_path) as fh:
        if cfg.output_format == "csv":
            write_csv(report, fh)
        else:
            fh.write(format_table(report))
    if report.failure is not None:
        print(f"error: {report.failure}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_mlf(args) -> int:
    cfg = config_from_args(args)
    a = cfg.rho if args.a is None else args.a
    b = 2.0 - cfg.alpha if args.b is None else args.b
    g = -cfg.gamma if args.g is None else args.g
    z = cfg.omega * cfg.T**cfg.rho if args.z is None else args.z
    res = prabhakar_series(PrabhakarTriplet(a, b, g), z, args.tol)
    with _open_output(cfg.output_path) as fh:
        fh.write(f"E_{{{a:g},{b:g}}}^{{{g:g}}}({z:.17g}) = {res.value:.17g}\n"
                 f"terms = {res.terms}\n")
        if res.precision_loss:
            fh.write(f"warning: largest term {res.max_term:.3e} exceeds the value "
                     "by more than 1e12; expect reduced relative accuracy\n")
    return EXIT_OK


def _tampered_delta(w: np.ndarray) -> np.ndarray:
    # forward instead of central difference: breaks the skew-symmetry
    padded = np.concatenate((np.asarray(w, dtype=float), [0.0]))
    return padded[1:] - padded[:-1]


def _cmd_verify(args) -> int:
    hooks = {"delta": _tampered_delta} if args.tamper == "delta" else {}
    results = verify.run_suites(args.suite, hooks=hooks, seed=args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.seconds:7.3f}s  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"solve": _cmd_solve, "converge": _cmd_converge,
            "mlf": _cmd_mlf, "verify": _cmd_verify}


def main(argv: Iterable[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(None if argv is None else list(argv))
    except SystemExit as exc:
        # --help and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CPBurgersError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

# }}}
