"""Command-line front end: ``eval``, ``sweep`` and ``validate``.

Exit codes: 0 success, 1 usage error, 2 quadrature non-convergence,
3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import violation
from .detector import DetectorConfig, SmearingKind
from .numerics import NonConvergenceError, QuadratureSpec
from .violation import ViolationPath, config_from_triple

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_VALIDATION = 0, 1, 2, 3

CSV_VERSION = "# udwcov-csv v1"
JSON_VERSION = "udwcov-json v1"
COLUMNS = ("v", "t_over_ell", "omega_t", "im_value", "err", "path", "seconds")

PATH_CHOICES = ("mc", "reduced3d", "ei2d", "dimensionless")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# evaluation of one row
# --------------------------------------------------------------------------

@dataclass
class RowTask:
    v: float
    t_over_ell: float
    omega_t: float
    path: str
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    mc_samples: int = 10**6
    seed: int = 0
    pointlike: bool = False
    dimensional: tuple | None = None  # (omega, t_switch, ell)
    timing: bool = True


def _config(task: RowTask) -> DetectorConfig:
    kind = SmearingKind.POINTLIKE if task.pointlike else SmearingKind.GAUSSIAN
    if task.dimensional is not None:
        omega, t_switch, ell = task.dimensional
    else:
        ell = 1.0
        t_switch = task.t_over_ell
        omega = task.omega_t / t_switch
    return DetectorConfig(omega=omega, t_switch=t_switch, ell=ell, v=task.v, smearing_kind=kind)


def evaluate_row(task: RowTask) -> tuple[dict, bool]:
    """Returns the output record and whether the evaluation converged."""
    start = time.perf_counter()
    converged = True
    config = _config(task)
    path = ViolationPath(task.path)
    try:
        if config.pointlike:
            res = violation.pointlike_trace_e(config)
        elif path is ViolationPath.DIMENSIONLESS_2D:
            res = violation.trace_e_dimensionless(abs(task.v), task.t_over_ell, task.omega_t, task.quad)
        else:
            res = violation.trace_e(config, path, quad=task.quad, samples=task.mc_samples, seed=task.seed)
        im, err, tag = res.imag, res.error_estimate, res.path.value
    except NonConvergenceError as exc:
        converged = False
        im, err, tag = complex(exc.value).imag, exc.error, f"{path.value}:nonconverged"
    seconds = time.perf_counter() - start if task.timing else 0.0
    record = {"v": task.v, "t_over_ell": task.t_over_ell, "omega_t": task.omega_t,
              "im_value": im, "err": err, "path": tag, "seconds": seconds}
    return record, converged


def run_rows(tasks: list[RowTask], jobs: int = 1) -> list[tuple[dict, bool]]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(evaluate_row, tasks))
    return [evaluate_row(t) for t in tasks]


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

def _num(x: float) -> str:
    return format(x, ".17g")


def to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([_num(r[c]) if isinstance(r[c], float) else r[c] for c in COLUMNS])
    return buf.getvalue()


def to_json(records: list[dict]) -> str:
    rows = [{c: r[c] for c in COLUMNS} for r in records]
    return json.dumps({"format": JSON_VERSION, "columns": list(COLUMNS), "rows": rows}, indent=2) + "\n"


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = []
    for r in csv.DictReader(lines):
        rows.append({c: (r[c] if c == "path" else float(r[c])) for c in COLUMNS})
    return rows


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# config files and argument handling
# --------------------------------------------------------------------------

def load_config_file(path: str) -> dict:
    """Flat ``key = value`` file; keys mirror long flags (``t-over-ell`` or ``t_over_ell``)."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def _float_list(values) -> list[float]:
    if values is None:
        return []
    if isinstance(values, str):
        values = [values]
    out = []
    for chunk in values:
        for item in str(chunk).split(","):
            item = item.strip()
            if item:
                try:
                    out.append(float(item))
                except ValueError:
                    raise UsageError(f"not a number: {item!r}") from None
    return out


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--path", choices=PATH_CHOICES, default="ei2d")
    p.add_argument("--mc-samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--max-subdivisions", type=int, default=2000)
    p.add_argument("--truncation-sigma", type=float, default=12.0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--no-timing", action="store_true",
                   help="write seconds=0 so identical runs give byte-identical output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="udwcov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate one parameter point")
    ev.add_argument("--v", type=float)
    ev.add_argument("--t-over-ell", type=float)
    ev.add_argument("--omega-t", type=float)
    ev.add_argument("--omega", type=float)
    ev.add_argument("--t-switch", type=float)
    ev.add_argument("--ell", type=float)
    ev.add_argument("--pointlike", action="store_true")
    _add_common(ev)

    sw = sub.add_parser("sweep", help="evaluate the Cartesian product of parameter lists")
    sw.add_argument("--v", nargs="+")
    sw.add_argument("--t-over-ell", nargs="+")
    sw.add_argument("--omega-t", nargs="+")
    _add_common(sw)

    va = sub.add_parser("validate", help="cross-check all evaluation paths on a grid")
    va.add_argument("--grid", choices=("standard", "quick"), default="standard")
    va.add_argument("--mc-samples", type=int)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--rel-agreement", type=float, default=1e-4)
    va.add_argument("--mc-sigmas", type=float, default=3.0)
    va.add_argument("--config", metavar="FILE")
    va.add_argument("--inject-constant-error", type=float, default=None, help=argparse.SUPPRESS)
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required: eval, sweep or validate")
    if getattr(args, "config", None):
        try:
            file_values = load_config_file(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(file_values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        # flags win: re-parse with the file as defaults
        for action in sub._actions:
            if action.dest in file_values:
                raw = file_values[action.dest]
                if action.nargs == "+":
                    action.default = [raw]
                elif isinstance(action, argparse._StoreTrueAction):
                    action.default = raw.lower() in ("1", "true", "yes", "on")
                elif action.type is not None:
                    try:
                        action.default = action.type(raw)
                    except ValueError:
                        raise UsageError(f"bad value for {action.dest}: {raw!r}") from None
                else:
                    action.default = raw
                if action.choices is not None and action.default not in action.choices:
                    raise UsageError(f"bad value for {action.dest}: {raw!r}")
        args = parser.parse_args(argv)
    return args


def _quad(args) -> QuadratureSpec:
    try:
        return QuadratureSpec(args.abs_tol, args.rel_tol, args.max_subdivisions, args.truncation_sigma)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_v(v):
    if v is None:
        raise UsageError("--v is required")
    if not (math.isfinite(v) and abs(v) < 1):
        raise UsageError(f"--v must satisfy |v| < 1, got {v}")


def _common_checks(args):
    if args.mc_samples < 10**4:
        raise UsageError("--mc-samples must be >= 10000")
    if args.seed < 0:
        raise UsageError("--seed must be >= 0")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_eval(args) -> int:
    _common_checks(args)
    _check_v(args.v)
    dimensional = None
    if args.omega is not None or args.t_switch is not None or args.ell is not None:
        if None in (args.omega, args.t_switch) or (args.ell is None and not args.pointlike):
            raise UsageError("dimensional input needs --omega, --t-switch and --ell")
        ell = args.ell if args.ell is not None else 1.0
        if not (args.t_switch > 0 and ell > 0 and args.omega >= 0):
            raise UsageError("need --t-switch > 0, --ell > 0, --omega >= 0")
        dimensional = (args.omega, args.t_switch, ell)
        t_over_ell, omega_t = args.t_switch / ell, args.omega * args.t_switch
    else:
        if args.t_over_ell is None or args.omega_t is None:
            raise UsageError("give --t-over-ell and --omega-t, or --omega, --t-switch and --ell")
        if not (args.t_over_ell > 0 and args.omega_t >= 0):
            raise UsageError("need --t-over-ell > 0 and --omega-t >= 0")
        t_over_ell, omega_t = args.t_over_ell, args.omega_t

    task = RowTask(args.v, t_over_ell, omega_t, args.path, _quad(args), args.mc_samples,
                   args.seed, args.pointlike, dimensional, not args.no_timing)
    record, converged = evaluate_row(task)
    text = to_json([record]) if args.format == "json" else to_csv([record])
    _emit(text, args.out)
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_sweep(args) -> int:
    _common_checks(args)
    vs, tls, wts = _float_list(args.v), _float_list(args.t_over_ell), _float_list(args.omega_t)
    if not (vs and tls and wts):
        raise UsageError("--v, --t-over-ell and --omega-t each need at least one value")
    if any(not (0 <= v < 1) for v in vs):
        raise UsageError("sweep speeds must lie in [0, 1)")
    if any(not tl > 0 for tl in tls):
        raise UsageError("t_over_ell values must be > 0")
    if any(not wt >= 0 for wt in wts):
        raise UsageError("omega_t values must be >= 0")
    quad = _quad(args)
    tasks = [RowTask(v, tl, wt, args.path, quad, args.mc_samples, args.seed, timing=not args.no_timing)
             for v, tl, wt in itertools.product(vs, tls, wts)]
    results = run_rows(tasks, args.jobs)
    records = [r for r, _ in results]
    text = to_json(records) if args.format == "json" else to_csv(records)
    _emit(text, args.out)
    return EXIT_OK if all(ok for _, ok in results) else EXIT_NONCONVERGED


def validate_point(v, tl, wt, mc_samples, seed, rel_agreement=1e-4, mc_sigmas=3.0):
    """Evaluate all four paths at one point; return (report dict, list of failures)."""
    config = config_from_triple(v, tl, wt)
    results = {
        "reduced3d": violation.trace_e_reduced3d(config),
        "ei2d": violation.trace_e_ei_2d(config),
        "dimensionless": violation.trace_e_dimensionless(v, tl, wt),
    }
    mc = violation.trace_e_reference_mc(config, samples=mc_samples, seed=seed)
    failures = []
    report = {"v": v, "t_over_ell": tl, "omega_t": wt, "mc": mc.imag, "mc_err": mc.error_estimate}
    for name, res in {**results, "mc": mc}.items():
        if abs(complex(res.value).real) > res.error_estimate:
            failures.append(f"{name}: real part {complex(res.value).real:g} exceeds error")
    names = list(results)
    for a, b in itertools.combinations(names, 2):
        x, y = results[a].imag, results[b].imag
        rel = abs(x - y) / max(abs(x), abs(y))
        report[f"{a}/{b}"] = x / y
        if rel > rel_agreement:
            failures.append(f"{a} vs {b}: relative difference {rel:.3g} > {rel_agreement:g}")
    for name, res in results.items():
        combined = math.hypot(mc.error_estimate, res.error_estimate)
        dev = abs(res.imag - mc.imag)
        report[f"{name}/mc"] = res.imag / mc.imag
        if dev > mc_sigmas * combined:
            failures.append(f"{name} vs mc: {dev / combined:.2f} combined standard errors")
    return report, failures


def cmd_validate(args) -> int:
    grid = violation.QUICK_GRID if args.grid == "quick" else violation.STANDARD_GRID
    samples = args.mc_samples or (10**6 if args.grid == "quick" else 10**7)
    if samples < 10**4:
        raise UsageError("--mc-samples must be >= 10000")
    saved = violation.EI2D_COEFF
    if args.inject_constant_error is not None:
        violation.EI2D_COEFF = saved * args.inject_constant_error
    failed = False
    try:
        for v, tl, wt in grid:
            report, failures = validate_point(v, tl, wt, samples, args.seed,
                                              args.rel_agreement, args.mc_sigmas)
            ratios = " ".join(f"{k}={val:.8f}" for k, val in report.items() if "/" in k)
            status = "ok" if not failures else "FAIL"
            print(f"[{status}] v={v:g} T/l={tl:g} OmegaT={wt:g} mc={report['mc']:.6e}"
                  f"+/-{report['mc_err']:.2e} {ratios}")
            for msg in failures:
                failed = True
                print(f"    offending point (v={v:g}, T/l={tl:g}, OmegaT={wt:g}): {msg}")
    finally:
        violation.EI2D_COEFF = saved
    return EXIT_VALIDATION if failed else EXIT_OK


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        handler = {"eval": cmd_eval, "sweep": cmd_sweep, "validate": cmd_validate}[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"udwcov: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"udwcov: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
