"""Command-line front end.

Subcommands: ``spectrum``, ``expansion``, ``cycle``, ``demon``, ``validate``.
Exit codes: 0 success, 1 validation failure, 2 usage error.
"""
import argparse
import contextlib
import math
import sys

import numpy as np

from . import cycle, demon
from . import spectrum as sp
from . import validation
from .errors import BracketError, DomainError, PoleError, TruncationError
from .output import NATURAL_UNITS_HEADER, PhysicalUnits, emit

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

WORK_CONVENTION = ("sign convention: w_insert is work done on the particle, w_extract is work "
                   "done by the particle on the barrier; heats are absorbed by the particle")


class UsageError(Exception):
    pass


def _add_common(p):
    p.add_argument("--config", help="flat 'key = value' file; flags given on the command line win")
    p.add_argument("--theta", type=float, default=1.0, help="hbar*omega / (k_B T) (default 1)")
    p.add_argument("--g", type=float, default=1.0, help="central barrier strength (default 1)")
    p.add_argument("--x0-min", type=float, default=sp.X0_MIN, help="far barrier position (default -12)")
    p.add_argument("--x0-max", type=float, default=0.0,
                   help="near barrier position; 0 gives 0 followed by a log grid from -1e-3 (default 0)")
    p.add_argument("--points", type=int, default=cycle.DEFAULT_POINTS, help="grid points (default 400)")
    p.add_argument("--levels", type=int, default=64, help="levels kept per family (default 64)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps (default 1)")
    p.add_argument("--quick", action="store_true", help="skip the slow parts")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generation time from outputs")
    p.add_argument("--physical-units", nargs=4, type=float, metavar=("M", "OMEGA", "HBAR", "T"),
                   help="SI scales; theta is then derived from T and outputs are converted")


def build_parser():
    parser = argparse.ArgumentParser(prog="hqszilard",
                                     description="Harmonic quantum Szilard engine calculations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="even-level quantization condition samples and roots")
    _add_common(p)
    p.add_argument("--e-max", type=float, default=8.0, help="sample energies in (0, e_max) (default 8)")

    p = sub.add_parser("expansion", help="level branches, free energy and force along the barrier sweep")
    _add_common(p)
    p.add_argument("--branches", type=int, default=8, help="branch columns to emit (default 8)")

    p = sub.add_parser("cycle", help="work, heat and entropy ledger for one cycle")
    _add_common(p)

    p = sub.add_parser("demon", help="pointer measurement entropies")
    _add_common(p)
    p.add_argument("--pairs", type=int, default=20, help="left/right level pairs (default 20)")
    p.add_argument("--angle", type=float, default=demon.PROJECTIVE_ANGLE,
                   help="coupling rotation angle (default pi/4, projective)")

    p = sub.add_parser("validate", help="run the acceptance checks")
    _add_common(p)
    p.add_argument("--inject-wrong-prefactor", action="store_true",
                   help="negative control: expect the 1/sqrt(pi) force prefactor")
    return parser


def read_config(path):
    """Parse a flat ``key = value`` file; blank lines and ``#`` comments allowed."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key or not value:
                raise UsageError(f"{path}:{lineno}: empty key or value")
            values[key.replace("-", "_")] = value
    return values


def _apply_config(parser, sub_parser, argv, args):
    """Re-parse with config-file values as defaults, so explicit flags still win."""
    values = read_config(args.config)
    actions = {a.dest: a for a in sub_parser._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in actions or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        action = actions[key]
        try:
            if action.nargs == 0:
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            elif action.nargs == 4:
                defaults[key] = [float(v) for v in raw.replace(",", " ").split()]
                if len(defaults[key]) != 4:
                    raise ValueError
            else:
                defaults[key] = (action.type or str)(raw)
        except ValueError:
            raise UsageError(f"bad value for config key {key!r}: {raw!r}") from None
        if action.choices is not None and defaults[key] not in action.choices:
            raise UsageError(f"config key {key!r} must be one of {sorted(action.choices)}")
    sub_parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _validate_config(args):
    if args.physical_units:
        try:
            args.units = PhysicalUnits(*args.physical_units)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        args.theta = args.units.theta
    else:
        args.units = None
    if not (args.theta > 0 and math.isfinite(args.theta)):
        raise UsageError("theta must be positive")
    if not args.x0_min < args.x0_max <= 0:
        raise UsageError("need x0_min < x0_max <= 0")
    if args.x0_min < sp.X0_MIN:
        raise UsageError(f"x0_min must be >= {sp.X0_MIN}")
    if args.levels < 4:
        raise UsageError("levels must be at least 4")
    if args.points < 3:
        raise UsageError("points must be at least 3")
    if args.jobs < 1:
        raise UsageError("jobs must be at least 1")
    if args.g < 0:
        raise UsageError("g must be non-negative")


def _config_echo(args, *keys):
    echo = {"command": args.command, "theta": args.theta}
    for k in keys:
        v = getattr(args, k)
        echo[k] = list(v) if isinstance(v, (list, tuple)) else v
    if args.units is not None:
        echo["physical_units"] = list(args.physical_units)
    return echo


def _notes(args, *extra):
    notes = list(NATURAL_UNITS_HEADER) if args.units is None else args.units.header()
    return notes + list(extra)


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _x0_grid(args):
    if args.x0_max == 0.0:
        return cycle.default_x0_grid(cycle.DEFAULT_X0_NEAR, args.x0_min, args.points)
    grid = -np.logspace(math.log10(-args.x0_max), math.log10(-args.x0_min), args.points)
    grid[0], grid[-1] = args.x0_max, args.x0_min
    return grid


def cmd_spectrum(args):
    e_max = args.e_max
    if not e_max > 0:
        raise UsageError("e_max must be positive")
    n_roots = max(1, int(math.floor((e_max - 0.5) / 2.0)) + 1)
    rows = []
    for e in np.linspace(0.0, e_max, args.points + 2)[1:-1]:
        rows.append(["sample", "", float(e), float(sp.quantization_rhs(e))])
    # vertical asymptotes of the right-hand side (poles of Gamma(3/4 - e/2))
    k = 0
    while 2 * k + 1.5 < e_max:
        rows.append(["asymptote", f"pole_{k}", 2 * k + 1.5, math.nan])
        k += 1
    k = 0
    while 2 * k + 0.5 < e_max:
        rows.append(["zero", f"zero_{k}", 2 * k + 0.5, 0.0])
        k += 1
    spec = sp.even_levels_at_g(args.g, n_roots)
    for label, e in zip(spec.labels, spec.energies):
        if e < e_max:
            rows.append(["root", label, float(e), args.g])
    scale = 1.0 if args.units is None else args.units.energy
    rows = [[r[0], r[1], r[2] * scale, r[3]] for r in rows]
    notes = _notes(args, "quantization condition: g = -2 Gamma(3/4 - e/2) / Gamma(1/4 - e/2)",
                   "kind=sample: gamma_ratio is the right-hand side at e; kind=root: even level where it equals g",
                   "kind=asymptote: e = 2k + 3/2 (right-hand side diverges); kind=zero: e = 2k + 1/2")
    with _sink(args.out) as out:
        emit(out, ["kind", "label", "e", "gamma_ratio"], rows, _config_echo(args, "g", "e_max", "points"),
             notes, args.format, not args.no_timestamp)
    return EXIT_OK


def cmd_expansion(args):
    grid = _x0_grid(args)
    curve = cycle.expansion_work_curve(args.theta, grid, args.levels, jobs=args.jobs, fd_check_points=0)
    nb = min(args.branches, args.levels)
    q0 = grid / sp.DX0_DQ0
    work = np.concatenate([[0.0], np.cumsum(0.5 * (curve.force[1:] + curve.force[:-1]) * np.diff(q0))])
    u = args.units
    e_scale = 1.0 if u is None else u.energy
    l_scale = 1.0 if u is None else u.length
    f_scale = 1.0 if u is None else u.force
    columns = ["x0", "q0", "A", "F", "W"] + [f"e_{n}" for n in range(nb)]
    rows = []
    for i in range(grid.size):
        rows.append([float(grid[i]), float(q0[i]) * l_scale, float(curve.a_free[i]) * e_scale,
                     float(curve.force[i]) * f_scale, float(work[i]) * e_scale]
                    + [float(v) * e_scale for v in curve.branches[i, :nb]])
    notes = _notes(args, "A: free energy with the barrier at x0; F = -dA/dq0; "
                   "W: work done by the particle since the first grid point (trapezoid)",
                   f"quadrature: trapezoid {curve.work:.12g}, Richardson {curve.work_richardson:.12g}, "
                   f"free-energy drop {curve.delta_a:.12g}")
    with _sink(args.out) as out:
        emit(out, columns, rows, _config_echo(args, "x0_min", "x0_max", "points", "levels", "branches"),
             notes, args.format, not args.no_timestamp)
    return EXIT_OK


LEDGER_UNITS = {"theta": "1", "dS_measure": "k_B", "dS_particle_cycle": "k_B", "dS_pointer_cycle": "k_B",
                "spectral_levels": "1", "spectral_note": ""}


def cmd_cycle(args):
    led = cycle.run_cycle(args.theta, args.levels, quadrature=not args.quick,
                          x0_grid=_x0_grid(args), jobs=args.jobs)
    scale = 1.0 if args.units is None else args.units.energy
    unit = "hbar*omega" if args.units is None else "J"
    rows = []
    for key, value in led.as_dict().items():
        u = LEDGER_UNITS.get(key, unit)
        if isinstance(value, float) and u == unit:
            value = value * scale
        rows.append([key, value, u])
    width = max(len(r[0]) for r in rows)
    print(f"cycle ledger at theta = {args.theta:.10g}")
    print(WORK_CONVENTION)
    for key, value, u in rows:
        shown = f"{value:+.12e}" if isinstance(value, float) else str(value)
        print(f"  {key:<{width}s}  {shown}  {u}")
    if args.out:
        with _sink(args.out) as out:
            emit(out, ["field", "value", "unit"], rows, _config_echo(args, "levels", "quick"),
                 _notes(args, WORK_CONVENTION), args.format, not args.no_timestamp)
    return EXIT_OK


def cmd_demon(args):
    if args.pairs < 1:
        raise UsageError("pairs must be at least 1")
    report = demon.measurement_report(args.theta, args.pairs, args.angle)
    rows = [[k, v] for k, v in report.items()]
    with _sink(args.out) as out:
        emit(out, ["quantity", "value"], rows, _config_echo(args, "pairs", "angle"),
             _notes(args, "entropies in k_B; reset_work_min in hbar*omega"), args.format,
             not args.no_timestamp)
    return EXIT_OK


def cmd_validate(args):
    results = validation.run_checks(quick=args.quick, inject_wrong_prefactor=args.inject_wrong_prefactor)
    for r in results:
        print(r.line())
        for d in r.details:
            print(f"      {d}")
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed")
    if args.out:
        rows = [[r.number, r.title, r.passed, round(r.seconds, 3), " | ".join(r.details)] for r in results]
        with _sink(args.out) as out:
            emit(out, ["number", "title", "passed", "seconds", "details"], rows,
                 _config_echo(args, "quick", "inject_wrong_prefactor"), _notes(args), args.format,
                 not args.no_timestamp)
    return EXIT_OK if n_pass == len(results) else EXIT_FAIL


COMMANDS = {"spectrum": cmd_spectrum, "expansion": cmd_expansion, "cycle": cmd_cycle,
            "demon": cmd_demon, "validate": cmd_validate}


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        if args.config:
            sub_parser = parser._subparsers._group_actions[0].choices[args.command]
            args = _apply_config(parser, sub_parser, argv, args)
        _validate_config(args)
        return COMMANDS[args.command](args)
    except (UsageError, OSError) as exc:
        print(f"hqszilard: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, PoleError, TruncationError, BracketError) as exc:
        print(f"hqszilard: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
