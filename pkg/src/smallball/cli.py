"""Command-line front end.

Exit codes: 0 success, 1 sandwich violation, 2 invalid input, 3 numerical failure.
Output goes to ``--output``, else to ``$SMALLBALL_OUTPUT_DIR/<command>.<format>``
when that variable is set, else to stdout.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, closed_forms, lower, montecarlo, regression, sandwich, spectra, subgauss, upper_diag
from ._validation import DomainError, QuadratureError, check_alpha
from .results import BoundUnavailable

SCHEMA = "smallball.run/1"
OUTPUT_DIR_ENV = "SMALLBALL_OUTPUT_DIR"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def parse_eps(text):
    """'0.1,0.2' or 'log:lo:hi:n'; returned sorted ascending without duplicates."""
    text = text.strip()
    if text.startswith("log:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"log grid must look like log:lo:hi:n, got {text!r}")
        lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        if not (0 < lo < hi) or n < 2:
            raise UsageError(f"log grid needs 0 < lo < hi and n >= 2, got {text!r}")
        values = closed_forms.log_grid(lo, hi, n)
    else:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"cannot parse eps list {text!r}") from exc
    values = sorted(set(float(v) for v in values))
    if not values or values[0] <= 0 or not all(math.isfinite(v) for v in values):
        raise UsageError("eps grid must be nonempty and strictly positive")
    return values


def parse_sequence(text):
    """power:<gamma> | exp | exp:<rate> | csv:<path>."""
    kind, _, arg = text.partition(":")
    if kind == "power" and arg:
        return spectra.power_sequence(float(arg))
    if kind == "exp":
        return spectra.exponential_sequence(float(arg) if arg else 1.0)
    if kind == "csv" and arg:
        return spectra.load_csv(arg)
    raise UsageError(f"sequence must be power:<gamma>, exp[:rate] or csv:<path>, got {text!r}")


def _clean(value):
    if isinstance(value, float | np.floating):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_clean(v) for v in value]
    return value


def render(command, params, rows, fmt, extra=None):
    if fmt == "json":
        doc = {"schema": SCHEMA, "version": __version__, "command": command,
               "params": params, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in _clean(row).items()})
    return buf.getvalue()


def emit(text, command, fmt, output):
    if output is None and os.environ.get(OUTPUT_DIR_ENV):
        directory = os.environ[OUTPUT_DIR_ENV]
        os.makedirs(directory, exist_ok=True)
        output = os.path.join(directory, f"{command}.{fmt}")
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _bound_row(eps, side, formula, fn):
    row = {"eps": eps, "side": side, "formula": formula}
    try:
        res = fn()
    except (BoundUnavailable, DomainError) as exc:
        row.update(available=False, reason=str(exc), log_value=None, n_star=None,
                   equation=None, constants=None, center_free=None)
        return row
    d = res.as_dict()
    row.update(available=True, reason=None, log_value=d["log_value"], n_star=d["n_star"],
               formula=d["formula"], equation=d["equation"], constants=d["constants"],
               center_free=d["center_free"])
    return row


def bounds_rows(family, seq, alpha, eps_grid, beta=None, r=None):
    rows = []
    if family == "diag":
        env = seq.envelope("minorant_alpha", alpha)
        checks = [
            ("upper", "eq2", lambda e: upper_diag.bound_cube(env, alpha, e, log_convex=False)),
            ("upper", "eq3", lambda e: upper_diag.bound_ball(env, alpha, e, log_convex=False)),
        ]
        if env.log_convex:
            checks += [
                ("upper", "eq4", lambda e: upper_diag.bound_cube(env, alpha, e, log_convex=True)),
                ("upper", "eq5", lambda e: upper_diag.bound_ball(env, alpha, e, log_convex=True)),
            ]
        checks += [
            ("upper", "eq6_direct", lambda e: upper_diag.direct_cube_bound(seq, env, alpha, e)),
            ("upper", "eq7_direct", lambda e: upper_diag.direct_ball_bound(seq, env, alpha, e)),
        ]
        if alpha < 2.0:
            ball_p = lower.LowerBoundParams.ball_defaults(alpha)
            cube_p = lower.LowerBoundParams.cube_defaults(alpha)
            ball_p = lower.LowerBoundParams(beta or ball_p.beta, r or ball_p.r)
            cube_p = lower.LowerBoundParams(beta or cube_p.beta, r or cube_p.r)
            checks += [
                ("lower", "eq17", lambda e: lower.lower_bound_ball(seq, None, alpha, ball_p, e)),
                ("lower", "eq17_explicit",
                 lambda e: lower.lower_bound_ball(seq, None, alpha, ball_p, e, explicit=True)),
                ("lower", "eq18", lambda e: lower.lower_bound_cube(seq, None, alpha, cube_p, e)),
                ("lower", "eq18_explicit",
                 lambda e: lower.lower_bound_cube(seq, None, alpha, cube_p, e, explicit=True)),
            ]
    else:
        env = seq.envelope("minorant_half", alpha)
        checks = [("upper", "eq12", lambda e: subgauss.bound_ball_subgauss(env, alpha, e, log_convex=False))]
        if env.log_convex:
            checks.append(("upper", "eq13", lambda e: subgauss.bound_ball_subgauss(env, alpha, e, log_convex=True)))
        checks.append(("upper", "eq15_direct", lambda e: subgauss.direct_ball_bound_subgauss(seq, env, alpha, e)))
    for e in eps_grid:
        for side, formula, fn in checks:
            row = _bound_row(e, side, formula, lambda fn=fn, e=e: fn(e))
            if family == "subgauss":
                row["gaussian_reduction"] = alpha == 2.0
            rows.append(row)
    return rows


def examples_rows(alpha, gamma, gamma1, eps_grid):
    eps = np.asarray(eps_grid)
    inside = eps[(eps > 0) & (eps < 1)]
    tables = []
    for e in inside:
        row = {"eps": float(e)}
        for name, fn in (
            ("eq22", lambda x: closed_forms.ex1_ball_subgauss(alpha, gamma, x)),
            ("eq23", lambda x: closed_forms.ex1_cube_diag(alpha, gamma, x)),
            ("eq24", lambda x: closed_forms.ex1_ball_diag(alpha, gamma, x)),
            ("eq25_display", lambda x: closed_forms.ex1_ball_lower(alpha, gamma, gamma1, x)),
            ("eq26", lambda x: closed_forms.ex2_cube_lower(alpha, x)),
            ("eq27", lambda x: closed_forms.ex2_cube_upper(alpha, x)),
        ):
            try:
                row[name] = float(fn(float(e)))
            except DomainError:
                row[name] = None
        tables.append(row)
    report = []
    if len(inside) >= 4:
        report = regression.power_report(alpha, gamma, inside) + regression.exponential_report(alpha, inside)
    return tables, report


def _mc_config(args):
    return montecarlo.MCConfig(samples=args.samples, seed=args.seed, truncation=args.truncation,
                               delta=args.delta, workers=args.workers)


def cmd_bounds(args):
    seq, alpha, eps = parse_sequence(args.seq), check_alpha(args.alpha), parse_eps(args.eps)
    rows = bounds_rows(args.family, seq, alpha, eps, args.beta, args.r)
    params = {"family": args.family, "alpha": alpha, "sequence": str(seq), "eps": eps,
              "beta": args.beta, "r": args.r}
    return rows, params, None, EXIT_OK


def cmd_mc(args):
    seq, alpha, eps = parse_sequence(args.seq), check_alpha(args.alpha), parse_eps(args.eps)
    cfg = _mc_config(args)
    norm = "linf" if args.set == "cube" else "l2"
    estimates = montecarlo.estimate(args.family, seq, alpha, eps, cfg, norm)[0]
    rows = [est.as_dict() for est in estimates]
    params = {"family": args.family, "alpha": alpha, "sequence": str(seq), "eps": eps,
              "set": args.set, "samples": cfg.samples, "seed": cfg.seed, "workers": cfg.workers,
              "delta": cfg.delta, "truncation": cfg.truncation}
    return rows, params, None, EXIT_OK


def cmd_verify(args):
    seq, alpha, eps = parse_sequence(args.seq), check_alpha(args.alpha), parse_eps(args.eps)
    cfg = _mc_config(args)
    rows, violations = sandwich.run(args.family, seq, alpha, eps, cfg, args.beta, args.r,
                                    n_centers=args.centers)
    params = {"family": args.family, "alpha": alpha, "sequence": str(seq), "eps": eps,
              "samples": cfg.samples, "seed": cfg.seed, "workers": cfg.workers, "delta": cfg.delta,
              "truncation": cfg.truncation, "beta": args.beta, "r": args.r, "centers": args.centers}
    return rows, params, {"violations": violations}, EXIT_VIOLATION if violations else EXIT_OK


def cmd_examples(args):
    alpha, eps = check_alpha(args.alpha), parse_eps(args.eps_grid)
    gamma1 = args.gamma1 if args.gamma1 is not None else 0.5 * (1.0 + args.gamma)
    tables, report = examples_rows(alpha, args.gamma, gamma1, eps)
    params = {"alpha": alpha, "gamma": args.gamma, "gamma1": gamma1, "eps": eps}
    constants = {"C5": closed_forms.C5(alpha, args.gamma), "C6": closed_forms.C6(alpha, args.gamma),
                 "C7": closed_forms.C7(alpha, args.gamma), "C8": closed_forms.C8(alpha),
                 "constants": "symbolic-dropped"}
    return tables, params, {"regression": report, "closed_form_constants": constants}, EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="smallball", description="Small-ball bounds for stable measures.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mc=False):
        p.add_argument("--family", choices=montecarlo.FAMILIES, default="diag")
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--seq", required=True, help="power:<gamma> | exp[:rate] | csv:<path>")
        p.add_argument("--eps", required=True, help="comma list or log:lo:hi:n")
        if mc:
            p.add_argument("--samples", type=int, default=100_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)
            p.add_argument("--delta", type=float, default=0.01)
            p.add_argument("--truncation", type=int, default=None)

    def out(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", default=None)

    p = sub.add_parser("bounds", help="tabulate every applicable bound")
    common(p)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    out(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("mc", help="Monte Carlo estimates")
    common(p, mc=True)
    p.add_argument("--set", choices=("ball", "cube"), default="ball")
    out(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", help="check explicit bounds against Monte Carlo")
    common(p, mc=True)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--centers", type=int, default=0)
    out(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", help="closed-form tables and exponent regressions")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--gamma1", type=float, default=None)
    p.add_argument("--eps-grid", default="log:1e-3:1e-1:20")
    out(p)
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        rows, params, extra, code = args.func(args)
        emit(render(args.command, params, rows, args.format, extra), args.command, args.format, args.output)
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
