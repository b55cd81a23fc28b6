"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 numerical-contract violation,
4 Monte Carlo oracle disagreement (``mc-check``).
"""

from __future__ import annotations

import argparse
import math
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from . import eigen, field, functional, oracle
from .functional import (
    PUBLISHED_COEFFICIENTS,
    PUBLISHED_KAPPA,
    PUBLISHED_NU,
    PUBLISHED_THETA,
    AmplifierConfig,
)
from .report import bound_record, emit_report, make_meta

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ORACLE = 0, 2, 3, 4
HELP_WIDTH = 100


class UsageError(ValueError):
    pass


# --- flag parsing -----------------------------------------------------------


def _theta(text: str) -> Fraction:
    try:
        value = functional.parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not 0 <= value <= functional.MAX_THETA:
        raise argparse.ArgumentTypeError("theta must be in [0, 1/4]")
    return value


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _thetas(text: str) -> tuple[Fraction, ...]:
    return tuple(_theta(v) for v in text.split(",") if v.strip())


def _interval(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2 or not all(math.isfinite(v) for v in vals) or vals[1] < vals[0]:
        raise argparse.ArgumentTypeError(f"expected a finite interval LO,HI, got {text!r}")
    return vals[0], vals[1]


def _positive_int(text: str) -> int:
    try:
        n = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def _nonneg_int(text: str) -> int:
    n = _positive_int(text) if text.strip() not in ("0",) else 0
    return n


def _discriminant(text: str) -> int:
    try:
        D = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer discriminant, got {text!r}") from None
    if D in (0, 1) or D % 4 not in (0, 1):
        raise argparse.ArgumentTypeError(f"{D} is not a quadratic discriminant (D = 0, 1 mod 4, D != 0, 1)")
    return D


def _formatter(prog: str) -> argparse.HelpFormatter:
    return argparse.HelpFormatter(prog, width=HELP_WIDTH, max_help_position=34)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zerogap",
        description="Exact zero-gap functionals for Dedekind zeta-functions of quadratic fields.",
        formatter_class=_formatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="report format: json | csv (default json; csv for curve)")
    common.add_argument("--out", metavar="PATH", default=None,
                        help="write the report to PATH instead of standard output")
    common.add_argument("--config", metavar="FILE", default=None,
                        help="flat key=value file of flag defaults; command-line flags override it")

    def amp(p, degree=True):
        p.add_argument("--theta", type=_theta, default=PUBLISHED_THETA, metavar="P/Q",
                       help="amplifier length exponent, exact rational in [0, 1/4] (default 1/4)")
        p.add_argument("--r", type=_positive_int, default=1, metavar="INT",
                       help="divisor-function order r >= 1 (default 1)")
        if degree:
            p.add_argument("--degree", type=_nonneg_int, default=4, metavar="INT",
                           help="degree d >= 0 of the polynomial P (default 4)")

    def nu_range(p):
        p.add_argument("--nu-range", type=_interval, default=(0.0, 4.0), metavar="LO,HI",
                       help="finite search interval for nu (default 0,4)")

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sub.add_parser("reproduce", parents=[common], formatter_class=_formatter,
                   help="evaluate h at the published configuration",
                   description="Evaluate h at theta=1/4, r=1, nu=1.2773, kappa=2.866 and the "
                               "published degree-4 polynomial.")

    p = sub.add_parser("eval", parents=[common], formatter_class=_formatter,
                       help="evaluate c0, c1 and h for given coefficients")
    amp(p, degree=False)
    p.add_argument("--degree", type=_nonneg_int, default=None, metavar="INT",
                   help="degree d >= 0; must equal len(coeffs)-1 if given")
    p.add_argument("--coeffs", type=_floats, required=True, metavar="B0,B1,...",
                   help="real coefficients b0..bd of P, not all zero")
    p.add_argument("--nu", type=float, required=True, metavar="REAL", help="real shift nu")
    p.add_argument("--kappa", type=float, default=None, metavar="REAL",
                   help="gap multiple kappa > 0 at which to evaluate h")

    p = sub.add_parser("optimize", parents=[common], formatter_class=_formatter,
                       help="maximise kappa over nu and the coefficients")
    amp(p)
    nu_range(p)
    p.add_argument("--nu-tol", type=float, default=1e-7, metavar="REAL",
                   help="golden-section tolerance in nu, > 0 (default 1e-7)")
    p.add_argument("--kappa", type=float, default=None, metavar="REAL",
                   help="optional kappa > 0 at which to report h")

    p = sub.add_parser("scan", parents=[common], formatter_class=_formatter,
                       help="optimize over a grid of (theta, r, degree)")
    p.add_argument("--theta", type=_thetas, default=(PUBLISHED_THETA,), metavar="P/Q,...",
                   help="comma list of rationals in [0, 1/4] (default 1/4)")
    p.add_argument("--r", type=_ints, default=(1,), metavar="INT,...",
                   help="comma list of r >= 1 (default 1)")
    p.add_argument("--degree", type=_ints, default=(0, 1, 2, 3, 4), metavar="INT,...",
                   help="comma list of degrees >= 0 (default 0,1,2,3,4)")
    nu_range(p)
    p.add_argument("--nu-tol", type=float, default=1e-7, metavar="REAL",
                   help="golden-section tolerance in nu, > 0 (default 1e-7)")
    p.add_argument("--threads", type=_positive_int, default=1, metavar="INT",
                   help="worker threads, >= 1; results do not depend on it (default 1)")

    p = sub.add_parser("curve", parents=[common], formatter_class=_formatter,
                       help="kappa(nu) on a uniform nu grid")
    amp(p)
    nu_range(p)
    p.add_argument("--nu-step", type=float, default=eigen.GRID_STEP, metavar="REAL",
                   help=f"grid spacing in nu, > 0 (default {eigen.GRID_STEP})")

    p = sub.add_parser("mc-check", parents=[common], formatter_class=_formatter,
                       help="compare exact values with Monte Carlo oracles")
    amp(p, degree=False)
    p.add_argument("--coeffs", type=_floats, default=PUBLISHED_COEFFICIENTS, metavar="B0,B1,...",
                   help="real coefficients of P (default: the published degree-4 polynomial)")
    p.add_argument("--nu", type=float, default=PUBLISHED_NU, metavar="REAL",
                   help=f"real shift nu (default {PUBLISHED_NU})")
    p.add_argument("--samples", type=_positive_int, default=1_000_000, metavar="INT",
                   help="Monte Carlo sample count, >= 1000 (default 1000000)")
    p.add_argument("--fd-samples", type=_positive_int, default=None, metavar="INT",
                   help="samples for the operator-identity check (default: --samples)")
    p.add_argument("--fd-step", type=float, default=1e-2, metavar="REAL",
                   help="finite-difference step in [1e-3, 1e-1] (default 0.01)")
    p.add_argument("--seed", type=int, default=0, metavar="INT",
                   help="64-bit seed of the PCG64 substreams (default 0)")
    p.add_argument("--threads", type=_positive_int, default=1, metavar="INT",
                   help="worker threads, >= 1; results do not depend on it (default 1)")

    p = sub.add_parser("field", parents=[common], formatter_class=_formatter,
                       help="constants of the quadratic field of discriminant D")
    p.add_argument("--discriminant", type=_discriminant, required=True, metavar="D",
                   help="quadratic discriminant D = 0, 1 (mod 4), D not in {0, 1}")
    p.add_argument("--r", type=_positive_int, default=1, metavar="INT",
                   help="order r >= 1 of the arithmetic factor A_r (default 1)")
    p.add_argument("--prime-cut", type=_nonneg_int, default=100_000, metavar="INT",
                   help="largest prime >= 0 in the Euler product (default 100000)")
    p.add_argument("--T", type=float, default=1e6, metavar="REAL",
                   help="height T >= 2 for the zero-density statistics (default 1e6)")

    p = sub.add_parser("conjecture", parents=[common], formatter_class=_formatter,
                       help="the ratio (4k^2-1)/(4k^4) from conjectural zeta^k moments")
    p.add_argument("--k", type=_positive_int, required=True, metavar="INT", help="moment order k >= 1")
    return parser


def _apply_config_file(argv: list[str]) -> list[str]:
    """Insert ``key=value`` pairs from ``--config FILE`` ahead of explicit flags."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    path = None
    rest = []
    it = iter(range(len(argv)))
    for i in it:
        a = argv[i]
        if a == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a file")
            path = argv[i + 1]
            next(it, None)
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
        else:
            rest.append(a)
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    extra = []
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        extra += [f"--{key.lstrip('-')}", value]
    if not rest:
        return extra
    return rest[:1] + extra + rest[1:]


# --- commands ---------------------------------------------------------------


def _cmd_reproduce(args) -> tuple[Any, dict]:
    cfg = AmplifierConfig.published()
    gf = functional.assemble(cfg)
    res = functional.evaluate_h(gf, PUBLISHED_COEFFICIENTS, PUBLISHED_NU, PUBLISHED_KAPPA)
    record = bound_record(res)
    record["kappa_implied"] = res.kappa
    # our own optimum for the same (theta, r, d), side by side
    best = eigen.optimize(gf, (0.0, 4.0), 1e-7, PUBLISHED_KAPPA)
    record["optimum"] = {"kappa": best.kappa, "nu": best.nu, "coeffs": list(best.coefficients),
                         "h": best.h}
    return record, {}


def _cmd_eval(args):
    d = len(args.coeffs) - 1
    if d < 0:
        raise UsageError("coeffs must not be empty")
    if args.degree is not None and args.degree != d:
        raise UsageError(f"degree {args.degree} does not match {len(args.coeffs)} coefficients")
    if args.kappa is not None and not args.kappa > 0:
        raise UsageError("kappa must be positive")
    cfg = AmplifierConfig(args.theta, args.r, d, args.coeffs)
    res = functional.evaluate_h(functional.assemble(cfg), args.coeffs, args.nu, args.kappa)
    return bound_record(res), {}


def _cmd_optimize(args):
    if not args.nu_tol > 0:
        raise UsageError("nu-tol must be positive")
    cfg = AmplifierConfig(args.theta, args.r, args.degree)
    res = eigen.optimize(functional.assemble(cfg), args.nu_range, args.nu_tol, args.kappa)
    return bound_record(res), {}


def _cmd_scan(args):
    def progress(msg):
        print(msg, file=sys.stderr)

    if any(r < 1 for r in args.r) or any(d < 0 for d in args.degree):
        raise UsageError("r must be >= 1 and degrees >= 0")
    combos = [(t, r, d) for t in args.theta for r in args.r for d in args.degree]
    if not combos:
        raise UsageError("scan lists must be non-empty")
    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        def one(c):
            return eigen.scan([c[0]], [c[1]], [c[2]], args.nu_range, args.nu_tol)[0]

        with ThreadPoolExecutor(args.threads) as pool:
            rows = list(pool.map(one, combos))
        for row in rows:
            progress(f"theta={row.theta} r={row.r} d={row.degree} "
                     + (f"kappa={row.result.kappa:.9f}" if row.result else f"error: {row.error}"))
    else:
        rows = eigen.scan(args.theta, args.r, args.degree, args.nu_range, args.nu_tol, progress)
    records = []
    for row in rows:
        if row.result is not None:
            rec = bound_record(row.result)
            rec["error"] = None
        else:
            rec = {"kappa": None, "nu": None, "theta": row.theta, "r": row.r, "degree": row.degree,
                   "coeffs": [], "h": None, "c0": None, "c1": None, "error": row.error}
        records.append(rec)
    return records, {}


def _cmd_curve(args):
    if not args.nu_step > 0:
        raise UsageError("nu-step must be positive")
    cfg = AmplifierConfig(args.theta, args.r, args.degree)
    nus = eigen.nu_grid(args.nu_range, args.nu_step)
    curve = eigen.kappa_curve(functional.assemble(cfg), nus)
    return [{"nu": nu, "kappa": k} for nu, k in curve], {}


def _cmd_mc_check(args):
    b = tuple(args.coeffs)
    if not b or not any(b):
        raise UsageError("coeffs must be a non-zero vector")
    if args.samples < oracle.MIN_SAMPLES:
        raise UsageError(f"samples must be >= {oracle.MIN_SAMPLES}")
    if not 1e-3 <= args.fd_step <= 1e-1:
        raise UsageError("fd-step must lie in [1e-3, 1e-1]")
    cfg = AmplifierConfig(args.theta, args.r, len(b) - 1, b)
    gf = functional.assemble(cfg)
    n, seed, th = args.samples, args.seed, args.threads
    records = []

    def check(name, exact, est):
        ok = est.agrees_with(exact)
        records.append({"check": name, "exact": exact, "estimate": est.mean, "stderr": est.stderr,
                        "z": (est.mean - exact) / est.stderr if est.stderr else 0.0, "agree": ok})

    check("c0", gf.c0(b), oracle.mc_estimate("c0", cfg, b, n, seed, threads=th))
    check("c1", gf.c1(b, args.nu), oracle.mc_estimate("c1", cfg, b, n, seed, nu=args.nu, threads=th))
    check("shifted_zero", gf.c0(b),
          oracle.mc_estimate("shifted", cfg, b, n, seed, shifts=(0,) * 6, threads=th))
    shifts = (0.3, -0.2, 0.5, 0.1, 0.4, -0.3)
    swapped = shifts[3:] + shifts[:3]
    a = oracle.mc_estimate("shifted", cfg, b, n, seed, shifts=shifts, threads=th)
    s = oracle.mc_estimate("shifted", cfg, b, n, seed + 1, shifts=swapped, threads=th)
    diff_err = math.hypot(a.stderr, s.stderr)
    records.append({"check": "shifted_swap", "exact": a.mean, "estimate": s.mean, "stderr": diff_err,
                    "z": (s.mean - a.mean) / diff_err if diff_err else 0.0,
                    "agree": abs(s.mean - a.mean) <= 3 * diff_err})
    op = oracle.operator_identity_check(cfg, b, args.nu, args.fd_step, args.fd_samples or n, seed, th)
    records.append({"check": "operator_identity", "exact": op.exact, "estimate": op.fd_value,
                    "stderr": op.fd_stderr, "z": (op.fd_value - op.exact) / op.fd_stderr,
                    "agree": op.residual <= 1e-2, "residual": op.residual, "certified": op.certified})
    failed = not all(r["agree"] for r in records)
    return records, {"seed": seed, "samples": n, "_exit": EXIT_ORACLE if failed else EXIT_OK}


def _cmd_field(args):
    D = args.discriminant
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = field.field_params(D)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.T < 2:
        raise UsageError("T must be >= 2")
    count, gap, L = field.density_stats(args.T, D)
    chi = [int(v) for v in field.character_table(D)[1:]] + [0]
    record = {
        "D": D,
        "q": params.q,
        "sign": params.sign,
        "fundamental": field.is_fundamental_discriminant(D),
        "chi": chi,
        "L1": field.dirichlet_L1(D),
        "r": args.r,
        "prime_cut": args.prime_cut,
        "A_r": field.arithmetic_factor(D, args.r, args.prime_cut),
        "T": args.T,
        "L": L,
        "zero_count_main": count,
        "avg_gap": gap,
    }
    return record, {}


def _cmd_conjecture(args):
    return {"k": args.k, "ratio": functional.hall_conjecture_ratio(args.k)}, {}


COMMANDS = {
    "reproduce": _cmd_reproduce,
    "eval": _cmd_eval,
    "optimize": _cmd_optimize,
    "scan": _cmd_scan,
    "curve": _cmd_curve,
    "mc-check": _cmd_mc_check,
    "field": _cmd_field,
    "conjecture": _cmd_conjecture,
}


def run_command(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    start = time.perf_counter()
    try:
        records, extra = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:  # includes NumericalContractError
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    runtime = (time.perf_counter() - start) * 1000
    code = extra.pop("_exit", EXIT_OK)
    fmt = args.format or ("csv" if args.command == "curve" else "json")
    meta = make_meta(runtime, extra.get("seed"), extra.get("samples"))
    try:
        emit_report(records, fmt, args.out, None if fmt == "csv" else meta)
    except OSError as exc:
        print(f"error: cannot write report: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE
    if code == EXIT_ORACLE:
        print("oracle disagreement: see report", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
