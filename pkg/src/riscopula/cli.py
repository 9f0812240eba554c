"""Command-line interface: outage curves, validation tables, theta fits, RIS placement.

All output is CSV (``# schema=1`` header line) or ``key: value`` text, formatted
deterministically so repeated runs with the same flags and seed are
byte-identical.  Exit codes: 0 success, 1 bad arguments, 2 numerical failure
(the affected cells are left empty and a warning goes to stderr).

dB quantities are converted to linear here and nowhere else.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from . import marginals, moments, montecarlo, outage
from .copula import fit_theta_simulated
from .montecarlo import SystemConfig, _threads
from .specfun import ConvergenceError, ContourError, FoxHUnivariateParams, fox_h_univariate, meijer_g

SCHEMA = "# schema=1"
KS_LIMIT = 0.002


class ArgumentError(Exception):
    pass


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` inclusive of ``stop``, or a single value."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if len(vals) == 1:
        return vals
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = vals
    if not step > 0 or start > stop:
        raise argparse.ArgumentTypeError(f"range needs step > 0 and start <= stop, got {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def parse_int_list(text: str) -> list[int]:
    try:
        out = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"need positive integers, got {text!r}")
    return out


def parse_bits(text: str) -> int | None:
    if text.lower() in ("inf", "continuous"):
        return None
    try:
        b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bits must be an integer or 'continuous', got {text!r}") from None
    if b < 1:
        raise argparse.ArgumentTypeError("bits must be >= 1")
    return b


def parse_theta(text: str) -> float | str:
    if text == "fit":
        return text
    try:
        th = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"theta must be a number in [-1, 1] or 'fit', got {text!r}") from None
    if not -1 <= th <= 1:
        raise argparse.ArgumentTypeError(f"theta must lie in [-1, 1], got {th}")
    return th


def positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines, ``#`` comments; keys use flag names with - or _."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ArgumentError(f"cannot read config {path}: {exc}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ArgumentError(f"{path}:{no}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def run_points(fn: Callable, items: Sequence) -> list:
    """Evaluate sweep points concurrently; results keep input order."""
    workers = _threads()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class Table:
    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: list[list] = []
        self.failures: list[str] = []

    def add(self, row: Sequence):
        self.rows.append(list(row))

    def render(self) -> str:
        buf = io.StringIO()
        buf.write(SCHEMA + "\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt(v) for v in row) + "\n")
        return buf.getvalue()


def guarded(table: Table, label: str, fn: Callable[[], float]):
    """Value of ``fn()`` or None with a recorded failure on non-convergence."""
    try:
        return fn()
    except (ConvergenceError, ContourError) as exc:
        table.failures.append(f"{label}: {exc}")
        return None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def resolve_theta(args, config: SystemConfig) -> float:
    if args.theta != "fit":
        return float(args.theta)
    if config.bits is None:
        raise ArgumentError("theta fitting needs quantized phases (bits >= 1)")
    return float(fit_theta_simulated(config, args.n, args.seed).theta)


def cmd_outage_curve(args) -> Table:
    gamma_th = db_to_linear(args.gamma_th_db)
    snrs = args.snr_db
    base = SystemConfig(args.M, args.bits, path_loss=args.path_loss, threshold=gamma_th)
    configs = [SystemConfig(args.M, args.bits, db_to_linear(s), args.path_loss, gamma_th) for s in snrs]
    theta = resolve_theta(args, base)
    table = Table(["snr_db", "outage_mc", "mc_stderr", "outage_quadrature",
                   "outage_closed_form", "outage_asymptotic", "theta"])

    mc = [None] * len(configs)
    if args.n > 0:
        mc = montecarlo.estimate_outage_curve(base, [c.rho_t for c in configs], args.n, args.seed)

    def point(c: SystemConfig):
        label = f"snr_db={10 * math.log10(c.transmit_snr):g}"
        if c.bits == 1:
            quad = guarded(table, label, lambda: outage.outage_quadrature_onebit(c, theta).value)
            closed = None
            if not args.skip_closed_form:
                closed = guarded(table, label, lambda: outage.outage_closed_form_onebit(c, theta).value)
            asym = outage.outage_asymptotic(c).value
        elif c.bits is not None:
            quad = guarded(table, label, lambda: outage.outage_bbit(c, theta).value)
            closed = None
            if not args.skip_closed_form:
                closed = guarded(table, label,
                                 lambda: outage.outage_bbit(c, theta, method="closed_form").value)
            asym = None
        else:
            quad = closed = asym = None
        return quad, closed, asym

    analytic = run_points(point, configs)
    for s, est, (quad, closed, asym) in zip(snrs, mc, analytic):
        table.add([s, est.value if est else None, est.std_error if est else None,
                   quad, closed, asym, theta])
    return table


def cmd_validate_marginals(args) -> Table:
    table = Table(["M", "axis", "n_samples", "ks_distance", "pass"])
    s = marginals.PHYSICAL_SCALE
    for M in args.M:
        x, y = montecarlo.draw_xy(SystemConfig(M, 1), args.n, args.seed)
        for axis, data, cdf in (("x", x, lambda v: marginals.cdf_x(M, v, s)),
                                ("y", y, lambda v: marginals.cdf_y(M, v, s))):
            d = montecarlo.ks_distance(np.sort(data), cdf)
            table.add([M, axis, args.n, d, d < KS_LIMIT])
    return table


def cmd_moments_table(args) -> Table:
    table = Table(["M", "b", "axis", "E2_closed", "E2_mc", "E4_closed", "E4_mc", "kappa", "scale", "ks_fit"])
    for M in args.M:
        for b in args.bits_list:
            cfg = SystemConfig(M, b)
            est = montecarlo.estimate_moments(cfg, args.n, args.seed)
            x, y = montecarlo.draw_xy(cfg, args.n, args.seed)
            for axis, e2, e4, data in (("x", est.x2, est.x4, x), ("y", est.y2, est.y4, y)):
                L = 2.0**b
                fit = moments.gamma_fit(M, b, axis)
                ks = montecarlo.ks_distance(np.sort(data * data), fit.cdf)
                table.add([M, b, axis, moments.mean_square(M, L, axis), e2.value,
                           moments.fourth_moment(M, L, axis), e4.value, fit.shape, fit.scale, ks])
    return table


def cmd_fit_theta(args) -> str:
    if args.bits is None:
        raise ArgumentError("fit-theta needs quantized phases (bits >= 1)")
    cfg = SystemConfig(args.M, args.bits)
    squared = None if args.variables == "auto" else args.variables == "squared"
    fit = fit_theta_simulated(cfg, args.n, args.seed, squared=squared, margins=args.margins)
    return (f"theta: {fmt(float(fit.theta))}\nlog_likelihood: {fmt(fit.log_likelihood)}\n"
            f"n: {fit.n}\nmargins: {fit.margins}\nseed: {args.seed}\n")


def position_grid(D: float, points: int) -> list[float]:
    """``points`` RIS positions strictly inside (0, D), evenly spaced."""
    return [D * (i + 1) / (points + 1) for i in range(points)]


def cmd_position_sweep(args) -> Table:
    gamma_th = db_to_linear(args.gamma_th_db)
    tx = db_to_linear(args.tx_snr_db)
    theta = args.theta
    table = Table(["d", "l1", "l2", "path_loss", "rho_t", "outage", "theta"])
    rows = []
    for d in position_grid(args.D, args.points):
        pl = outage.path_loss(d, args.D - d, args.nu)
        rows.append((d, pl, SystemConfig(args.M, args.bits, tx, pl, gamma_th)))
    if theta == "fit":
        theta = resolve_theta(args, rows[0][2])

    def point(row):
        c = row[2]
        if c.bits == 1:
            return guarded(table, f"d={row[0]:g}", lambda: outage.outage_quadrature_onebit(c, theta).value)
        return guarded(table, f"d={row[0]:g}", lambda: outage.outage_bbit(c, theta).value)

    values = run_points(point, rows)
    for (d, pl, c), v in zip(rows, values):
        table.add([d, d, args.D - d, pl, c.rho_t, v, theta])
    return table


def _pairs(text: str) -> tuple[tuple[float, float], ...]:
    if not text:
        return ()
    out = []
    for item in text.split(","):
        a, _, c = item.partition(":")
        out.append((float(a), float(c) if c else 1.0))
    return tuple(out)


def cmd_specfun_eval(args) -> str:
    """One parameter tuple per line: ``kind=<meijer|foxh> m= n= a= b= z=``.

    ``a`` and ``b`` are comma-separated; Fox-H entries are ``value:coefficient``.
    """
    try:
        with open(args.file, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ArgumentError(f"cannot read {args.file}: {exc}") from None
    out = []
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            kv = dict(tok.split("=", 1) for tok in line.split())
            kind, m, n, z = kv["kind"], int(kv["m"]), int(kv["n"]), float(kv["z"])
            a, b = _pairs(kv.get("a", "")), _pairs(kv.get("b", ""))
        except (KeyError, ValueError) as exc:
            raise ArgumentError(f"{args.file}:{no}: bad parameter line ({exc})") from None
        try:
            if kind == "meijer":
                val = meijer_g(m, n, [p[0] for p in a], [p[0] for p in b], z)
            elif kind == "foxh":
                val = fox_h_univariate(FoxHUnivariateParams(a, b, m, n), z)
            else:
                raise ArgumentError(f"{args.file}:{no}: unknown kind {kind!r}")
        except (ValueError, ContourError) as exc:
            if isinstance(exc, ConvergenceError):
                raise
            raise ArgumentError(f"{args.file}:{no}: {exc}") from None
        out.append(f"{fmt(val.value)},{fmt(val.err_estimate)}")
    return "value,err_estimate\n" + "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override its values")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = _Parser(prog="ris-copula", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    c = sub.add_parser("outage-curve", parents=[common], help="outage against transmit SNR")
    c.add_argument("--M", type=positive_int, default=4)
    c.add_argument("--bits", type=parse_bits, default=1)
    c.add_argument("--gamma-th-db", type=float, default=5.0)
    c.add_argument("--snr-db", type=parse_range, default="0:30:2")
    c.add_argument("--path-loss", type=float, default=1.0)
    c.add_argument("--theta", type=parse_theta, default="0")
    c.add_argument("--n", type=int, default=1_000_000, help="Monte-Carlo samples (0 disables)")
    c.add_argument("--skip-closed-form", action="store_true")
    c.set_defaults(func=cmd_outage_curve)

    v = sub.add_parser("validate-marginals", parents=[common], help="KS distances of the one-bit marginals")
    v.add_argument("--M", type=parse_int_list, default="1,2,4,8")
    v.add_argument("--n", type=positive_int, default=1_000_000)
    v.set_defaults(func=cmd_validate_marginals)

    m = sub.add_parser("moments-table", parents=[common], help="closed-form vs Monte-Carlo moments")
    m.add_argument("--M", type=parse_int_list, default="1,4,16")
    m.add_argument("--bits", dest="bits_list", type=parse_int_list, default="1,2,3")
    m.add_argument("--n", type=positive_int, default=1_000_000)
    m.set_defaults(func=cmd_moments_table)

    f = sub.add_parser("fit-theta", parents=[common], help="maximum pseudo-likelihood FGM parameter")
    f.add_argument("--M", type=positive_int, default=4)
    f.add_argument("--bits", type=parse_bits, default=1)
    f.add_argument("--n", type=positive_int, default=100_000)
    f.add_argument("--margins", choices=("analytic", "rank"), default="analytic")
    f.add_argument("--variables", choices=("auto", "raw", "squared"), default="auto",
                   help="fit (X, Y) or (X^2, Y^2); auto picks raw for one bit")
    f.set_defaults(func=cmd_fit_theta)

    s = sub.add_parser("position-sweep", parents=[common], help="outage against RIS position")
    s.add_argument("--D", type=float, default=10.0)
    s.add_argument("--nu", type=float, default=2.8)
    s.add_argument("--tx-snr-db", type=float, default=15.0)
    s.add_argument("--gamma-th-db", type=float, default=5.0)
    s.add_argument("--M", type=positive_int, default=8)
    s.add_argument("--bits", type=parse_bits, default=1)
    s.add_argument("--points", type=positive_int, default=21)
    s.add_argument("--theta", type=parse_theta, default="0")
    s.add_argument("--n", type=positive_int, default=100_000, help="samples for --theta fit")
    s.set_defaults(func=cmd_position_sweep)

    e = sub.add_parser("specfun-eval", parents=[common])
    e.add_argument("file")
    e.set_defaults(func=cmd_specfun_eval)
    # debug command, kept out of the help listing
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "specfun-eval"]
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    for key in values:
        if key not in known or key in ("config", "help", "func"):
            raise ArgumentError(f"unknown config key {key!r} for {args.command}")
    sub.set_defaults(**values)
    return parser.parse_args(argv)


def _check(args):
    if args.command == "outage-curve":
        if args.n and args.n < 10_000:
            raise ArgumentError("--n must be 0 or at least 1e4")
    if args.command in ("position-sweep",):
        if not (args.D > 0 and args.nu > 0):
            raise ArgumentError("--D and --nu must be positive")
        if args.theta == "fit" and args.n < 10_000:
            raise ArgumentError("--n must be at least 1e4 to fit theta")
    if args.command in ("validate-marginals", "moments-table", "fit-theta") and args.n < 10_000:
        raise ArgumentError("--n must be at least 1e4")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        if args.command is None:
            raise ArgumentError("a subcommand is required")
        _check(args)
        result = args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    failures = []
    if isinstance(result, Table):
        failures = result.failures
        text = result.render()
    else:
        text = result
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for msg in failures:
        print(f"warning: no convergence at {msg}", file=sys.stderr)
    return 2 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
