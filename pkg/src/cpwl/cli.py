"""Command-line front end: ``cpwl build | eval | report | bench``.

Exit status is 0 on success, 2 for bad flags and 3 for runtime failures.
Numbers are printed with 17 significant digits.
"""

import argparse
import logging
import sys

import numpy as np

from . import analysis, bench, lut, tableio
from .errors import CpwlError, ExpressionError, UnknownFunction
from .expr import parse_expression
from .funcs import BUILTIN_NAMES, builtin
from .quad import DEFAULT_TOL

EXIT_FLAGS = 2
EXIT_RUNTIME = 3

# Flags whose values may legitimately start with "-" (e.g. "--interval -4:3").
_VALUE_FLAGS = ("--interval", "--grid", "--x", "--x0", "--expr")


def fmt(v):
    return f"{v:.17g}"


class FlagError(Exception):
    pass


def _glue_negative_values(argv):
    """Rewrite ``--flag -1:2`` as ``--flag=-1:2`` so argparse does not see an option."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def parse_interval(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise FlagError(f"invalid interval {text!r}: expected a:b")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError:
        raise FlagError(f"invalid interval {text!r}: endpoints must be numbers") from None
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise FlagError(f"invalid interval {text!r}: need finite a < b")
    return a, b


def parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise FlagError(f"invalid grid {text!r}: expected a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise FlagError(f"invalid grid {text!r}") from None
    if n < 1:
        raise FlagError(f"invalid grid {text!r}: n must be positive")
    return np.linspace(a, b, n)


def parse_sweep(text):
    """Powers of two in ``[n0, n1]``; a range containing none is empty, not an error."""
    parts = text.split(":")
    try:
        n0, n1 = (int(p) for p in parts)
    except ValueError:
        raise FlagError(f"invalid sweep {text!r}: expected n0:n1") from None
    if n0 < 1 or n0 > n1:
        raise FlagError(f"invalid sweep {text!r}: need 1 <= n0 <= n1")
    out = []
    n = 1
    while n <= n1:
        if n >= n0:
            out.append(n)
        n *= 2
    return out


def resolve_function(args):
    """FunctionSpec and domain from --function/--expr and --interval."""
    try:
        if args.expr is not None:
            fs = parse_expression(args.expr)
        else:
            fs = builtin(args.function, x0=args.x0, gamma=args.gamma)
    except (UnknownFunction, ExpressionError, ValueError) as e:
        raise FlagError(str(e)) from None
    if args.interval is not None:
        a, b = parse_interval(args.interval)
    elif fs.default_domain is not None:
        a, b = fs.default_domain
    else:
        raise FlagError("--interval is required for this function")
    return fs, a, b


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _function_flags(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--function", choices=BUILTIN_NAMES, help="built-in target function")
    src.add_argument("--expr", help="expression in x, e.g. 'exp(-x^2/2)'")
    p.add_argument("--x0", type=float, default=0.0, help="lorentzian centre")
    p.add_argument("--gamma", type=_positive_float, default=1.0, help="lorentzian half-width")
    p.add_argument("--interval", help="domain as a:b (defaults to the function's own)")
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                   help="quadrature tolerance")


def build_parser():
    parser = argparse.ArgumentParser(prog="cpwl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a table file and report its error")
    _function_flags(p)
    p.add_argument("--segments", type=_positive_int, required=True)
    p.add_argument("--partition", choices=analysis.KINDS, default="uniform")
    p.add_argument("--method", choices=analysis.METHODS, default="interp")
    p.add_argument("--policy", choices=lut.POLICIES, default="strict")
    p.add_argument("--float32", action="store_true", help="lossy single-precision export")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("eval", help="evaluate a table file")
    p.add_argument("--table", required=True)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--x", type=float)
    where.add_argument("--input", help="file with one abscissa per line ('-' for stdin)")
    where.add_argument("--grid", help="a:b:n, n equally spaced points including both ends")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("report", help="CSV convergence sweep")
    _function_flags(p)
    p.add_argument("--sweep", required=True, help="n0:n1, every power of two in range")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("bench", help="time direct versus table evaluation")
    _function_flags(p)
    p.add_argument("--sweep", default="32:512", help="table sizes n0:n1 (powers of two)")
    p.add_argument("--points", type=_positive_int, default=bench.MIN_POINTS)
    p.add_argument("--reps", type=_positive_int, default=bench.MIN_REPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", action="store_true", help="CSV instead of aligned text")
    p.set_defaults(handler=cmd_bench)
    return parser


def cmd_build(args, out):
    fs, a, b = resolve_function(args)
    p = analysis.make_partition(fs, a, b, args.segments, args.partition)
    v = analysis.approximate(fs, p, args.method, args.tol)
    measured = analysis.measure(fs, v, args.tol, args.method).measured_l2
    pred = analysis.predicted(fs, a, b, args.segments, args.partition, args.method, args.tol)
    tableio.write_table(lut.from_cpwl(v, args.policy), args.out, float32=args.float32)
    print(f"measured={fmt(measured)} predicted={fmt(pred)}", file=out)


def _read_abscissas(path):
    fh = sys.stdin if path == "-" else open(path)
    try:
        xs = []
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                xs.append(float(line))
            except ValueError:
                raise FlagError(f"{path}:{lineno}: not a number: {line!r}") from None
        return np.array(xs, dtype=float)
    finally:
        if fh is not sys.stdin:
            fh.close()


def cmd_eval(args, out):
    if args.grid is not None:
        xs = parse_grid(args.grid)
    elif args.input is not None:
        xs = _read_abscissas(args.input)
    else:
        xs = np.array([args.x])
    table = tableio.read_table(args.table)
    ys = lut.eval_batch(table, xs)
    out.write("".join(fmt(y) + "\n" for y in ys.tolist()))


def cmd_report(args, out):
    fs, a, b = resolve_function(args)
    ns = parse_sweep(args.sweep)
    records = analysis.convergence_sweep(fs, a, b, ns, tol=args.tol)
    lines = ["n,variant,measured,predicted"]
    lines += [f"{r.n},{r.variant},{fmt(r.measured)},{fmt(r.predicted)}" for r in records]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_bench(args, out):
    fs, a, b = resolve_function(args)
    ns = parse_sweep(args.sweep)
    if not ns:
        raise FlagError(f"sweep {args.sweep!r} contains no table sizes")
    tables = []
    for n in ns:
        for kind in analysis.KINDS:
            p = analysis.make_partition(fs, a, b, n, kind)
            tables.append(lut.from_cpwl(analysis.approximate(fs, p, "interp", args.tol)))
    results = bench.run_bench(fs, tables, args.points, args.reps, args.seed)
    cols = ("variant", "n_segments", "mean_ns", "median_ns", "std_ns", "repetitions", "checksum")
    if args.csv:
        out.write(",".join(cols) + "\n")
        for r in results:
            out.write(f"{r.variant},{r.n_segments},{fmt(r.mean_ns)},{fmt(r.median_ns)},"
                      f"{fmt(r.std_ns)},{r.repetitions},{fmt(r.checksum)}\n")
        return
    out.write(f"{'variant':<16}{'N':>6}{'mean ns/eval':>14}{'median':>10}{'std':>10}"
              f"  checksum\n")
    for r in results:
        out.write(f"{r.variant:<16}{r.n_segments or '-':>6}{r.mean_ns:>14.3f}"
                  f"{r.median_ns:>10.3f}{r.std_ns:>10.3f}  {fmt(r.checksum)}\n")


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.handler(args, out)
    except FlagError as e:
        print(f"cpwl {args.command}: error: {e}", file=sys.stderr)
        return EXIT_FLAGS
    except (CpwlError, OSError, ValueError, ArithmeticError) as e:
        print(f"cpwl {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0
