"""Command line entry point: ``pressurelab <command> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 failed mathematical
precondition (non-primitive adjacency), 3 size guard.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from pathlib import Path

from . import gibbs, multifractal, parallel, report
from .config import config_for, emit_config, parse_config
from .demos import DEMOS, closed_form_curve, get_demo, run_demo
from .errors import InputError, PreconditionError, PressureLabError
from .matrices import MatrixFamily, log_norms_of
from .plotting import emit_plot
from .pressure import (
    LIFT_GUARD,
    pressure_curve,
    pressure_estimate,
    pressure_exact_integer,
    q_grid,
)
from .sft import is_primitive


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class Source:
    """The system a command runs on: a config file or a built-in demo."""

    def __init__(self, family: MatrixFamily, demo=None):
        self.family = family
        self.demo = demo


def load_source(args) -> Source:
    if args.config is not None:
        _, family = parse_config(args.config).build()
        return Source(family)
    demo = get_demo(args.demo)
    return Source(demo.family, demo)


def require_primitive(family: MatrixFamily) -> None:
    primitive, _ = is_primitive(family.spec)
    if not primitive:
        raise PreconditionError("adjacency matrix is not primitive")


@contextlib.contextmanager
def _output(path):
    """Write to ``path`` only once the body has completed, or to stdout."""
    buf = io.StringIO()
    yield buf
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


# -- commands -----------------------------------------------------------------


def run_check(family: MatrixFamily, emit=print) -> int:
    for line in report.check_lines(family):
        emit(line)
    primitive, _ = is_primitive(family.spec)
    return 0 if primitive else 2


def _grid(args):
    return q_grid(args.qmin, args.qmax, args.qstep)


def run_pressure(source: Source, grid, n: int, out, closed_form: bool = False) -> None:
    family = source.family
    require_primitive(family)
    if closed_form:
        curve = closed_form_curve(_demo_or_fail(source), grid)
    else:
        curve = pressure_curve(family, grid, n)
    oracle = {}
    for q in grid:
        if q >= 1 and float(q).is_integer() and family.depth == 1 and family.m * family.d ** int(q) <= LIFT_GUARD:
            oracle[q] = pressure_exact_integer(family, int(q)).estimate
    report.write_pressure_csv(curve, out, oracle)


def _demo_or_fail(source):
    if source.demo is None or source.demo.closed_form is None:
        raise InputError("--closed-form needs a built-in demo with a closed form")
    return source.demo


def run_gibbs(source: Source, n: int, N: int, q: float, out, diagnostics=None) -> None:
    family = source.family
    require_primitive(family)
    table = gibbs.marginal_weights(family, n, N, q)
    report.write_table_csv(table, out)
    if diagnostics is not None:
        rows = []
        if N >= n + 4:
            p_hat = pressure_estimate(family, N, q).estimate
            rows.append(gibbs.gibbs_ratio_diagnostics(family, n, N, q, p_hat))
        if N >= 2 * n + 2:
            rows.extend(gibbs.quasi_bernoulli_diagnostics(family, n, n, N, q))
        report.write_diagnostics_csv(rows, diagnostics)


def run_spectrum(source: Source, grid, n: int, h: float, out, closed_form: bool = False) -> None:
    family = source.family
    require_primitive(family)
    if closed_form:
        pressure_fn = _demo_or_fail(source).closed_form
    else:
        pressure_fn = multifractal.EstimatedPressure(family, n)
    grid = [q for q in grid if q != 0]
    points = multifractal.dimension_spectrum(
        pressure_fn, grid, h, family.m, nonnegative=not family.positive
    )
    report.write_spectrum_csv(points, out)


def run_sample(source: Source, n: int, q: float, count: int, seed: int, out) -> None:
    family = source.family
    require_primitive(family)
    words = gibbs.sample_words(family, n, q, count, seed)
    logs, zero = log_norms_of(family, words)
    values = [None if z else v / n for v, z in zip(logs.tolist(), zero.tolist())]
    report.write_samples_csv(words, values, family.m, out)


# -- argument parsing -----------------------------------------------------------


def _add_source(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", metavar="PATH", help="JSON system configuration")
    group.add_argument("--demo", metavar="NAME", help=f"built-in system: {', '.join(DEMOS)}")


def _add_grid(p, qmin=0.5, qmax=3.0, qstep=0.25):
    p.add_argument("--qmin", type=float, default=qmin)
    p.add_argument("--qmax", type=float, default=qmax)
    p.add_argument("--qstep", type=float, default=qstep)


def _add_out(p):
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pressurelab", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${parallel.ENV_VAR} or 1)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="primitivity, H2, positivity and zero-product census")
    _add_source(p)

    p = sub.add_parser("pressure", help="pressure curve with certified brackets (CSV)")
    _add_source(p)
    _add_grid(p)
    p.add_argument("--n", type=int, default=12, help="word length")
    p.add_argument("--closed-form", action="store_true", help="use the demo's closed form")
    _add_out(p)

    p = sub.add_parser("gibbs", help="level-n Gibbs table marginalized from level N (CSV)")
    _add_source(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--diagnostics", metavar="PATH", help="also write ratio diagnostics CSV")
    _add_out(p)

    p = sub.add_parser("spectrum", help="alpha, f(alpha) per q (CSV)")
    _add_source(p)
    _add_grid(p)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--h", type=float, default=multifractal.DEFAULT_STEP)
    p.add_argument("--closed-form", action="store_true", help="use the demo's closed form")
    _add_out(p)

    p = sub.add_parser("sample", help="exact samples from the level-n Gibbs table (CSV)")
    _add_source(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    _add_out(p)

    p = sub.add_parser("demo", help="run a built-in system end to end")
    p.add_argument("name", help=", ".join(DEMOS))
    p.add_argument("--n", type=int, default=None, help="override the demo's word length")
    p.add_argument("--emit-config", metavar="PATH", help="write the demo system as a JSON config")

    p = sub.add_parser("plot", help="render a pressure CSV as SVG")
    p.add_argument("csv", help="pressure curve CSV")
    p.add_argument("--out", metavar="PATH", required=True, help="output SVG")
    return parser


def dispatch(args) -> int:
    if args.command == "plot":
        emit_plot(args.csv, args.out)
        return 0
    if args.command == "demo":
        demo = get_demo(args.name)
        if args.emit_config:
            Path(args.emit_config).write_text(emit_config(config_for(demo.family)), encoding="utf-8")
        run_demo(args.name, n=args.n)
        return 0
    source = load_source(args)
    if args.command == "check":
        return run_check(source.family)
    with _output(args.out) as out:
        if args.command == "pressure":
            run_pressure(source, _grid(args), args.n, out, args.closed_form)
        elif args.command == "gibbs":
            diag = io.StringIO() if args.diagnostics else None
            run_gibbs(source, args.n, args.N, args.q, out, diag)
            if diag is not None:
                Path(args.diagnostics).write_text(diag.getvalue(), encoding="utf-8", newline="")
        elif args.command == "spectrum":
            run_spectrum(source, _grid(args), args.n, args.h, out, args.closed_form)
        elif args.command == "sample":
            run_sample(source, args.n, args.q, args.count, args.seed, out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        parallel.set_threads(args.threads)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return dispatch(args)
    except PressureLabError as exc:
        print(f"pressurelab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    finally:
        parallel.set_threads(None)


if __name__ == "__main__":
    sys.exit(main())
