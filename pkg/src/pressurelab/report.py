"""Text reports and CSV emission.

Every number is written with 12 significant digits and absent values as
empty fields, so files are byte-stable for a fixed input.
"""

from __future__ import annotations

import csv
import io
import math

from .errors import UnsupportedModeError
from .matrices import MatrixFamily, check_H2, gluing_ratio, level_norms
from .sft import format_word, is_primitive

CENSUS_MAX_N = 6


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def check_lines(family: MatrixFamily) -> list[str]:
    """Primitivity, H2, positivity and zero-product census."""
    primitive, p = is_primitive(family.spec)
    lines = [f"primitive: yes (p={p})" if primitive else "primitive: NO"]
    try:
        witness = check_H2(family)
    except UnsupportedModeError:
        lines.append(f"H2: not applicable (depth {family.depth})")
    else:
        if witness.satisfied:
            lines.append(
                f"H2: satisfied (r={witness.r}, b={fmt(witness.b)}, "
                f"b/sum m^k={fmt(gluing_ratio(family, witness))})"
            )
        else:
            lines.append(f"H2: fails up to r={witness.r}")
            lines.append("warning: H2 fails; Gibbs and differentiability guarantees do not apply")
    lines.append(f"positive mode: {'yes' if family.positive else 'no'}")
    census = []
    for n in range(1, CENSUS_MAX_N + 1):
        level = level_norms(family, n)
        census.append(f"n={n}: {int(level.zero.sum())}/{level.zero.size}")
    lines.append("zero products: " + ", ".join(census))
    return lines


PRESSURE_HEADER = ["q", "n", "estimate", "lower", "upper", "method"]


def write_pressure_csv(results, out, oracle: dict | None = None) -> None:
    """``q,n,estimate,lower,upper,method``; with ``oracle`` (q -> value) two
    more columns ``oracle,discrepancy`` are appended."""
    w = _writer(out)
    header = list(PRESSURE_HEADER)
    if oracle is not None:
        header += ["oracle", "discrepancy"]
    w.writerow(header)
    for r in results:
        row = [fmt(r.q), r.n_used, fmt(r.estimate), fmt(r.lower), fmt(r.upper), r.method]
        if oracle is not None:
            exact = oracle.get(r.q)
            row += [fmt(exact), fmt(None if exact is None else r.estimate - exact)]
        w.writerow(row)


def write_table_csv(table, out) -> None:
    """``word,weight`` rows followed by a ``total`` footer row."""
    w = _writer(out)
    w.writerow(["word", "weight"])
    for row, weight in zip((table.words.astype(int) + 1).tolist(), table.weights):
        w.writerow([format_word(row, table.m), fmt(weight)])
    w.writerow(["total", fmt(table.total())])


DIAGNOSTICS_HEADER = ["context", "min", "q25", "median", "q75", "max", "count"]


def write_diagnostics_csv(diagnostics, out) -> None:
    w = _writer(out)
    w.writerow(DIAGNOSTICS_HEADER)
    for d in diagnostics:
        w.writerow([d.context, fmt(d.min_ratio), fmt(d.q25), fmt(d.median), fmt(d.q75),
                    fmt(d.max_ratio), d.count])


def write_spectrum_csv(points, out) -> None:
    w = _writer(out)
    w.writerow(["q", "alpha", "f_alpha", "flag"])
    for p in points:
        w.writerow([fmt(p.q), fmt(p.alpha), fmt(p.f_alpha), p.flag])


def write_samples_csv(words, lyapunov, m: int, out) -> None:
    w = _writer(out)
    w.writerow(["word", "lyapunov"])
    for word, value in zip(words, lyapunov):
        w.writerow([format_word(word, m), fmt(value)])


def to_text(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()
