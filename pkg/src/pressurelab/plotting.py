"""SVG line charts of pressure-curve CSV files."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .errors import InputError

RC = {
    "svg.hashsalt": "pressurelab",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.5,
}
COLORS = ("#1f4e79", "#b22222", "#2e7d32", "#6a1b9a")


def _float(text, where):
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"{where}: not a number: {text!r}") from None
    return None if math.isnan(value) else value


def read_curve(csv_path) -> dict[str, list[tuple[float, float, float | None, float | None]]]:
    """Rows of a pressure CSV grouped into series.

    Each ``method`` value is a series; an ``oracle`` column, when present,
    becomes an extra ``integer_oracle`` series.
    """
    path = Path(csv_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError(f"{path}: empty file")
    header = rows[0]
    for column in ("q", "estimate"):
        if column not in header:
            raise InputError(f"{path}: missing column {column!r}")
    body = [r for r in rows[1:] if r]
    if not body:
        raise InputError(f"{path}: no data rows")
    idx = {name: i for i, name in enumerate(header)}
    series: dict[str, list] = {}
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: line {lineno} has {len(row)} fields, expected {len(header)}")
        where = f"{path}: line {lineno}"
        q = _float(row[idx["q"]], where)
        est = _float(row[idx["estimate"]], where)
        if q is None or est is None:
            raise InputError(f"{where}: q and estimate are required")
        lower = _float(row[idx["lower"]], where) if "lower" in idx else None
        upper = _float(row[idx["upper"]], where) if "upper" in idx else None
        name = row[idx["method"]] if "method" in idx else "estimate"
        series.setdefault(name, []).append((q, est, lower, upper))
        if "oracle" in idx:
            exact = _float(row[idx["oracle"]], where)
            if exact is not None:
                series.setdefault("integer_oracle", []).append((q, exact, None, None))
    return series


def render_svg(series) -> bytes:
    with matplotlib.rc_context(RC):
        fig = Figure(figsize=(6.0, 4.0))
        ax = fig.add_subplot()
        for k, (name, points) in enumerate(series.items()):
            color = COLORS[k % len(COLORS)]
            qs = [p[0] for p in points]
            band = [(p[0], p[2], p[3]) for p in points if p[2] is not None and p[3] is not None]
            if band:
                poly = ax.fill_between(
                    [b[0] for b in band], [b[1] for b in band], [b[2] for b in band],
                    color=color, alpha=0.2, linewidth=0,
                )
                poly.set_gid(f"band-{name}")
            style = "o" if name == "integer_oracle" else "-"
            (line,) = ax.plot(qs, [p[1] for p in points], style, color=color, label=name)
            line.set_gid(f"series-{name}")
        ax.set_xlabel("q")
        ax.set_ylabel("P(q)")
        ax.legend(frameon=False)
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def emit_plot(csv_path, out_svg) -> Path:
    """Render a pressure CSV as a standalone SVG (nothing is written on error)."""
    data = render_svg(read_curve(csv_path))
    out = Path(out_svg)
    out.write_bytes(data)
    return out
