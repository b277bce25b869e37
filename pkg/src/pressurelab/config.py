"""Strict JSON system configuration.

A config looks like::

    {
      "m": 2,
      "adjacency": [[1, 1], [1, 0]],
      "d": 2,
      "depth": 1,
      "matrices": {"1": [[1, 0], [0, 1]], "2": [[0.5, 0.5], [0, 1]]},
      "labels": ["a", "b"]
    }

``adjacency`` defaults to the full shift, ``depth`` to 1.  Matrices are
keyed by 1-based word strings of length ``depth``.  Unknown fields are
rejected and every error names the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError
from .matrices import MatrixFamily
from .sft import SubshiftSpec, enumerate_words, format_word, is_admissible, parse_word

FIELDS = {"m", "adjacency", "d", "depth", "matrices", "labels"}
REQUIRED = {"m", "d", "matrices"}


@dataclass(frozen=True)
class SystemConfig:
    m: int
    adjacency: tuple[tuple[int, ...], ...] | None
    d: int
    depth: int
    matrices: dict[str, tuple[tuple[float, ...], ...]]
    labels: tuple[str, ...] | None = None

    def build(self) -> tuple[SubshiftSpec, MatrixFamily]:
        if self.adjacency is None:
            spec = SubshiftSpec.full(self.m)
        else:
            spec = SubshiftSpec(np.array(self.adjacency, dtype=np.int64))
        table = {parse_word(k, self.m): np.array(v, dtype=np.float64) for k, v in self.matrices.items()}
        return spec, MatrixFamily.from_table(spec, table, self.depth)

    def to_dict(self) -> dict:
        out = {"m": self.m}
        if self.adjacency is not None:
            out["adjacency"] = [list(row) for row in self.adjacency]
        out["d"] = self.d
        out["depth"] = self.depth
        out["matrices"] = {k: [list(row) for row in v] for k, v in self.matrices.items()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out


def _int(data, key, minimum):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be >= {minimum}")
    return value


def _matrix(value, path, rows, cols, binary=False):
    if not isinstance(value, list) or len(value) != rows:
        raise ConfigError(path, f"expected a list of {rows} rows")
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ConfigError(f"{path}[{i}]", "expected a list")
        if len(row) != cols:
            raise ConfigError(f"{path}[{i}]", f"ragged row: {len(row)} entries, expected {cols}")
        parsed = []
        for j, x in enumerate(row):
            where = f"{path}[{i}][{j}]"
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ConfigError(where, f"expected a number, got {x!r}")
            if not math.isfinite(x):
                raise ConfigError(where, "entry is not finite")
            if binary and x not in (0, 1):
                raise ConfigError(where, f"adjacency entries must be 0 or 1, got {x!r}")
            if x < 0:
                raise ConfigError(where, f"negative entry {x!r}")
            parsed.append(int(x) if binary else float(x))
        out.append(tuple(parsed))
    return tuple(out)


def config_from_dict(data) -> SystemConfig:
    if not isinstance(data, dict):
        raise ConfigError("", "top level must be a JSON object")
    unknown = sorted(set(data) - FIELDS)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    missing = sorted(REQUIRED - set(data))
    if missing:
        raise ConfigError(missing[0], "missing required field")
    m = _int(data, "m", 2)
    d = _int(data, "d", 1)
    depth = _int(data, "depth", 1) if "depth" in data else 1
    adjacency = None
    if data.get("adjacency") is not None:
        adjacency = _matrix(data["adjacency"], "adjacency", m, m, binary=True)
    try:
        spec = SubshiftSpec.full(m) if adjacency is None else SubshiftSpec(np.array(adjacency))
    except InputError as exc:
        raise ConfigError("adjacency", str(exc)) from None

    raw = data["matrices"]
    if not isinstance(raw, dict):
        raise ConfigError("matrices", "expected an object keyed by words")
    matrices = {}
    for key, value in raw.items():
        try:
            word = parse_word(key, m)
        except InputError:
            raise ConfigError(f"matrices.{key}", "key is not a word") from None
        if len(word) != depth or any(not 1 <= s <= m for s in word):
            raise ConfigError(f"matrices.{key}", f"key must be a word of length {depth} over 1..{m}")
        matrices[format_word(word, m)] = _matrix(value, f"matrices.{key}", d, d)
    for word in enumerate_words(spec, depth):
        key = format_word(word, m)
        if key not in matrices:
            raise ConfigError(f"matrices.{key}", "missing matrix for an admissible word")
    for key in matrices:
        if not is_admissible(spec, parse_word(key, m)):
            raise ConfigError(f"matrices.{key}", "word is not admissible")

    labels = data.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ConfigError("labels", "expected a list of strings")
        if len(labels) != m:
            raise ConfigError("labels", f"expected {m} labels")
        labels = tuple(labels)

    ordered = {k: matrices[k] for k in sorted(matrices, key=lambda k: parse_word(k, m))}
    config = SystemConfig(m, adjacency, d, depth, ordered, labels)
    try:
        config.build()
    except InputError as exc:
        raise ConfigError("matrices", str(exc)) from None
    return config


def parse_config(path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path}: not UTF-8") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return config_from_dict(data)


def _rows(matrix, indent):
    pad = " " * indent
    rows = [json.dumps(list(row)) for row in matrix]
    return "[\n" + ",\n".join(pad + "  " + r for r in rows) + "\n" + pad + "]"


def emit_config(config: SystemConfig) -> str:
    """Pretty JSON with one matrix row per line; parses back to ``config``."""
    data = config.to_dict()
    parts = []
    for key, value in data.items():
        if key == "adjacency":
            text = _rows(value, 2)
        elif key == "matrices":
            inner = [f"    {json.dumps(k)}: {_rows(v, 4)}" for k, v in value.items()]
            text = "{\n" + ",\n".join(inner) + "\n  }"
        else:
            text = json.dumps(value)
        parts.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def config_for(family: MatrixFamily) -> SystemConfig:
    """Config describing an existing family (used to export the built-in demos)."""
    spec = family.spec
    m = family.m
    adjacency = None if spec.is_full_shift else tuple(tuple(int(x) for x in row) for row in spec.adjacency)
    matrices = {
        format_word(tuple(int(s) + 1 for s in key), m): tuple(tuple(float(x) for x in row) for row in mat)
        for key, mat in zip(family.keys, family.matrices)
    }
    return SystemConfig(m, adjacency, family.d, family.depth, matrices)
