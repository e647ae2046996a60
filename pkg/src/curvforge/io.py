"""JSON interchange for curvature operators, jets and connections.

Indices in files are 1-based and rationals are ``"p/q"`` strings.

Curvature operator (only nonzero entries are listed)::

    {"kind": "curvature-operator", "m": 3,
     "entries": [{"i": 1, "j": 2, "k": 1, "l": 2, "v": "1/3"}, ...]}

Jet::

    {"m": 3, "order": 6, "terms": [{"exps": [1, 0, 2], "v": "-1/2"}, ...]}

Connection (each symmetric pair stored once, with ``i <= j``)::

    {"kind": "connection", "m": 3, "order": 6,
     "gamma": [{"i": 1, "j": 2, "k": 3, "poly": [<jet terms>]}, ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import BilinearForm, CurvatureOp
from .connection import Connection
from .jets import Jet
from .rational import ZERO, format_rational, parse_rational

__all__ = [
    "FormatError",
    "bilinear_to_json",
    "connection_from_json",
    "connection_to_json",
    "curvature_to_json",
    "dump_json",
    "load_json",
    "raw_curvature_from_json",
]


class FormatError(ValueError):
    """Malformed interchange file; the message names the offending field."""


def dump_json(data, path: str | Path | None = None) -> str:
    text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_json(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _field(obj, key, where, kind=int):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise FormatError(f"{where}.{key}: expected an integer, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise FormatError(f"{where}.{key}: expected a list")
    return value


def _index(obj, key, where, m):
    value = _field(obj, key, where)
    if not 1 <= value <= m:
        raise FormatError(f"{where}.{key}: index {value} outside 1..{m}")
    return value - 1


def _rational(obj, where):
    value = _field(obj, "v", where, kind=str)
    try:
        return parse_rational(str(value))
    except ValueError as exc:
        raise FormatError(f"{where}.v: {exc}") from exc


# -- curvature operators ---------------------------------------------------------

def curvature_to_json(A: CurvatureOp) -> dict:
    entries = [{"i": i + 1, "j": j + 1, "k": k + 1, "l": l + 1, "v": format_rational(v)}
               for (i, j, k, l), v in sorted(A.nonzero().items())]
    return {"kind": "curvature-operator", "m": A.m, "entries": entries}


def raw_curvature_from_json(data) -> tuple[int, np.ndarray]:
    """Read the entries without validating the curvature identities."""
    m = _field(data, "m", "$")
    if m < 1:
        raise FormatError(f"$.m: dimension must be positive, got {m}")
    raw = np.empty((m,) * 4, dtype=object)
    raw.fill(ZERO)
    seen = set()
    for n, entry in enumerate(_field(data, "entries", "$", kind=list)):
        where = f"$.entries[{n}]"
        idx = tuple(_index(entry, key, where, m) for key in "ijkl")
        if idx in seen:
            raise FormatError(f"{where}: duplicate entry {[i + 1 for i in idx]}")
        seen.add(idx)
        raw[idx] = _rational(entry, where)
    return m, raw


def bilinear_to_json(theta: BilinearForm) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in theta.entries]


# -- connections --------------------------------------------------------------

def connection_to_json(nabla: Connection) -> dict:
    gamma = [{"i": i + 1, "j": j + 1, "k": k + 1, "poly": jet.terms_json()}
             for (i, j, k), jet in nabla.symbols()]
    return {"kind": "connection", "m": nabla.m, "order": nabla.order, "gamma": gamma}


def connection_from_json(data) -> Connection:
    m = _field(data, "m", "$")
    order = _field(data, "order", "$")
    if m < 3:
        raise FormatError(f"$.m: dimension must be at least 3, got {m}")
    if order < 0:
        raise FormatError(f"$.order: must be nonnegative, got {order}")
    symbols = {}
    for n, entry in enumerate(_field(data, "gamma", "$", kind=list)):
        where = f"$.gamma[{n}]"
        i, j, k = (_index(entry, key, where, m) for key in "ijk")
        if i > j:
            raise FormatError(f"{where}: expected i <= j (symmetric pair stored once)")
        if (i, j, k) in symbols:
            raise FormatError(f"{where}: duplicate symbol ({i + 1},{j + 1},{k + 1})")
        terms = _field(entry, "poly", where, kind=list)
        for t, term in enumerate(terms):
            exps = _field(term, "exps", f"{where}.poly[{t}]", kind=list)
            if len(exps) != m or not all(isinstance(e, int) and e >= 0 for e in exps):
                raise FormatError(f"{where}.poly[{t}].exps: expected {m} nonnegative integers")
            if sum(exps) > order:
                raise FormatError(f"{where}.poly[{t}].exps: degree {sum(exps)} exceeds order {order}")
            _rational(term, f"{where}.poly[{t}]")
        try:
            symbols[i, j, k] = Jet.from_terms_json(m, order, terms)
        except ValueError as exc:
            raise FormatError(f"{where}.poly: {exc}") from exc
    return Connection.from_symbols(m, order, symbols)
