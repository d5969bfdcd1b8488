"""JSON input documents and the analysis report.

Input documents come in two kinds::

    {"kind": "lie_algebra", "dim": 3, "gram": [[...]],
     "structure": [{"i": 1, "j": 2, "k": 3, "value": 1.0}]}

    {"kind": "data_set",
     "g": {"dim": 1, "gram": [[-1]], "structure": []},
     "v": {"dim": 2, "gram": [[1, 0], [0, 1]]},
     "pi": [[[0, -1], [1, 0]]]}

Structure entries are 1-indexed and give [e_i, e_j] its e_k coefficient;
the antisymmetric partner is filled in. Both kinds accept an optional
``name`` and ``tolerance`` object (abs_tol, rel_tol, rank_tol_factor).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

import jsonschema
import numpy as np

from .errors import InvalidInput
from .liealg import MetricLieAlgebra, StructureTensor
from .numkernel import DEFAULT_TOL, BilinearForm, TolerancePolicy

__all__ = [
    "SCHEMA",
    "SchemaError",
    "InputDocument",
    "parse_document",
    "load_document",
    "to_document",
    "canonical_json",
    "round_floats",
]


class SchemaError(InvalidInput):
    """The document does not match the input schema."""


_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_entry = {
    "type": "object",
    "required": ["i", "j", "k", "value"],
    "properties": {"i": {"type": "integer"}, "j": {"type": "integer"},
                   "k": {"type": "integer"}, "value": {"type": "number"}},
    "additionalProperties": False,
}
_algebra = {
    "type": "object",
    "required": ["dim", "gram"],
    "properties": {"dim": {"type": "integer", "minimum": 0}, "gram": _matrix,
                   "structure": {"type": "array", "items": _entry}},
}
_tolerance = {
    "type": "object",
    "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in ("abs_tol", "rel_tol", "rank_tol_factor")},
    "additionalProperties": False,
}

SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "required": ["kind", "dim", "gram"],
            "properties": {
                "kind": {"const": "lie_algebra"},
                "dim": {"type": "integer", "minimum": 0},
                "gram": _matrix,
                "structure": {"type": "array", "items": _entry},
                "name": {"type": "string"},
                "tolerance": _tolerance,
            },
        },
        {
            "type": "object",
            "required": ["kind", "g", "v", "pi"],
            "properties": {
                "kind": {"const": "data_set"},
                "g": _algebra,
                "v": {"type": "object", "required": ["dim", "gram"],
                      "properties": {"dim": {"type": "integer", "minimum": 0}, "gram": _matrix}},
                "pi": {"type": "array", "items": _matrix},
                "name": {"type": "string"},
                "tolerance": _tolerance,
            },
        },
    ]
}


@dataclass
class InputDocument:
    kind: str
    payload: Any  # MetricLieAlgebra or DataSet
    name: str = ""
    tolerance: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    def policy(self, base: TolerancePolicy = DEFAULT_TOL) -> TolerancePolicy:
        return replace(base, **self.tolerance)


def _square(m, n: int, what: str) -> np.ndarray:
    a = np.asarray(m, dtype=float) if n else np.zeros((0, 0))
    if a.shape != (n, n):
        raise SchemaError(f"{what} must be {n}x{n}, got shape {a.shape}")
    return a


def _structure(n: int, entries) -> np.ndarray:
    c = np.zeros((n, n, n))
    for e in entries or []:
        i, j, k = e["i"] - 1, e["j"] - 1, e["k"] - 1
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise SchemaError(f"structure entry {e} has an index outside 1..{n}")
        c[i, j, k] = e["value"]
        c[j, i, k] = -e["value"]
    return c


def _algebra_from(obj: dict, name: str, tol: TolerancePolicy) -> MetricLieAlgebra:
    n = obj["dim"]
    gram = _square(obj["gram"], n, "gram")
    return MetricLieAlgebra(StructureTensor(_structure(n, obj.get("structure")), tol),
                            BilinearForm(gram, tol), name)


def parse_document(obj: dict, base: TolerancePolicy = DEFAULT_TOL) -> InputDocument:
    """Validate against :data:`SCHEMA` and build the mathematical payload.

    Schema violations raise :class:`SchemaError`; mathematical problems
    (non-symmetric Gram, Jacobi failure) raise the usual library errors.
    """
    from .dataset import DataSet, Representation

    try:
        jsonschema.validate(obj, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"schema violation: {exc.message}") from None
    name = obj.get("name", "")
    tolerance = dict(obj.get("tolerance", {}))
    tol = replace(base, **tolerance)
    if obj["kind"] == "lie_algebra":
        payload = _algebra_from(obj, name, tol)
    else:
        g = _algebra_from(obj["g"], "", tol)
        m = obj["v"]["dim"]
        gv = BilinearForm(_square(obj["v"]["gram"], m, "v.gram"), tol)
        if len(obj["pi"]) != g.dim:
            raise SchemaError(f"pi needs {g.dim} matrices, got {len(obj['pi'])}")
        pis = [_square(p, m, f"pi[{a}]") for a, p in enumerate(obj["pi"])]
        payload = DataSet(g, gv, Representation(g.dim, m, pis), name)
    return InputDocument(obj["kind"], payload, name, tolerance, obj)


def load_document(path: str, base: TolerancePolicy = DEFAULT_TOL) -> InputDocument:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc}") from None
    return parse_document(obj, base)


def _entries(c: np.ndarray) -> list:
    n = c.shape[0]
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if c[i, j, k] != 0.0:
                    out.append({"i": i + 1, "j": j + 1, "k": k + 1, "value": float(c[i, j, k])})
    return out


def to_document(obj, name: str | None = None) -> dict:
    """Serialize a MetricLieAlgebra or DataSet as an input document."""
    from .dataset import DataSet

    if isinstance(obj, DataSet):
        doc = {
            "kind": "data_set",
            "g": {"dim": obj.g_dim, "gram": obj.g.gram.tolist(), "structure": _entries(obj.g.c)},
            "v": {"dim": obj.v_dim, "gram": obj.v_metric.gram.tolist()},
            "pi": [p.tolist() for p in obj.pi.matrices],
        }
    elif isinstance(obj, MetricLieAlgebra):
        doc = {"kind": "lie_algebra", "dim": obj.dim, "gram": obj.gram.tolist(), "structure": _entries(obj.c)}
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    doc["name"] = name if name is not None else obj.name
    return doc


def round_floats(obj, digits: int = 10):
    """Round every float to ``digits`` significant digits (stable report bytes)."""
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, (np.floating,)):
        return round_floats(float(obj), digits)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist(), digits)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(round_floats(obj), sort_keys=True, indent=2) + "\n"
