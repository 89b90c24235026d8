"""Problem files: a polynomial map, a seed curve, and run options as JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .errors import JordanConeError
from .polynomial import PolyMap
from .scalars import TAU_RANK, format_scalar, is_exact_scalar, parse_scalar, to_float_scalar
from .series import CurveSeries

_SCALAR = {
    "oneOf": [
        {"type": "string"},
        {"type": "number"},
        {"type": "array", "items": {"type": ["string", "number"]}, "minItems": 2, "maxItems": 2},
    ]
}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["variables", "equations", "curve"],
    "additionalProperties": False,
    "properties": {
        "field": {"enum": ["real", "complex"]},
        "variables": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "equations": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["coeff", "exps"],
                    "additionalProperties": False,
                    "properties": {
                        "coeff": _SCALAR,
                        "exps": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    },
                },
            },
        },
        "curve": {
            "type": "object",
            "required": ["coefficients"],
            "additionalProperties": False,
            "properties": {
                "truncation": {"type": "integer", "minimum": 0},
                "coefficients": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _SCALAR}},
                "polynomial": {"type": "boolean"},
            },
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["auto", "exact", "float"]},
                "eta": {"type": "number", "exclusiveMinimum": 0},
                "newton_tol": {"type": "number", "exclusiveMinimum": 0},
                "tau_rank": {"type": "number", "exclusiveMinimum": 0},
                "max_k": {"type": "integer", "minimum": 0},
                "shift": {"type": "integer", "minimum": 0},
                "eps_grid": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "min": {"type": "number", "exclusiveMinimum": 0},
                        "max": {"type": "number", "exclusiveMinimum": 0},
                        "points": {"type": "integer", "minimum": 1},
                    },
                },
                "transversal": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
                "kernel_point": {"type": "array", "items": {"type": "number"}},
                "phi": {"type": "array", "items": {"type": "number"}},
                "milnor_k_values": {"type": "array", "items": {"type": "integer"}},
                "perturbation": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["map", "curve", "joint"]},
                        "alpha": _SCALAR,
                        "order": {"type": "integer", "minimum": 0},
                        "count": {"type": "integer", "minimum": 1},
                        "seed": {"type": "integer"},
                    },
                },
            },
        },
    },
}


class ProblemError(JordanConeError):
    """The problem file is malformed or inconsistent."""


@dataclass
class GridOptions:
    min: float = 1e-4
    max: float = 0.2
    points: int = 45


@dataclass
class Options:
    mode: str = "auto"
    eta: float = 0.1
    newton_tol: float = 1e-12
    tau_rank: float = TAU_RANK
    max_k: int | None = None
    shift: int = 0
    grid: GridOptions = field(default_factory=GridOptions)
    transversal: list | None = None
    kernel_point: list | None = None
    phi: list | None = None
    milnor_k_values: list | None = None
    perturbation: dict = field(default_factory=dict)


@dataclass
class Problem:
    raw: dict
    field: str
    variables: list
    G: PolyMap
    z: CurveSeries
    options: Options
    exact: bool

    def transversal(self):
        if self.options.transversal is None:
            return None
        B = np.array([[self._scalar(x) for x in row] for row in self.options.transversal], dtype=object)
        return B if self.exact else B.astype(complex if self.field == "complex" else float)

    def _scalar(self, x):
        v = parse_scalar(x, None if self.exact else False)
        return v if self.exact else to_float_scalar(v)


def _coerce(vals, exact: bool, complex_field: bool):
    if exact:
        return vals
    out = [to_float_scalar(v) for v in vals]
    if not complex_field:
        for v in out:
            if isinstance(v, complex) and v.imag != 0:
                raise ProblemError("complex coefficient in a real problem")
        out = [v.real if isinstance(v, complex) else v for v in out]
    return out


def _parse(x, where: str):
    try:
        return parse_scalar(x, None)
    except (ValueError, TypeError) as exc:
        raise ProblemError(f"{where}: {exc}") from None


def load_problem(data: dict, overrides: dict | None = None) -> Problem:
    """Validate and parse a problem dictionary.  ``overrides`` replaces option values."""
    try:
        jsonschema.validate(data, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ProblemError(f"schema error at '{path}': {exc.message}") from None
    field_ = data.get("field", "real")
    names = data["variables"]
    n = len(names)
    opts_raw = dict(data.get("options", {}))
    grid_raw = opts_raw.pop("eps_grid", {})
    opts = Options(**{k.replace("-", "_"): v for k, v in opts_raw.items()})
    opts.grid = GridOptions(**grid_raw)
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key.startswith("grid_"):
            setattr(opts.grid, key[5:], val)
        else:
            setattr(opts, key, val)
    if opts.grid.min >= opts.grid.max:
        raise ProblemError("eps grid needs min < max")

    # parse everything exactly first; decide the mode afterwards
    eqs = []
    for row, eq in enumerate(data["equations"]):
        terms = {}
        for mono in eq:
            exps = tuple(mono["exps"])
            if len(exps) != n:
                raise ProblemError(f"equation {row}: exponent tuple {list(exps)} has length {len(exps)}, expected {n}")
            c = _parse(mono["coeff"], f"equation {row}")
            terms[exps] = terms.get(exps, 0) + c
        eqs.append(terms)
    curve = data["curve"]
    rows = []
    for j, vec in enumerate(curve["coefficients"]):
        if len(vec) != n:
            raise ProblemError(f"curve coefficient {j} has length {len(vec)}, expected {n}")
        rows.append([_parse(x, f"curve coefficient {j}") for x in vec])
    T = curve.get("truncation", len(rows) - 1)
    if len(rows) > T + 1:
        raise ProblemError(f"curve has {len(rows)} coefficients but truncation {T}")
    rows += [[Fraction(0)] * n for _ in range(T + 1 - len(rows))]
    if any(v != 0 for v in rows[0]):
        raise ProblemError("curve coefficient 0 must be the zero vector")

    all_vals = [c for t in eqs for c in t.values()] + [v for r in rows for v in r]
    parsed_exact = all(is_exact_scalar(v) for v in all_vals)
    if opts.mode == "exact" and not parsed_exact:
        # floats convert by their shortest decimal text
        all_exact = True
        eqs = [{e: (c if is_exact_scalar(c) else Fraction(repr(c))) for e, c in t.items()} for t in eqs]
        rows = [[v if is_exact_scalar(v) else Fraction(repr(v)) for v in r] for r in rows]
    else:
        all_exact = parsed_exact and opts.mode != "float"
    cplx = field_ == "complex"
    if not all_exact:
        eqs = [dict(zip(t.keys(), _coerce(list(t.values()), False, cplx))) for t in eqs]
        rows = [_coerce(r, False, cplx) for r in rows]
    elif not cplx and any(not isinstance(v, Fraction) for v in all_vals if v != 0):
        raise ProblemError("complex coefficient in a real problem")
    G = PolyMap.from_terms(n, eqs, field_)
    if all_exact:
        zc = np.empty((T + 1, n), dtype=object)
        for j, r in enumerate(rows):
            zc[j] = [Fraction(v) if isinstance(v, int) else v for v in r]
    else:
        zc = np.array(rows, dtype=complex if cplx else float)
    z = CurveSeries(zc, polynomial=curve.get("polynomial", True))
    if opts.transversal is not None:
        if len(opts.transversal) != n or any(len(r) != G.m_out for r in opts.transversal):
            raise ProblemError(f"transversal must be {n} x {G.m_out}")
    return Problem(data, field_, names, G, z, opts, all_exact)


def read_problem(path: str | Path, overrides: dict | None = None) -> Problem:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemError(f"cannot read problem file: {exc}") from None
    return load_problem(data, overrides)


def problem_dict(G: PolyMap, z: CurveSeries, variables=None, options: dict | None = None) -> dict:
    """Serialize a map and curve into the problem-file layout."""
    names = variables or [f"x{i}" for i in range(G.n_in)]
    eqs = []
    for p in G.components:
        eqs.append([{"coeff": _fmt(c), "exps": list(e)} for e, c in sorted(p.terms.items())])
    coeffs = [[_fmt(v) for v in row] for row in z.coeffs]
    out = {
        "field": G.field,
        "variables": list(names),
        "equations": eqs,
        "curve": {"truncation": z.T, "coefficients": coeffs, "polynomial": bool(z.polynomial)},
    }
    if options:
        out["options"] = options
    return out


def _fmt(v):
    s = format_scalar(v)
    if isinstance(s, dict):
        return [s["re"], s["im"]]
    return s


def with_options(problem: Problem, **changes) -> Problem:
    return replace(problem, options=replace(problem.options, **changes))


__all__ = [
    "PROBLEM_SCHEMA", "Problem", "Options", "GridOptions", "ProblemError", "load_problem",
    "read_problem", "problem_dict", "with_options",
]
