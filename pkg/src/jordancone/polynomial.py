"""Sparse multivariate polynomials and polynomial maps K^n -> K^m."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, ZeroMap
from .scalars import (
    GaussRational,
    is_exact_scalar,
    to_float_scalar,
    zeros,
)


def _add_exp(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Polynomial stored as ``{exponent tuple: coefficient}`` with no zero entries."""

    __slots__ = ("nvars", "terms", "_packed")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        clean: dict[tuple, object] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != nvars:
                raise DimensionMismatch(f"exponent {e} does not have {nvars} entries")
            if any(v < 0 for v in e):
                raise ValueError(f"negative exponent in {e}")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean
        self._packed = None

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int, c=Fraction(1)) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): c})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=Fraction(1)) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def is_exact(self) -> bool:
        return all(is_exact_scalar(c) for c in self.terms.values())

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if not self.terms:
            return other == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials in different numbers of variables")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if other == 0:
                return Poly(self.nvars)
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        if other.nvars != self.nvars:
            raise DimensionMismatch("polynomials in different numbers of variables")
        out: dict[tuple, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.constant(self.nvars, Fraction(1))
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def diff(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly(self.nvars, out)

    def divide_by_power(self, i: int, k: int) -> "Poly":
        """Exact division by ``x_i**k``; every term must be divisible."""
        out = {}
        for e, c in self.terms.items():
            if e[i] < k:
                raise ValueError(f"term {e} not divisible by x_{i}^{k}")
            ne = list(e)
            ne[i] -= k
            out[tuple(ne)] = c
        return Poly(self.nvars, out)

    def map_coeffs(self, f) -> "Poly":
        return Poly(self.nvars, {e: f(c) for e, c in self.terms.items()})

    def to_float(self) -> "Poly":
        return self.map_coeffs(to_float_scalar)

    def eval(self, x: Sequence):
        if len(x) != self.nvars:
            raise DimensionMismatch(f"expected {self.nvars} coordinates, got {len(x)}")
        total = 0
        powers: dict[tuple[int, int], object] = {}
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = x[i] ** k
                    term = term * powers[key]
            total = total + term
        return total

    def _pack(self):
        if self._packed is None:
            if self.terms:
                exps = np.array(list(self.terms.keys()), dtype=np.int64)
                coeffs = [to_float_scalar(c) for c in self.terms.values()]
                dtype = complex if any(isinstance(c, complex) for c in coeffs) else float
                self._packed = (exps, np.array(coeffs, dtype=dtype))
            else:
                self._packed = (np.zeros((0, self.nvars), dtype=np.int64), np.zeros(0))
        return self._packed

    def eval_float(self, x: np.ndarray):
        """Vectorised floating point evaluation."""
        exps, coeffs = self._pack()
        if coeffs.size == 0:
            return 0.0
        x = np.asarray(x)
        mon = np.prod(np.power(x[None, :], exps), axis=1)
        return coeffs @ mon

    def substitute(self, polys: Sequence["Poly"]) -> "Poly":
        """Compose: replace variable ``i`` by ``polys[i]``."""
        if len(polys) != self.nvars:
            raise DimensionMismatch("wrong number of substitutions")
        nv = polys[0].nvars if polys else 0
        cache: dict[tuple[int, int], Poly] = {}

        def power(i, k):
            if (i, k) not in cache:
                cache[(i, k)] = polys[i] if k == 1 else power(i, k - 1) * polys[i]
            return cache[(i, k)]

        out = Poly(nv)
        acc: dict[tuple, object] = {}
        for e, c in self.terms.items():
            term = Poly.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            for te, tc in term.terms.items():
                acc[te] = acc.get(te, 0) + tc
        out = Poly(nv, acc)
        return out


@dataclass(eq=False)
class PolyMap:
    """A polynomial map ``K^n_in -> K^m_out``."""

    n_in: int
    components: tuple
    field: str = "real"
    _partials: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.components = tuple(self.components)
        for p in self.components:
            if p.nvars != self.n_in:
                raise DimensionMismatch("component in the wrong number of variables")
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown field {self.field!r}")

    @classmethod
    def from_terms(cls, n_in: int, comps: Iterable[Mapping[tuple, object]], field: str = "real"):
        return cls(n_in, tuple(Poly(n_in, t) for t in comps), field)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (self.n_in, self.components, self.field) == (other.n_in, other.components, other.field)

    def __hash__(self):
        return hash((self.n_in, self.components, self.field))

    @property
    def m_out(self) -> int:
        return len(self.components)

    def is_exact(self) -> bool:
        return all(p.is_exact() for p in self.components)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def degree(self) -> int:
        return max((p.degree() for p in self.components), default=-1)

    def degrees_present(self) -> set[int]:
        return {sum(e) for p in self.components for e in p.terms}

    def to_float(self) -> "PolyMap":
        return PolyMap(self.n_in, tuple(p.to_float() for p in self.components), self.field)

    def _check(self, x):
        if len(x) != self.n_in:
            raise DimensionMismatch(f"expected a vector of length {self.n_in}, got {len(x)}")

    def eval(self, x) -> np.ndarray:
        self._check(x)
        x = np.asarray(x)
        if x.dtype != object:
            return np.array([p.eval_float(x) for p in self.components])
        out = np.empty(self.m_out, dtype=object)
        for i, p in enumerate(self.components):
            out[i] = p.eval(list(x))
            if isinstance(out[i], int):
                out[i] = Fraction(out[i])
        return out

    def partial(self, idx: tuple[int, ...]) -> tuple:
        """Components of the mixed partial derivative over sorted variable indices."""
        idx = tuple(sorted(idx))
        if idx not in self._partials:
            if not idx:
                self._partials[idx] = self.components
            else:
                parent = self.partial(idx[:-1])
                self._partials[idx] = tuple(p.diff(idx[-1]) for p in parent)
        return self._partials[idx]

    def jacobian_polys(self) -> list[list[Poly]]:
        cols = [self.partial((j,)) for j in range(self.n_in)]
        return [[cols[j][i] for j in range(self.n_in)] for i in range(self.m_out)]

    def jacobian(self, x) -> np.ndarray:
        self._check(x)
        x = np.asarray(x)
        exact = x.dtype == object
        J = zeros((self.m_out, self.n_in), exact, complex_field=np.iscomplexobj(x))
        for j in range(self.n_in):
            col = self.partial((j,))
            for i in range(self.m_out):
                if exact:
                    v = col[i].eval(list(x))
                    J[i, j] = Fraction(v) if isinstance(v, int) else v
                else:
                    J[i, j] = col[i].eval_float(x)
        return J

    def substitute(self, polys: Sequence[Poly]) -> "PolyMap":
        comps = tuple(p.substitute(polys) for p in self.components)
        nv = polys[0].nvars
        return PolyMap(nv, comps, self.field)

    def __add__(self, other: "PolyMap") -> "PolyMap":
        if other.n_in != self.n_in or other.m_out != self.m_out:
            raise DimensionMismatch("cannot add maps of different shapes")
        field_ = "complex" if "complex" in (self.field, other.field) else "real"
        return PolyMap(self.n_in, tuple(a + b for a, b in zip(self.components, other.components)), field_)

    def scaled(self, alpha) -> "PolyMap":
        return PolyMap(self.n_in, tuple(p * alpha for p in self.components), self.field)


@dataclass(frozen=True)
class DerivTensorHandle:
    base: PolyMap
    order: int
    point: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("derivative order must be at least 1")
        if len(self.point) != self.base.n_in:
            raise DimensionMismatch("evaluation point has the wrong length")


def deriv_tensor(G: PolyMap, order: int, x) -> DerivTensorHandle:
    return DerivTensorHandle(G, order, tuple(x))


def deriv_apply(h: DerivTensorHandle, dirs: Sequence) -> np.ndarray:
    """Raw symmetric application ``D^order G[x] (d_1, ..., d_order)``.

    No ``1/order!`` factor is applied.
    """
    G = h.base
    if len(dirs) != h.order:
        raise DimensionMismatch(f"need {h.order} directions, got {len(dirs)}")
    dirs = [list(d) for d in dirs]
    for d in dirs:
        if len(d) != G.n_in:
            raise DimensionMismatch("direction has the wrong length")
    point = list(h.point)
    exact = all(is_exact_scalar(v) for v in point) and G.is_exact() and all(
        is_exact_scalar(v) for d in dirs for v in d
    )
    out = [Fraction(0) if exact else 0.0] * G.m_out
    values: dict[tuple, list] = {}
    for idx in itertools.product(range(G.n_in), repeat=h.order):
        weight = 1
        for a, d in zip(idx, dirs):
            weight = weight * d[a]
            if weight == 0:
                break
        if weight == 0:
            continue
        key = tuple(sorted(idx))
        if key not in values:
            comps = G.partial(key)
            if exact:
                values[key] = [p.eval(point) for p in comps]
            else:
                xp = np.array([to_float_scalar(v) for v in point])
                values[key] = [p.eval_float(xp) for p in comps]
        out = [o + weight * v for o, v in zip(out, values[key])]
    if exact:
        arr = np.empty(G.m_out, dtype=object)
        for i, v in enumerate(out):
            arr[i] = Fraction(v) if isinstance(v, int) else v
        return arr
    return np.array(out)


def ord_of_map(G: PolyMap) -> int:
    d = min((p.min_degree() for p in G.components if not p.is_zero()), default=None)
    if d is None:
        raise ZeroMap("ord is undefined for the zero map")
    return d


def perturb_map(G: PolyMap, alpha, tensors: Sequence[tuple[int, Sequence[Mapping[tuple, object]]]]) -> PolyMap:
    """Return ``G + alpha * sum of the given homogeneous terms``.

    Each entry of ``tensors`` is ``(tau, per-component monomial dicts)``; every
    monomial must have total degree ``tau``.
    """
    comps = list(G.components)
    for tau, data in tensors:
        if len(data) != G.m_out:
            raise DimensionMismatch("perturbation needs one monomial dict per component")
        for i, terms in enumerate(data):
            for e in terms:
                if sum(e) != tau:
                    raise ValueError(f"monomial {e} is not of degree {tau}")
            comps[i] = comps[i] + Poly(G.n_in, terms) * alpha
    field_ = G.field
    if any(isinstance(c, (complex, GaussRational)) for p in comps for c in p.terms.values()):
        field_ = "complex"
    return PolyMap(G.n_in, tuple(comps), field_)


def taylor_terms(G: PolyMap, x, b) -> list[np.ndarray]:
    """``(1/j!) D^j G[x] b^j`` for ``j = 0..deg G``."""
    out = [G.eval(np.asarray(x))]
    for j in range(1, max(G.degree(), 0) + 1):
        h = deriv_tensor(G, j, x)
        v = deriv_apply(h, [b] * j)
        out.append(v / math.factorial(j) if v.dtype != object else np.array(
            [Fraction(t) / math.factorial(j) for t in v], dtype=object))
    return out
