"""Truncated power series in epsilon with scalar, vector or matrix coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientTruncation
from .polynomial import Poly, PolyMap
from .scalars import TAU_RANK, is_exact_array, to_exact_array, to_float_array, zeros


class _Series:
    """Coefficient array with the epsilon power along axis 0."""

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim < 1 or coeffs.shape[0] < 1:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs = coeffs

    @property
    def T(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def exact(self) -> bool:
        return is_exact_array(self.coeffs)

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def __getitem__(self, j):
        return self.coeffs[j]

    def truncate(self, T: int):
        return type(self)(self.coeffs[: T + 1].copy())

    def scaled(self, c):
        return type(self)(self.coeffs * c)

    def to_float(self):
        return type(self)(to_float_array(self.coeffs))

    def __repr__(self):
        return f"{type(self).__name__}(T={self.T}, shape={self.shape})"


class ScalarSeries(_Series):
    pass


class VecSeries(_Series):
    pass


class MatSeries(_Series):
    pass


class CurveSeries(_Series):
    """A curve ``z(eps) = sum z_j eps^j`` with ``z_0 = 0``.

    ``polynomial=True`` means the stored coefficients are the whole curve
    (all higher coefficients are exactly zero); otherwise the curve is a
    truncation and unknown beyond ``T``.
    """

    def __init__(self, coeffs, polynomial: bool = True, check_origin: bool = True):
        super().__init__(coeffs)
        if self.coeffs.ndim != 2:
            raise ValueError("curve coefficients must form a (T+1) x n array")
        self.polynomial = polynomial
        if check_origin and any(v != 0 for v in self.coeffs[0]):
            raise ValueError("curve must pass through the origin (z_0 = 0)")

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    def leading_index(self) -> int | None:
        for j in range(self.T + 1):
            if any(v != 0 for v in self.coeffs[j]):
                return j
        return None

    def truncate(self, T: int) -> "CurveSeries":
        return CurveSeries(self.coeffs[: T + 1].copy(), polynomial=False)

    def padded(self, T: int) -> "CurveSeries":
        """Same polynomial curve stored through order ``T``."""
        if T <= self.T:
            return self
        if not self.polynomial:
            raise InsufficientTruncation(T, self.T)
        extra = zeros((T - self.T, self.n), self.exact, np.iscomplexobj(self.coeffs))
        return CurveSeries(np.concatenate([self.coeffs, extra]), polynomial=True)

    def to_float(self) -> "CurveSeries":
        return CurveSeries(to_float_array(self.coeffs), self.polynomial)

    def to_exact(self) -> "CurveSeries":
        return CurveSeries(to_exact_array(self.coeffs), self.polynomial)

    def as_polys(self, nvars: int = 1, var: int = 0) -> list[Poly]:
        """Components as polynomials in variable ``var`` of an ``nvars``-variate ring."""
        out = []
        for i in range(self.n):
            terms = {}
            for j in range(self.T + 1):
                c = self.coeffs[j, i]
                if c != 0:
                    e = [0] * nvars
                    e[var] = j
                    terms[tuple(e)] = c
            out.append(Poly(nvars, terms))
        return out


@dataclass(frozen=True)
class AtLeast:
    """Valuation known only to exceed the stored truncation."""

    bound: int


@dataclass(frozen=True)
class Valuation:
    q: int
    leading: np.ndarray


def _zero_like(exact: bool, cplx: bool):
    if exact:
        return Fraction(0)
    return 0j if cplx else 0.0


def conv(a, b, T: int):
    """Truncated product of two scalar coefficient sequences."""
    if not is_exact_array(a) and not is_exact_array(b):
        return np.convolve(np.asarray(a), np.asarray(b))[: T + 1]
    la, lb = len(a), len(b)
    out = [Fraction(0)] * (min(T, la + lb - 2) + 1)
    for i in range(min(la, T + 1)):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(min(lb, T + 1 - i)):
            bj = b[j]
            if bj != 0:
                out[i + j] = out[i + j] + ai * bj
    arr = np.empty(len(out), dtype=object)
    arr[:] = out
    return arr


def _pad(a, T: int, exact: bool, cplx: bool):
    if len(a) >= T + 1:
        return a[: T + 1]
    if exact:
        out = np.empty(T + 1, dtype=object)
        out[:] = [Fraction(0)] * (T + 1)
        out[: len(a)] = a
        return out
    out = np.zeros(T + 1, dtype=complex if cplx else float)
    out[: len(a)] = a
    return out


def determinacy_bound(polys, z: CurveSeries) -> int | None:
    """Largest order fully determined when composing ``polys`` with a truncated curve.

    ``None`` means unlimited (polynomial curve, or a constant map).
    """
    if z.polynomial:
        return None
    degs = [sum(e) for p in polys for e in p.terms if sum(e) > 0]
    if not degs:
        return None
    d = min(degs)
    lead = z.leading_index()
    l = lead if lead is not None else z.T + 1
    return z.T + (d - 1) * l


def compose_polys(polys, z: CurveSeries, T: int) -> np.ndarray:
    """Coefficients through ``eps^T`` of each polynomial evaluated on ``z``.

    Returns an array of shape ``(T+1, len(polys))``.
    """
    bound = determinacy_bound(polys, z)
    if bound is not None and T > bound:
        raise InsufficientTruncation(T, z.T)
    exact = z.exact and all(p.is_exact() for p in polys)
    cplx = np.iscomplexobj(z.coeffs) or any(
        isinstance(c, complex) for p in polys for c in p.terms.values()
    )
    zc = z.coeffs if exact else to_float_array(z.coeffs)
    if not exact and zc.dtype == object:
        zc = zc.astype(complex if cplx else float)
    comps = [_pad(zc[:, i], T, exact, cplx) for i in range(z.n)]
    cache: dict[tuple[int, int], np.ndarray] = {}

    def power(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = comps[i] if k == 1 else conv(power(i, k - 1), comps[i], T)
        return cache[(i, k)]

    out = zeros((T + 1, len(polys)), exact, cplx)
    for col, p in enumerate(polys):
        acc = _pad(np.array([_zero_like(exact, cplx)], dtype=object if exact else None), T, exact, cplx)
        for e, c in p.terms.items():
            term = None
            for i, k in enumerate(e):
                if k:
                    term = power(i, k) if term is None else conv(term, power(i, k), T)
            cc = c if exact else complex(c) if cplx else float(c)
            if term is None:
                acc[0] = acc[0] + cc
            else:
                acc = acc + _pad(term, T, exact, cplx) * cc
        out[:, col] = acc
    return out


def compose_map_with_curve(G: PolyMap, z: CurveSeries, T: int) -> VecSeries:
    """Taylor coefficients of ``G[z(eps)]`` through order ``T``."""
    if z.n != G.n_in:
        from .errors import DimensionMismatch
        raise DimensionMismatch("curve dimension does not match the map")
    return VecSeries(compose_polys(list(G.components), z, T))


def linearize_along_curve(G: PolyMap, z: CurveSeries, T: int) -> MatSeries:
    """Coefficients ``L_0..L_T`` of ``G'[z(eps)]``."""
    if z.n != G.n_in:
        from .errors import DimensionMismatch
        raise DimensionMismatch("curve dimension does not match the map")
    J = G.jacobian_polys()
    flat = [J[i][j] for i in range(G.m_out) for j in range(G.n_in)]
    arr = compose_polys(flat, z, T)
    return MatSeries(arr.reshape(T + 1, G.m_out, G.n_in))


def _magnitude_scale(coeffs) -> float:
    f = to_float_array(coeffs)
    return float(np.max(np.abs(f))) if f.size else 0.0


def valuation(s: _Series, tau: float = TAU_RANK):
    """Index and value of the first nonzero coefficient, or ``AtLeast(T+1)``."""
    if s.exact:
        for j in range(s.T + 1):
            c = s.coeffs[j]
            if np.ndim(c) == 0:
                if c != 0:
                    return Valuation(j, c)
            elif any(v != 0 for v in np.ravel(c)):
                return Valuation(j, c)
        return AtLeast(s.T + 1)
    scale = _magnitude_scale(s.coeffs)
    if scale == 0.0:
        return AtLeast(s.T + 1)
    for j in range(s.T + 1):
        if np.max(np.abs(np.atleast_1d(s.coeffs[j]))) > tau * scale:
            return Valuation(j, s.coeffs[j])
    return AtLeast(s.T + 1)


def series_eval(s: _Series, eps):
    """Horner evaluation of the stored coefficients at ``eps``."""
    acc = s.coeffs[s.T]
    for j in range(s.T - 1, -1, -1):
        acc = acc * eps + s.coeffs[j]
    return acc


def shift_down(s: VecSeries, q: int) -> VecSeries:
    """The series divided by ``eps^q`` (coefficients below ``q`` are dropped)."""
    return VecSeries(s.coeffs[q:].copy())


def derivative(s: _Series) -> _Series:
    if s.T == 0:
        return type(s)(s.coeffs[:1] * 0) if not isinstance(s, CurveSeries) else VecSeries(s.coeffs[:1] * 0)
    arr = np.array([s.coeffs[j] * j for j in range(1, s.T + 1)], dtype=s.coeffs.dtype)
    return VecSeries(arr) if isinstance(s, CurveSeries) else type(s)(arr)


def mat_vec_product(L: MatSeries, v, T: int) -> VecSeries:
    """Truncated product of a matrix series with a vector series (coefficient array)."""
    v = np.asarray(v)
    exact = L.exact or is_exact_array(v)
    m = L.shape[0]
    out = zeros((T + 1, m), exact, np.iscomplexobj(L.coeffs) or np.iscomplexobj(v))
    for a in range(min(L.T, T) + 1):
        for b in range(min(len(v) - 1, T - a) + 1):
            out[a + b] = out[a + b] + L.coeffs[a] @ v[b]
    return VecSeries(out)


def mat_mat_product(A: MatSeries, B, T: int) -> MatSeries:
    B = np.asarray(B)
    exact = A.exact or is_exact_array(B)
    shape = (T + 1, A.shape[0], B.shape[2])
    out = zeros(shape, exact, np.iscomplexobj(A.coeffs) or np.iscomplexobj(B))
    for a in range(min(A.T, T) + 1):
        for b in range(min(B.shape[0] - 1, T - a) + 1):
            out[a + b] = out[a + b] + A.coeffs[a] @ B[b]
    return MatSeries(out)
