"""One-call pipeline from a map and a curve to the cone decomposition."""

from __future__ import annotations

from dataclasses import dataclass

from .jordan import ConeDecomposition, NotKSurjective, cone_decomposition, surjectivity_order
from .polynomial import PolyMap
from .scalars import TAU_RANK
from .series import AtLeast, CurveSeries, MatSeries, compose_map_with_curve, linearize_along_curve, valuation

T_START = 8
T_CEILING = 64


@dataclass
class CurveAnalysis:
    G: PolyMap
    z: CurveSeries
    L: MatSeries
    k: int | None
    failure: NotKSurjective | None
    q: int | None           # None when G[z] vanishes through the working order
    d: ConeDecomposition | None

    @property
    def T(self) -> int:
        return self.L.T


def _curve_order(G: PolyMap, z: CurveSeries, T: int) -> int | None:
    v = valuation(compose_map_with_curve(G, z, T))
    return None if isinstance(v, AtLeast) else v.q


def analyze_curve(G: PolyMap, z: CurveSeries, max_k: int | None = None,
                  T: int | None = None, tau: float = TAU_RANK) -> CurveAnalysis:
    """Linearize along ``z``, find ``k``, and build the cone decomposition.

    Without an explicit ``T`` the truncation starts at 8 and doubles (up to 64)
    while the filtration is still growing; once ``k`` is known the series are
    re-expanded to ``max(2k + 4, q + 2)``.  For a polynomial curve the growth
    continues until the truncation covers the whole (polynomial) family.
    """
    T_work = T if T is not None else T_START
    if not z.polynomial:
        T_work = min(T_work, z.T)
    while True:
        L = linearize_along_curve(G, z, T_work)
        res = surjectivity_order(L, max_k if max_k is not None else T_work, tau)
        if not isinstance(res, NotKSurjective):
            break
        if z.polynomial:
            # the family is a polynomial; below its degree a stall may be truncation
            full = max(G.degree() - 1, 0) * z.T
            grow = T_work < min(full, T_CEILING) or res.reason == "exhausted"
        else:
            grow = res.reason == "exhausted" and T_work < z.T
        grow = grow and T is None and max_k is None and T_work < T_CEILING
        if not grow:
            q = _curve_order(G, z, T_work)
            return CurveAnalysis(G, z, L, None, res, q, None)
        T_work = min(2 * T_work, T_CEILING) if z.polynomial else min(2 * T_work, z.T)
    k = res
    # a polynomial curve has a polynomial image; read all of it
    q = _curve_order(G, z, max(T_work, max(G.degree(), 1) * z.T) if z.polynomial else z.T)
    need = max(2 * k + 4, (q or 0) + 2, T or 0)
    if not z.polynomial:
        need = min(need, z.T)
    if need != L.T:
        L = linearize_along_curve(G, z, need)
    d = cone_decomposition(L, k, tau)
    return CurveAnalysis(G, z, L, k, None, q, d)
