"""Transversal determinant, half-cone degree signs, Milnor number, classical Newton test."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateThroughT, DimensionMismatch, NonPositive, Undefined
from .polynomial import PolyMap
from .scalars import GaussRational, to_float_array, to_float_scalar, zeros
from .series import (
    AtLeast,
    CurveSeries,
    ScalarSeries,
    compose_map_with_curve,
    conv,
    linearize_along_curve,
    valuation,
)

T_CAP = 64


@dataclass
class TransversalDeterminant:
    chi: int
    r: ScalarSeries                 # unit part, r(0) != 0
    basis: np.ndarray               # n x m transversal
    det: ScalarSeries

    @property
    def r0(self):
        return self.r.coeffs[0]


def _det_series(M: np.ndarray, T: int, exact: bool) -> np.ndarray:
    """Determinant of a square matrix of series (shape ``(T+1, m, m)``), by cofactors."""
    m = M.shape[1]
    if m == 0:
        out = zeros(T + 1, exact)
        out[0] = Fraction(1) if exact else 1.0
        return out
    if m == 1:
        return M[:, 0, 0].copy()
    acc = None
    for j in range(m):
        if all(x == 0 for x in M[:, 0, j]):
            continue
        minor = np.delete(np.delete(M, 0, axis=1), j, axis=2)
        term = conv(M[:, 0, j], _det_series(minor, T, exact), T)
        term = term if j % 2 == 0 else -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else zeros(T + 1, exact)


def default_transversal(z: CurveSeries, m: int) -> np.ndarray:
    """Unit vectors complementing the curve's leading direction.

    The coordinate where the leading coefficient is largest in magnitude is
    dropped and the first ``m`` remaining coordinate axes are kept.
    """
    n = z.n
    lead = z.leading_index()
    drop = None
    if lead is not None:
        mags = [abs(to_float_scalar(x)) for x in z.coeffs[lead]]
        drop = int(np.argmax(mags))
    keep = [i for i in range(n) if i != drop][:m]
    if len(keep) < m:
        raise DimensionMismatch(f"cannot choose {m} transversal axes in dimension {n}")
    B = zeros((n, m), True)
    for col, i in enumerate(keep):
        B[i, col] = Fraction(1)
    return B


def _full_degree(G: PolyMap, z: CurveSeries) -> int:
    if not z.polynomial:
        return z.T
    return min(max(G.degree() - 1, 0) * z.T * max(G.m_out, 1), T_CAP)


def transversal_determinant(G: PolyMap, z: CurveSeries, basis=None, T: int | None = None) -> TransversalDeterminant:
    """``det(L(eps) B) = eps^chi r(eps)`` for a transversal basis ``B`` (n x m)."""
    m = G.m_out
    B = default_transversal(z, m) if basis is None else np.asarray(basis)
    if B.ndim != 2 or B.shape != (G.n_in, m):
        raise DimensionMismatch(f"transversal must be {G.n_in} x {m}")
    T = _full_degree(G, z) if T is None else T
    L = linearize_along_curve(G, z, T)
    exact = L.exact and B.dtype == object
    Lc = L.coeffs if exact else to_float_array(L.coeffs)
    Bc = B if exact else to_float_array(B)
    if exact:
        M = np.empty((T + 1, m, m), dtype=object)
        for t in range(T + 1):
            M[t] = Lc[t] @ Bc
    else:
        M = np.einsum("tij,jk->tik", Lc, Bc)
    det = ScalarSeries(_det_series(M, T, exact))
    v = valuation(det)
    if isinstance(v, AtLeast):
        raise DegenerateThroughT(f"transversal determinant vanishes through order {T}")
    r = ScalarSeries(det.coeffs[v.q:])
    return TransversalDeterminant(v.q, r, B, det)


def _sign(x) -> int:
    if isinstance(x, (complex, GaussRational)) and (x.imag if isinstance(x, complex) else x.im) != 0:
        raise Undefined("degree signs need a real unit part")
    val = to_float_scalar(x)
    val = val.real if isinstance(val, complex) else val
    return 1 if val > 0 else -1


def half_cone_degree(td: TransversalDeterminant, field: str = "real") -> tuple[int, int]:
    """Signs of ``r(0) eps^chi`` for ``eps > 0`` and ``eps < 0``."""
    if field != "real":
        raise Undefined("topological degree signs are defined over the reals only")
    s = _sign(td.r0)
    return s, s * (-1) ** td.chi


def milnor_number(k_values, ord_G: int) -> int:
    """``sum(k_values) - ord_G + 1`` (valid when each Newton-polygon segment factorizes simply)."""
    mu = sum(int(k) for k in k_values) - int(ord_G) + 1
    if mu <= 0:
        raise NonPositive(mu)
    return mu


@dataclass
class NewtonCheck:
    verdict: str            # "Holds" | "Fails"
    q: int | None           # None: G[z] vanishes through the examined order
    bound: int              # 2 chi + 1
    notes: list = field(default_factory=list)


def classical_newton_check(G: PolyMap, z: CurveSeries, td: TransversalDeterminant,
                           T: int | None = None) -> NewtonCheck:
    """Compare the approximation order of ``z`` with the classical ``2 chi + 1``."""
    bound = 2 * td.chi + 1
    if T is None:
        T = max(G.degree(), 1) * z.T if z.polynomial else z.T
        T = max(T, bound)
    v = valuation(compose_map_with_curve(G, z, T))
    if isinstance(v, AtLeast):
        ok = T >= bound
        return NewtonCheck("Holds" if ok else "Fails", None, bound,
                           [] if ok else [f"G[z] vanishes only through order {T}"])
    return NewtonCheck("Holds" if v.q >= bound else "Fails", v.q, bound)


def degree_caveats(dim_kernel: int, q: int | None, k: int) -> list[str]:
    """Warnings attached to degree output."""
    out = []
    if dim_kernel > 1:
        out.append("kernel dimension exceeds 1: cross sections may hold several solutions")
    if q is not None and q < 2 * k + 1:
        out.append(f"curve residual has order {q} < 2k+1 = {2 * k + 1}: degree constancy is not guaranteed")
    return out

