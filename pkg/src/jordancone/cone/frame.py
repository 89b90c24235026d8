"""The blow-up frame: the map rewritten in cone coordinates around a curve.

Points near the curve are parametrised as

    A(eps, c, s) = z(eps) + eps^(k - shift) * p(eps) * (sum_j eps^(k+1-j) Nc_j c_j + N s)

where ``c`` collects coordinates on the complements ``N_1^c .. N_{k+1}^c`` and
``s`` coordinates on the kernel ``N_{k+1}``.  With ``Q = 2k - shift`` the
difference ``G[A] - G[z]`` is divisible by ``eps^Q`` (checked exactly); the
quotient is the polynomial ``D(eps, c, s)`` on which every solver works.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DimensionMismatch, ShiftOrderViolation
from ..jordan import ConeDecomposition
from ..polynomial import Poly, PolyMap
from ..scalars import is_exact_scalar, to_exact_array, to_exact_scalar, to_float_array, vec_norm
from ..series import CurveSeries

SHIFT_TOL = 1e-10


@dataclass(eq=False)
class BlowUpFrame:
    G: PolyMap
    z: CurveSeries
    d: ConeDecomposition
    shift: int
    T: int
    Q: int
    nvars: int              # 1 + m + ns
    ansatz: PolyMap         # A(eps, c, s): n components
    blown: PolyMap          # D(eps, c, s): m components
    curve_image: list       # G[z(eps)] as polynomials in eps (inside the full ring)
    q: int | None           # valuation of G[z]; None when G[z] == 0
    exact: bool

    @property
    def k(self) -> int:
        return self.d.k

    @property
    def m(self) -> int:
        return self.d.m

    @property
    def ns(self) -> int:
        return self.d.N.shape[1]

    @property
    def has_zero_set_limit(self) -> bool:
        return self.q is None or self.q >= self.Q

    def bbar_polys(self) -> list[Poly]:
        """``eps^-Q G[z(eps)]`` as polynomials; needs ``q >= Q``."""
        if not self.has_zero_set_limit:
            raise ValueError(f"G[z] has order {self.q} < {self.Q}; eps^-Q G[z] is not polynomial")
        return [p.divide_by_power(0, self.Q) for p in self.curve_image]

    def zero_map(self) -> PolyMap:
        """``F = D + eps^-Q G[z]``, whose zeros are zeros of ``G`` in the cone."""
        if not hasattr(self, "_zero_map"):
            comps = tuple(a + b for a, b in zip(self.blown.components, self.bbar_polys()))
            self._zero_map = PolyMap(self.nvars, comps, self.G.field)
        return self._zero_map

    def S_full(self, exact: bool | None = None) -> np.ndarray:
        S = self.d.S_full
        return S if (exact if exact is not None else self.exact) else to_float_array(S)

    def point(self, eps, c, s) -> np.ndarray:
        """Reconstruct the point ``A(eps, c, s)``.  Exact inputs give an exact point."""
        x = self.pack(eps, c, s)
        return self.ansatz.eval(x)

    def pack(self, eps, c, s) -> np.ndarray:
        c = np.asarray(c).ravel()
        s = np.asarray(s).ravel()
        if c.size != self.m or s.size != self.ns:
            raise DimensionMismatch(
                f"expected {self.m} complement and {self.ns} kernel coordinates"
            )
        vals = [eps, *c.tolist(), *s.tolist()]
        if all(is_exact_scalar(v) for v in vals):
            out = np.empty(len(vals), dtype=object)
            out[:] = [to_exact_scalar(v) for v in vals]
            return out
        cplx = any(isinstance(v, complex) for v in vals)
        return np.array(vals, dtype=complex if cplx else float)

    def exact_point(self, eps, c, s) -> np.ndarray:
        """The reconstructed point with float inputs converted exactly to rationals."""
        x = to_exact_array(np.array([eps, *np.ravel(c), *np.ravel(s)]))
        return self.ansatz.eval(x)


def _monomial(nvars: int, eps_power: int, var: int | None, coeff) -> Poly:
    e = [0] * nvars
    e[0] = eps_power
    if var is not None:
        e[var] += 1
    return Poly(nvars, {tuple(e): coeff})


def _ansatz(z: CurveSeries, d: ConeDecomposition, shift: int, exact: bool) -> list[Poly]:
    k, n, m = d.k, d.n, d.m
    dd = d if exact else d.to_float()
    nv = 1 + m + dd.N.shape[1]
    # u = sum_j eps^(k+1-j) Nc_j c_j + N s
    u = [Poly(nv) for _ in range(n)]
    var = 1
    for j, Nc in enumerate(dd.Nc, start=1):
        for col in range(Nc.shape[1]):
            for i in range(n):
                if Nc[i, col] != 0:
                    u[i] = u[i] + _monomial(nv, k + 1 - j, var, Nc[i, col])
            var += 1
    for col in range(dd.N.shape[1]):
        for i in range(n):
            if dd.N[i, col] != 0:
                u[i] = u[i] + _monomial(nv, 0, var, dd.N[i, col])
        var += 1
    pu = list(u)
    for t, ph in enumerate(dd.phi, start=1):
        et = _monomial(nv, t, None, Fraction(1) if exact else 1.0)
        for i in range(n):
            row = Poly(nv)
            for jj in range(n):
                if ph[i, jj] != 0:
                    row = row + u[jj] * ph[i, jj]
            if not row.is_zero():
                pu[i] = pu[i] + et * row
    lift = _monomial(nv, k - shift, None, Fraction(1) if exact else 1.0)
    zp = (z if exact else z.to_float()).as_polys(nv, 0)
    return [zp[i] + lift * pu[i] for i in range(n)]


def build_frame(G: PolyMap, z: CurveSeries, d: ConeDecomposition, shift: int = 0,
                T: int | None = None, shift_tol: float = SHIFT_TOL) -> BlowUpFrame:
    """Assemble the blown-up map for the given shift.

    Raises :class:`ShiftOrderViolation` when ``G[A] - G[z]`` has a term of
    epsilon order below ``Q = 2k - shift``.
    """
    k = d.k
    if shift < 0 or (k >= 1 and shift > k - 1) or (k == 0 and shift != 0):
        raise ValueError(f"shift must lie in [0, k-1] (k = {k}), got {shift}")
    if shift >= 1 and k < 2:
        raise ValueError("shifted frames need k >= 2")
    if z.n != G.n_in:
        raise DimensionMismatch("curve and map dimensions differ")
    exact = G.is_exact() and z.exact and d.exact
    Gw = G if exact else G.to_float()
    Q = 2 * k - shift
    nv = 1 + d.m + d.N.shape[1]
    A = _ansatz(z, d, shift, exact)
    ansatz = PolyMap(nv, tuple(A), G.field)
    GA = Gw.substitute(A)
    zp = (z if exact else z.to_float()).as_polys(nv, 0)
    Gz = [p.substitute(zp) for p in Gw.components]
    comps = []
    scale = max((abs(complex(c)) for p in GA.components for c in p.terms.values()), default=0.0)
    for pa, pz in zip(GA.components, Gz):
        diff = pa - pz
        keep = {}
        for e, c in diff.terms.items():
            if e[0] < Q:
                mag = abs(complex(c))
                if exact or mag > shift_tol * max(scale, 1.0):
                    raise ShiftOrderViolation(e[0], Q, mag)
                continue
            keep[e] = c
        comps.append(Poly(nv, keep).divide_by_power(0, Q))
    blown = PolyMap(nv, tuple(comps), G.field)
    qs = [min(e[0] for e in p.terms) for p in Gz if not p.is_zero()]
    q = min(qs) if qs else None
    if T is None:
        T = max(2 * k + 4, (q or 0) + 2)
    return BlowUpFrame(Gw, z, d, shift, T, Q, nv, ansatz, blown, Gz, q, exact)


def residual_norm(v) -> float:
    return vec_norm(v)
