"""Approximation order of a curve and the applicability gates for each solution route."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..polynomial import PolyMap, deriv_apply, deriv_tensor
from ..scalars import to_float_array, vec_norm
from ..series import (
    AtLeast,
    CurveSeries,
    VecSeries,
    compose_map_with_curve,
    shift_down,
    valuation,
)
from .frame import BlowUpFrame

DEFAULT_ETA = 0.1


@dataclass(frozen=True)
class ExactThroughT:
    T: int


def approximation_order(G: PolyMap, z: CurveSeries, T: int):
    """``(q, bbar)`` with ``G[z(eps)] = eps^q bbar(eps)`` through order ``T``."""
    s = compose_map_with_curve(G, z, T)
    v = valuation(s)
    if isinstance(v, AtLeast):
        return ExactThroughT(T)
    return v.q, shift_down(s, v.q)


@dataclass
class Verdict:
    name: str
    passed: bool
    conditions: list = field(default_factory=list)   # (label, ok, detail)

    def add(self, label: str, ok: bool, detail=None):
        self.conditions.append((label, bool(ok), detail))

    def finish(self) -> "Verdict":
        self.passed = all(ok for _, ok, _ in self.conditions)
        return self


@dataclass
class GateReport:
    k: int
    shift: int
    q: int | None
    bbar: VecSeries | None
    eta: float
    verdicts: dict
    smallness: dict
    no_zero_in_cone: bool
    route: str | None

    def passed(self, name: str) -> bool:
        v = self.verdicts.get(name)
        return bool(v and v.passed)


def bbar_at_order(q: int | None, bbar: VecSeries | None, order: int, m: int):
    """Value at ``eps = 0`` of ``eps^-order G[z(eps)]`` (``None`` when ``q < order``)."""
    if q is None:
        return np.zeros(m)
    if q > order:
        return np.zeros(m)
    if q == order:
        return to_float_array(bbar.coeffs[0])
    return None


def quadratic_vanishes(G: PolyMap, basis: np.ndarray, tol: float = 0.0) -> bool:
    """Whether ``G''[0](u, v) = 0`` for all pairs of columns of ``basis``."""
    if basis.shape[1] == 0:
        return True
    origin = [0] * G.n_in
    h = deriv_tensor(G, 2, origin)
    cols = [basis[:, j] for j in range(basis.shape[1])]
    for u, v in itertools.combinations_with_replacement(cols, 2):
        val = deriv_apply(h, [u, v])
        if vec_norm(val) > tol:
            return False
    return True


def _small(frame: BlowUpFrame, vec, projections) -> float | None:
    if vec is None:
        return None
    P = sum(to_float_array(frame.d.P[i]) for i in projections)
    return vec_norm(P @ vec)


def gate(frame: BlowUpFrame, eta: float = DEFAULT_ETA, T: int | None = None) -> GateReport:
    """Evaluate every route condition for ``frame``."""
    G, z, d = frame.G, frame.z, frame.d
    k, i, m = d.k, frame.shift, d.m
    if T is None:
        T = frame.T
    if z.polynomial:
        # the curve image is a polynomial; examine all of it
        T = max(T, max(G.degree(), 1) * z.T)
    ao = approximation_order(G, z, T)
    if isinstance(ao, ExactThroughT):
        q, bbar = None, None
    else:
        q, bbar = ao
    tol = 0.0 if frame.exact else 1e-12
    qok = (lambda need: q is None or q >= need)
    b2k = bbar_at_order(q, bbar, 2 * k, m)
    small = {
        "bbar0": vec_norm(b2k) if b2k is not None else None,
        "P_last_bbar0": _small(frame, b2k, [k]),
    }
    verdicts = {}

    v = Verdict("corollary1", False)
    v.add("q >= 2k", qok(2 * k), {"q": q, "2k": 2 * k})
    v.add("|bbar(0)| <= eta", small["bbar0"] is not None and small["bbar0"] <= eta, small["bbar0"])
    verdicts[v.name] = v.finish()

    v = Verdict("corollary2i", False)
    v.add("q >= 2k", qok(2 * k), {"q": q, "2k": 2 * k})
    v.add("|P_{k+1} bbar(0)| <= eta",
          small["P_last_bbar0"] is not None and small["P_last_bbar0"] <= eta, small["P_last_bbar0"])
    verdicts[v.name] = v.finish()

    v = Verdict("corollary2ii", False)
    v.add("q >= 2k", qok(2 * k), {"q": q, "2k": 2 * k})
    v.add("second derivative vanishes on N_{k+1}^c", quadratic_vanishes(G, d.Nc[k], tol))
    verdicts[v.name] = v.finish()

    if i == 1:
        b = bbar_at_order(q, bbar, 2 * k - 1, m)
        val = _small(frame, b, [k - 1, k])
        small["P_last_two_bbar0"] = val
        v = Verdict("corollary3", False)
        v.add("k >= 3", k >= 3)
        v.add("q >= 2k-1", qok(2 * k - 1), {"q": q, "2k-1": 2 * k - 1})
        v.add("|(P_k + P_{k+1}) bbar(0)| <= eta", val is not None and val <= eta, val)
        both = np.concatenate([d.Nc[k], d.N], axis=1)
        v.add("second derivative vanishes on N_{k+1}^c + N_{k+1}", quadratic_vanishes(G, both, tol))
        verdicts[v.name] = v.finish()
    if i >= 1:
        b = bbar_at_order(q, bbar, 2 * k - i, m)
        val = _small(frame, b, [k])
        small["P_last_bbar0_shifted"] = val
        present = G.degrees_present()
        low = [deg for deg in range(2, i + 2) if deg in present]
        v = Verdict("corollary4", False)
        v.add("k >= 2", k >= 2)
        v.add(f"derivatives of order 2..{i + 1} vanish at 0", not low, low)
        v.add(f"q >= 2k-{i}", qok(2 * k - i), {"q": q, "2k-i": 2 * k - i})
        v.add("|P_{k+1} bbar(0)| <= eta", val is not None and val <= eta, val)
        verdicts[v.name] = v.finish()

    no_zero = i == 0 and k >= 1 and q is not None and q <= 2 * k - 1
    if i == 0:
        order = ("corollary1", "corollary2i", "corollary2ii")
    elif i == 1:
        order = ("corollary3", "corollary4")
    else:
        order = ("corollary4",)
    route = next((r for r in order if verdicts[r].passed), None)
    return GateReport(k, i, q, bbar, eta, verdicts, small, no_zero, route)
