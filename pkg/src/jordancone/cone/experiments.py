"""Property probes on a frame: perturbation, cone homogeneity, linearization checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..analysis import analyze_curve
from ..jordan import NotKSurjective, surjectivity_order
from ..polynomial import PolyMap, perturb_map
from ..scalars import to_float_array, vec_norm
from ..series import CurveSeries, linearize_along_curve
from .frame import BlowUpFrame, build_frame
from .gate import DEFAULT_ETA, ExactThroughT, GateReport, approximation_order, gate
from .solve import (
    NEWTON_TOL,
    RESIDUAL_CONSTANT,
    compose_series,
    linearization_residual,
    newton,
    psi_c,
    solve_hierarchy,
    _eval,
    _jac_c,
    _pack_float,
)

KINDS = ("map", "curve", "joint")


def _random_rational(rng: np.random.Generator, bound: int = 9) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def random_homogeneous(rng: np.random.Generator, n: int, m: int, degree: int,
                       density: float = 0.7) -> list[dict]:
    """Per output component, a random rational homogeneous polynomial of ``degree``."""
    exps = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) == degree]
    out = []
    for _ in range(m):
        terms = {}
        for e in exps:
            if rng.random() < density:
                c = _random_rational(rng)
                if c:
                    terms[e] = c
        out.append(terms)
    return out


@dataclass
class PerturbationResult:
    kind: str
    order: int
    alpha: object
    k_before: int | None
    k_after: int | None
    gate_before: GateReport | None
    gate_after: GateReport | None
    checks: list = field(default_factory=list)     # (label, ok)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)


def _k_of(G: PolyMap, z: CurveSeries, T: int) -> int | None:
    res = surjectivity_order(linearize_along_curve(G, z, T))
    return None if isinstance(res, NotKSurjective) else res


def _plain_gate(G: PolyMap, z: CurveSeries, eta: float) -> GateReport | None:
    a = analyze_curve(G, z)
    if a.d is None:
        return None
    return gate(build_frame(G, z, a.d, 0), eta)


def perturbation_experiment(G: PolyMap, z: CurveSeries, kind: str, alpha, order: int | None = None,
                            rng: np.random.Generator | None = None, eta: float = DEFAULT_ETA,
                            T: int | None = None) -> PerturbationResult:
    """Perturb the map, the curve, or both and compare surjectivity order and gate.

    ``kind`` is ``"map"`` (homogeneous terms of degree ``order+1 .. k+1``),
    ``"curve"`` (curve terms ``eps^order .. eps^k``) or ``"joint"`` (degree
    ``2k`` map terms and an ``eps^2k`` curve term).  Exact rational data keeps
    the rank decisions exact.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown perturbation kind {kind!r}")
    rng = rng if rng is not None else np.random.default_rng(0)
    base = analyze_curve(G, z, T=T)
    k = base.k
    if k is None:
        raise ValueError("the unperturbed family is not k-surjective")
    Tk = max(base.T, 2 * k + 2)
    n, m = G.n_in, G.m_out
    alpha = Fraction(alpha) if not isinstance(alpha, (Fraction, complex)) else alpha
    Gp, zp = G, z
    if kind == "map":
        i = order if order is not None else int(rng.integers(0, k + 1))
        tensors = [(tau, random_homogeneous(rng, n, m, tau)) for tau in range(i + 1, k + 2)]
        Gp = perturb_map(G, alpha, tensors)
    elif kind == "curve":
        i = order if order is not None else int(rng.integers(1, k + 1))
        coeffs = z.to_exact().padded(max(z.T, k)).coeffs.copy()
        for t in range(i, k + 1):
            coeffs[t] = coeffs[t] + np.array([_random_rational(rng) * alpha for _ in range(n)], dtype=object)
        zp = CurveSeries(coeffs, polynomial=z.polynomial)
    else:
        i = 2 * k
        Gp = perturb_map(G, alpha, [(2 * k, random_homogeneous(rng, n, m, 2 * k))])
        coeffs = z.to_exact().padded(max(z.T, 2 * k)).coeffs.copy()
        coeffs[2 * k] = coeffs[2 * k] + np.array([_random_rational(rng) * alpha for _ in range(n)], dtype=object)
        zp = CurveSeries(coeffs, polynomial=z.polynomial)
    k_after = _k_of(Gp, zp, Tk)
    res = PerturbationResult(kind, i, alpha, k, k_after, None, None)
    if alpha == 0:
        res.checks.append(("k unchanged at alpha = 0", k_after == k))
    if kind in ("map", "curve"):
        res.checks.append((f"{i} <= k_after <= {k}", k_after is not None and i <= k_after <= k))
    else:
        res.gate_before = _plain_gate(G, z, eta)
        res.gate_after = _plain_gate(Gp, zp, eta)
        before = res.gate_before.passed("corollary1") if res.gate_before else None
        after = res.gate_after.passed("corollary1") if res.gate_after else None
        res.checks.append(("k unchanged", k_after == k))
        if before:
            res.checks.append(("approximation gate still holds", bool(after)))
        else:
            res.checks.append(("approximation gate verdict unchanged", before == after))
    return res


# --- cone curves ---------------------------------------------------------------------

def _random_poly_series(rng, T: int, dim: int, degree: int, scale: float) -> np.ndarray:
    out = np.zeros((T + 1, dim))
    out[: degree + 1] = rng.uniform(-scale, scale, size=(degree + 1, dim))
    return out


def cone_curve(frame: BlowUpFrame, phi_ser: np.ndarray, s_ser: np.ndarray, tol: float = NEWTON_TOL) -> CurveSeries:
    """The curve in the cone on the level set ``phi(eps)`` with kernel path ``s(eps)``."""
    T = frame.T
    S = to_float_array(frame.S_full(True))
    rhs = phi_ser @ S.T
    D = frame.blown

    def fun(c):
        return _eval(D, _pack_float(frame, 0.0, c, s_ser[0])) - rhs[0]

    def jac(c):
        return _jac_c(frame, D, _pack_float(frame, 0.0, c, s_ser[0]))

    c0 = newton(fun, jac, phi_ser[0].copy(), tol).x
    c_ser = solve_hierarchy(frame, D, c0, s_ser, rhs, T)
    coeffs = compose_series(frame.ansatz, c_ser, np.asarray(s_ser, dtype=complex), T)
    coeffs = coeffs.real if frame.G.field == "real" else coeffs
    return CurveSeries(coeffs, polynomial=False, check_origin=False)


@dataclass
class HomogeneityReport:
    k: int
    orders: list
    approx_orders: list
    required_order: int
    center_order: int | None

    @property
    def all_k(self) -> bool:
        return all(o == self.k for o in self.orders)

    @property
    def approximation_preserved(self) -> bool | None:
        """Only meaningful when the center line has order at least ``2k - shift``."""
        if self.center_order is not None and self.center_order < self.required_order:
            return None
        return all(o is None or o >= self.required_order for o in self.approx_orders)


def cone_curve_homogeneity_check(frame: BlowUpFrame, samples: int = 5,
                                 rng: np.random.Generator | None = None, zero_paths: bool = False,
                                 degree: int = 2, scale: float = 0.1) -> HomogeneityReport:
    """Recompute ``k`` and the approximation order along random curves in the cone."""
    rng = rng if rng is not None else np.random.default_rng(0)
    T = frame.T
    orders, approx = [], []
    center = frame.q
    need = frame.Q
    for _ in range(samples):
        if zero_paths:
            phi = np.zeros((T + 1, frame.m))
            s = np.zeros((T + 1, frame.ns))
        else:
            phi = _random_poly_series(rng, T, frame.m, degree, scale)
            s = _random_poly_series(rng, T, frame.ns, degree, scale)
        zc = cone_curve(frame, phi, s)
        L = linearize_along_curve(frame.G.to_float(), zc, T)
        res = surjectivity_order(L)
        orders.append(None if isinstance(res, NotKSurjective) else res)
        ao = approximation_order(frame.G.to_float(), zc, T)
        approx.append(None if isinstance(ao, ExactThroughT) else ao[0])
    return HomogeneityReport(frame.k, orders, approx, need, center)


# --- linearization identity and near-identity Jacobian --------------------------------

@dataclass
class LinearizationReport:
    samples: list          # (eps, phi, s, residual, bound)
    tol: float

    @property
    def worst_ratio(self) -> float:
        return max((r / b for _, _, _, r, b in self.samples), default=0.0)

    @property
    def ok(self) -> bool:
        return all(r <= b for _, _, _, r, b in self.samples)


def linearization_suite(frame: BlowUpFrame, samples: int = 50, radius: float = 0.1,
                        eps_range=(1e-3, 1e-1), rng: np.random.Generator | None = None,
                        tol: float = NEWTON_TOL) -> LinearizationReport:
    """Random level-set points checked against ``G[z(eps)] + eps^Q S phi`` exactly."""
    rng = rng if rng is not None else np.random.default_rng(0)
    mags = np.geomspace(eps_range[0], eps_range[1], samples)
    signs = np.where(np.arange(samples) % 2 == 0, 1.0, -1.0)
    out = []
    for eps in mags * signs:
        phi = _ball(rng, frame.m, radius)
        s = _ball(rng, frame.ns, radius)
        c = psi_c(frame, eps, phi, s, tol)
        r = linearization_residual(frame, eps, phi, s, c)
        out.append((float(eps), phi, s, r, RESIDUAL_CONSTANT * abs(eps) ** frame.Q * tol))
    return LinearizationReport(out, tol)


def _ball(rng, dim: int, radius: float) -> np.ndarray:
    if dim == 0:
        return np.zeros(0)
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v) * radius * rng.uniform(0, 1) ** (1 / dim)


def near_identity_jacobian(frame: BlowUpFrame, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``(phi, s) -> (psi^c(0, phi, s), s)`` at the origin."""
    m, ns = frame.m, frame.ns
    J = np.zeros((m + ns, m + ns))
    for j in range(m + ns):
        cols = []
        for sign in (1.0, -1.0):
            x = np.zeros(m + ns)
            x[j] = sign * h
            c = psi_c(frame, 0.0, x[:m], x[m:])
            cols.append(np.concatenate([c, x[m:]]))
        J[:, j] = (cols[0] - cols[1]) / (2 * h)
    return J


# --- no-zero probe ------------------------------------------------------------------------

def no_zero_probe(frame: BlowUpFrame, report: GateReport, points: int = 1000, radius: float = 0.5,
                  eps_range=(1e-3, 1e-1), rng: np.random.Generator | None = None):
    """Sample the cone and return the smallest ratio ``|G| / (|eps|^q |bbar(0)|)``.

    Under the no-zero verdict every ratio should stay above ``0.1``.  This is a
    falsification probe, not a proof.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    b0 = vec_norm(to_float_array(report.bbar.coeffs[0]))
    Gf = frame.G.to_float()
    worst = np.inf
    for _ in range(points):
        eps = float(np.exp(rng.uniform(np.log(eps_range[0]), np.log(eps_range[1]))))
        eps *= 1.0 if rng.random() < 0.5 else -1.0
        c = _ball(rng, frame.m, radius)
        s = _ball(rng, frame.ns, radius)
        pt = to_float_array(frame.point(eps, c, s))
        g = vec_norm(Gf.eval(pt))
        worst = min(worst, g / (abs(eps) ** report.q * b0))
    return worst
