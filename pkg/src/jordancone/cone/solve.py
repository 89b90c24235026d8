"""Solvers on the blown-up map: Newton at eps = 0, continuation in eps, level sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ContinuationBreakdown,
    NewtonDivergence,
    OutOfCone,
    SingularJacobian,
    Unsupported,
)
from ..polynomial import PolyMap, deriv_apply, deriv_tensor
from ..scalars import to_exact_array, to_exact_scalar, to_float_array, vec_norm
from ..series import CurveSeries
from .frame import BlowUpFrame
from .gate import GateReport, bbar_at_order

NEWTON_TOL = 1e-12
MAX_ITER = 50
MAX_HALVINGS = 30
RESIDUAL_CONSTANT = 10.0
CONE_RADIUS = 0.5


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int


def newton(fun, jac, x0, tol: float = NEWTON_TOL, max_iter: int = MAX_ITER,
           max_halvings: int = MAX_HALVINGS) -> NewtonResult:
    """Damped Newton iteration on an absolute residual tolerance.

    Each step is halved until the residual norm decreases (at most
    ``max_halvings`` times).  Raises :class:`SingularJacobian` when the
    linear system cannot be solved and :class:`NewtonDivergence` when the
    tolerance is not reached.
    """
    x = np.array(x0, dtype=complex if np.iscomplexobj(x0) else float)
    r = np.asarray(fun(x))
    res = vec_norm(r)
    it = 0
    if x.size == 0:
        if res > tol:
            raise NewtonDivergence(res, 0)
        return NewtonResult(x, res, 0)
    while res > tol:
        if it >= max_iter:
            raise NewtonDivergence(res, it)
        J = np.asarray(jac(x))
        try:
            cond = np.linalg.cond(J)
            if not np.isfinite(cond) or cond > 1e14:
                raise SingularJacobian(float(cond))
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise SingularJacobian(float("inf"))
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x + lam * step
            rt = np.asarray(fun(trial))
            rn = vec_norm(rt)
            if rn < res or rn <= tol:
                break
            lam *= 0.5
        else:
            raise NewtonDivergence(res, it)
        x, r, res = trial, rt, rn
        it += 1
    return NewtonResult(x, res, it)


# --- evaluation helpers -------------------------------------------------------

def _pack_float(frame: BlowUpFrame, eps, c, s) -> np.ndarray:
    vals = np.concatenate([[eps], np.ravel(c), np.ravel(s)])
    cplx = np.iscomplexobj(vals) or frame.G.field == "complex"
    return vals.astype(complex if cplx else float)


def _eval(pm: PolyMap, x: np.ndarray) -> np.ndarray:
    return np.array([p.eval_float(x) for p in pm.components])


def _jac_c(frame: BlowUpFrame, pm: PolyMap, x: np.ndarray) -> np.ndarray:
    m = frame.m
    J = np.empty((pm.m_out, m), dtype=x.dtype if np.iscomplexobj(x) else float)
    for j in range(m):
        col = pm.partial((1 + j,))
        for i in range(pm.m_out):
            J[i, j] = col[i].eval_float(x)
    return J


def blownup_residual(frame: BlowUpFrame, eps, c, s) -> np.ndarray:
    """``eps^-Q G[A(eps, c, s)]``; at ``eps = 0`` the limit system.

    Exact coordinates give an exact result.  When ``G[z]`` vanishes to lower
    order than ``Q`` only the raw evaluation at ``eps != 0`` is available.
    """
    if frame.has_zero_set_limit:
        x = frame.pack(eps, c, s)
        return frame.zero_map().eval(x)
    if eps == 0:
        raise ValueError("no eps = 0 limit: G[z] vanishes to order below 2k - shift")
    pt = frame.point(eps, c, s)
    return frame.G.eval(pt) / eps ** frame.Q


def _zero_fun(frame: BlowUpFrame, eps, s):
    F = frame.zero_map()
    return (lambda c: _eval(F, _pack_float(frame, eps, c, s)),
            lambda c: _jac_c(frame, F, _pack_float(frame, eps, c, s)))


# --- eps = 0 -------------------------------------------------------------------

def _block_cols(frame: BlowUpFrame, blocks) -> np.ndarray:
    sl = frame.d.block_slices()
    idx = [i for b in blocks for i in range(sl[b].start, sl[b].stop)]
    return np.array(idx, dtype=int)


def _trailing_then_back(frame: BlowUpFrame, s, trailing: int, tol: float, c0=None) -> np.ndarray:
    """Newton on the last ``trailing`` blocks, then back-substitute the others."""
    d = frame.d.to_float()
    k = d.k
    Rinv = np.linalg.inv(d.R_all) if d.m else np.zeros((0, 0))
    fun, jac = _zero_fun(frame, 0.0, s)
    c = np.zeros(frame.m) if c0 is None else np.array(c0, dtype=float)
    tail_blocks = list(range(max(0, k + 1 - trailing), k + 1))
    tail = _block_cols(frame, tail_blocks)
    if tail.size:
        def f_tail(ct):
            full = c.copy().astype(ct.dtype)
            full[tail] = ct
            return (Rinv @ fun(full))[tail]

        def j_tail(ct):
            full = c.copy().astype(ct.dtype)
            full[tail] = ct
            return (Rinv @ jac(full))[np.ix_(tail, tail)]

        c[tail] = newton(f_tail, j_tail, c[tail], tol).x
    sl = d.block_slices()
    for b in range(k + 1 - trailing - 1, -1, -1):
        if sl[b].stop == sl[b].start:
            continue
        r = (Rinv @ fun(c))[sl[b]]
        c[sl[b]] = c[sl[b]] - np.linalg.solve(d.S[b], r)
    return c


def _closed_form_quadratic(frame: BlowUpFrame, report: GateReport, s) -> np.ndarray:
    """Last block in closed form when the quadratic term vanishes on ``N_{k+1}^c``."""
    d = frame.d.to_float()
    k = d.k
    Rinv = np.linalg.inv(d.R_all)
    sl = d.block_slices()[k]
    w = d.N @ np.ravel(s) if d.N.shape[1] else np.zeros(d.n)
    h = deriv_tensor(frame.G.to_float(), 2, [0.0] * d.n)
    bq = bbar_at_order(report.q, report.bbar, 2 * k, d.m)
    rhs = bq + 0.5 * deriv_apply(h, [w, w])
    M = d.S[k].copy()
    for col in range(d.Nc[k].shape[1]):
        M[:, col] = M[:, col] + (Rinv @ deriv_apply(h, [d.Nc[k][:, col], w]))[sl]
    c = np.zeros(d.m)
    c[sl] = np.linalg.solve(M, -(Rinv @ rhs)[sl]) if M.size else []
    return c


def solve_at_zero(frame: BlowUpFrame, report: GateReport, s=None, tol: float = NEWTON_TOL,
                  route: str | None = None) -> np.ndarray:
    """Complement coordinates solving the ``eps = 0`` limit system for kernel coordinate ``s``."""
    s = np.zeros(frame.ns) if s is None else np.ravel(np.asarray(s, dtype=float))
    if vec_norm(s) > CONE_RADIUS:
        raise OutOfCone(vec_norm(s), CONE_RADIUS)
    route = route or report.route
    if route is None:
        raise Unsupported("no solution route passed the gate for this frame")
    if not frame.has_zero_set_limit:
        raise Unsupported("G[z] vanishes to lower order than the frame requires")
    if route == "corollary2ii":
        c = _closed_form_quadratic(frame, report, s)
        # the closed form covers the last block; back-substitute the rest
        c = _trailing_then_back(frame, s, 1, tol, c0=c) if frame.k else c
    elif route == "corollary3":
        c = _trailing_then_back(frame, s, 2, tol)
    else:
        c = _trailing_then_back(frame, s, 1, tol)
    fun, jac = _zero_fun(frame, 0.0, s)
    return newton(fun, jac, c, tol).x


# --- series hierarchy ------------------------------------------------------------

def _grouped(pm: PolyMap, T: int):
    """Per component: ``{(c, s) exponent: eps coefficient array}`` truncated at ``T``."""
    out = []
    for p in pm.components:
        groups: dict[tuple, np.ndarray] = {}
        for e, coef in p.terms.items():
            if e[0] > T:
                continue
            key = e[1:]
            arr = groups.setdefault(key, np.zeros(T + 1, dtype=complex))
            arr[e[0]] += complex(coef)
        out.append(groups)
    return out


def compose_series(pm: PolyMap, c_ser: np.ndarray, s_ser: np.ndarray, T: int,
                   groups=None) -> np.ndarray:
    """Coefficients through ``eps^T`` of ``pm(eps, c(eps), s(eps))``.

    ``c_ser`` and ``s_ser`` are ``(T+1, m)`` and ``(T+1, ns)`` coefficient arrays.
    """
    groups = groups if groups is not None else _grouped(pm, T)
    vars_ = np.concatenate([c_ser, s_ser], axis=1) if s_ser.size else c_ser
    cache: dict[tuple[int, int], np.ndarray] = {}

    def power(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = vars_[:, i] if k == 1 else np.convolve(power(i, k - 1), vars_[:, i])[: T + 1]
        return cache[(i, k)]

    out = np.zeros((T + 1, len(groups)), dtype=complex)
    for col, g in enumerate(groups):
        acc = np.zeros(T + 1, dtype=complex)
        for key, epsc in g.items():
            term = epsc
            for i, k in enumerate(key):
                if k:
                    term = np.convolve(term, power(i, k))[: T + 1]
            acc += term
        out[:, col] = acc
    return out


def solve_hierarchy(frame: BlowUpFrame, pm: PolyMap, c0, s_ser, rhs_ser, T: int) -> np.ndarray:
    """Series ``c(eps)`` with ``pm(eps, c(eps), s(eps)) = rhs(eps)`` through order ``T``.

    Each order is a linear solve against the ``eps = 0`` Jacobian in ``c``.
    """
    m = frame.m
    c_ser = np.zeros((T + 1, m), dtype=complex)
    c_ser[0] = c0
    s_ser = np.asarray(s_ser, dtype=complex).reshape(T + 1, frame.ns)
    rhs_ser = np.asarray(rhs_ser, dtype=complex).reshape(T + 1, pm.m_out)
    x0 = _pack_float(frame, 0.0, np.real_if_close(c0), np.real_if_close(s_ser[0])).astype(complex)
    J0 = _jac_c(frame, pm, x0)
    groups = _grouped(pm, T)
    for t in range(1, T + 1):
        val = compose_series(pm, c_ser, s_ser, T, groups)
        r = val[t] - rhs_ser[t]
        c_ser[t] = -np.linalg.solve(J0, r) if m else []
    return c_ser


def _real(a):
    a = np.asarray(a)
    if np.iscomplexobj(a) and np.all(np.abs(a.imag) == 0):
        return a.real.copy()
    return a


def refined_curve(frame: BlowUpFrame, c0, s=None) -> CurveSeries:
    """The solution branch at fixed kernel coordinate as a truncated series in eps."""
    T = frame.T
    s = np.zeros(frame.ns) if s is None else np.ravel(s)
    s_ser = np.zeros((T + 1, frame.ns))
    if frame.ns:
        s_ser[0] = s
    rhs = np.zeros((T + 1, frame.m))
    c_ser = solve_hierarchy(frame, frame.zero_map(), c0, s_ser, rhs, T)
    coeffs = compose_series(frame.ansatz, c_ser, s_ser.astype(complex), T)
    if frame.G.field == "real":
        coeffs = coeffs.real
    return CurveSeries(_real(coeffs), polynomial=False, check_origin=False)


# --- continuation ------------------------------------------------------------------

def default_grid(grid_min: float = 1e-4, grid_max: float = 0.2, points: int = 45) -> np.ndarray:
    """Signed geometric grid, negative side first, each side ordered outward."""
    pos = np.geomspace(grid_min, grid_max, points)
    return np.concatenate([-pos, pos])


@dataclass
class Sample:
    eps: float
    c: np.ndarray
    s: np.ndarray
    residual: float
    point: np.ndarray
    g_norm: float
    bound: float


@dataclass
class RemainderSolution:
    route: str
    shift: int
    Q: int
    grid: np.ndarray
    c_at_zero: np.ndarray
    samples: list = field(default_factory=list)
    refined: CurveSeries | None = None
    newton_tol: float = NEWTON_TOL
    residual_constant: float = RESIDUAL_CONSTANT

    def max_bound_ratio(self) -> float:
        return max((smp.g_norm / smp.bound for smp in self.samples if smp.bound > 0), default=0.0)


def exact_g_norm(frame: BlowUpFrame, eps, c, s) -> float:
    """``|G[A(eps, c, s)]|`` evaluated in rational arithmetic at the float inputs."""
    if frame.exact:
        pt = frame.exact_point(eps, c, s)
        return vec_norm(frame.G.eval(pt))
    pt = frame.point(eps, c, s)
    return vec_norm(frame.G.eval(pt))


def continue_in_epsilon(frame: BlowUpFrame, report: GateReport, s=None, grid=None,
                        tol: float = NEWTON_TOL, with_refined: bool = True) -> RemainderSolution:
    """March the zero set outward from ``eps = 0`` along both signs of the grid."""
    s = np.zeros(frame.ns) if s is None else np.ravel(np.asarray(s, dtype=float))
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    c0 = solve_at_zero(frame, report, s, tol)
    sol = RemainderSolution(report.route, frame.shift, frame.Q, grid, c0, newton_tol=tol)
    for sign in (-1.0, 1.0):
        side = sorted((e for e in grid if np.sign(e) == sign), key=abs)
        hist = [(0.0, c0)]
        for eps in side:
            if len(hist) >= 2:
                (e1, c1), (e2, c2) = hist[-2], hist[-1]
                guess = c2 + (c2 - c1) * (eps - e2) / (e2 - e1)
            else:
                guess = hist[-1][1]
            fun, jac = _zero_fun(frame, eps, s)
            try:
                res = newton(fun, jac, guess, tol)
            except (NewtonDivergence, SingularJacobian):
                try:
                    res = newton(fun, jac, hist[-1][1], tol)
                except (NewtonDivergence, SingularJacobian):
                    raise ContinuationBreakdown(float(eps), hist[-1])
            c = _real(res.x)
            hist.append((float(eps), c))
            pt = frame.point(float(eps), c, s)
            gn = exact_g_norm(frame, float(eps), c, s)
            bound = RESIDUAL_CONSTANT * abs(eps) ** frame.Q * tol
            sol.samples.append(Sample(float(eps), c, s.copy(), res.residual, pt, gn, bound))
    sol.samples.sort(key=lambda smp: smp.eps)
    if with_refined:
        sol.refined = refined_curve(frame, c0)
    return sol


# --- level sets ----------------------------------------------------------------------

def _level_fun(frame: BlowUpFrame, eps, s, phi):
    D = frame.blown
    Sphi = to_float_array(frame.S_full(True)) @ np.ravel(phi)
    return (lambda c: _eval(D, _pack_float(frame, eps, c, s)) - Sphi,
            lambda c: _jac_c(frame, D, _pack_float(frame, eps, c, s)))


def psi_c(frame: BlowUpFrame, eps, phi, s=None, tol: float = NEWTON_TOL) -> np.ndarray:
    """Complement coordinates on the level set labelled by ``phi`` and ``s``."""
    s = np.zeros(frame.ns) if s is None else np.ravel(np.asarray(s, dtype=float))
    phi = np.ravel(np.asarray(phi, dtype=float))
    fun, jac = _level_fun(frame, float(eps), s, phi)
    return _real(newton(fun, jac, phi.copy(), tol).x)


def level_set_point(frame: BlowUpFrame, eps, phi, s=None, tol: float = NEWTON_TOL) -> np.ndarray:
    """Point with ``G = G[z(eps)] + eps^Q S phi`` (to Newton accuracy)."""
    if eps == 0:
        raise ValueError("level set points need eps != 0")
    s = np.zeros(frame.ns) if s is None else np.ravel(np.asarray(s, dtype=float))
    c = psi_c(frame, eps, phi, s, tol)
    return frame.point(float(eps), c, s)


def level_phi_for_value(frame: BlowUpFrame, eps, target, radius: float = CONE_RADIUS) -> np.ndarray:
    """Level coordinate whose level set at ``eps`` carries the value ``target``."""
    if eps == 0:
        raise ValueError("level coordinates need eps != 0")
    eps = float(eps)
    target = np.ravel(np.asarray(target, dtype=float))
    if frame.has_zero_set_limit:
        bq = np.array([p.eval_float(np.array([eps] + [0.0] * (frame.nvars - 1)))
                       for p in frame.bbar_polys()])
        rhs = target / eps ** frame.Q - bq
    else:
        gz = np.array([p.eval_float(np.array([eps] + [0.0] * (frame.nvars - 1)))
                       for p in frame.curve_image])
        rhs = (target - gz) / eps ** frame.Q
    phi = np.linalg.solve(to_float_array(frame.S_full(True)), rhs)
    if vec_norm(phi) > radius:
        raise OutOfCone(vec_norm(phi), radius)
    return _real(phi)


def linearization_residual(frame: BlowUpFrame, eps, phi, s, c) -> float:
    """Exact ``|G[pt] - G[z(eps)] - eps^Q S phi|`` at the reconstructed point."""
    e = to_exact_scalar(float(eps))
    pt = frame.exact_point(float(eps), c, s)
    zq = frame.z.to_exact().coeffs
    zpt = sum((zq[j] * e ** j for j in range(len(zq))), start=zq[0] * 0)
    S = frame.S_full(True)
    S = S if frame.exact else to_exact_array(S)
    ph = to_exact_array(np.ravel(phi))
    lin = (S @ ph) * e ** frame.Q
    diff = frame.G.eval(pt) - frame.G.eval(np.asarray(zpt, dtype=object)) - lin
    return vec_norm(diff)


__all__ = [
    "NEWTON_TOL", "RESIDUAL_CONSTANT", "CONE_RADIUS", "newton", "blownup_residual",
    "solve_at_zero", "continue_in_epsilon", "psi_c", "level_set_point",
    "level_phi_for_value", "refined_curve", "solve_hierarchy", "compose_series",
    "default_grid", "RemainderSolution", "Sample", "linearization_residual",
    "exact_g_norm",
]
