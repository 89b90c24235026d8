"""Jordan chains of a matrix family, the order of surjectivity, and the cone decomposition.

The family ``L(eps) = L_0 + eps L_1 + ...`` is given as a :class:`MatSeries`.
A chain of length ``j`` is a tuple ``(b_0, ..., b_{j-1})`` for which every
coefficient of ``L(eps) (b_0 + eps b_1 + ...)`` below order ``j`` vanishes; the
order-``j`` coefficient (with a free ``b_j``) is its leading coefficient.
``W_j`` collects all leading coefficients of order ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import InconsistentK
from .scalars import TAU_RANK, eye, is_exact_array, to_float_array, zeros
from .series import MatSeries, VecSeries, mat_mat_product, series_eval


@dataclass(frozen=True)
class LeadingFiltration:
    n: int
    m: int
    bases: tuple            # W_j as m x dim columns, j = 0..J
    chains: tuple           # per j: witnessing chains, arrays of shape (j+1, n)
    kernels: tuple          # K_0..K_{J+1}: chains of length j stacked as (n*j) x dim columns
    rank_info: tuple = field(default=())

    @property
    def dims(self) -> list[int]:
        return [b.shape[1] for b in self.bases]

    @property
    def top(self) -> int:
        return len(self.bases) - 1

    def root_space(self, j: int) -> np.ndarray:
        """Span of root elements ``b_0`` of chains of length ``j`` (``M_j``)."""
        if j == 0:
            return eye(self.n, is_exact_array(self.bases[0]))
        K = self.kernels[j]
        return la.span_basis(K[: self.n, :]) if K.shape[1] else K[: self.n, :0]


@dataclass(frozen=True)
class NotKSurjective:
    """Negative outcome of :func:`surjectivity_order`.

    ``reason`` is ``"stabilized"`` when the generic rank of the family is below
    the target dimension (the filtration can never fill the target), and
    ``"exhausted"`` when ``max_k`` was reached while still growing.
    """

    reason: str
    max_k: int
    filtration: LeadingFiltration
    generic_rank: int


def _row_operator(L: MatSeries, j: int, K: np.ndarray, n: int):
    """``sum_{t<j} L_{j-t} x_t`` applied to every column of ``K``."""
    m = L.shape[0]
    exact = L.exact
    out = zeros((m, K.shape[1]), exact, np.iscomplexobj(L.coeffs))
    if K.shape[1] == 0:
        return out
    for t in range(j):
        if j - t > L.T:
            continue
        out = out + L.coeffs[j - t] @ K[t * n:(t + 1) * n, :]
    return out


def leading_filtration(L: MatSeries, max_k: int, tau: float = TAU_RANK) -> LeadingFiltration:
    """Compute ``W_0 .. W_J`` with ``J = min(max_k, first j with W_j = K^m)``."""
    if max_k > L.T:
        raise ValueError(f"max_k = {max_k} exceeds the series truncation {L.T}")
    m, n = L.shape
    exact = L.exact
    cplx = np.iscomplexobj(L.coeffs)
    K = zeros((0, 0), exact, cplx)
    kernels = [K]
    bases, chains, infos = [], [], []
    prev = zeros((m, 0), exact, cplx)
    for j in range(max_k + 1):
        d = K.shape[1]
        A = np.concatenate([_row_operator(L, j, K, n), L.coeffs[0]], axis=1)
        info = la.rank_info(A, tau)
        W = la.span_basis(A, tau) if info.rank else zeros((m, 0), exact, cplx)
        if not exact and W.shape[1] != info.rank:
            W = W[:, : info.rank]
        # columns of A that extend W_{j-1}, each with its chain
        new_cols = la.complement_columns(prev, A, tau)[: info.rank - prev.shape[1]] if info.rank else []
        wit = []
        for c in new_cols:
            ch = zeros((j + 1, n), exact, cplx)
            if c < d:
                ch[:j] = K[:, c].reshape(j, n)
            else:
                ch[j, c - d] = Fraction(1) if exact else 1.0
            wit.append(ch)
        N = la.nullspace(A, tau)
        top = K @ N[:d, :] if d else zeros((n * j, N.shape[1]), exact, cplx)
        K = np.concatenate([top, N[d:, :]], axis=0)
        kernels.append(K)
        bases.append(W)
        chains.append(tuple(wit))
        infos.append(info)
        prev = W
        if W.shape[1] == m:
            break
    return LeadingFiltration(n, m, tuple(bases), tuple(chains), tuple(kernels), tuple(infos))


_PROBES = (Fraction(1, 7), Fraction(-2, 11), Fraction(3, 13), Fraction(5, 17))


def generic_rank(L: MatSeries, tau: float = TAU_RANK) -> int:
    """Rank of the truncated family at a few fixed nonzero sample points."""
    best = 0
    for p in _PROBES:
        M = series_eval(L, p if L.exact else float(p))
        best = max(best, la.rank(np.asarray(M), tau))
    return best


def surjectivity_order(L: MatSeries, max_k: int | None = None, tau: float = TAU_RANK):
    """Minimal ``k`` with ``W_k = K^m``, or a :class:`NotKSurjective` report."""
    if max_k is None:
        max_k = L.T
    filt = leading_filtration(L, max_k, tau)
    m = L.shape[0]
    if filt.dims[-1] == m:
        return filt.top
    g = generic_rank(L, tau)
    reason = "stabilized" if g < m else "exhausted"
    return NotKSurjective(reason, max_k, filt, g)


@dataclass(frozen=True)
class ConeDecomposition:
    k: int
    n: int
    m: int
    Nc: tuple               # N_1^c .. N_{k+1}^c, n x d_i
    N: np.ndarray           # N_{k+1}, n x (n - m)
    R: tuple                # R_1 .. R_{k+1}, m x d_i
    S: tuple                # d_i x d_i
    phi: tuple              # phi_1 .. phi_k, n x n
    P: tuple                # m x m projections
    exact: bool

    @property
    def dims(self) -> list[int]:
        return [b.shape[1] for b in self.Nc]

    @property
    def R_all(self) -> np.ndarray:
        return la.hstack(list(self.R), self.m, self.exact)

    @property
    def Nc_all(self) -> np.ndarray:
        return la.hstack(list(self.Nc), self.n, self.exact)

    @property
    def basis_all(self) -> np.ndarray:
        return la.hstack(list(self.Nc) + [self.N], self.n, self.exact)

    @property
    def S_full(self) -> np.ndarray:
        """``R_all @ blockdiag(S)``: coordinates on the complements to ``K^m``."""
        return self.R_all @ la.block_diag(list(self.S), self.exact)

    def V(self, r: int) -> np.ndarray:
        """Basis of ``N_1^c + ... + N_r^c``."""
        return la.hstack(list(self.Nc[:r]), self.n, self.exact)

    def p_coeffs(self) -> np.ndarray:
        """Coefficients ``I, phi_1, ..., phi_k`` of the near-identity polynomial."""
        return np.stack([eye(self.n, self.exact)] + list(self.phi))

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for d in self.dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def to_float(self) -> "ConeDecomposition":
        f = to_float_array
        return ConeDecomposition(
            self.k, self.n, self.m,
            tuple(f(x) for x in self.Nc), f(self.N), tuple(f(x) for x in self.R),
            tuple(f(x) for x in self.S), tuple(f(x) for x in self.phi),
            tuple(f(x) for x in self.P), False,
        )


def _solve_chain(L: MatSeries, k: int, root, length: int, V: Sequence[np.ndarray],
                 Rinv, lead_rows: int, full_last: bool, tau: float):
    """Continuation ``b_1..b_length`` of a chain rooted at ``root``.

    ``b_l`` is restricted to the columns of ``V[l]``.  Orders ``1..length-1``
    must vanish; at order ``length`` either everything vanishes
    (``full_last``) or only the first ``lead_rows`` coordinates with respect
    to ``Rinv``.
    """
    n = root.shape[0]
    m = L.shape[0]
    exact = L.exact
    cplx = np.iscomplexobj(L.coeffs)
    widths = [V[l].shape[1] for l in range(1, length + 1)]
    offs = np.concatenate([[0], np.cumsum(widths)]).astype(int) if widths else np.array([0])
    nunk = int(offs[-1]) if widths else 0

    def Lc(t):
        return L.coeffs[t] if t <= L.T else zeros((m, n), exact, cplx)

    rows_A, rows_b = [], []
    for t in range(1, length + 1):
        A_t = zeros((m, nunk), exact, cplx)
        for l in range(1, t + 1):
            A_t[:, offs[l - 1]:offs[l]] = Lc(t - l) @ V[l]
        rhs = -(Lc(t) @ root)
        if t == length and not full_last:
            A_t = (Rinv @ A_t)[:lead_rows]
            rhs = (Rinv @ rhs)[:lead_rows]
        rows_A.append(A_t)
        rows_b.append(rhs)
    if not rows_A:
        return []
    A = np.concatenate(rows_A, axis=0)
    rhs = np.concatenate(rows_b, axis=0)
    y = la.solve_particular(A, rhs, tau)
    if y is None:
        raise InconsistentK(f"no admissible chain continuation of length {length}")
    return [V[l] @ y[offs[l - 1]:offs[l]] for l in range(1, length + 1)]


def cone_decomposition(L: MatSeries, k: int, tau: float = TAU_RANK) -> ConeDecomposition:
    """Build the decomposition for a family of surjectivity order ``k``."""
    if L.T < k:
        raise ValueError(f"series truncation {L.T} is below k = {k}")
    m, n = L.shape
    exact = L.exact
    cplx = np.iscomplexobj(L.coeffs)
    filt = leading_filtration(L, k, tau)
    dims = filt.dims
    if dims[-1] != m or filt.top != k:
        raise InconsistentK(f"claimed k = {k} but the filtration dims are {dims}")

    M = [filt.root_space(j) for j in range(k + 2)]
    Nc, R = [], []
    prev_W = zeros((m, 0), exact, cplx)
    for j in range(k + 1):
        idx = la.complement_columns(M[j + 1], M[j], tau)
        Nc.append(M[j][:, idx])
        W = filt.bases[j]
        ridx = la.complement_columns(prev_W, W, tau)
        R.append(W[:, ridx])
        prev_W = W
        if Nc[-1].shape[1] != R[-1].shape[1]:
            raise InconsistentK(
                f"root space step {j} has dimension {Nc[-1].shape[1]} "
                f"but the filtration grows by {R[-1].shape[1]}"
            )
    N = M[k + 1]
    if sum(b.shape[1] for b in Nc) + N.shape[1] != n:
        raise InconsistentK("complements and kernel do not add up to the source dimension")

    R_all = la.hstack(R, m, exact)
    Rinv = la.inverse(R_all)
    V = [la.hstack(Nc[: k + 1 - l], n, exact) for l in range(k + 1)]
    V = [None] + V[1:]
    offsets = np.concatenate([[0], np.cumsum([r.shape[1] for r in R])]).astype(int)

    S = []
    images = [[] for _ in range(k + 1)]   # images[l] = columns of phi_l on the basis
    for j in range(k + 1):
        block = zeros((R[j].shape[1], Nc[j].shape[1]), exact, cplx)
        for col in range(Nc[j].shape[1]):
            v = Nc[j][:, col]
            bs = _solve_chain(L, k, v, j, V, Rinv, int(offsets[j]), False, tau)
            chain = [v] + bs
            lead = zeros(m, exact, cplx)
            for t, b in enumerate(chain):
                lead = lead + L.coeffs[j - t] @ b
            coords = Rinv @ lead
            block[:, col] = coords[offsets[j]:offsets[j + 1]]
            for l in range(1, k + 1):
                images[l].append(chain[l] if l <= j else zeros(n, exact, cplx))
        S.append(block)
    for col in range(N.shape[1]):
        w = N[:, col]
        bs = _solve_chain(L, k, w, k, V, Rinv, m, True, tau)
        for l in range(1, k + 1):
            images[l].append(bs[l - 1])

    B_all = la.hstack(Nc + [N], n, exact)
    Binv = la.inverse(B_all)
    phi = []
    for l in range(1, k + 1):
        img = np.stack(images[l], axis=1) if images[l] else zeros((n, 0), exact, cplx)
        phi.append(img @ Binv)

    P = []
    for j in range(k + 1):
        E = zeros((m, m), exact, cplx)
        for i in range(offsets[j], offsets[j + 1]):
            E[i, i] = Fraction(1) if exact else 1.0
        P.append(R_all @ E @ Rinv)
    for j, s in enumerate(S):
        if s.shape[0] and la.rank(s, tau) < s.shape[0]:
            raise InconsistentK(f"leading map on complement {j + 1} is singular")
    return ConeDecomposition(k, n, m, tuple(Nc), N, tuple(R), tuple(S), tuple(phi), tuple(P), exact)


def _close(a, b, tol: float) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype == object and b.dtype == object:
        return bool(np.all(a == b))
    fa, fb = to_float_array(a), to_float_array(b)
    scale = max(1.0, float(np.max(np.abs(fa))) if fa.size else 0.0)
    return bool(np.all(np.abs(fa - fb) <= tol * scale))


def verify_decomposition(L: MatSeries, d: ConeDecomposition, tol: float = 1e-9) -> list[str]:
    """Check every structural property of ``d`` against ``L``; returns the failures."""
    problems: list[str] = []
    n, m, k = d.n, d.m, d.k
    if la.rank(d.basis_all) != n or d.basis_all.shape[1] != n:
        problems.append("source subspaces do not form a direct sum of K^n")
    if la.rank(d.R_all) != m or d.R_all.shape[1] != m:
        problems.append("target subspaces do not form a direct sum of K^m")
    for i, s in enumerate(d.S):
        if s.shape[0] != s.shape[1] or (s.shape[0] and la.rank(s) < s.shape[0]):
            problems.append(f"S_{i + 1} is not invertible")
    I = eye(m, d.exact)
    total = zeros((m, m), d.exact)
    for i, Pi in enumerate(d.P):
        if not _close(Pi @ Pi, Pi, tol):
            problems.append(f"P_{i + 1} is not idempotent")
        for j, Pj in enumerate(d.P):
            if i != j and not _close(Pi @ Pj, zeros((m, m), d.exact), tol):
                problems.append(f"P_{i + 1} P_{j + 1} != 0")
        total = total + Pi
    if not _close(total, I, tol):
        problems.append("projections do not sum to the identity")
    for l, ph in enumerate(d.phi, start=1):
        Vr = d.V(k + 1 - l)
        base = la.rank(Vr) if Vr.shape[1] else 0
        if la.rank(np.concatenate([Vr, ph], axis=1)) != base:
            problems.append(f"phi_{l} leaves N_1^c + ... + N_{k + 1 - l}^c")

    p = d.p_coeffs()
    Tcheck = min(L.T, k)
    for i, Nci in enumerate(d.Nc):
        if Nci.shape[1] == 0 or i > L.T:
            continue
        prod = mat_mat_product(L, np.array([c @ Nci for c in p]), min(L.T, i))
        target = d.R[i] @ d.S[i]
        for t in range(i):
            if not _close(prod.coeffs[t], zeros(prod.coeffs[t].shape, d.exact), tol):
                problems.append(f"complement {i + 1}: order {t} does not vanish")
        if not _close(prod.coeffs[i], target, tol):
            problems.append(f"complement {i + 1}: leading coefficient differs from R S")
    if d.N.shape[1]:
        prod = mat_mat_product(L, np.array([c @ d.N for c in p]), Tcheck)
        for t in range(Tcheck + 1):
            if not _close(prod.coeffs[t], zeros(prod.coeffs[t].shape, d.exact), tol):
                problems.append(f"kernel directions: order {t} does not vanish")
    return problems


def surjectivity_witness(d: ConeDecomposition, bbar) -> VecSeries:
    """A polynomial curve ``b(eps)`` with ``L(eps) b(eps) = eps^k bbar + O(eps^{k+1})``."""
    k, n = d.k, d.n
    bbar = np.asarray(bbar)
    exact = d.exact and bbar.dtype == object
    dd = d if exact else d.to_float()
    coords = la.inverse(dd.R_all) @ bbar
    u = zeros((k + 1, n), exact, np.iscomplexobj(bbar))
    for i, sl in enumerate(dd.block_slices()):
        if sl.stop == sl.start:
            continue
        ni = dd.Nc[i] @ (la.inverse(dd.S[i]) @ coords[sl])
        u[k - i] = u[k - i] + ni
    p = dd.p_coeffs()
    out = zeros((2 * k + 1, n), exact, np.iscomplexobj(bbar))
    for a in range(k + 1):
        for b in range(k + 1):
            out[a + b] = out[a + b] + p[a] @ u[b]
    return VecSeries(out)
