"""Dense linear algebra over exact scalars or floats.

Every routine dispatches on the array dtype: ``object`` arrays hold exact
rationals (or Gaussian rationals) and are handled by Gauss-Jordan elimination
with lowest-index pivots; numeric arrays go through the SVD with a relative
rank threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .scalars import TAU_RANK, is_exact_array, zeros


@dataclass(frozen=True)
class RankInfo:
    rank: int
    # singular values on either side of the cut (float mode only)
    sigma_kept: float | None = None
    sigma_dropped: float | None = None

    @property
    def gap(self) -> float | None:
        if self.sigma_kept is None:
            return None
        if not self.sigma_dropped:
            return float("inf")
        return self.sigma_kept / self.sigma_dropped


def _as2d(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    return A


def rref(A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an exact matrix and its pivot columns."""
    R = _as2d(A).copy()
    for idx, x in np.ndenumerate(R):
        if isinstance(x, int):
            R[idx] = Fraction(x)
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if R[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        piv = R[r, c]
        R[r] = [x / piv for x in R[r]]
        for i in range(rows):
            if i != r and R[i, c] != 0:
                f = R[i, c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def _svd_rank(A, tau: float = TAU_RANK) -> tuple[RankInfo, np.ndarray, np.ndarray, np.ndarray]:
    A = _as2d(A).astype(complex if np.iscomplexobj(A) else float)
    if A.size == 0:
        return RankInfo(0, None, None), np.zeros(0), np.zeros((A.shape[0], 0)), np.eye(A.shape[1])
    U, s, Vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return RankInfo(0, None, 0.0), s, U, Vh
    r = int(np.sum(s > tau * smax))
    kept = float(s[r - 1]) if r > 0 else None
    dropped = float(s[r]) if r < s.size else 0.0
    return RankInfo(r, kept, dropped), s, U, Vh


def rank_info(A, tau: float = TAU_RANK) -> RankInfo:
    A = _as2d(A)
    if A.size == 0:
        return RankInfo(0)
    if is_exact_array(A):
        return RankInfo(len(rref(A)[1]))
    return _svd_rank(A, tau)[0]


def rank(A, tau: float = TAU_RANK) -> int:
    return rank_info(A, tau).rank


def nullspace(A, tau: float = TAU_RANK) -> np.ndarray:
    """Columns spanning the kernel of ``A``.

    In exact mode the basis is the standard one read off the reduced echelon
    form (one column per free variable).
    """
    A = _as2d(A)
    n = A.shape[1]
    if is_exact_array(A):
        if A.shape[0] == 0:
            return _identity_like(n, True)
        R, piv = rref(A)
        free = [c for c in range(n) if c not in piv]
        N = zeros((n, len(free)), True)
        for j, f in enumerate(free):
            N[f, j] = Fraction(1)
            for i, p in enumerate(piv):
                N[p, j] = -R[i, f]
        return N
    if A.shape[0] == 0:
        return np.eye(n)
    info, _s, _U, Vh = _svd_rank(A, tau)
    return Vh[info.rank:].conj().T.copy()


def _identity_like(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def column_basis(A, tau: float = TAU_RANK) -> list[int]:
    """Indices of a greedy maximal independent set of columns, lowest first."""
    A = _as2d(A)
    if A.shape[1] == 0:
        return []
    if is_exact_array(A):
        return rref(A)[1]
    chosen: list[int] = []
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale == 0.0:
        return []
    for c in range(A.shape[1]):
        trial = A[:, chosen + [c]]
        if _svd_rank(trial / scale, tau)[0].rank == len(chosen) + 1:
            chosen.append(c)
    return chosen


def span_basis(A, tau: float = TAU_RANK) -> np.ndarray:
    """A basis of the column span of ``A``.

    Exact mode returns the transposed nonzero rows of the reduced echelon form
    of ``A.T``, which is canonical for the subspace.  Float mode returns the
    greedy independent columns of ``A``.
    """
    A = _as2d(A)
    m = A.shape[0]
    if is_exact_array(A):
        if A.shape[1] == 0:
            return zeros((m, 0), True)
        R, piv = rref(A.T)
        return R[: len(piv)].T.copy()
    idx = column_basis(A, tau)
    return A[:, idx].copy()


def complement_columns(A, C, tau: float = TAU_RANK) -> list[int]:
    """Indices of columns of ``C`` that greedily extend ``span(A)``."""
    A = _as2d(A)
    C = _as2d(C)
    if C.shape[1] == 0:
        return []
    k = A.shape[1]
    if is_exact_array(A) or is_exact_array(C):
        M = np.concatenate([_exactify(A), _exactify(C)], axis=1)
        _R, piv = rref(M)
        return [p - k for p in piv if p >= k]
    base = A.copy()
    r0 = rank(base, tau) if k else 0
    chosen: list[int] = []
    scale = max(float(np.max(np.abs(A))) if A.size else 0.0, float(np.max(np.abs(C))))
    for c in range(C.shape[1]):
        trial = np.concatenate([base, C[:, [c]]], axis=1)
        r = rank(trial / scale, tau) if scale else 0
        if r > r0:
            base, r0 = trial, r
            chosen.append(c)
    return chosen


def _exactify(A) -> np.ndarray:
    if is_exact_array(A):
        return A
    from .scalars import to_exact_array
    return to_exact_array(A)


def solve_particular(A, b, tau: float = TAU_RANK, rtol: float = 1e-9):
    """One solution of ``A x = b`` or ``None`` when the system is inconsistent.

    ``b`` may be a vector or a matrix of right-hand sides (solved column-wise,
    all columns must be consistent).
    """
    A = _as2d(A)
    b = np.asarray(b)
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    m, n = A.shape
    if is_exact_array(A) or is_exact_array(B):
        A = _exactify(A)
        B = _exactify(B)
        if n == 0:
            ok = all(x == 0 for x in B.ravel())
            X = zeros((0, B.shape[1]), True)
            return (X.ravel() if vec else X) if ok else None
        M = np.concatenate([A, B], axis=1)
        R, piv = rref(M)
        if any(p >= n for p in piv):
            return None
        X = zeros((n, B.shape[1]), True)
        for i, p in enumerate(piv):
            X[p] = R[i, n:]
        return X.ravel() if vec else X
    if n == 0:
        ok = np.all(np.abs(B) <= rtol * max(1.0, float(np.max(np.abs(B))) if B.size else 1.0))
        X = np.zeros((0, B.shape[1]), dtype=B.dtype)
        return (X.ravel() if vec else X) if ok else None
    X, *_ = np.linalg.lstsq(A, B, rcond=tau)
    res = A @ X - B
    scale = max(1.0, float(np.max(np.abs(B))) if B.size else 0.0,
                float(np.max(np.abs(A))) * float(np.max(np.abs(X))) if X.size else 0.0)
    if res.size and float(np.max(np.abs(res))) > rtol * scale:
        return None
    return X.ravel() if vec else X


def inverse(A) -> np.ndarray:
    A = _as2d(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return A.copy()
    if is_exact_array(A):
        R, piv = rref(np.concatenate([A, _identity_like(n, True)], axis=1))
        if piv[:n] != list(range(n)):
            raise np.linalg.LinAlgError("singular matrix")
        return R[:, n:].copy()
    return np.linalg.inv(A)


def det(A):
    A = _as2d(A)
    n = A.shape[0]
    if n == 0:
        return Fraction(1) if is_exact_array(A) else 1.0
    if not is_exact_array(A):
        return np.linalg.det(A)
    M = A.copy()
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[[c, p]] = M[[p, c]]
            out = -out
        out = out * M[c, c]
        for i in range(c + 1, n):
            if M[i, c] != 0:
                f = M[i, c] / M[c, c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return out


def block_diag(blocks, exact: bool) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros((rows, cols), exact)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def hstack(mats, rows: int, exact: bool) -> np.ndarray:
    mats = [m for m in mats if m.shape[1] > 0]
    if not mats:
        return zeros((rows, 0), exact)
    return np.concatenate(mats, axis=1)


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, np.ndarray):
        if x.dtype == object:
            return all(v == 0 for v in x.ravel())
        return bool(np.all(np.abs(x) <= tol))
    if tol and not isinstance(x, (int, Fraction)):
        return abs(x) <= tol
    return x == 0
