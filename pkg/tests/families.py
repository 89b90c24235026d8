"""Random rational matrix families with a spread of surjectivity orders."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp

from jordancone.scalars import to_exact_array
from jordancone.series import MatSeries


def _rat(rng, bound=4):
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, 4)))


def _rand(rng, m, n):
    return np.array([[_rat(rng) for _ in range(n)] for _ in range(m)], dtype=object)


def _low_rank(rng, m, n, r):
    if r == 0:
        return to_exact_array(np.zeros((m, n), dtype=int))
    return _rand(rng, m, r) @ _rand(rng, r, n)


def _invertible(rng, n):
    while True:
        A = _rand(rng, n, n)
        if sp.Matrix(A.tolist()).det() != 0:
            return A


def random_family(rng, m=3, n=3, T=6) -> MatSeries:
    """Either independent low-rank coefficients or a scrambled diagonal of powers."""
    if rng.random() < 0.5:
        coeffs = [_low_rank(rng, m, n, int(rng.integers(0, min(m, n) + 1))) for _ in range(T + 1)]
        coeffs[0] = _low_rank(rng, m, n, int(rng.integers(0, min(m, n))))
    else:
        P, Q = _invertible(rng, m), _invertible(rng, n)
        powers = rng.integers(0, 4, size=min(m, n))
        coeffs = []
        for t in range(T + 1):
            D = to_exact_array(np.zeros((m, n), dtype=int))
            for i, p in enumerate(powers):
                if p == t:
                    D[i, i] = Fraction(1)
            noise = _low_rank(rng, m, n, 1) if t > 3 else to_exact_array(np.zeros((m, n), dtype=int))
            coeffs.append(P @ D @ Q + noise)
    return MatSeries(np.stack([to_exact_array(c) for c in coeffs]))


def to_sympy(L: MatSeries):
    return [sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in c])
            for c in L.coeffs]
