from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import curve
from jordancone.errors import InsufficientTruncation
from jordancone.polynomial import PolyMap
from jordancone.scalars import to_exact_array
from jordancone.series import (
    AtLeast,
    CurveSeries,
    VecSeries,
    compose_map_with_curve,
    derivative,
    linearize_along_curve,
    mat_vec_product,
    series_eval,
    valuation,
)

F = Fraction


def _nonzero(coeffs):
    return {j: list(c) for j, c in enumerate(coeffs) if any(x != 0 for x in np.ravel(c))}


def test_compose_on_y_axis(G, z1):
    s = compose_map_with_curve(G, z1, 8)
    assert _nonzero(s.coeffs) == {5: [1]}


def test_compose_on_branch(G, z2):
    s = compose_map_with_curve(G, z2, 22)
    assert _nonzero(s.coeffs) == {20: [1]}


def test_compose_zero_curve(G):
    s = compose_map_with_curve(G, curve([[0, 0]]), 4)
    assert _nonzero(s.coeffs) == {}


def test_truncated_curve_cannot_determine_high_orders(G):
    z = CurveSeries(to_exact_array(np.array([[0, 0], [0, 1]])), polynomial=False)
    # a truncated series through eps^1 fixes the image only through eps^(1 + 3)
    compose_map_with_curve(G, z, 4)
    with pytest.raises(InsufficientTruncation):
        compose_map_with_curve(G, z, 5)


def test_linearize_on_y_axis(G, z1):
    L = linearize_along_curve(G, z1, 4)
    nz = {j: list(c[0]) for j, c in enumerate(L.coeffs) if any(x != 0 for x in c.ravel())}
    # eps^4 carries the y-partial 5 y^4 of the y^5 term
    assert nz == {3: [-1, 0], 4: [0, 5]}


def test_linearize_on_branch(G, z2):
    L = linearize_along_curve(G, z2, 16)
    nz = {j: list(c[0]) for j, c in enumerate(L.coeffs) if any(x != 0 for x in c.ravel())}
    assert nz == {11: [0, -3], 12: [4, 0], 16: [0, 5]}


def test_linearize_zero_curve_is_constant():
    G = PolyMap.from_terms(2, [{(1, 0): F(2), (0, 2): F(1)}])
    L = linearize_along_curve(G, curve([[0, 0]]), 3)
    assert list(L.coeffs[0][0]) == [2, 0]
    assert all(x == 0 for x in L.coeffs[1:].ravel())


def test_valuation_examples(G, z1):
    v = valuation(compose_map_with_curve(G, z1, 8))
    assert v.q == 5 and list(v.leading) == [1]
    zero = VecSeries(to_exact_array(np.zeros((4, 2), dtype=int)))
    assert valuation(zero) == AtLeast(4)
    s = VecSeries(to_exact_array(np.array([[0, 0], [0, 0], [3, 0], [1, 1]])))
    v = valuation(s)
    assert v.q == 2 and list(v.leading) == [3, 0]


def test_series_eval_examples(G, z1, z2):
    assert np.allclose(series_eval(z2.to_float(), 0.5), [0.125, 0.0625])
    assert list(series_eval(z2, 0)) == [0, 0]
    L = linearize_along_curve(G, z1, 4)
    assert list(series_eval(L, F(-1))[0]) == [1, 5]


def test_chain_rule(G, z2):
    T = 20
    s = compose_map_with_curve(G, z2, T + 1)
    L = linearize_along_curve(G, z2, T)
    dz = derivative(z2.padded(T + 1))
    lhs = derivative(s).coeffs[:T]
    rhs = mat_vec_product(L, dz.coeffs, T - 1).coeffs
    assert np.array_equal(lhs, rhs)


def test_eval_consistency(G):
    rows = [[0, 0], [1, 2], [F(1, 2), -1], [3, 0]]
    z = CurveSeries(to_exact_array(np.array(rows, dtype=object)), polynomial=False)
    T = 5
    s = compose_map_with_curve(G, z, T)
    # the tail the truncation drops, read off the full polynomial image
    full = compose_map_with_curve(G, curve(rows), 5 * 3).to_float().coeffs
    tail_bound = float(np.max(np.abs(full[T + 1:])))
    e = 1e-2
    lhs = series_eval(s.to_float(), e)
    rhs = G.to_float().eval(series_eval(z.to_float(), e))
    assert np.linalg.norm(lhs - rhs) <= 10 * e ** (T + 1) * tail_bound


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=3, max_size=6),
       st.fractions(min_value=-5, max_value=5, max_denominator=5).filter(lambda c: c != 0))
def test_valuation_scale_invariant(rows, c):
    s = VecSeries(to_exact_array(np.array(rows)))
    a, b = valuation(s), valuation(s.scaled(c))
    if isinstance(a, AtLeast):
        assert a == b
    else:
        assert a.q == b.q
