import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import example_map
from oracles import symmetric_partial
from jordancone.errors import DimensionMismatch, ZeroMap
from jordancone.polynomial import (
    Poly,
    PolyMap,
    deriv_apply,
    deriv_tensor,
    ord_of_map,
    perturb_map,
    taylor_terms,
)
from jordancone.scalars import to_exact_array

F = Fraction


def test_eval_examples(G):
    assert G.eval(np.array([0.0, 0.5]))[0] == pytest.approx(0.03125)
    assert G.eval(to_exact_array(np.array([2, 1])))[0] == 31
    assert G.eval(to_exact_array(np.array([0, 0])))[0] == 0


def test_eval_dimension_mismatch(G):
    with pytest.raises(DimensionMismatch):
        G.eval(np.array([1.0, 2.0, 3.0]))


def test_jacobian_on_the_y_axis(G):
    e = F(1, 3)
    J = G.jacobian(to_exact_array(np.array([0, e])))
    # the y-partial 5 eps^4 is part of the exact Jacobian
    assert list(J[0]) == [-e ** 3, 5 * e ** 4]


def test_jacobian_on_the_branch(G):
    e = F(2, 7)
    J = G.jacobian(to_exact_array(np.array([e ** 3, e ** 4])))
    assert list(J[0]) == [4 * e ** 12, e ** 11 * (-3 + 5 * e ** 5)]


def test_jacobian_of_constant_is_zero():
    C = PolyMap.from_terms(2, [{(0, 0): F(3)}])
    assert all(v == 0 for v in C.jacobian(to_exact_array(np.array([1, 2]))).ravel())


def test_deriv_apply_examples(G):
    h = deriv_tensor(G, 2, [0, 0])
    assert list(deriv_apply(h, [[1, 0], [1, 0]])) == [0]
    x2y = PolyMap.from_terms(2, [{(2, 1): F(1)}])
    h3 = deriv_tensor(x2y, 3, [0, 0])
    assert list(deriv_apply(h3, [[1, 0], [1, 0], [0, 1]])) == [2]


def test_deriv_order_one_is_jacobian(G):
    x = to_exact_array(np.array([F(1, 2), F(-1, 3)]))
    d = to_exact_array(np.array([3, 5]))
    h = deriv_tensor(G, 1, x)
    assert list(deriv_apply(h, [d])) == list(G.jacobian(x) @ d)


def test_deriv_apply_wrong_count(G):
    with pytest.raises(DimensionMismatch):
        deriv_apply(deriv_tensor(G, 2, [0, 0]), [[1, 0]])


def test_deriv_apply_matches_sympy():
    x, y = sp.symbols("x y")
    expr = 3 * x ** 2 * y - x * y ** 3 + 2 * x ** 4
    G = PolyMap.from_terms(2, [{(2, 1): F(3), (1, 3): F(-1), (4, 0): F(2)}])
    dirs = [[1, 2], [-1, 1], [2, 3]]
    ours = deriv_apply(deriv_tensor(G, 3, [0, 0]), dirs)[0]
    assert ours == symmetric_partial(expr, [x, y], dirs)


_vec = st.lists(st.integers(-4, 4), min_size=3, max_size=3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.lists(_vec, min_size=4, max_size=4), _vec)
def test_deriv_apply_symmetric(order, dirs, point):
    G = PolyMap.from_terms(3, [
        {(2, 1, 1): F(1), (0, 3, 1): F(-2, 3), (1, 0, 0): F(5), (4, 0, 1): F(1, 7)},
        {(0, 0, 2): F(1), (1, 1, 1): F(3)},
    ])
    h = deriv_tensor(G, order, to_exact_array(np.array(point)))
    base = [to_exact_array(np.array(d)) for d in dirs[:order]]
    ref = list(deriv_apply(h, base))
    for perm in itertools.permutations(base):
        assert list(deriv_apply(h, list(perm))) == ref


def test_deriv_apply_multilinear():
    G = example_map()
    h = deriv_tensor(G, 3, to_exact_array(np.array([1, 2])))
    u, v, w = (to_exact_array(np.array(a)) for a in ([1, 2], [3, -1], [0, 5]))
    lhs = deriv_apply(h, [u * 2 + v, w, w])
    rhs = deriv_apply(h, [u, w, w]) * 2 + deriv_apply(h, [v, w, w])
    assert list(lhs) == list(rhs)


def test_finite_difference_order(G):
    x = np.array([0.3, -0.7])
    d = np.array([0.4, 1.1])
    exact = (G.to_float().jacobian(x) @ d)[0]
    errs = []
    for h in (1e-3, 1e-4):
        fd = (G.to_float().eval(x + h * d) - G.to_float().eval(x - h * d))[0] / (2 * h)
        errs.append(abs(fd - exact))
    observed = math.log10(errs[0] / errs[1])
    assert observed >= 1.9


def test_taylor_identity_exact(G):
    x = to_exact_array(np.array([F(1, 3), F(-2, 5)]))
    b = to_exact_array(np.array([F(3, 7), F(1, 2)]))
    total = sum(taylor_terms(G, x, b))
    assert list(total) == list(G.eval(x + b))


def test_ord_of_map(G):
    assert ord_of_map(G) == 4
    assert ord_of_map(PolyMap.from_terms(2, [{(1, 0): F(1), (0, 1): F(2)}])) == 1
    assert ord_of_map(PolyMap.from_terms(2, [{(2, 0): F(1), (0, 3): F(-1)}])) == 2
    with pytest.raises(ZeroMap):
        ord_of_map(PolyMap.from_terms(2, [{}]))


def test_perturb_map_examples(G):
    assert perturb_map(G, F(0), [(5, [{(0, 5): F(1)}])]) == G
    bumped = perturb_map(G, F(1, 1000), [(5, [{(0, 5): F(1)}])])
    assert bumped.components[0].terms[(0, 5)] == F(1001, 1000)
    assert perturb_map(G, F(1), [(3, [{}])]) == G
    with pytest.raises(ValueError):
        perturb_map(G, F(1), [(3, [{(1, 1): F(1)}])])


def test_normalization_drops_zero_terms():
    p = Poly(2, {(1, 0): F(1)}) - Poly(2, {(1, 0): F(1)})
    assert p.is_zero() and p.terms == {}


def test_substitute_and_divide():
    eps = Poly.variable(1, 0)
    p = PolyMap.from_terms(2, [{(1, 1): F(1)}])
    out = p.substitute([eps * eps, eps * F(3)])
    assert out.components[0].terms == {(3,): F(3)}
    assert out.components[0].divide_by_power(0, 3).terms == {(0,): F(3)}
