from fractions import Fraction

import numpy as np
import pytest

import oracles
from families import random_family, to_sympy
from jordancone.errors import InconsistentK
from jordancone import linalg as la
from jordancone.jordan import (
    NotKSurjective,
    cone_decomposition,
    leading_filtration,
    surjectivity_order,
    surjectivity_witness,
    verify_decomposition,
)
from jordancone.scalars import to_exact_array
from jordancone.series import MatSeries, linearize_along_curve, mat_vec_product, valuation, AtLeast

F = Fraction


def mats(rows_per_order):
    return MatSeries(np.stack([to_exact_array(np.array(r, dtype=object)) for r in rows_per_order]))


def diag_family():
    return mats([[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 0], [0, 0]]])


def test_filtration_of_the_row_family():
    L = mats([[[0, 0]], [[0, 0]], [[0, 0]], [[-1, 0]], [[0, 0]]])
    assert leading_filtration(L, 4).dims == [0, 0, 0, 1]


def test_filtration_invertible_start():
    L = mats([[[2, 1], [1, 1]], [[0, 0], [0, 0]]])
    assert leading_filtration(L, 1).dims == [2]
    assert surjectivity_order(L) == 0


def test_filtration_diagonal():
    assert leading_filtration(diag_family(), 2).dims == [1, 2]


def test_filtration_chains_vanish_below_their_order(G, z2):
    L = linearize_along_curve(G, z2, 16)
    filt = leading_filtration(L, 11)
    for j, chains in enumerate(filt.chains):
        for ch in chains:
            for l in range(j):
                acc = sum((L.coeffs[l - t] @ ch[t] for t in range(l + 1)), start=np.zeros(1) * 0)
                assert all(x == 0 for x in np.ravel(acc))


def test_order_of_example_families(G, z1, z2):
    assert surjectivity_order(linearize_along_curve(G, z1, 10)) == 3
    assert surjectivity_order(linearize_along_curve(G, z2, 24)) == 11


def test_zero_family_stabilizes():
    L = mats([[[0, 0]]] * 5)
    res = surjectivity_order(L)
    assert isinstance(res, NotKSurjective) and res.reason == "stabilized"
    assert res.filtration.dims[-1] == 0


def test_growing_family_is_exhausted():
    L = mats([[[1, 0], [0, 0]], [[0, 0], [0, 0]], [[0, 0], [0, 0]], [[0, 0], [0, 1]]])
    res = surjectivity_order(L, max_k=2)
    assert isinstance(res, NotKSurjective) and res.reason == "exhausted"


def test_y_axis_decomposition(G, z1):
    L = linearize_along_curve(G, z1, 10)
    d = cone_decomposition(L, 3)
    assert d.dims == [0, 0, 0, 1]
    assert list(d.N[:, 0]) == [0, 1]
    assert list(d.Nc[3][:, 0]) == [1, 0]
    assert d.S[3][0, 0] != 0
    assert verify_decomposition(L, d) == []


def test_invertible_start_decomposition():
    L = mats([[[1, 2]], [[0, 0]]])
    d = cone_decomposition(L, 0)
    assert d.k == 0 and d.dims == [1]
    assert all(x == 0 for x in (L.coeffs[0] @ d.N).ravel())
    assert d.S[0][0, 0] != 0
    assert d.phi == ()
    assert verify_decomposition(L, d) == []


def test_diagonal_decomposition():
    d = cone_decomposition(diag_family(), 1)
    assert d.dims == [1, 1] and d.N.shape[1] == 0
    assert d.S[0][0, 0] == 1 and d.S[1][0, 0] == 1
    assert all(x == 0 for x in d.phi[0].ravel())


def test_wrong_k_is_rejected(G, z1):
    L = linearize_along_curve(G, z1, 10)
    with pytest.raises(InconsistentK):
        cone_decomposition(L, 2)


def _check_witness(L, d, bbar):
    b = surjectivity_witness(d, bbar)
    Lb = mat_vec_product(L, b.coeffs, d.k + 1).coeffs
    for t in range(d.k):
        assert all(x == 0 for x in Lb[t])
    assert list(Lb[d.k]) == list(bbar)
    return b


def test_witness_examples(G, z1):
    d = cone_decomposition(diag_family(), 1)
    b = _check_witness(diag_family(), d, to_exact_array(np.array([1, 1])))
    assert [list(c) for c in b.coeffs] == [[0, 1], [1, 0], [0, 0]]
    zero = surjectivity_witness(d, to_exact_array(np.array([0, 0])))
    assert all(x == 0 for x in zero.coeffs.ravel())
    L = linearize_along_curve(G, z1, 10)
    d1 = cone_decomposition(L, 3)
    b1 = _check_witness(L, d1, to_exact_array(np.array([1])))
    # leading direction is the x-axis
    assert all(row[1] == 0 for row in b1.coeffs)


def test_witness_random_targets(G, z2):
    rng = np.random.default_rng(3)
    L = linearize_along_curve(G, z2, 24)
    d = cone_decomposition(L, 11)
    for _ in range(20):
        _check_witness(L, d, to_exact_array(np.array([F(int(rng.integers(-9, 10)), 7)])))


def test_random_families_match_oracle_and_verify():
    rng = np.random.default_rng(11)
    ks = []
    for _ in range(25):
        L = random_family(rng)
        ours = surjectivity_order(L, max_k=6)
        ref = oracles.surjectivity_order(to_sympy(L), 6)
        ours = None if isinstance(ours, NotKSurjective) else ours
        assert ours == ref
        if ours is not None:
            ks.append(ours)
            filt = leading_filtration(L, ours)
            assert filt.dims == oracles.leading_dims(to_sympy(L), ours)
            if L.T >= 2 * ours + 1:
                d = cone_decomposition(L, ours)
                assert verify_decomposition(L, d) == []
                for _ in range(3):
                    _check_witness(L, d, to_exact_array(np.array([F(int(rng.integers(-5, 6)))
                                                                  for _ in range(3)])))
    assert len(set(ks)) >= 2


def test_minimality(G, z1):
    L = linearize_along_curve(G, z1, 10)
    k = surjectivity_order(L)
    dims = leading_filtration(L, k).dims
    assert sum(dims[: k]) < 1 <= dims[k]


def test_scaling_invariance():
    rng = np.random.default_rng(5)
    for _ in range(10):
        L = random_family(rng)
        k = surjectivity_order(L, max_k=6)
        if isinstance(k, NotKSurjective) or L.T < 2 * k + 1:
            continue
        L2 = L.scaled(F(-3, 2))
        assert surjectivity_order(L2, max_k=6) == k
        d1, d2 = cone_decomposition(L, k), cone_decomposition(L2, k)
        for a, b in zip(d1.Nc + (d1.N,), d2.Nc + (d2.N,)):
            assert la.rank(np.concatenate([a, b], axis=1)) == la.rank(a) == la.rank(b)


def test_float_mode_agrees_with_exact(G, z2):
    L = linearize_along_curve(G, z2, 24)
    assert surjectivity_order(L.to_float()) == 11
    d = cone_decomposition(L.to_float(), 11)
    assert verify_decomposition(L.to_float(), d) == []


def test_valuation_of_kernel_direction(G, z1):
    L = linearize_along_curve(G, z1, 10)
    d = cone_decomposition(L, 3)
    p = d.p_coeffs()
    curve = np.array([c @ d.N[:, 0] for c in p])
    v = valuation(mat_vec_product(L, curve, 3))
    assert isinstance(v, AtLeast)
