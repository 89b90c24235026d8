from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from jordancone import linalg as la
from jordancone.scalars import (
    GaussRational,
    format_scalar,
    parse_scalar,
    to_exact_array,
    to_exact_scalar,
)


def test_parse_rational_and_decimal_strings_are_exact():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("0.1") == Fraction(1, 10)
    assert parse_scalar(2) == Fraction(2)
    assert parse_scalar(0.5) == 0.5 and isinstance(parse_scalar(0.5), float)


def test_parse_complex_forms():
    assert parse_scalar(["1/2", "-1"]) == GaussRational(Fraction(1, 2), -1)
    assert parse_scalar("1+2j", exact=False) == 1 + 2j
    # a vanishing imaginary part collapses to a rational
    assert isinstance(parse_scalar(["3", "0"]), Fraction)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_scalar("abc")
    with pytest.raises(ValueError):
        parse_scalar(True)


def test_format_roundtrip():
    for v in (Fraction(-7, 3), Fraction(5)):
        assert parse_scalar(format_scalar(v)) == v
    assert format_scalar(GaussRational(1, 2)) == {"re": "1", "im": "2"}


def test_gauss_rational_field_ops():
    a, b = GaussRational(1, 2), GaussRational(3, -1)
    assert a * b == GaussRational(5, 5)
    assert (a / b) * b == a
    assert a - a == 0
    assert a ** 2 == GaussRational(-3, 4)


def test_float_converts_by_binary_value():
    assert to_exact_scalar(0.1) == Fraction(0.1)
    assert to_exact_scalar(np.int64(4)) == Fraction(4)


def _rational_matrices(max_dim=4):
    ent = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(ent, min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=60, deadline=None)
@given(_rational_matrices())
def test_exact_rank_and_nullspace_match_sympy(rows):
    A = to_exact_array(np.array(rows, dtype=object))
    M = sp.Matrix(rows)
    assert la.rank(A) == M.rank()
    N = la.nullspace(A)
    assert N.shape[1] == A.shape[1] - M.rank()
    assert all(x == 0 for x in (A @ N).ravel())


@settings(max_examples=40, deadline=None)
@given(_rational_matrices())
def test_span_basis_is_canonical(rows):
    A = to_exact_array(np.array(rows, dtype=object))
    B = la.span_basis(A)
    # a second spanning set of the same space yields the same basis
    shuffled = A[:, ::-1] * Fraction(3)
    assert np.array_equal(la.span_basis(shuffled), B)


def test_solve_particular_detects_inconsistency():
    A = to_exact_array(np.array([[1, 0], [0, 0]], dtype=object))
    assert la.solve_particular(A, to_exact_array(np.array([1, 1]))) is None
    x = la.solve_particular(A, to_exact_array(np.array([2, 0])))
    assert list(x) == [2, 0]


def test_inverse_and_det_exact():
    A = to_exact_array(np.array([[2, 1], [1, 1]], dtype=object))
    inv = la.inverse(A)
    assert np.array_equal(A @ inv, to_exact_array(np.eye(2, dtype=int)))
    assert la.det(A) == 1
    with pytest.raises(np.linalg.LinAlgError):
        la.inverse(to_exact_array(np.array([[1, 2], [2, 4]])))


def test_float_rank_reports_spectral_gap():
    A = np.diag([1.0, 1e-3, 1e-14])
    info = la.rank_info(A)
    assert info.rank == 2
    assert info.gap == pytest.approx(1e11, rel=1e-6)


def test_complement_columns_greedy_lowest_index():
    A = to_exact_array(np.array([[1], [0], [0]]))
    C = to_exact_array(np.array([[1, 0, 0, 1], [0, 0, 1, 1], [0, 0, 0, 0]]))
    assert la.complement_columns(A, C) == [2]
