"""Tests for symmetric decompositions, gamma vectors and positivity predicates."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirling_lab import decomp, families
from stirling_lab.decomp import NotSymmetricError, SymbolicCoefficientError
from stirling_lab.exactpoly import ZERO, InexactDivisionError, Poly, poly_vars

x, y = poly_vars("x", "y")


def test_decompose_m2_and_m3():
    """M_2 = (1+x) + x*1 and M_3 = (1+7x+x^2) + x(3+3x)."""
    dec = decomp.symmetric_decompose(1 + 2 * x, 1)
    assert (dec.a, dec.b) == (1 + x, Poly.const(1))
    dec = decomp.symmetric_decompose(1 + 10 * x + 4 * x ** 2, 2)
    assert dec.a == 1 + 7 * x + x ** 2
    assert dec.b == 3 + 3 * x
    assert dec.recombine() == 1 + 10 * x + 4 * x ** 2


M_DECOMPOSITIONS = [
    (1, Poly.const(1), ZERO),
    (2, 1 + x, Poly.const(1)),
    (3, 1 + 7 * x + x ** 2, 3 + 3 * x),
    (4, 1 + 29 * x + 29 * x ** 2 + x ** 3, 7 + 31 * x + 7 * x ** 2),
    (5, 1 + 101 * x + 321 * x ** 2 + 101 * x ** 3 + x ** 4, 15 + 195 * x + 195 * x ** 2 + 15 * x ** 3),
]


@pytest.mark.parametrize("n,a,b", M_DECOMPOSITIONS)
def test_m_family_decompositions(n, a, b):
    """M_n = a + x b at reference degree n - 1, both parts with nonnegative gamma vectors."""
    out = decomp.decompose_family("M", n)
    assert out["reference_degree"] == n - 1
    assert (out["a"], out["b"]) == (a, b)
    assert out["polynomial"] == a + x * b
    assert out["predicates"]["bi_gamma_positive"]


def test_decompose_palindromic_input():
    """A palindromic polynomial at its centre has b = 0."""
    dec = decomp.symmetric_decompose(1 + 4 * x + x ** 2, 2)
    assert dec.a == 1 + 4 * x + x ** 2
    assert dec.b == ZERO


def test_decompose_eulerian_at_degree_n():
    """A_3 = x(1 + 4x + x^2) has a = 0 at reference degree 3."""
    dec = decomp.symmetric_decompose(x + 4 * x ** 2 + x ** 3, 3)
    assert dec.a == ZERO
    assert dec.b == 1 + 4 * x + x ** 2


def test_decompose_keeps_other_variables():
    """Coefficients may be polynomials in other variables."""
    f = y ** 2 + 2 * y * x
    dec = decomp.symmetric_decompose(f, 1)
    assert dec.recombine() == f
    assert dec.a == y ** 2 * (1 + x)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.integers(0, 2))
def test_decomposition_recombines(coeffs, extra):
    """a + xb = f with a palindromic at n and b at n - 1."""
    f = Poly.from_coefficients(coeffs, "x")
    n = max(f.degree("x"), 0) + extra + 1
    dec = decomp.symmetric_decompose(f, n)
    assert dec.recombine() == f
    assert decomp.is_palindromic(dec.a, n)
    assert decomp.is_palindromic(dec.b, n - 1)


def test_degree_above_reference_raises():
    with pytest.raises(ValueError):
        decomp.symmetric_decompose(x ** 3, 2)


def test_divide_by_one_minus():
    """Only exact quotients are returned."""
    assert decomp.divide_by_one_minus(1 - x ** 2) == 1 + x
    assert decomp.divide_by_one_minus(ZERO) == ZERO
    with pytest.raises(InexactDivisionError):
        decomp.divide_by_one_minus(1 + x)


def test_gamma_expand_eulerian():
    """A_3 = x(1+x)^2 + 2x^2 at centre 4."""
    vec = decomp.gamma_expand(x + 4 * x ** 2 + x ** 3, 4)
    assert vec.gammas == (ZERO, Poly.const(1), Poly.const(2))
    assert vec.reconstruct() == x + 4 * x ** 2 + x ** 3


def test_gamma_expand_rejects_asymmetric():
    with pytest.raises(NotSymmetricError):
        decomp.gamma_expand(1 + 2 * x, 1)


def test_unimodal():
    assert decomp.is_unimodal([])
    assert decomp.is_unimodal([1, 3, 2])
    assert decomp.is_unimodal([2, 2, 1])
    assert decomp.is_unimodal([1, 1, 1, 1])
    assert not decomp.is_unimodal([1, 3, 2, 4])


def test_alternatingly_increasing():
    """f_0 <= f_n <= f_1 <= f_{n-1} <= ..."""
    assert decomp.alternating_order(4) == [0, 4, 1, 3, 2]
    assert decomp.is_alternatingly_increasing([1, 10, 4])
    assert not decomp.is_alternatingly_increasing([1, 2, 3])


def test_symbolic_coefficients_are_refused():
    """Numeric predicates need numbers."""
    with pytest.raises(SymbolicCoefficientError):
        decomp.numeric_coefficients(x + y, 1)
    with pytest.raises(SymbolicCoefficientError):
        decomp.is_gamma_positive(1 + y * x, 1)


def test_positivity_report_for_m3():
    """M_3 is not symmetric, but both of its parts are gamma-positive."""
    report = decomp.positivity_report(1 + 10 * x + 4 * x ** 2, 2)
    assert report.to_dict() == {
        "symmetric": False,
        "unimodal": True,
        "gamma_positive": False,
        "alternatingly_increasing": True,
        "bi_gamma_positive": True,
    }


def test_bi_gamma_positive_families():
    """B_n, M_n and A_n^(k) are bi-gamma-positive for small n."""
    cases = [("B", None), ("M", None), ("Ak", 1), ("Ak", 2), ("Ak", 3)]
    for family, kk in cases:
        for n in range(1, 7):
            p = families.build_by_recurrence(family, n, kk)
            assert decomp.is_bi_gamma_positive(p, decomp.reference_degree(family, n)), (family, kk, n)


def test_parts_unimodal():
    assert decomp.parts_unimodal(families.build_by_recurrence("M", 5), 4)


def test_reference_degrees():
    assert decomp.reference_degree("A", 4) == 4
    assert decomp.reference_degree("M", 4) == 3
    assert decomp.reference_degree("Ak", 4) == 3
    with pytest.raises(families.NoRouteError):
        decomp.reference_degree("PQ", 4)


def test_partial_gamma_rebuilds_ank():
    """The partial gamma table of index 3 rebuilds A_4^(2) = M_4."""
    table = decomp.partial_gamma(3, 2)
    assert table.reconstruct() == 1 + 36 * x + 60 * x ** 2 + 8 * x ** 3
    assert table.nonnegative()


def test_decompose_family():
    """The report carries both parts, gamma vectors and predicates."""
    out = decomp.decompose_family("M", 3)
    assert out["reference_degree"] == 2
    assert out["a"] == 1 + 7 * x + x ** 2
    assert out["gamma_a"] == [Poly.const(1), Poly.const(5)]
    assert out["gamma_b"] == [Poly.const(3)]
    assert out["predicates"]["bi_gamma_positive"]


def test_decompose_mq_needs_q():
    """Mq is decomposed at a numeric q; q = 1 gives the M decomposition."""
    with pytest.raises(ValueError):
        decomp.decompose_family("Mq", 3)
    at_one = decomp.decompose_family("Mq", 3, q=1)
    assert at_one["a"] == decomp.decompose_family("M", 3)["a"]


def test_symbolic_k_has_no_predicates():
    out = decomp.decompose_family("Ak", 3)
    assert out["predicates"] is None
    assert out["a"] + x * out["b"] == out["polynomial"]
