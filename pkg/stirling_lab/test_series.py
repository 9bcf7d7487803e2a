"""Tests for truncated exponential series and the EGF/operator identities."""

from fractions import Fraction
from itertools import product

import pytest

from stirling_lab import families, series
from stirling_lab.exactpoly import ONE, poly_vars
from stirling_lab.series import SeriesOrderError, TruncSeries, egf_of, exp_poly

x, y, p = poly_vars("x", "y", "p")


def ank_list(k, order):
    return [families.build_by_recurrence("Ak", n, k) for n in range(order + 1)]


def test_exp_poly_coefficients():
    """e^{xz} has coefficients x^i / i!."""
    s = exp_poly(x, 3)
    assert s.coeffs == (ONE, x, x ** 2 / 2, x ** 3 / 6)


def test_exp_is_additive():
    """e^{az} e^{bz} = e^{(a+b)z} exactly."""
    assert exp_poly(x, 6) * exp_poly(y, 6) == exp_poly(x + y, 6)


def test_egf_of_pads_and_divides():
    """egf_of divides by n! and pads to the requested order."""
    s = egf_of([1, 1, 2], order=4)
    assert s.coeffs[:3] == (ONE, ONE, ONE)
    assert s.coefficient(3) == 0 and s.coefficient(4) == 0
    assert s.coefficient(9) == 0


def test_order_mismatch_raises():
    """Series of different orders cannot be combined."""
    with pytest.raises(SeriesOrderError):
        exp_poly(x, 3) + exp_poly(x, 4)


def test_power_matches_repeated_product():
    """s**3 is s*s*s."""
    s = exp_poly(x, 5) - TruncSeries.constant(x, 5)
    assert s ** 3 == s * s * s
    assert (s ** 0) == TruncSeries.constant(1, 5)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_savage_viswanathan_residual_vanishes(k):
    """The 1/k-Eulerian EGF identity holds to order 7."""
    assert series.savage_viswanathan_residual(ank_list(k, 7), k, 7).is_zero()


def test_savage_viswanathan_detects_a_wrong_coefficient():
    """Perturbing one polynomial leaves a nonzero residual."""
    polys = ank_list(2, 5)
    polys[3] = polys[3] + x
    assert not series.savage_viswanathan_residual(polys, 2, 5).is_zero()


@pytest.mark.parametrize("q0", [1, 2, 3])
def test_pq_generating_functions(q0):
    """The cycle-weighted EGFs in three and four variables hold at integer q."""
    pq = [families.build_by_recurrence("PQ", n) for n in range(6)]
    three = [a.substitute({"y": 1, "q": q0}) for a in pq]
    four = [a.substitute({"q": q0}) for a in pq]
    assert series.ksavrelof_zeng_residual(three, q0, 5).is_zero()
    assert series.four_variable_residual(four, q0, 5).is_zero()


@pytest.mark.parametrize("alpha,beta", [*product((0, 1, 2), repeat=2), (2, 3)])
def test_carlitz_residual_vanishes(alpha, beta):
    """The alpha/beta Eulerian EGF holds at integer parameters."""
    polys = [
        families.build_by_recurrence("AlphaBeta", n).substitute({"alpha": alpha, "beta": beta})
        for n in range(6)
    ]
    assert series.carlitz_residual(polys, alpha, beta, 5).is_zero()


def test_rising_binomial():
    """C(t - 1 + 1/k, t) for small t."""
    assert series.rising_binomial(0, 2) == 1
    assert series.rising_binomial(1, 2) == Fraction(1, 2)
    assert series.rising_binomial(2, 2) == Fraction(3, 8)
    assert series.rising_binomial(3, 1) == 1


@pytest.mark.parametrize("n,k", [(1, 1), (2, 2), (3, 2), (4, 3), (5, 3)])
def test_operator_forms(n, k):
    """Both differential-operator forms reproduce A_n^(k)."""
    assert series.ogf_operator_check(n, k, 10)


def test_operator_form_rejects_wrong_polynomial():
    """A wrong candidate polynomial fails the operator check."""
    assert not series.ogf_operator_check(3, 2, 10, ank=1 + 5 * x + x ** 2)


def test_operator_form_needs_enough_terms():
    """The truncation order must exceed n + 1."""
    with pytest.raises(ValueError):
        series.ogf_operator_check(5, 2, 6)
