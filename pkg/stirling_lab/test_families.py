"""Tests for the polynomial families, their routes and coefficient tables."""

import pytest

from stirling_lab import families
from stirling_lab.exactpoly import ONE, Poly, poly_vars
from stirling_lab.families import NoRouteError

x, y, p, q, k, alpha, beta = poly_vars("x", "y", "p", "q", "k", "alpha", "beta")

GOLDEN = [
    ("A", 1, None, x),
    ("A", 3, None, x + 4 * x ** 2 + x ** 3),
    ("A", 4, None, x + 11 * x ** 2 + 11 * x ** 3 + x ** 4),
    ("B", 2, None, 1 + 6 * x + x ** 2),
    ("B", 3, None, 1 + 23 * x + 23 * x ** 2 + x ** 3),
    ("M", 1, None, ONE),
    ("M", 2, None, 1 + 2 * x),
    ("M", 3, None, 1 + 10 * x + 4 * x ** 2),
    ("M", 4, None, 1 + 36 * x + 60 * x ** 2 + 8 * x ** 3),
    ("M", 5, None, 1 + 116 * x + 516 * x ** 2 + 296 * x ** 3 + 16 * x ** 4),
    ("N", 1, None, x),
    ("N", 2, None, 2 * x + x ** 2),
    ("N", 3, None, 4 * x + 10 * x ** 2 + x ** 3),
    ("Ak", 2, None, 1 + k * x),
    ("Ak", 3, None, 1 + (3 * k + k ** 2) * x + k ** 2 * x ** 2),
    ("Ak", 3, 1, 1 + 4 * x + x ** 2),
    ("PQ", 1, None, p * q),
    ("PQ", 2, None, p ** 2 * q ** 2 + x * y * q),
    ("PQ", 3, None, p ** 3 * q ** 3 + 3 * p * q ** 2 * x * y + q * x * y ** 2 + q * x ** 2 * y),
    ("Ak", 4, None, (1 + k * x) ** 3 + 3 * (k + k ** 2) * (1 + k * x) * x + k * (k + k ** 2) * x * (1 + x)),
    ("AlphaBeta", 2, None, (alpha * x + beta * y) ** 2 + (alpha + beta) * x * y),
    ("Mq", 3, None, q ** 3 + 4 * q * x + 6 * q ** 2 * x + 4 * q * x ** 2),
    ("AlphaBeta", 0, None, ONE),
    ("AlphaBeta", 1, None, alpha * x + beta * y),
    ("Pxy", 1, None, x),
    ("Pxy", 2, None, x + x * y + x ** 2 * y),
    ("Mq", 1, None, q),
    ("Mq", 2, None, q ** 2 + 2 * q * x),
]


@pytest.mark.parametrize("family,n,kk,expected", GOLDEN)
def test_golden_values(family, n, kk, expected):
    """Recurrence values agree with hand-computed polynomials."""
    assert families.build_by_recurrence(family, n, kk) == expected


@pytest.mark.parametrize("family", families.FAMILY_TAGS)
def test_routes_agree(family):
    """Every available route gives the same polynomial for small n."""
    kk = 2 if family == "Ak" else None
    for n in range(0, 5):
        values = {route: families.build(family, n, kk, route) for route in families.routes_for(family)}
        assert len(set(values.values())) == 1, (family, n, values)


def test_symbolic_k_routes_agree():
    """Enumeration over cycles and the symbolic grammar match the k recurrence."""
    for n in range(0, 5):
        rec = families.build_by_recurrence("Ak", n)
        assert families.build_by_enumeration("Ak", n) == rec
        assert families.build_by_grammar("Ak", n) == rec
        assert rec.substitute({"k": 2}) == families.build_by_recurrence("M", n)


def test_pxy_specializes_to_n_and_m():
    """P_n(x, 1) = N_n(x) and P_n(1, y) = M_n(y)."""
    for n in range(1, 6):
        pxy = families.build_by_recurrence("Pxy", n)
        assert pxy.substitute({"y": 1}) == families.build_by_recurrence("N", n)
        assert pxy.substitute({"x": 1, "y": x}) == families.build_by_recurrence("M", n)


def test_mq_at_q_one_is_m():
    for n in range(1, 6):
        assert families.build_by_recurrence("Mq", n).substitute({"q": 1}) == families.build_by_recurrence("M", n)


def test_b_has_no_grammar_route():
    """B is built by enumeration and recurrence only."""
    assert families.routes_for("B") == ("enum", "rec")
    with pytest.raises(NoRouteError):
        families.build_by_grammar("B", 2)
    with pytest.raises(NoRouteError):
        families.build("Zeta", 2)


def test_invalid_arguments():
    """Negative n and non-positive or boolean k are rejected."""
    with pytest.raises(ValueError):
        families.build("A", -1)
    with pytest.raises(ValueError):
        families.build("Ak", 2, 0)
    with pytest.raises(ValueError):
        families.build("Ak", 2, True)
    with pytest.raises(NoRouteError):
        families.coeff_table("Nope", 2)


def test_xi_eta_table():
    """xi_2 = 1 + 5x, eta_2 = 3, in table and polynomial form."""
    table = families.xi_eta_table(2)
    assert table[("xi", 0)] == 1 and table[("xi", 1)] == 5
    assert table[("eta", 0)] == 3 and table[("eta", 1)] == 0
    xi, eta = families.xi_eta_polys(2)
    assert (xi, eta) == (table.poly("xi"), table.poly("eta"))
    for n in range(1, 7):
        assert families.xi_eta_polys(n) == (families.xi_eta_table(n).poly("xi"), families.xi_eta_table(n).poly("eta"))


def test_pxy_expansion():
    """P_3 assembled from xi/eta at n = 2."""
    u = x * y
    expected = x * (1 + u) ** 2 + 5 * x * u + 3 * u * (1 + u)
    assert families.pxy_from_xi_eta(families.xi_eta_table(2)) == expected
    assert expected.substitute({"x": 1, "y": 1}) == 15


def test_fn_forms_agree():
    """F_n from xi/eta equals the differential recurrence."""
    assert families.fn_poly(2) == 1 + 3 * x + 5 * x ** 2
    for n in range(0, 7):
        assert families.fn_poly(n) == families.fn_by_recurrence(n)


def test_eulerian_gamma_coefficients():
    """A_3 = x(1+x)^2 + 2x^2."""
    table = families.eulerian_gamma_table(3)
    assert dict(table.items()) == {("a", 1): ONE, ("a", 2): Poly.const(2)}
    for n in range(1, 8):
        assert families.eulerian_from_gamma(families.eulerian_gamma_table(n)) == families.build_by_recurrence("A", n)


def test_partial_gamma_table():
    """gamma_2 is {(2,0): 1, (0,1): k + k^2} and rebuilds A_3^(k)."""
    table = families.gamma_table(2)
    assert dict(table.items()) == {(0, 1): k + k ** 2, (2, 0): ONE}
    for n in range(1, 6):
        rebuilt = families.gamma_reconstruct(families.gamma_table(n))
        assert rebuilt == families.build_by_recurrence("Ak", n + 1)


@pytest.mark.parametrize(
    "n,expected",
    [
        (1, p * q),
        (2, p ** 2 * q ** 2 + q * x),
        (3, p ** 3 * q ** 3 + (q + 3 * p * q ** 2) * x + q * x ** 2),
        (4, p ** 4 * q ** 4 + (6 * p ** 2 * q ** 3 + 4 * p * q ** 2 + q) * x
            + (4 * p * q ** 2 + 3 * q ** 2 + 4 * q) * x ** 2 + q * x ** 3),
    ],
)
def test_four_variable_eulerian_at_y_one(n, expected):
    """A_n(x, 1, p, q) by recurrence and by enumeration of cycle statistics."""
    assert families.build_by_recurrence("PQ", n).substitute({"y": 1}) == expected
    assert families.build_by_enumeration("PQ", n).substitute({"y": 1}) == expected


@pytest.mark.parametrize(
    "n,xi,eta",
    [(2, 1 + 5 * x, Poly.const(3)), (3, 1 + 26 * x, 7 + 17 * x)],
)
def test_xi_eta_golden(n, xi, eta):
    assert families.xi_eta_polys(n) == (xi, eta)
    table = families.xi_eta_table(n)
    assert (table.poly("xi"), table.poly("eta")) == (xi, eta)


def test_fg_table_index_two():
    """f_{2,0} = q^2, f_{2,1} = 6q - q^2 and g_{2,0} = (2 - q)(2 + q)."""
    table = families.fg_table(2)
    assert dict(table.items()) == {
        ("f", 0): q ** 2,
        ("f", 1): 6 * q - q ** 2,
        ("g", 0): (2 - q) * (2 + q),
    }
    assert families.mq_from_fg(table) == q ** 3 + 4 * q * x + 6 * q ** 2 * x + 4 * q * x ** 2


def test_partial_gamma_table_index_three():
    """gamma_3 in symbolic k gives the three-term form of A_4^(k)."""
    table = families.gamma_table(3)
    assert dict(table.items()) == {
        (0, 1): k * (k + k ** 2),
        (1, 1): 3 * (k + k ** 2),
        (3, 0): ONE,
    }
    expected = 1 + (6 * k + 4 * k ** 2 + k ** 3) * x + (7 * k ** 2 + 4 * k ** 3) * x ** 2 + k ** 3 * x ** 3
    assert families.gamma_reconstruct(table) == expected


def test_zeta_table_rebuilds_m():
    for n in range(1, 6):
        assert families.zeta_reconstruct(families.zeta_table(n)) == families.build_by_recurrence("M", n + 1)


def test_fg_table_rebuilds_mq():
    for n in range(1, 6):
        assert families.mq_from_fg(families.fg_table(n)) == families.build_by_enumeration("Mq", n + 1)


def test_coeff_table_dispatch():
    """coeff_table covers every table tag and drops zero entries."""
    for tag in families.TABLE_TAGS:
        table = families.coeff_table(tag, 3, 2 if tag == "GammaK" else None)
        assert table.family == tag
        assert all(c for _, c in table.items())
    a, b = families.ab_polys(3)
    table = families.coeff_table("ABdecomp", 3)
    assert table.poly("a") == a and table.poly("b") == b


def test_fix_cycle_specialize():
    """Fixed points and other cycles are weighted separately."""
    assert families.fix_cycle_specialize(p ** 2 * q ** 2 + x * y * q, {}, 3, 5) == 9 + 5 * x * y
    with pytest.raises(ValueError):
        families.fix_cycle_specialize(p ** 2 * q, {}, 1, 1)


def test_binomial_convolution():
    """sum C(n,i) 1 * 1 = 2^n."""
    assert families.binomial_convolution(lambda i: ONE, lambda i: ONE, 5) == 32
