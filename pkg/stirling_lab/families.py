"""Polynomial families built by enumeration, recurrence and grammar.

Each family tag maps to up to three independent builders. Enumeration sums a
statistic monomial over generated objects, recurrences iterate the defining
differential or coefficient recursions from their initial values, and
grammar routes iterate a formal derivative and substitute.

Coefficient tables (partial gamma, zeta, xi/eta, f/g, a(n,k), the (a_n, b_n)
decomposition and F_n) are exposed through ``coeff_table``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from types import MappingProxyType
from typing import Callable, Dict, Iterator, Mapping, Optional, Tuple, Union

from stirling_lab import grammar as gr
from stirling_lab import stats
from stirling_lab.exactpoly import ONE, ZERO, Poly, PolyLike, as_poly, poly_sum, poly_vars

logger = logging.getLogger(__name__)

KArg = Optional[int]

FAMILY_TAGS = ("A", "B", "M", "N", "Ak", "PQ", "AlphaBeta", "Pxy", "Mq")
TABLE_TAGS = ("GammaK", "ZetaK2", "XiEta", "FG", "ank", "ABdecomp", "Fn")
ROUTES = ("enum", "rec", "grammar")


class NoRouteError(LookupError):
    """Raised for a (family, route) pair with no builder."""

    def __init__(self, family: str, route: str):
        self.family = family
        self.route = route
        super().__init__(f"family {family!r} has no {route} route")


def k_value(k: KArg) -> Poly:
    """The parameter k as a polynomial: a constant, or the variable k when None."""
    if k is None:
        return Poly.var("k")
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer or None for symbolic k, got {k!r}")
    return Poly.const(k)


def _check_n(n: int, low: int = 0) -> None:
    if n < low:
        raise ValueError(f"n must be at least {low}, got {n}")


def _mono(**exps: int) -> Poly:
    return Poly.monomial({v: e for v, e in exps.items() if e})


def fix_cycle_specialize(
    pq: Poly,
    bindings: Mapping[str, PolyLike],
    fix: PolyLike,
    other_cycles: PolyLike,
) -> Poly:
    """Rewrite a fix/cyc polynomial term by term.

    Every monomial ``m * p^f * q^c`` becomes ``m|bindings * fix^f * other_cycles^(c-f)``,
    which evaluates A_n(x, y, fix / s, s) without dividing when ``other_cycles = s``.
    """
    fix, other_cycles = as_poly(fix), as_poly(other_cycles)
    out = ZERO
    for mono, coeff in pq.terms.items():
        exps = dict(mono)
        f = exps.pop("p", 0)
        c = exps.pop("q", 0)
        if c < f:
            raise ValueError(f"term {Poly.monomial(dict(mono)).to_text()} has fewer cycles than fixed points")
        rest = Poly.monomial(exps, coeff).substitute(bindings)
        out = out + rest * fix ** f * other_cycles ** (c - f)
    return out


# Enumeration routes -----------------------------------------------------

def _enum_a(n: int, k: KArg) -> Poly:
    return stats.distribution("perm", n, ["des"], lambda des: _mono(x=des))


def _enum_b(n: int, k: KArg) -> Poly:
    return stats.distribution("signed", n, ["des_B"], lambda d: _mono(x=d))


def _enum_m(n: int, k: KArg) -> Poly:
    return stats.distribution("stirling", n, ["ap"], lambda ap: _mono(x=ap), k=2)


def _enum_n(n: int, k: KArg) -> Poly:
    return stats.distribution("stirling", n, ["lap"], lambda lap: _mono(x=lap), k=2)


def _enum_ak(n: int, k: KArg) -> Poly:
    if k is None:
        kk = k_value(None)
        return stats.distribution(
            "perm", n, ["exc", "cyc"], lambda exc, cyc: _mono(x=exc) * kk ** (n - cyc)
        )
    k_value(k)
    return stats.distribution("stirling", n, ["ap"], lambda ap: _mono(x=ap), k=k)


def _enum_pq(n: int, k: KArg) -> Poly:
    return stats.distribution(
        "perm",
        n,
        ["exc", "drop", "fix", "cyc"],
        lambda exc, drop, fix, cyc: _mono(x=exc, y=drop, p=fix, q=cyc),
    )


def _enum_alpha_beta(n: int, k: KArg) -> Poly:
    return stats.distribution(
        "perm",
        n + 1,
        ["asc_star", "des_star", "lrmax", "rlmax"],
        lambda a, d, lm, rm: _mono(x=a, y=d, alpha=lm - 1, beta=rm - 1),
    )


def _enum_pxy(n: int, k: KArg) -> Poly:
    return stats.distribution("stirling", n, ["lap", "ap"], lambda lap, ap: _mono(x=lap, y=ap), k=2)


def _enum_mq(n: int, k: KArg) -> Poly:
    return stats.distribution("stirling", n, ["ap", "lrmin"], lambda ap, lr: _mono(x=ap, q=lr), k=2)


# Recurrence routes ------------------------------------------------------

def _iterate(n: int, start: Poly, step: Callable[[int, Poly], Poly]) -> Poly:
    """Apply ``step(m, P_m)`` for m = 0 .. n-1 starting from P_0."""
    value = start
    for m in range(n):
        value = step(m, value)
    return value


def _rec_a(n: int, k: KArg) -> Poly:
    (x,) = poly_vars("x")
    return _iterate(n, ONE, lambda m, a: (m + 1) * x * a + x * (1 - x) * a.partial_derive("x"))


def _rec_b(n: int, k: KArg) -> Poly:
    (x,) = poly_vars("x")
    return _iterate(
        n, ONE, lambda m, b: (2 * m * x + 1 + x) * b + 2 * x * (1 - x) * b.partial_derive("x")
    )


def _rec_m(n: int, k: KArg) -> Poly:
    (x,) = poly_vars("x")
    return _iterate(
        n, ONE, lambda m, p: (2 * m * x + 1) * p + 2 * x * (1 - x) * p.partial_derive("x")
    )


def _rec_n(n: int, k: KArg) -> Poly:
    (x,) = poly_vars("x")
    return _iterate(
        n, ONE, lambda m, p: (2 * m + 1) * x * p + 2 * x * (1 - x) * p.partial_derive("x")
    )


def _rec_ak(n: int, k: KArg) -> Poly:
    (x,) = poly_vars("x")
    kk = k_value(k)
    return _iterate(
        n, ONE, lambda m, p: (m * kk * x + 1) * p + kk * x * (1 - x) * p.partial_derive("x")
    )


def _rec_pq(n: int, k: KArg) -> Poly:
    # Inserting n+1 into the cycle form: a new fixed point, or after any entry.
    x, y, p, q = poly_vars("x", "y", "p", "q")

    def step(m: int, a: Poly) -> Poly:
        spread = a.partial_derive("p") + a.partial_derive("x") + a.partial_derive("y")
        return p * q * a + x * y * spread

    return _iterate(n, ONE, step)


def _rec_alpha_beta(n: int, k: KArg) -> Poly:
    x, y, alpha, beta = poly_vars("x", "y", "alpha", "beta")
    return fix_cycle_specialize(_rec_pq(n, k), {}, alpha * x + beta * y, alpha + beta)


def _rec_pxy(n: int, k: KArg) -> Poly:
    if n == 0:
        return ONE
    if n == 1:
        return Poly.var("x")
    return pxy_from_xi_eta(xi_eta_table(n - 1))


def _rec_mq(n: int, k: KArg) -> Poly:
    if n == 0:
        return ONE
    if n == 1:
        return Poly.var("q")
    return mq_from_fg(fg_table(n - 1))


# Grammar routes ---------------------------------------------------------

def _gram_a(n: int, k: KArg) -> Poly:
    if n == 0:
        return ONE
    return gr.derive_then_substitute(gr.dumont(), Poly.var("a"), n, {"a": Poly.var("x"), "b": ONE})


def _gram_ak(n: int, k: KArg) -> Poly:
    if k is None:
        return gr.derive_then_substitute(
            gr.ank_symbolic(),
            Poly.var("a"),
            n,
            {"beta": ONE, "alpha": Poly.var("x"), "a": ONE},
        )
    k_value(k)
    derived = gr.derive_n(gr.ank(k), Poly.var("a"), n)
    out = ZERO
    for mono, coeff in derived.terms.items():
        exps = dict(mono)
        ea, eb = exps.get("a", 0), exps.get("b", 0)
        j, rem = divmod(ea - 1, k)
        if rem or eb != k * (n - j):
            raise ValueError(f"unexpected monomial a^{ea} b^{eb} in D^{n}(a)")
        out = out + _mono(x=j) * coeff
    return out


def _gram_pq(n: int, k: KArg) -> Poly:
    return gr.derive_then_substitute(gr.cycle(), Poly.var("I"), n, {"I": ONE})


def _gram_alpha_beta(n: int, k: KArg) -> Poly:
    a, b = poly_vars("a", "b")
    return gr.derive_then_substitute(gr.ji(), a * b, n, {"a": ONE, "b": ONE})


def _gram_m(n: int, k: KArg) -> Poly:
    return gr.derive_then_substitute(
        gr.lrmin_plateau(2), Poly.var("I"), n, {"I": ONE, "y": ONE, "q": ONE}
    )


def _gram_n(n: int, k: KArg) -> Poly:
    return gr.derive_then_substitute(
        gr.proper_plateau(2), Poly.var("I"), n, {"I": ONE, "y": Poly.var("x"), "z": ONE}
    )


def _gram_pxy(n: int, k: KArg) -> Poly:
    x, y = poly_vars("x", "y")
    return gr.derive_then_substitute(
        gr.lap_ap(), Poly.var("I"), n, {"I": ONE, "J": x, "x": x * y, "z": ONE}
    )


def _gram_mq(n: int, k: KArg) -> Poly:
    return gr.derive_then_substitute(gr.lrmin_plateau(2), Poly.var("I"), n, {"I": ONE, "y": ONE})


Builder = Callable[[int, KArg], Poly]

BUILDERS: Mapping[str, Mapping[str, Builder]] = MappingProxyType({
    "A": {"enum": _enum_a, "rec": _rec_a, "grammar": _gram_a},
    "B": {"enum": _enum_b, "rec": _rec_b},
    "M": {"enum": _enum_m, "rec": _rec_m, "grammar": _gram_m},
    "N": {"enum": _enum_n, "rec": _rec_n, "grammar": _gram_n},
    "Ak": {"enum": _enum_ak, "rec": _rec_ak, "grammar": _gram_ak},
    "PQ": {"enum": _enum_pq, "rec": _rec_pq, "grammar": _gram_pq},
    "AlphaBeta": {"enum": _enum_alpha_beta, "rec": _rec_alpha_beta, "grammar": _gram_alpha_beta},
    "Pxy": {"enum": _enum_pxy, "rec": _rec_pxy, "grammar": _gram_pxy},
    "Mq": {"enum": _enum_mq, "rec": _rec_mq, "grammar": _gram_mq},
})


def routes_for(family: str) -> Tuple[str, ...]:
    if family not in BUILDERS:
        raise NoRouteError(family, "any")
    return tuple(r for r in ROUTES if r in BUILDERS[family])


def build(family: str, n: int, k: KArg = None, route: str = "rec") -> Poly:
    """Build family polynomial number ``n`` by the named route.

    Args:
        family: One of FAMILY_TAGS.
        n: Index, nonnegative.
        k: Integer parameter of the Ak family; None keeps k symbolic.
        route: ``enum``, ``rec`` or ``grammar``.

    Returns:
        The exact polynomial.
    """
    _check_n(n)
    builder = BUILDERS.get(family, {}).get(route)
    if builder is None:
        raise NoRouteError(family, route)
    logger.debug("building %s_%d (k=%s) by %s", family, n, k, route)
    return builder(n, k)


def build_by_enumeration(family: str, n: int, k: KArg = None) -> Poly:
    return build(family, n, k, "enum")


def build_by_recurrence(family: str, n: int, k: KArg = None) -> Poly:
    return build(family, n, k, "rec")


def build_by_grammar(family: str, n: int, k: KArg = None) -> Poly:
    return build(family, n, k, "grammar")


# Coefficient tables -----------------------------------------------------

@dataclass(frozen=True)
class CoeffTable:
    """Sparse coefficient array; missing keys read as zero."""

    family: str
    n: int
    entries: Mapping[tuple, Poly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {key: as_poly(v) for key, v in self.entries.items() if as_poly(v)}
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(clean.items()))))

    def __getitem__(self, key: tuple) -> Poly:
        return self.entries.get(key, ZERO)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def poly(self, name: str, var: str = "x") -> Poly:
        """Assemble sum_i entries[(name, i)] var^i for a named one-index row."""
        v = Poly.var(var)
        return poly_sum(c * v ** key[1] for key, c in self.entries.items() if key[0] == name)

    def substitute(self, bindings: Mapping[str, PolyLike]) -> "CoeffTable":
        return CoeffTable(self.family, self.n, {key: c.substitute(bindings) for key, c in self.entries.items()})


def _add(table: Dict[tuple, Poly], key: tuple, value: Poly) -> None:
    if value:
        table[key] = table.get(key, ZERO) + value


def gamma_table(n: int, k: KArg = None) -> CoeffTable:
    """Partial gamma coefficients gamma_{n,i,j}(k), keyed by (i, j)."""
    _check_n(n, 1)
    kk = k_value(k)
    table: Dict[tuple, Poly] = {(1, 0): ONE}
    for m in range(1, n):
        new: Dict[tuple, Poly] = {}
        for (i, j), c in table.items():
            _add(new, (i + 1, j), c)
            if i >= 1:
                _add(new, (i - 1, j + 1), (kk + kk * kk) * i * c)
            _add(new, (i, j), kk * j * c)
            _add(new, (i, j + 1), 2 * kk * (m - i - 2 * j) * c)
        table = new
    return CoeffTable("GammaK", n, table)


def zeta_table(n: int) -> CoeffTable:
    """The k=2 rescaled coefficients zeta_{n,i,j}, with 2^j zeta = gamma(2)."""
    _check_n(n, 1)
    table: Dict[tuple, Poly] = {(1, 0): ONE}
    for m in range(1, n):
        new: Dict[tuple, Poly] = {}
        for (i, j), c in table.items():
            _add(new, (i + 1, j), c)
            if i >= 1:
                _add(new, (i - 1, j + 1), 3 * i * c)
            _add(new, (i, j), 2 * j * c)
            _add(new, (i, j + 1), 2 * (m - i - 2 * j) * c)
        table = new
    return CoeffTable("ZetaK2", n, table)


def xi_eta_table(n: int, cross_shift: int = 1) -> CoeffTable:
    """xi_{n,i} and eta_{n,j}, keyed by ("xi", i) and ("eta", j).

    ``cross_shift`` selects the eta index feeding xi_{n+1,i}: eta_{n,i-1}
    by default, eta_{n,i} with 0.
    """
    _check_n(n, 1)
    xi: Dict[int, Poly] = {0: ONE}
    eta: Dict[int, Poly] = {0: ONE}
    for m in range(1, n):
        top = m // 2 + 2
        new_xi = {
            i: (1 + 2 * i) * xi.get(i, ZERO)
            + 4 * (m - 2 * i + 2) * xi.get(i - 1, ZERO)
            + eta.get(i - cross_shift, ZERO)
            for i in range(top + 1)
        }
        new_eta = {
            j: (2 + 2 * j) * eta.get(j, ZERO)
            + 4 * (m - 2 * j + 1) * eta.get(j - 1, ZERO)
            + xi.get(j, ZERO)
            for j in range(top + 1)
        }
        xi, eta = new_xi, new_eta
    entries = {("xi", i): c for i, c in xi.items()}
    entries.update({("eta", j): c for j, c in eta.items()})
    return CoeffTable("XiEta", n, entries)


def xi_eta_polys(n: int) -> Tuple[Poly, Poly]:
    """xi_n(x), eta_n(x) from their differential recurrences."""
    _check_n(n, 1)
    (x,) = poly_vars("x")
    xi, eta = ONE, ONE
    for m in range(1, n):
        xi, eta = (
            (1 + 4 * m * x) * xi + 2 * x * (1 - 4 * x) * xi.partial_derive("x") + x * eta,
            (2 + 4 * m * x - 4 * x) * eta + 2 * x * (1 - 4 * x) * eta.partial_derive("x") + xi,
        )
    return xi, eta


def pxy_from_xi_eta(table: CoeffTable) -> Poly:
    """P_{n+1}(x, y) = x sum xi (xy)^i (1+xy)^{n-2i} + xy sum eta (xy)^j (1+xy)^{n-1-2j}."""
    n = table.n
    x, y = poly_vars("x", "y")
    u, v = x * y, 1 + x * y
    out = ZERO
    for (name, i), c in table.items():
        e = n - 2 * i if name == "xi" else n - 1 - 2 * i
        if e < 0:
            raise ValueError(f"{name}_{{{n},{i}}} = {c} lies outside the expansion")
        out = out + (x if name == "xi" else u) * c * u ** i * v ** e
    return out


def fg_table(n: int) -> CoeffTable:
    """f_{n,i}(q) and g_{n,i}(q), keyed by ("f", i) and ("g", i)."""
    _check_n(n, 1)
    (q,) = poly_vars("q")
    f: Dict[int, Poly] = {0: q}
    g: Dict[int, Poly] = {0: 2 - q}
    for m in range(1, n):
        top = m // 2 + 2
        new_f = {
            i: (q + 2 * i) * f.get(i, ZERO)
            + 4 * (m - 2 * i + 2) * f.get(i - 1, ZERO)
            + q * g.get(i - 1, ZERO)
            for i in range(top + 1)
        }
        new_g = {
            i: 2 * (1 + i) * g.get(i, ZERO)
            + 4 * (m - 2 * i + 1) * g.get(i - 1, ZERO)
            + (2 - q) * f.get(i, ZERO)
            for i in range(top + 1)
        }
        f, g = new_f, new_g
    entries = {("f", i): c for i, c in f.items()}
    entries.update({("g", i): c for i, c in g.items()})
    return CoeffTable("FG", n, entries)


def mq_from_fg(table: CoeffTable) -> Poly:
    """M_{n+1}(x, q) from the f/g table of index n."""
    n = table.n
    x, q = poly_vars("x", "q")
    out = ZERO
    for (name, i), c in table.items():
        e = n - 2 * i if name == "f" else n - 1 - 2 * i
        if e < 0:
            raise ValueError(f"{name}_{{{n},{i}}} = {c} lies outside the expansion")
        base = q * c * x ** i * (1 + x) ** e
        out = out + (base if name == "f" else x * base)
    return out


def eulerian_gamma_table(n: int) -> CoeffTable:
    """a(n, k), keyed by ("a", k), with A_n = sum a(n,k) x^k (1+x)^{n+1-2k}."""
    _check_n(n, 1)
    row = {1: 1}
    for m in range(2, n + 1):
        row = {
            k: k * row.get(k, 0) + (2 * m - 4 * k + 4) * row.get(k - 1, 0)
            for k in range(1, (m + 1) // 2 + 1)
        }
    return CoeffTable("ank", n, {("a", k): Poly.const(c) for k, c in row.items()})


def eulerian_from_gamma(table: CoeffTable) -> Poly:
    (x,) = poly_vars("x")
    n = table.n
    return poly_sum(c * x ** k * (1 + x) ** (n + 1 - 2 * k) for (_, k), c in table.items())


def ab_polys(n: int) -> Tuple[Poly, Poly]:
    """(a_n, b_n) from their coupled recurrence, a_1 = 1, b_1 = 0."""
    _check_n(n, 1)
    (x,) = poly_vars("x")
    a, b = ONE, ZERO
    for m in range(1, n):
        a, b = (
            (1 + x + 2 * (m - 1) * x) * a + 2 * x * (1 - x) * a.partial_derive("x") + x * b,
            2 * (1 + (m - 1) * x) * b + 2 * x * (1 - x) * b.partial_derive("x") + a,
        )
    return a, b


def fn_poly(n: int) -> Poly:
    """F_n(x) = xi_n(x^2) + x eta_n(x^2), F_0 = 1."""
    _check_n(n)
    if n == 0:
        return ONE
    (x,) = poly_vars("x")
    table = xi_eta_table(n)
    square = {"x": x * x}
    return table.poly("xi").substitute(square) + x * table.poly("eta").substitute(square)


def fn_by_recurrence(n: int) -> Poly:
    (x,) = poly_vars("x")
    return _iterate(
        n, ONE, lambda m, f: (1 + x + 4 * m * x * x) * f + x * (1 - 4 * x * x) * f.partial_derive("x")
    )


def _rows(name: str, p: Poly) -> Dict[tuple, Poly]:
    return {(name, i): c for i, c in enumerate(p.coefficients("x"))}


def coeff_table(family: str, n: int, k: KArg = None) -> CoeffTable:
    """Recurrence-defined coefficient array for a table family.

    Args:
        family: One of TABLE_TAGS.
        n: Table index, at least 1.
        k: Integer k for GammaK; None keeps k symbolic.

    Returns:
        A CoeffTable. GammaK and ZetaK2 are keyed by (i, j); the others by
        (row name, index).
    """
    if family == "GammaK":
        return gamma_table(n, k)
    if family == "ZetaK2":
        return zeta_table(n)
    if family == "XiEta":
        return xi_eta_table(n)
    if family == "FG":
        return fg_table(n)
    if family == "ank":
        return eulerian_gamma_table(n)
    if family == "ABdecomp":
        a, b = ab_polys(n)
        return CoeffTable("ABdecomp", n, {**_rows("a", a), **_rows("b", b)})
    if family == "Fn":
        _check_n(n, 1)
        return CoeffTable("Fn", n, _rows("F", fn_poly(n)))
    raise NoRouteError(family, "table")


def gamma_reconstruct(table: CoeffTable, k: KArg = None) -> Poly:
    """sum_i (1+kx)^i sum_j gamma_{n,i,j} x^j (1+x)^{n-i-2j}, i.e. A_{n+1}^(k)."""
    (x,) = poly_vars("x")
    kk = k_value(k)
    n = table.n
    return poly_sum(
        (1 + kk * x) ** i * c * x ** j * (1 + x) ** (n - i - 2 * j) for (i, j), c in table.items()
    )


def zeta_reconstruct(table: CoeffTable) -> Poly:
    """M_{n+1}(x) = sum (1+2x)^i sum zeta_{n,i,j} (2x)^j (1+x)^{n-i-2j}."""
    (x,) = poly_vars("x")
    n = table.n
    return poly_sum(
        (1 + 2 * x) ** i * c * (2 * x) ** j * (1 + x) ** (n - i - 2 * j) for (i, j), c in table.items()
    )


def binomial_convolution(left: Callable[[int], Poly], right: Callable[[int], Poly], n: int) -> Poly:
    """sum_i C(n, i) left(i) right(n - i)."""
    return poly_sum(comb(n, i) * left(i) * right(n - i) for i in range(n + 1))
