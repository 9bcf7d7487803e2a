"""Registry of equidistribution identities and the runner that checks them.

Every checker is a generator of ``(label, lhs, rhs)`` comparisons for sizes up
to a bound. The two sides come from different code paths: statistic
enumeration, recurrences, grammars and coefficient tables. The first
comparison that disagrees becomes the report's counterexample.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import prod
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from stirling_lab import families, series, stats
from stirling_lab import grammar as gr
from stirling_lab.combgen import StirlingWord, gen_perms, gen_signed_perms, gen_stirling, is_stirling
from stirling_lab.config import LabConfig, get_config, use_config
from stirling_lab.decomp import (
    gamma_expand,
    has_nonnegative_coefficients,
    is_alternatingly_increasing,
    is_bi_gamma_positive,
    numeric_coefficients,
    parts_unimodal,
    symmetric_decompose,
)
from stirling_lab.exactpoly import ONE, ZERO, Poly, as_poly, poly_sum, poly_vars

logger = logging.getLogger(__name__)

Comparison = Tuple[str, Any, Any]
Checker = Callable[[int, Dict[str, Any]], Iterator[Comparison]]


class UnknownIdentityError(LookupError):
    def __init__(self, identity_id: str):
        self.identity_id = identity_id
        super().__init__(f"unknown identity {identity_id!r}; use `check --list` to see registered ids")


@dataclass(frozen=True)
class IdentityCheck:
    id: str
    claim: str
    default_bound: int
    checker: Checker
    method: str = "exact"


@dataclass
class IdentityReport:
    id: str
    bound: int
    passed: bool
    counterexample: Optional[str]
    wall_time: float
    method: str = "exact"
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        out = {
            "id": self.id,
            "bound": self.bound,
            "passed": self.passed,
            "method": self.method,
            "counterexample": self.counterexample,
            "details": self.details,
        }
        if timings:
            out["wall_time"] = round(self.wall_time, 6)
        return out


REGISTRY: Dict[str, IdentityCheck] = {}


def identity(identity_id: str, claim: str, default_bound: int, method: str = "exact"):
    """Register a checker generator under ``identity_id``."""

    def register(fn: Checker) -> Checker:
        if identity_id in REGISTRY:
            raise ValueError(f"identity {identity_id!r} registered twice")
        REGISTRY[identity_id] = IdentityCheck(identity_id, claim, default_bound, fn, method)
        return fn

    return register


def get_identity(identity_id: str) -> IdentityCheck:
    try:
        return REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentityError(identity_id) from None


def list_identities() -> List[IdentityCheck]:
    return [REGISTRY[key] for key in sorted(REGISTRY)]


# Helpers ----------------------------------------------------------------

def _mono(**exps: int) -> Poly:
    return Poly.monomial(exps)


def _perm_sum(n: int, fields: Sequence[str], weight, where=None) -> Poly:
    return stats.distribution("perm", n, fields, weight, where=where)


def _word_sum(n: int, k: int, fields: Sequence[str], weight, where=None) -> Poly:
    return stats.distribution("stirling", n, fields, weight, k=k, where=where)


def _pq(n: int) -> Poly:
    return families.build_by_recurrence("PQ", n)


def _describe(lhs: Any, rhs: Any) -> str:
    scalar = (Poly, int, Fraction)
    if (isinstance(lhs, Poly) or isinstance(rhs, Poly)) and isinstance(lhs, scalar) and isinstance(rhs, scalar):
        diff = as_poly(lhs) - as_poly(rhs)
        return f"lhs = {lhs}; rhs = {rhs}; lhs - rhs = {diff}"
    return f"lhs = {lhs!r}; rhs = {rhs!r}"


def _k_label(k: Optional[int]) -> str:
    return "k" if k is None else str(k)


# Enumeration against recurrence ----------------------------------------

@identity("ankap-both", "A_n^(k) = sum over Q_n^(k) of x^ap, and its reverse = sum of x^lap", 6)
def _ankap_both(bound, details):
    details["k"] = [1, 2, 3]
    for k in (1, 2, 3):
        for n in range(1, bound + 1):
            ank = families.build_by_recurrence("Ak", n, k)
            yield f"k={k} n={n} ap", _word_sum(n, k, ["ap"], lambda ap: _mono(x=ap)), ank
            yield f"k={k} n={n} lap", _word_sum(n, k, ["lap"], lambda lap: _mono(x=lap)), ank.reverse_in("x", n)


@identity("exc-cyc-Ak", "A_n^(k) = sum over S_n of x^exc k^(n-cyc), k symbolic", 8)
def _exc_cyc_ak(bound, details):
    k = Poly.var("k")
    for n in range(0, bound + 1):
        lhs = _perm_sum(n, ["exc", "cyc"], lambda exc, cyc: _mono(x=exc) * k ** (n - cyc))
        yield f"n={n}", lhs, families.build_by_recurrence("Ak", n)


@identity("stirling-cycles", "sum x^cyc = sum x^lrmin = x(x+1)...(x+n-1); des, asc, exc+1, drop+1 give A_n", 8)
def _stirling_cycles(bound, details):
    (x,) = poly_vars("x")
    for n in range(1, bound + 1):
        rising = prod((x + i for i in range(n)), start=ONE)
        yield f"n={n} cyc", _perm_sum(n, ["cyc"], lambda c: _mono(x=c)), rising
        yield f"n={n} lrmin", _perm_sum(n, ["lrmin"], lambda c: _mono(x=c)), rising
        eulerian = families.build_by_recurrence("A", n)
        yield f"n={n} des", _perm_sum(n, ["des"], lambda d: _mono(x=d)), eulerian
        yield f"n={n} asc", _perm_sum(n, ["asc"], lambda a: _mono(x=a)), eulerian
        yield f"n={n} exc+1", _perm_sum(n, ["exc"], lambda e: _mono(x=e + 1)), eulerian
        yield f"n={n} drop+1", _perm_sum(n, ["drop"], lambda d: _mono(x=d + 1)), eulerian


@identity("convo-2n", "2^n A_n(x) = sum_i C(n,i) N_i(x) N_{n-i}(x)", 7)
def _convo_2n(bound, details):
    for n in range(0, bound + 1):
        lhs = 2 ** n * families.build_by_enumeration("A", n)
        rhs = families.binomial_convolution(
            lambda i: families.build_by_recurrence("N", i),
            lambda i: families.build_by_recurrence("N", i),
            n,
        )
        yield f"n={n}", lhs, rhs


@identity("convo-typeB", "B_n(x) = sum_i C(n,i) M_i(x) N_{n-i}(x)", 7)
def _convo_type_b(bound, details):
    for n in range(0, bound + 1):
        rhs = families.binomial_convolution(
            lambda i: families.build_by_recurrence("M", i),
            lambda i: families.build_by_recurrence("N", i),
            n,
        )
        yield f"n={n}", families.build_by_enumeration("B", n), rhs


# Grammar lemmas ---------------------------------------------------------

@identity("dumont", "D^n(a) = D^n(b) = b^(n+1) A_n(a/b) for the grammar a -> ab, b -> ab", 8)
def _dumont(bound, details):
    a, b = poly_vars("a", "b")
    g = gr.dumont()
    for n in range(1, bound + 1):
        eulerian = families.build_by_enumeration("A", n)
        homog = poly_sum(c * a ** j * b ** (n + 1 - j) for j, c in enumerate(eulerian.coefficients("x")))
        yield f"n={n} a", gr.derive_n(g, a, n), homog
        yield f"n={n} b", gr.derive_n(g, b, n), homog


@identity("ank-grammar", "D^n(a) = a b^(kn) A_n^(k)(a^k/b^k) for a -> ab^k, b -> a^k b", 6)
def _ank_grammar(bound, details):
    a, b = poly_vars("a", "b")
    for k in (1, 2, 3):
        g = gr.ank(k)
        for n in range(0, bound + 1):
            coeffs = families.build_by_recurrence("Ak", n, k).coefficients("x")
            expected = poly_sum(c * a ** (k * j + 1) * b ** (k * (n - j)) for j, c in enumerate(coeffs))
            yield f"k={k} n={n}", gr.derive_n(g, a, n), expected


@identity("lemmacycle", "D^n(I) = I sum over S_n of x^exc y^drop p^fix q^cyc", 6)
def _lemmacycle(bound, details):
    I = Poly.var("I")
    for n in range(0, bound + 1):
        rhs = I * families.build_by_enumeration("PQ", n)
        yield f"n={n}", gr.derive_n(gr.cycle(), I, n), rhs


@identity("keylemma", "D^n(I) = I sum over S_n of x^exc y^drop p^fix q^(n-cyc)", 6)
def _keylemma(bound, details):
    I = Poly.var("I")
    for n in range(0, bound + 1):
        rhs = I * _perm_sum(
            n,
            ["exc", "drop", "fix", "cyc"],
            lambda e, d, f, c: _mono(x=e, y=d, p=f, q=n - c),
        )
        yield f"n={n}", gr.derive_n(gr.keylemma(), I, n), rhs


@identity("lemmaJi", "D^n(ab) = ab A_n(x,y|alpha,beta), in both the max and the min form", 6)
def _lemma_ji(bound, details):
    a, b = poly_vars("a", "b")
    for n in range(0, bound + 1):
        lhs = gr.derive_n(gr.ji(), a * b, n)
        by_max = _perm_sum(
            n + 1,
            ["asc_star", "des_star", "lrmax", "rlmax"],
            lambda ac, de, lm, rm: _mono(x=ac, y=de, alpha=lm - 1, beta=rm - 1),
        )
        by_min = _perm_sum(
            n + 1,
            ["des_star", "asc_star", "lrmin", "rlmin"],
            lambda de, ac, lm, rm: _mono(x=de, y=ac, alpha=lm - 1, beta=rm - 1),
        )
        yield f"n={n} lrmax/rlmax", lhs, a * b * by_max
        yield f"n={n} lrmin/rlmin", lhs, a * b * by_min


def _plateau_side(n: int, k: int) -> Poly:
    return _word_sum(
        n, k, ["implap", "plap", "lap"], lambda im, pl, lap: _mono(x=im, y=pl, z=n - lap)
    )


@identity("lemmaap", "D^n(I) = I sum over Q_n of x^implap y^plap z^(n-lap)", 6)
def _lemmaap(bound, details):
    I = Poly.var("I")
    for n in range(0, bound + 1):
        yield f"n={n}", gr.derive_n(gr.proper_plateau(2), I, n), I * _plateau_side(n, 2)


@identity("lemmaapp", "D^n(I) = I sum over Q_n^(k) of x^implap y^plap z^(n-lap)", 5)
def _lemmaapp(bound, details):
    I = Poly.var("I")
    for k in (1, 2, 3):
        for n in range(0, bound + 1):
            yield f"k={k} n={n}", gr.derive_n(gr.proper_plateau(k), I, n), I * _plateau_side(n, k)


@identity("lapap", "the lap/ap grammar at I=1, J=x, x=xy, z=1 gives sum over Q_n of x^lap y^ap", 6)
def _lapap(bound, details):
    for n in range(0, bound + 1):
        rhs = _word_sum(n, 2, ["lap", "ap"], lambda lap, ap: _mono(x=lap, y=ap))
        yield f"n={n}", families.build_by_grammar("Pxy", n), rhs


@identity("lemma1", "D^n(I) = I sum over Q_n^(k) of x^ap2 q^lrmin y^(kn-2ap2)", 5)
def _lemma1(bound, details):
    I = Poly.var("I")
    for k in (2, 3):
        for n in range(0, bound + 1):
            rhs = I * _word_sum(
                n, k, ["ap2", "lrmin"], lambda ap2, lr: _mono(x=ap2, q=lr, y=k * n - 2 * ap2)
            )
            yield f"k={k} n={n}", gr.derive_n(gr.lrmin_plateau(k), I, n), rhs


def _six_variable(n: int) -> Poly:
    """Sum over S_{n+1} of x1^impdes x2^pdes y1^impasc y2^pasc p^(lrmin-1) q^(rlmin-1)."""
    return _perm_sum(
        n + 1,
        ["impdes", "pdes", "impasc", "pasc", "lrmin", "rlmin"],
        lambda idn, pd, ia, pa, lm, rm: _mono(x1=idn, x2=pd, y1=ia, y2=pa, p=lm - 1, q=rm - 1),
    )


@identity("G3", "D^n(IJ) = IJ sum over S_{n+1} of x1^impdes x2^pdes y1^impasc y2^pasc p^(lrmin-1) q^(rlmin-1)", 5)
def _g3(bound, details):
    I, J = poly_vars("I", "J")
    for n in range(0, bound + 1):
        yield f"n={n}", gr.derive_n(gr.g3(), I * J, n), I * J * _six_variable(n)


@identity("alias-closures", "each alias grammar is closed under the base grammar's derivative", 1)
def _alias_closures(bound, details):
    details["systems"] = [system.name for system in gr.ALIAS_SYSTEMS]
    for system in gr.ALIAS_SYSTEMS:
        bad = system.mismatches()
        for letter, (lhs, rhs) in bad.items():
            yield f"{system.name} letter {letter}", lhs, rhs
        yield system.name, True, not bad


# Parametrizations -------------------------------------------------------

@identity("thmab", "A_n(x,y|alpha,beta) = A_n(x, y, (alpha x + beta y)/(alpha+beta), alpha+beta)", 6)
def _thmab(bound, details):
    x, y, alpha, beta = poly_vars("x", "y", "alpha", "beta")
    for n in range(0, bound + 1):
        rhs = families.fix_cycle_specialize(
            families.build_by_enumeration("PQ", n), {}, alpha * x + beta * y, alpha + beta
        )
        yield f"n={n}", families.build_by_grammar("AlphaBeta", n), rhs


@identity("thmproper", "sum over Q_n of x^implap y^plap = sum over S_n of x^exc y^fix 2^(n-cyc)", 6)
def _thmproper(bound, details):
    for n in range(0, bound + 1):
        words = _word_sum(n, 2, ["implap", "plap"], lambda im, pl: _mono(x=im, y=pl))
        perms = _perm_sum(n, ["exc", "fix", "cyc"], lambda e, f, c: _mono(x=e, y=f) * 2 ** (n - c))
        yield f"n={n}", words, perms
        yield (
            f"n={n} y=x",
            _word_sum(n, 2, ["lap"], lambda lap: _mono(x=lap)),
            _perm_sum(n, ["exc", "fix", "cyc"], lambda e, f, c: _mono(x=e + f) * 2 ** (n - c)),
        )


@identity("thm17", "sum over Q_n^(k) of x^implap y^plap = sum over S_n of x^exc y^fix k^(n-cyc)", 5)
def _thm17(bound, details):
    for k in (1, 2, 3):
        for n in range(0, bound + 1):
            words = _word_sum(n, k, ["implap", "plap"], lambda im, pl: _mono(x=im, y=pl))
            perms = _perm_sum(n, ["exc", "fix", "cyc"], lambda e, f, c: _mono(x=e, y=f) * k ** (n - c))
            yield f"k={k} n={n}", words, perms
            lap = _word_sum(n, k, ["lap"], lambda v: _mono(x=v))
            yield f"k={k} n={n} y=x", lap, perms.substitute({"y": Poly.var("x")})
            yield f"k={k} n={n} reverse", lap, families.build_by_recurrence("Ak", n, k).reverse_in("x", n)


@identity("thm24", "six-variable enumerator over S_{n+1} = A_n(x1, y1, (p x2 + q y2)/(p+q), p+q)", 6)
def _thm24(bound, details):
    x1, x2, y1, y2, p, q = poly_vars("x1", "x2", "y1", "y2", "p", "q")
    for n in range(0, bound + 1):
        rhs = families.fix_cycle_specialize(_pq(n), {"x": x1, "y": y1}, p * x2 + q * y2, p + q)
        yield f"n={n}", _six_variable(n), rhs


@identity("cor20-cases", "the four specializations of the six-variable identity and the derangement sign sum", 5)
def _cor20_cases(bound, details):
    x, y, p, q = poly_vars("x", "y", "p", "q")
    details["cases"] = ["x1=y1=1", "x2=y2=1", "y1=y2=p=q=1", "A_{n+1}", "derangement-sign"]
    for n in range(0, bound + 1):
        pq = _pq(n)
        lhs = _perm_sum(
            n + 1,
            ["pdes", "pasc", "lrmin", "rlmin"],
            lambda pd, pa, lm, rm: _mono(x=pd, y=pa, p=lm - 1, q=rm - 1),
        )
        rhs = families.fix_cycle_specialize(pq, {"x": ONE, "y": ONE}, p * x + q * y, p + q)
        yield f"n={n} x1=y1=1", lhs, rhs

        lhs = _perm_sum(
            n + 1,
            ["impdes", "impasc", "lrmin", "rlmin"],
            lambda idn, ia, lm, rm: _mono(x=idn, y=ia, p=lm - 1, q=rm - 1),
        )
        rhs = families.fix_cycle_specialize(pq, {}, p + q, p + q)
        yield f"n={n} x2=y2=1", lhs, rhs

        lhs = _perm_sum(n + 1, ["impdes", "pdes"], lambda idn, pd: _mono(x=idn, y=pd))
        rhs = families.fix_cycle_specialize(pq, {"y": ONE}, 1 + y, 2)
        yield f"n={n} y1=y2=p=q=1", lhs, rhs

        both = x * _perm_sum(n + 1, ["impdes", "pdes"], lambda idn, pd: _mono(x=idn + pd))
        rhs = x * families.fix_cycle_specialize(pq, {"y": ONE}, 1 + x, 2)
        yield f"n={n} A_(n+1) via descents", families.build_by_recurrence("A", n + 1), both
        yield f"n={n} A_(n+1) via cycles", both, rhs

        signed = _perm_sum(n + 1, ["pdes", "pasc"], lambda pd, pa: _mono(x=pd + pa) * (-1) ** pa)
        derangements = _perm_sum(n, ["fix", "cyc"], lambda f, c: Poly.const(2 ** c if f == 0 else 0))
        yield f"n={n} derangement sign", signed, derangements


@identity("aug-sym", "(impasc^, des*, pasc^, rlmin) over S_n is distributed as (exc, drop, fix, cyc)", 7)
def _aug_sym(bound, details):
    for n in range(0, bound + 1):
        lhs = _perm_sum(
            n,
            ["impasc_hat", "des_star", "pasc_hat", "rlmin"],
            lambda ia, ds, ph, rm: _mono(x=ia, y=ds, p=ph, q=rm),
        )
        yield f"n={n}", lhs, _pq(n)
        pair = _perm_sum(n, ["impasc_hat", "des_star"], lambda ia, ds: _mono(x=ia, y=ds))
        yield f"n={n} symmetric", pair, pair.substitute({"x": Poly.var("y"), "y": Poly.var("x")})


def _augmented_proper_ascents(p: Tuple[int, ...], with_clause: bool) -> int:
    ext = (0,) + p
    count = 0
    for i in range(1, len(p) + 1):
        if ext[i - 1] >= ext[i]:
            continue
        smaller_left = all(p.index(u) + 1 < i for u in range(1, ext[i]))
        if smaller_left or (with_clause and i == 1 and p[0] == 1):
            count += 1
    return count


@identity("aug-clause", "the clause 'or i=1 and pi(1)=1' never changes the augmented proper ascent count", 7)
def _aug_clause(bound, details):
    for n in range(0, bound + 1):
        for p in gen_perms(n):
            with_clause = _augmented_proper_ascents(p, True)
            yield f"perm {p}", with_clause, _augmented_proper_ascents(p, False)
            yield f"perm {p} record", with_clause, stats.perm_stats(p).pasc_hat


@identity("final-cor", "A_n(x,y,w,p+q) via augmented ascents over S_n and via proper descents/ascents over S_{n+1}", 6)
def _final_cor(bound, details):
    p, q, w = poly_vars("p", "q", "w")
    for n in range(0, bound + 1):
        pq = _pq(n).substitute({"p": w, "q": p + q})
        augmented = _perm_sum(
            n,
            ["impasc_hat", "des_star", "pasc_hat", "rlmin"],
            lambda ia, ds, ph, rm: _mono(x=ia, y=ds, w=ph) * (p + q) ** rm,
        )
        proper = _perm_sum(
            n + 1,
            ["impdes", "impasc", "pdes", "pasc", "lrmin", "rlmin"],
            lambda idn, ia, pd, pa, lm, rm: _mono(x=idn, y=ia, w=pd + pa, p=lm - 1, q=rm - 1),
        )
        yield f"n={n} augmented", pq, augmented
        yield f"n={n} proper", pq, proper
        lhs = _perm_sum(n, ["des_star", "rlmin"], lambda ds, rm: _mono(y=ds) * (p + q) ** rm)
        rhs = _perm_sum(
            n + 1, ["impasc", "lrmin", "rlmin"], lambda ia, lm, rm: _mono(y=ia, p=lm - 1, q=rm - 1)
        )
        yield f"n={n} x=w=1", lhs, rhs


# Coefficient tables -----------------------------------------------------

@identity("thm1-reconstruct", "A_{n+1}^(k) = sum (1+kx)^i sum gamma_{n,i,j}(k) x^j (1+x)^(n-i-2j), gammas nonnegative", 8)
def _thm1_reconstruct(bound, details):
    for n in range(1, bound + 1):
        table = families.gamma_table(n)
        yield f"n={n}", families.gamma_reconstruct(table), families.build_by_recurrence("Ak", n + 1)
        negative = [key for key, c in table.items() if any(v < 0 for v in c.terms.values())]
        yield f"n={n} nonnegative", [], negative


@identity("zeta-gamma", "2^j zeta_{n,i,j} = gamma_{n,i,j}(2), and the zeta expansion gives M_{n+1}", 6)
def _zeta_gamma(bound, details):
    for n in range(1, bound + 1):
        zeta, gamma = families.zeta_table(n), families.gamma_table(n, 2)
        for key in sorted(set(zeta) | set(gamma)):
            yield f"n={n} (i,j)={key}", 2 ** key[1] * zeta[key], gamma[key]
        yield f"n={n} M_(n+1)", families.zeta_reconstruct(zeta), families.build_by_recurrence("M", n + 1)


@identity("eulerian-gamma", "A_n(x) = sum a(n,k) x^k (1+x)^(n+1-2k)", 8)
def _eulerian_gamma(bound, details):
    for n in range(1, bound + 1):
        table = families.eulerian_gamma_table(n)
        eulerian = families.build_by_enumeration("A", n)
        yield f"n={n}", families.eulerian_from_gamma(table), eulerian
        expected = (ZERO,) + tuple(table[("a", k)] for k in range(1, (n + 1) // 2 + 1))
        yield f"n={n} gamma vector", expected, gamma_expand(eulerian, n + 1).gammas


@identity("xieta-expansion", "P_{n+1}(x,y) from the xi/eta table, and the split by sigma_1 = sigma_2", 6)
def _xieta_expansion(bound, details):
    y = Poly.var("y")
    for n in range(1, bound + 1):
        table = families.xi_eta_table(n)
        xi, eta = families.xi_eta_polys(n)
        yield f"n={n} xi polynomial", table.poly("xi"), xi
        yield f"n={n} eta polynomial", table.poly("eta"), eta
        if n >= bound:
            continue
        yield f"n={n} P_(n+1)", families.pxy_from_xi_eta(table), families.build_by_enumeration("Pxy", n + 1)
        ones = poly_sum(table[("xi", i)] * y ** i * (1 + y) ** (n - 2 * i) for i in range(n // 2 + 1))
        twos = y * poly_sum(
            table[("eta", j)] * y ** j * (1 + y) ** (n - 1 - 2 * j) for j in range((n - 1) // 2 + 1)
        )
        lead_plateau = _word_sum(n + 1, 2, ["ap"], lambda ap: _mono(y=ap), where=lambda w: w[0] == w[1])
        lead_ascent = _word_sum(n + 1, 2, ["ap"], lambda ap: _mono(y=ap), where=lambda w: w[0] < w[1])
        yield f"n={n} sigma_1 = sigma_2", lead_plateau, ones
        yield f"n={n} sigma_1 < sigma_2", lead_ascent, twos
    if bound >= 3:
        shifted = families.pxy_from_xi_eta(families.xi_eta_table(2, cross_shift=0))
        details["cross_term_eta_n_i_rejected"] = shifted != families.build_by_enumeration("Pxy", 3)


@identity("fn-recurrence", "F_n = xi_n(x^2) + x eta_n(x^2) satisfies F_{n+1} = (1+x+4nx^2)F_n + x(1-4x^2)F_n'", 8)
def _fn_recurrence(bound, details):
    for n in range(0, bound + 1):
        yield f"n={n}", families.fn_poly(n), families.fn_by_recurrence(n)


_Q_SAMPLES = (Fraction(1, 2), Fraction(1), Fraction(3, 2))


@identity("fg-Mq", "M_n(x,q) from the f/g expansion; q=2 collapse to 2^n A_n; f, g nonnegative on (0, 2]", 7)
def _fg_mq(bound, details):
    for n in range(2, bound + 1):
        yield f"n={n}", families.mq_from_fg(families.fg_table(n - 1)), families.build_by_enumeration("Mq", n)
    for n in range(1, bound + 2):
        m2 = families.build_by_recurrence("Mq", n).substitute({"q": 2})
        yield f"n={n} q=2 collapse", 2 ** n * families.build_by_enumeration("A", n), m2.reverse_in("x", n)
    nonnegative = {}
    for q in _Q_SAMPLES + (Fraction(2),):
        ok = True
        for n in range(1, bound):
            table = families.fg_table(n)
            values = [(q * c.substitute({"q": q})).constant_value() for c in table.entries.values()]
            ok = ok and all(v >= 0 for v in values)
        nonnegative[str(q)] = ok
        yield f"q={q} nonnegative", True, ok
    details["nonnegative_at_q"] = nonnegative


@identity("ab-decomp", "(a_n, b_n) from the coupled recurrence is the symmetric decomposition of M_n", 7)
def _ab_decomp(bound, details):
    for n in range(1, bound + 1):
        a, b = families.ab_polys(n)
        dec = symmetric_decompose(families.build_by_enumeration("M", n), n - 1)
        yield f"n={n} a", a, dec.a
        yield f"n={n} b", b, dec.b


# Positivity -------------------------------------------------------------

@identity("ank-bigamma", "A_n^(k)(x) is bi-gamma-positive for k = 1, 2, 3", 7)
def _ank_bigamma(bound, details):
    for k in (1, 2, 3):
        for n in range(1, bound + 1):
            yield f"k={k} n={n}", True, is_bi_gamma_positive(families.build_by_recurrence("Ak", n, k), n - 1)


@identity("mq-bigamma", "M_n(x,q) is bi-gamma-positive at sampled q in (0, 2); q=2 reported in details", 6)
def _mq_bigamma(bound, details):
    at_two = {}
    for n in range(2, bound + 1):
        mq = families.build_by_enumeration("Mq", n)
        for q in _Q_SAMPLES:
            yield f"n={n} q={q}", True, is_bi_gamma_positive(mq.substitute({"q": q}), n - 1)
        at_two[str(n)] = is_bi_gamma_positive(mq.substitute({"q": 2}), n - 1)
    details["bi_gamma_positive_at_q_2"] = at_two


def _lemma_alt_cases(n: int) -> Iterator[Tuple[str, Poly, int]]:
    yield "A", families.build_by_recurrence("A", n), n
    yield "B", families.build_by_recurrence("B", n), n
    yield "M", families.build_by_recurrence("M", n), n - 1
    yield "N", families.build_by_recurrence("N", n), n
    for k in (1, 2, 3):
        yield f"Ak k={k}", families.build_by_recurrence("Ak", n, k), n - 1
    for q in _Q_SAMPLES:
        yield f"Mq q={q}", families.build_by_recurrence("Mq", n).substitute({"q": q}), n - 1


@identity("lemma-alt", "alternatingly increasing iff both decomposition parts are unimodal", 7)
def _lemma_alt(bound, details):
    skipped = []
    for n in range(1, bound + 1):
        for name, f, d in _lemma_alt_cases(n):
            dec = symmetric_decompose(f, d)
            if dec.a.degree("x") != d or dec.b.degree("x") != d - 1:
                skipped.append(f"{name} n={n}")
                continue
            alternating = is_alternatingly_increasing(numeric_coefficients(f, d))
            parts_ok = (
                has_nonnegative_coefficients(dec.a)
                and has_nonnegative_coefficients(dec.b)
                and parts_unimodal(f, d)
            )
            yield f"{name} n={n}", parts_ok, alternating
    details["skipped_degree_hypothesis"] = skipped


# Series -----------------------------------------------------------------

def _series_zero(label: str, residual: series.TruncSeries) -> Iterator[Comparison]:
    for i, c in enumerate(residual.coeffs):
        yield f"{label} z^{i}", c, ZERO


def _series_order(bound: int, details: Dict[str, Any]) -> int:
    # The configured series order caps the truncation.
    order = min(bound, get_config().series_order)
    details["order"] = order
    return order


@identity("egf-savage", "EGF of A_n^(k) = ((1-x)/(e^{k(x-1)z} - x))^(1/k)", 8)
def _egf_savage(bound, details):
    order = _series_order(bound, details)
    for k in (1, 2, 3):
        ank = [families.build_by_recurrence("Ak", n, k) for n in range(order + 1)]
        yield from _series_zero(f"k={k}", series.savage_viswanathan_residual(ank, k, order))


@identity("egf-zeng", "EGF of A_n(x,1,p,q) = ((1-x)e^{pz}/(e^{xz} - x e^z))^q at q = 1, 2, 3", 8)
def _egf_zeng(bound, details):
    order = _series_order(bound, details)
    for q0 in (1, 2, 3):
        polys = [_pq(n).substitute({"y": ONE, "q": q0}) for n in range(order + 1)]
        yield from _series_zero(f"q={q0}", series.ksavrelof_zeng_residual(polys, q0, order))


@identity("egf-four", "EGF of A_n(x,y,p,q) = ((y-x)e^{pz}/(y e^{xz} - x e^{yz}))^q at q = 1, 2, 3", 8)
def _egf_four(bound, details):
    order = _series_order(bound, details)
    for q0 in (1, 2, 3):
        polys = [_pq(n).substitute({"q": q0}) for n in range(order + 1)]
        yield from _series_zero(f"q={q0}", series.four_variable_residual(polys, q0, order))


@identity("egf-carlitz", "EGF of A_n(x,y|alpha,beta) at integer alpha, beta", 8)
def _egf_carlitz(bound, details):
    order = _series_order(bound, details)
    for alpha, beta in [*product((0, 1, 2), repeat=2), (2, 3)]:
        polys = [
            families.build_by_recurrence("AlphaBeta", n).substitute({"alpha": alpha, "beta": beta})
            for n in range(order + 1)
        ]
        yield from _series_zero(
            f"alpha={alpha} beta={beta}", series.carlitz_residual(polys, alpha, beta, order)
        )


@identity("operator-Ank", "(kx d/dx + 1)^n and (kx d/dx)^n applied to (1-x)^(-1/k)", 5)
def _operator_ank(bound, details):
    details["order_x"] = 10
    for k in (1, 2, 3):
        for n in range(1, bound + 1):
            yield f"k={k} n={n}", True, series.ogf_operator_check(n, k, max(10, n + 2))


# Sampling ---------------------------------------------------------------

def _sample_rational(rng: np.random.Generator, positive: bool = False) -> Fraction:
    low = 1 if positive else -9
    return Fraction(int(rng.integers(low, 10)), int(rng.integers(1, 6)))


@identity(
    "xu01-sample",
    "six-variable val/dasc/ddes/lrmax/rlmax enumerator = A_n(x, y, (p u3 + q u4)/(p+q), p+q) "
    "when xy = u1 u2 and x + y = u3 + u4",
    5,
    method="sampling",
)
def _xu01_sample(bound, details):
    cfg = get_config()
    rng = np.random.default_rng(cfg.seed)
    details.update({
        "points_per_n": cfg.sample_points,
        "seed": cfg.seed,
        "substitution": "(p, q) = (alpha, beta); u1 = x*y, u2 = 1, u4 = x + y - u3",
        "degree_rationale": "both sides have total degree at most 2(n+1) in the sampled values",
    })
    for n in range(1, bound + 1):
        lhs_poly = _perm_sum(
            n + 1,
            ["val", "dasc", "ddes", "lrmax", "rlmax"],
            lambda v, da, dd, lm, rm: _mono(u1=v, u2=v, u3=da, u4=dd, alpha=lm - 1, beta=rm - 1),
        )
        pq = _pq(n)
        for idx in range(cfg.sample_points):
            x, y, u3 = _sample_rational(rng), _sample_rational(rng), _sample_rational(rng)
            alpha, beta = _sample_rational(rng, True), _sample_rational(rng, True)
            u4 = x + y - u3
            lhs = lhs_poly.evaluate({"u1": x * y, "u2": 1, "u3": u3, "u4": u4, "alpha": alpha, "beta": beta})
            rhs = families.fix_cycle_specialize(
                pq, {"x": x, "y": y}, alpha * u3 + beta * u4, alpha + beta
            ).constant_value()
            yield f"n={n} point {idx} (x={x}, y={y}, u3={u3}, alpha={alpha}, beta={beta})", lhs, rhs


# Statistic invariants and route agreement -------------------------------

@identity("stat-invariants", "record identities of every statistic, reversal relations and the Stirling condition", 7)
def _stat_invariants(bound, details):
    for n in range(0, bound + 1):
        for p in gen_perms(n):
            r = stats.perm_stats(p)
            rev = stats.perm_stats(tuple(reversed(p)))
            expected = (n, r.rlmin, r.rlmax)
            actual = (r.exc + r.drop + r.fix, rev.lrmin, rev.lrmax)
            if n >= 1:
                expected += (r.asc, r.des, r.val + 1, r.asc, r.des, r.asc_star, r.des_star, r.asc)
                actual += (
                    r.asc_star + 1,
                    r.des_star + 1,
                    r.pk,
                    r.dasc + r.pk,
                    r.ddes + r.pk,
                    r.pasc + r.impasc,
                    r.pdes + r.impdes,
                    r.pasc_hat + r.impasc_hat,
                )
            yield f"perm {p}", expected, actual
    for k in (1, 2, 3):
        for n in range(0, min(bound, 5) + 1):
            for w in gen_stirling(n, k):
                r = stats.stirling_stats(w)
                rev = stats.stirling_stats(StirlingWord(tuple(reversed(w.word)), k))
                expected = (True, r.lap, True, r.rlmin)
                actual = (is_stirling(w.word, k), r.plap + r.implap, r.lap - r.ap in (0, 1) if n else True, rev.lrmin)
                if k == 2:
                    expected += (r.ap,)
                    actual += (r.ap2,)
                yield f"word {w} (k={k})", expected, actual
    for n in range(0, min(bound, 5) + 1):
        for s in gen_signed_perms(n):
            yield f"signed {s}", True, 0 <= stats.signed_stats(s).des_B <= n


_ROUTE_BOUNDS = {"A": 8, "B": 7, "M": 7, "N": 7, "Ak": 6, "PQ": 6, "AlphaBeta": 6, "Pxy": 6, "Mq": 6}


def _route_checker(family: str) -> Checker:
    def check(bound, details):
        routes = families.routes_for(family)
        details["routes"] = list(routes)
        ks = (1, 2, 3, None) if family == "Ak" else (None,)
        for k in ks:
            for n in range(0, bound + 1):
                reference = families.build_by_recurrence(family, n, k)
                for route in routes:
                    if route != "rec":
                        label = f"k={_k_label(k)} n={n} {route}" if family == "Ak" else f"n={n} {route}"
                        yield label, families.build(family, n, k, route), reference

    return check


for _family, _bound in _ROUTE_BOUNDS.items():
    identity(f"routes-{_family}", f"every route for {_family} agrees with the recurrence", _bound)(
        _route_checker(_family)
    )


# Runner -----------------------------------------------------------------

def run_identity(
    identity_id: str, bound: Optional[int] = None, config: Optional[LabConfig] = None
) -> IdentityReport:
    """Check one registered identity up to ``bound`` (default: its own bound).

    ``config`` replaces the active configuration for the duration of the
    check; worker processes receive the parent's configuration this way.
    """
    if config is not None:
        with use_config(config):
            return run_identity(identity_id, bound)
    check = get_identity(identity_id)
    bound = check.default_bound if bound is None else bound
    if bound < 1:
        raise ValueError(f"bound must be at least 1, got {bound}")
    logger.info("checking %s up to %d", identity_id, bound)
    details: Dict[str, Any] = {}
    counterexample = None
    compared = 0
    start = time.perf_counter()
    for label, lhs, rhs in check.checker(bound, details):
        compared += 1
        if lhs != rhs:
            counterexample = f"{label}: {_describe(lhs, rhs)}"
            break
    wall = time.perf_counter() - start
    details["comparisons"] = compared
    passed = counterexample is None
    if passed:
        logger.info("%s passed (%d comparisons, %.2fs)", identity_id, compared, wall)
    else:
        logger.warning("%s failed: %s", identity_id, counterexample)
    return IdentityReport(identity_id, bound, passed, counterexample, wall, check.method, details)


def run_all(
    bound_overrides: Union[None, int, Mapping[str, int]] = None,
    jobs: Optional[int] = None,
    ids: Optional[Sequence[str]] = None,
) -> List[IdentityReport]:
    """Run registered identities and return their reports sorted by id.

    Args:
        bound_overrides: One bound for every identity, or a mapping from id to
            bound; missing ids use their default bound.
        jobs: Worker processes; defaults to the configured parallelism.
        ids: Subset of identities to run; all by default.
    """
    selected = sorted(ids) if ids is not None else sorted(REGISTRY)
    for identity_id in selected:
        get_identity(identity_id)
    if isinstance(bound_overrides, int):
        bounds = {i: bound_overrides for i in selected}
    else:
        overrides = dict(bound_overrides or {})
        bounds = {i: overrides.get(i) for i in selected}
    jobs = get_config().jobs if jobs is None else jobs
    if jobs > 1 and len(selected) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            config = get_config()
            futures = [pool.submit(run_identity, i, bounds[i], config) for i in selected]
            reports = [f.result() for f in futures]
    else:
        reports = [run_identity(i, bounds[i]) for i in selected]
    return sorted(reports, key=lambda r: r.id)
