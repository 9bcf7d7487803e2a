"""Symmetric decompositions, gamma expansions and positivity predicates."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from stirling_lab import families
from stirling_lab.exactpoly import (
    ZERO,
    Coeff,
    DegreeOverflowError,
    InexactDivisionError,
    Poly,
    PolyLike,
    as_poly,
    poly_sum,
    poly_vars,
)

logger = logging.getLogger(__name__)

# Centre degree of the symmetric decomposition for each family, as a shift from n.
_REFERENCE_SHIFT = {"A": 0, "B": 0, "N": 0, "M": -1, "Ak": -1, "Mq": -1}


class NotSymmetricError(ValueError):
    """Raised when a gamma expansion is requested for a non-palindromic polynomial."""


class SymbolicCoefficientError(ValueError):
    """Raised when a numeric predicate meets a coefficient that is not a number."""


@dataclass(frozen=True)
class SymmetricDecomposition:
    a: Poly
    b: Poly
    n: int

    def recombine(self, var: str = "x") -> Poly:
        return self.a + Poly.var(var) * self.b


@dataclass(frozen=True)
class GammaVector:
    gammas: Tuple[Poly, ...]
    n: int

    def reconstruct(self, var: str = "x") -> Poly:
        (x,) = poly_vars(var)
        return poly_sum(g * x ** k * (1 + x) ** (self.n - 2 * k) for k, g in enumerate(self.gammas))


@dataclass(frozen=True)
class PositivityReport:
    symmetric: bool
    unimodal: bool
    gamma_positive: bool
    alternatingly_increasing: bool
    bi_gamma_positive: bool

    def to_dict(self) -> Dict[str, bool]:
        return asdict(self)


@dataclass(frozen=True)
class PartialGammaTable:
    """gamma_{n,i,j}(k) keyed by (i, j), defined by the partial gamma recurrence."""

    n: int
    k: Optional[int]
    table: families.CoeffTable

    @property
    def entries(self):
        return self.table.entries

    def reconstruct(self) -> Poly:
        """The expansion sum, which equals A_{n+1}^(k)(x)."""
        return families.gamma_reconstruct(self.table, self.k)

    def nonnegative(self) -> bool:
        return all(has_nonnegative_coefficients(c) for c in self.table.entries.values())


def reference_degree(family: str, n: int) -> int:
    """Centre degree used when decomposing family polynomial number n."""
    if family not in _REFERENCE_SHIFT:
        raise families.NoRouteError(family, "decompose")
    return n + _REFERENCE_SHIFT[family]


def has_nonnegative_coefficients(p: PolyLike) -> bool:
    return all(c >= 0 for c in as_poly(p).terms.values())


def is_palindromic(p: PolyLike, n: int, var: str = "x") -> bool:
    p = as_poly(p)
    if p.degree(var) > n:
        return False
    return p == p.reverse_in(var, n)


def _object_array(values: Sequence) -> np.ndarray:
    arr = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        arr[i] = v
    return arr


def divide_by_one_minus(p: PolyLike, var: str = "x") -> Poly:
    """Exact quotient p / (1 - var); coefficients in other variables allowed."""
    p = as_poly(p)
    if not p:
        return ZERO
    coeffs = _object_array(p.coefficients(var))
    partial = np.cumsum(coeffs)
    if partial[-1]:
        raise InexactDivisionError(f"{p} is not divisible by 1 - {var}")
    return Poly.from_coefficients(list(partial[:-1]), var)


def symmetric_decompose(f: PolyLike, n: int, var: str = "x") -> SymmetricDecomposition:
    """Split f = a + x b with a palindromic at centre n and b at centre n - 1.

    Args:
        f: Polynomial in ``var``; other variables are treated as coefficients.
        n: Reference degree, at least deg f.
        var: The polynomial variable.

    Returns:
        The decomposition; ``a + var * b == f`` exactly.
    """
    f = as_poly(f)
    x = Poly.var(var)
    rev = f.reverse_in(var, n)
    a = divide_by_one_minus(f - x * rev, var)
    b = divide_by_one_minus(rev - f, var)
    if a + x * b != f:
        raise InexactDivisionError(f"decomposition of {f} at degree {n} does not recombine")
    return SymmetricDecomposition(a, b, n)


def gamma_expand(f: PolyLike, n: int, var: str = "x") -> GammaVector:
    """Expand a palindromic f as sum gamma_k x^k (1+x)^{n-2k}, lowest degree first."""
    f = as_poly(f)
    if not is_palindromic(f, n, var):
        raise NotSymmetricError(f"{f} is not symmetric with centre {n}/2")
    x = Poly.var(var)
    residual = f
    gammas: List[Poly] = []
    for k in range(n // 2 + 1):
        g = residual.coeff_of(var, k)
        gammas.append(g)
        if g:
            residual = residual - g * x ** k * (1 + x) ** (n - 2 * k)
    if residual:
        raise NotSymmetricError(f"{f} leaves remainder {residual} after gamma expansion")
    return GammaVector(tuple(gammas), n)


def numeric_coefficients(f: PolyLike, n: int, var: str = "x") -> List[Coeff]:
    """f_0, ..., f_n as numbers; refuses polynomials in other variables."""
    f = as_poly(f)
    extra = [v for v in f.variables() if v != var]
    if extra:
        raise SymbolicCoefficientError(
            f"coefficients of {f} depend on {', '.join(extra)}; substitute numbers first"
        )
    if f.degree(var) > n:
        raise DegreeOverflowError(f"degree {f.degree(var)} in {var} exceeds reference degree {n}")
    return [f.coeff_of(var, i).constant_value() for i in range(n + 1)]


def is_unimodal(coeffs: Sequence[Coeff]) -> bool:
    if len(coeffs) < 3:
        return True
    steps = np.diff(_object_array(list(coeffs)))
    fallen = False
    for s in steps:
        if s < 0:
            fallen = True
        elif s > 0 and fallen:
            return False
    return True


def alternating_order(n: int) -> List[int]:
    """Indices 0, n, 1, n-1, 2, ... covering 0..n once."""
    return [t // 2 if t % 2 == 0 else n - t // 2 for t in range(n + 1)]


def is_alternatingly_increasing(coeffs: Sequence[Coeff]) -> bool:
    n = len(coeffs) - 1
    seq = [coeffs[i] for i in alternating_order(n)]
    return all(a <= b for a, b in zip(seq, seq[1:]))


def is_gamma_positive(f: PolyLike, n: int, var: str = "x") -> bool:
    f = as_poly(f)
    numeric_coefficients(f, n, var)
    if not is_palindromic(f, n, var):
        return False
    return all(has_nonnegative_coefficients(g) for g in gamma_expand(f, n, var).gammas)


def parts_unimodal(f: PolyLike, n: int, var: str = "x") -> bool:
    """Both halves of the symmetric decomposition have unimodal coefficients."""
    dec = symmetric_decompose(f, n, var)
    a = numeric_coefficients(dec.a, n, var)
    b = numeric_coefficients(dec.b, max(n - 1, 0), var)
    return is_unimodal(a) and is_unimodal(b)


def is_bi_gamma_positive(f: PolyLike, n: int, var: str = "x") -> bool:
    dec = symmetric_decompose(f, n, var)
    if n == 0:
        return not dec.b and is_gamma_positive(dec.a, 0, var)
    return is_gamma_positive(dec.a, n, var) and is_gamma_positive(dec.b, n - 1, var)


def positivity_report(f: PolyLike, n: int, var: str = "x") -> PositivityReport:
    """Evaluate every positivity predicate on f with reference degree n."""
    coeffs = numeric_coefficients(f, n, var)
    return PositivityReport(
        symmetric=is_palindromic(f, n, var),
        unimodal=is_unimodal(coeffs),
        gamma_positive=is_gamma_positive(f, n, var),
        alternatingly_increasing=is_alternatingly_increasing(coeffs),
        bi_gamma_positive=is_bi_gamma_positive(f, n, var),
    )


def partial_gamma(n: int, k: Optional[int] = None) -> PartialGammaTable:
    """Partial gamma coefficients of A_{n+1}^(k); k=None keeps k symbolic."""
    return PartialGammaTable(n, k, families.gamma_table(n, k))


def family_polynomial(family: str, n: int, k: Optional[int] = None, q: Optional[PolyLike] = None) -> Poly:
    """Recurrence value of a decomposable family, with q substituted for Mq."""
    p = families.build_by_recurrence(family, n, k)
    if family == "Mq":
        if q is None:
            raise ValueError("family Mq needs a numeric q to decompose")
        p = p.substitute({"q": q})
    return p


def decompose_family(family: str, n: int, k: Optional[int] = None, q: Optional[PolyLike] = None) -> dict:
    """Decomposition, gamma vectors and predicates of one family polynomial.

    Gamma vectors are omitted (None) for a part that is not palindromic.
    """
    p = family_polynomial(family, n, k, q)
    d = reference_degree(family, n)
    dec = symmetric_decompose(p, d)

    def gammas(part: Poly, centre: int) -> Optional[List[Poly]]:
        if centre < 0:
            return [] if not part else None
        try:
            return list(gamma_expand(part, centre).gammas)
        except NotSymmetricError:
            return None

    numeric = not [v for v in p.variables() if v != "x"]
    return {
        "family": family,
        "n": n,
        "reference_degree": d,
        "polynomial": p,
        "a": dec.a,
        "b": dec.b,
        "gamma_a": gammas(dec.a, d),
        "gamma_b": gammas(dec.b, d - 1),
        "predicates": positivity_report(p, d).to_dict() if numeric else None,
    }
