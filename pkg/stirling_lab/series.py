"""Truncated power series in z with exact polynomial coefficients.

Exponential generating function identities are checked here in
cross-multiplied form, so only integer powers of series ever appear:
an identity ``F = (N / D)^q`` is verified as ``F * D^q == N^q`` up to z^order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence, Tuple, Union

from stirling_lab import families
from stirling_lab.exactpoly import ONE, ZERO, Poly, PolyLike, as_poly, poly_vars


class SeriesOrderError(ValueError):
    """Raised when two series of different truncation orders are combined."""


@dataclass(frozen=True)
class TruncSeries:
    """Series c_0 + c_1 z + ... + c_N z^N, degrees above N discarded."""

    order: int
    coeffs: Tuple[Poly, ...]

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be nonnegative, got {self.order}")
        if len(self.coeffs) != self.order + 1:
            raise ValueError(
                f"order {self.order} needs {self.order + 1} coefficients, "
                f"got {len(self.coeffs)}"
            )
        object.__setattr__(self, "coeffs", tuple(as_poly(c) for c in self.coeffs))

    @classmethod
    def constant(cls, c: PolyLike, order: int) -> "TruncSeries":
        return cls(order, (as_poly(c),) + (ZERO,) * order)

    @classmethod
    def from_poly(cls, p: PolyLike, var: str, order: int) -> "TruncSeries":
        """View a polynomial in ``var`` as a series in that variable."""
        p = as_poly(p)
        return cls(order, tuple(p.coeff_of(var, i) for i in range(order + 1)))

    def coefficient(self, i: int) -> Poly:
        return self.coeffs[i] if 0 <= i <= self.order else ZERO

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "TruncSeries") -> None:
        if other.order != self.order:
            raise SeriesOrderError(
                f"cannot combine series of orders {self.order} and {other.order}"
            )

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.order, tuple(-c for c in self.coeffs))

    def __mul__(self, other: Union["TruncSeries", PolyLike]) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            c = as_poly(other)
            return TruncSeries(self.order, tuple(a * c for a in self.coeffs))
        self._check(other)
        out = []
        for i in range(self.order + 1):
            acc = ZERO
            for j in range(i + 1):
                a, b = self.coeffs[j], other.coeffs[i - j]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return TruncSeries(self.order, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "TruncSeries":
        if e < 0:
            raise ValueError(f"exponent must be nonnegative, got {e}")
        result = TruncSeries.constant(ONE, self.order)
        for _ in range(e):
            result = result * self
        return result

    def to_text(self, var: str = "z") -> str:
        pieces = []
        for i, c in enumerate(self.coeffs):
            text = c.to_text()
            if len(c) > 1:
                text = f"({text})"
            if i == 0:
                pieces.append(text)
            elif i == 1:
                pieces.append(f"{text}*{var}")
            else:
                pieces.append(f"{text}*{var}^{i}")
        return " + ".join(pieces)

    __str__ = to_text


def series_arith(s: TruncSeries, t: TruncSeries, op: str) -> TruncSeries:
    if op == "add":
        return s + t
    if op == "sub":
        return s - t
    if op == "mul":
        return s * t
    raise ValueError(f"unknown operation {op!r}")


def exp_poly(c: PolyLike, order: int) -> TruncSeries:
    """Return e^{c z} = sum_{i <= order} c^i z^i / i!."""
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    c = as_poly(c)
    coeffs = [ONE]
    for i in range(1, order + 1):
        coeffs.append(coeffs[-1] * c / i)
    return TruncSeries(order, tuple(coeffs))


def egf_of(polys: Sequence[PolyLike], order: Optional[int] = None) -> TruncSeries:
    """Return sum polys[n] z^n / n!, padded with zeros up to ``order``."""
    if not polys:
        raise ValueError("egf_of needs at least one coefficient")
    order = len(polys) - 1 if order is None else order
    coeffs = [
        as_poly(polys[n]) / factorial(n) if n < len(polys) else ZERO
        for n in range(order + 1)
    ]
    return TruncSeries(order, tuple(coeffs))


def savage_viswanathan_residual(ank: Sequence[PolyLike], k: int, order: int) -> TruncSeries:
    """EGF(A^(k))^k * (e^{k(x-1)z} - x) - (1 - x); zero when the identity holds."""
    (x,) = poly_vars("x")
    lhs = egf_of(ank, order) ** k * (exp_poly(k * (x - 1), order) - TruncSeries.constant(x, order))
    return lhs - TruncSeries.constant(1 - x, order)


def ksavrelof_zeng_residual(pq: Sequence[PolyLike], q0: int, order: int) -> TruncSeries:
    """EGF(A_n(x,1,p,q0)) * (e^{xz} - x e^z)^q0 - ((1-x) e^{pz})^q0."""
    x, p = poly_vars("x", "p")
    denom = exp_poly(x, order) - exp_poly(ONE, order) * x
    numer = exp_poly(p, order) * (1 - x)
    return egf_of(pq, order) * denom ** q0 - numer ** q0


def four_variable_residual(pq: Sequence[PolyLike], q0: int, order: int) -> TruncSeries:
    """EGF(A_n(x,y,p,q0)) * (y e^{xz} - x e^{yz})^q0 - ((y-x) e^{pz})^q0."""
    x, y, p = poly_vars("x", "y", "p")
    denom = exp_poly(x, order) * y - exp_poly(y, order) * x
    numer = exp_poly(p, order) * (y - x)
    return egf_of(pq, order) * denom ** q0 - numer ** q0


def carlitz_residual(ab: Sequence[PolyLike], alpha: int, beta: int, order: int) -> TruncSeries:
    """EGF(A_n(x,y|alpha,beta)) * (x e^{yz} - y e^{xz})^s - (x-y)^s e^{(alpha x + beta y) z}."""
    x, y = poly_vars("x", "y")
    s = alpha + beta
    denom = exp_poly(y, order) * x - exp_poly(x, order) * y
    rhs = exp_poly(alpha * x + beta * y, order) * (x - y) ** s
    return egf_of(ab, order) * denom ** s - rhs


def rising_binomial(t: int, k: int) -> Fraction:
    """Return the binomial coefficient C(t - 1 + 1/k, t)."""
    value = Fraction(1)
    for j in range(1, t + 1):
        value *= Fraction(k * (j - 1) + 1, k * j)
    return value


def ogf_operator_check(n: int, k: int, order_x: int, ank: Optional[PolyLike] = None) -> bool:
    """Check both differential-operator forms of A_n^(k) to order x^order_x.

    Applies (kx d/dx + 1)^n and (kx d/dx)^n term-wise to
    sum_t C(t-1+1/k, t) x^t and compares with A_n^(k)(x) and x^n A_n^(k)(1/x)
    times (1-x)^{-n} times the same binomial series.

    Args:
        n: Polynomial index, at least 1.
        k: Positive integer parameter.
        order_x: Truncation order, at least n + 2.
        ank: Replacement for A_n^(k)(x); defaults to the recurrence value.

    Returns:
        True iff both operator identities hold to the given order.
    """
    if n < 1 or k < 1 or order_x < n + 2:
        raise ValueError(f"need n >= 1, k >= 1, order_x >= n + 2 (got {n}, {k}, {order_x})")
    if ank is None:
        ank = families.build_by_recurrence("Ak", n, k)
    ank = as_poly(ank)
    binom = [rising_binomial(t, k) for t in range(order_x + 1)]
    base = TruncSeries(order_x, tuple(Poly.const(b) for b in binom))
    inverse = TruncSeries(order_x, tuple(Poly.const(comb(n + t - 1, t)) for t in range(order_x + 1)))
    tail = inverse * base
    shifted = TruncSeries(order_x, tuple(Poly.const(binom[t] * (k * t + 1) ** n) for t in range(order_x + 1)))
    scaled = TruncSeries(order_x, tuple(Poly.const(binom[t] * (k * t) ** n) for t in range(order_x + 1)))
    first = TruncSeries.from_poly(ank, "x", order_x) * tail
    second = TruncSeries.from_poly(ank.reverse_in("x", n), "x", order_x) * tail
    return shifted == first and scaled == second
