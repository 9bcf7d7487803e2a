"""Exact multivariate polynomials over the integers and rationals.

A ``Poly`` wraps a sparse sympy ``PolyElement`` over ``QQ`` whose ring has
exactly the variables the polynomial uses, sorted by name. Binary operations
lift both operands into the union ring and let sympy do the arithmetic;
results are dropped back to the variables that survive.

The public view of a polynomial is a mapping from monomials to coefficients.
A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
name, every exponent positive; the empty tuple is the constant monomial.
Coefficients come back as Python ints whenever they are integral and
``Fraction`` otherwise.

Example:
    x^2*y + 3  ->  {(("x", 2), ("y", 1)): 1, (): 3}

Variables are plain strings created on first use, so any letter (``x``,
``alpha``, ``x1``, ``I``) can appear without declaring an alphabet.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ, Symbol
from sympy.polys.rings import PolyElement, PolyRing

Coeff = Union[int, Fraction]
Monomial = Tuple[Tuple[str, int], ...]
PolyLike = Union["Poly", int, Fraction]
Names = Tuple[str, ...]


class DegreeOverflowError(ValueError):
    """Raised by reverse_in when a term exceeds the reference degree."""


class InexactDivisionError(ValueError):
    """Raised when a division would leave the polynomial ring."""


@lru_cache(maxsize=None)
def _ring(names: Names) -> PolyRing:
    return PolyRing(tuple(Symbol(name) for name in names), QQ)


def _to_qq(c: Coeff):
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def _from_qq(c) -> Coeff:
    num, den = int(c.numerator), int(c.denominator)
    return num if den == 1 else Fraction(num, den)


def _canonical_monomial(exps: Union[Monomial, Mapping[str, int]]) -> Monomial:
    items = exps.items() if isinstance(exps, Mapping) else exps
    merged: Dict[str, int] = {}
    for v, e in items:
        if not v:
            raise ValueError("variable names must be nonempty")
        if e < 0:
            raise ValueError(f"negative exponent {e} for {v}")
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in merged.items() if e))


def _lift(rep: PolyElement, names: Names, target: Names) -> PolyElement:
    """Re-express ``rep`` over ``target``, a superset of ``names``."""
    ring = _ring(target)
    if names == target:
        return rep
    slots = [target.index(name) for name in names]
    width = len(target)
    out = ring.zero
    for mono, c in rep.items():
        exps = [0] * width
        for slot, e in zip(slots, mono):
            exps[slot] = e
        out[tuple(exps)] = c
    return out


def _coeff_text(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def _mono_text(mono: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)


class Poly:
    """Immutable sparse polynomial with exact coefficients."""

    __slots__ = ("_rep", "_names", "_terms", "_hash")

    def __init__(self, terms: Optional[Mapping] = None):
        """Build a polynomial from a mapping of monomials to coefficients.

        Args:
            terms: Mapping whose keys are monomials (tuples of
                ``(name, exponent)`` pairs or ``{name: exponent}`` dicts) and
                whose values are ints or Fractions.
        """
        clean: Dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            key = _canonical_monomial(mono)
            clean[key] = clean.get(key, 0) + Fraction(c)
        other = Poly._from_dict(clean)
        self._rep, self._names = other._rep, other._names
        self._terms = None
        self._hash = None

    @classmethod
    def _wrap(cls, rep: PolyElement, names: Names) -> "Poly":
        """Adopt a sympy element, dropping generators it no longer uses."""
        used = [i for i in range(len(names)) if any(mono[i] for mono in rep)]
        if len(used) < len(names):
            names = tuple(names[i] for i in used)
            ring = _ring(names)
            out = ring.zero
            for mono, c in rep.items():
                out[tuple(mono[i] for i in used)] = c
            rep = out
        obj = object.__new__(cls)
        obj._rep = rep
        obj._names = names
        obj._terms = None
        obj._hash = None
        return obj

    @classmethod
    def _from_dict(cls, terms: Mapping[Monomial, Coeff]) -> "Poly":
        """Build from canonical monomials."""
        names = tuple(sorted({v for mono in terms for v, _ in mono}))
        slot = {name: i for i, name in enumerate(names)}
        ring = _ring(names)
        raw = {}
        for mono, c in terms.items():
            exps = [0] * len(names)
            for v, e in mono:
                exps[slot[v]] = e
            raw[tuple(exps)] = _to_qq(c)
        return cls._wrap(ring.from_dict(raw), names)

    # -- constructors ---------------------------------------------------

    @classmethod
    def const(cls, value: Coeff) -> "Poly":
        return cls._from_dict({(): value})

    @classmethod
    def var(cls, name: str) -> "Poly":
        if not name:
            raise ValueError("variable names must be nonempty")
        return cls._from_dict({((name, 1),): 1})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: Coeff = 1) -> "Poly":
        return cls._from_dict({_canonical_monomial(exps): coeff})

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[PolyLike], var: str) -> "Poly":
        """Return sum(coeffs[i] * var^i)."""
        v = cls.var(var)
        return poly_sum(_coerce(c) * v ** i for i, c in enumerate(coeffs))

    # -- sympy interop ----------------------------------------------------

    @property
    def rep(self) -> PolyElement:
        """The underlying sympy element over ``QQ[variables()]``."""
        return self._rep

    def as_expr(self):
        """Return the polynomial as a sympy expression."""
        return self._rep.as_expr()

    # -- inspection -----------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Coeff]:
        if self._terms is None:
            names = self._names
            self._terms = {
                tuple((names[i], e) for i, e in enumerate(mono) if e): _from_qq(c)
                for mono, c in self._rep.items()
            }
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._rep)

    def __bool__(self) -> bool:
        return bool(self._rep)

    def variables(self) -> Tuple[str, ...]:
        return self._names

    def degree(self, v: Optional[str] = None) -> int:
        """Total degree, or the degree in ``v``; the zero polynomial has degree -1."""
        if not self._rep:
            return -1
        if v is None:
            return max(sum(mono) for mono in self._rep.itermonoms())
        if v not in self._names:
            return 0
        return int(self._rep.degree(self._names.index(v)))

    def is_constant(self) -> bool:
        return not self._names

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return _from_qq(self._rep.get((), QQ.zero))

    def coefficients(self, v: str) -> List["Poly"]:
        """Coefficients of v^0 .. v^deg as polynomials in the other variables."""
        return [self.coeff_of(v, e) for e in range(self.degree(v) + 1)]

    # -- ring operations ------------------------------------------------

    def _unify(self, other: "Poly") -> Tuple[PolyElement, PolyElement, Names]:
        if self._names == other._names:
            return self._rep, other._rep, self._names
        names = tuple(sorted(set(self._names) | set(other._names)))
        return (
            _lift(self._rep, self._names, names),
            _lift(other._rep, other._names, names),
            names,
        )

    def __add__(self, other: PolyLike) -> "Poly":
        other = _coerce(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        a, b, names = self._unify(other)
        return Poly._wrap(a + b, names)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._wrap(-self._rep, self._names)

    def __sub__(self, other: PolyLike) -> "Poly":
        other = _coerce(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        a, b, names = self._unify(other)
        return Poly._wrap(a - b, names)

    def __rsub__(self, other: PolyLike) -> "Poly":
        other = _coerce(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: PolyLike) -> "Poly":
        other = _coerce(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        a, b, names = self._unify(other)
        return Poly._wrap(a * b, names)

    __rmul__ = __mul__

    def scale(self, c: Coeff) -> "Poly":
        if c == 0:
            return ZERO
        if c == 1:
            return self
        return Poly._wrap(self._rep.mul_ground(_to_qq(c)), self._names)

    def __pow__(self, e: int) -> "Poly":
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {e!r}")
        if e == 0:
            return ONE
        return Poly._wrap(self._rep ** e, self._names)

    def __truediv__(self, other: PolyLike) -> "Poly":
        other = _coerce(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        if not other.is_constant() or not other:
            raise InexactDivisionError(f"cannot divide by {other}")
        return self.scale(Fraction(1) / Fraction(other.constant_value()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Poly.const(other)
        if isinstance(other, Poly):
            return self._names == other._names and self._rep == other._rep
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus and substitution ---------------------------------------

    def partial_derive(self, v: str) -> "Poly":
        if v not in self._names:
            return ZERO
        gen = self._rep.ring.gens[self._names.index(v)]
        return Poly._wrap(self._rep.diff(gen), self._names)

    def substitute(self, bindings: Mapping[str, PolyLike]) -> "Poly":
        """Replace variables simultaneously; unbound variables stay put."""
        bound = {v: _coerce(p) for v, p in bindings.items() if v in self._names}
        if not bound:
            return self
        names = set(self._names)
        for image in bound.values():
            names.update(image._names)
        names = tuple(sorted(names))
        rep = _lift(self._rep, self._names, names)
        gens = rep.ring.gens
        replacements = [
            (gens[names.index(v)], _lift(image._rep, image._names, names))
            for v, image in sorted(bound.items())
        ]
        return Poly._wrap(rep.compose(replacements), names)

    def reverse_in(self, v: str, n: int) -> "Poly":
        """Return v^n * p(v -> 1/v)."""
        names = tuple(sorted(set(self._names) | {v}))
        rep = _lift(self._rep, self._names, names)
        i = names.index(v)
        out = rep.ring.zero
        for mono, c in rep.items():
            if mono[i] > n:
                raise DegreeOverflowError(
                    f"degree {mono[i]} in {v} exceeds reference degree {n}"
                )
            out[mono[:i] + (n - mono[i],) + mono[i + 1:]] = c
        return Poly._wrap(out, names)

    def coeff_of(self, v: str, e: int) -> "Poly":
        if e < 0:
            raise ValueError(f"exponent must be nonnegative, got {e}")
        if v not in self._names:
            return self if e == 0 else ZERO
        return Poly._wrap(self._rep.coeff_wrt(self._names.index(v), e), self._names)

    def evaluate(self, point: Mapping[str, PolyLike]) -> Coeff:
        """Substitute numbers for every variable and return the scalar."""
        return self.substitute(point).constant_value()

    # -- text and JSON ----------------------------------------------------

    def _sorted_terms(self) -> List[Tuple[Monomial, Coeff]]:
        names = self._names

        def key(item: Tuple[Monomial, Coeff]):
            exps = dict(item[0])
            return (sum(exps.values()), tuple(exps.get(v, 0) for v in names))

        return sorted(self.terms.items(), key=key)

    def to_text(self) -> str:
        if not self._rep:
            return "0"
        pieces = []
        for mono, c in self._sorted_terms():
            negative = c < 0
            mag = -c if negative else c
            body = _mono_text(mono)
            if not body:
                piece = _coeff_text(mag)
            elif mag == 1:
                piece = body
            else:
                piece = f"{_coeff_text(mag)}*{body}"
            pieces.append((negative, piece))
        negative, head = pieces[0]
        text = f"-{head}" if negative else head
        for negative, piece in pieces[1:]:
            text += f" - {piece}" if negative else f" + {piece}"
        return text

    __str__ = to_text

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r})"

    def to_json(self) -> dict:
        return {
            "vars": list(self._names),
            "terms": [
                {"coeff": _coeff_text(c), "exps": dict(mono)}
                for mono, c in self._sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Poly":
        return cls({
            tuple(term["exps"].items()): Fraction(term["coeff"])
            for term in data["terms"]
        })

    @classmethod
    def from_expr(cls, expr) -> "Poly":
        """Convert a sympy polynomial expression with rational coefficients."""
        names = tuple(sorted(str(s) for s in expr.free_symbols))
        ring = _ring(names)
        return cls._wrap(ring.from_expr(expr), names)


def _coerce(value, strict: bool = True):
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Poly.const(value)
    if strict:
        raise TypeError(f"cannot use {type(value).__name__} as a polynomial")
    return NotImplemented


ZERO = Poly._from_dict({})
ONE = Poly._from_dict({(): 1})


def poly_vars(*names: str) -> Tuple[Poly, ...]:
    """Return one variable polynomial per name, e.g. ``x, y = poly_vars("x", "y")``."""
    return tuple(Poly.var(name) for name in names)


def as_poly(value: PolyLike) -> Poly:
    return _coerce(value)


def arith(p: PolyLike, q: PolyLike, op: str) -> Poly:
    """Apply one of ``add``, ``sub``, ``mul`` exactly."""
    p, q = _coerce(p), _coerce(q)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def power(p: PolyLike, e: int) -> Poly:
    return _coerce(p) ** e


def partial_derive(p: PolyLike, v: str) -> Poly:
    return _coerce(p).partial_derive(v)


def substitute(p: PolyLike, bindings: Mapping[str, PolyLike]) -> Poly:
    return _coerce(p).substitute(bindings)


def reverse_in(p: PolyLike, v: str, n: int) -> Poly:
    return _coerce(p).reverse_in(v, n)


def coeff_of(p: PolyLike, v: str, e: int) -> Poly:
    return _coerce(p).coeff_of(v, e)


def poly_sum(items: Iterable[PolyLike]) -> Poly:
    """Sum many polynomials in one sympy ring, accumulating in place."""
    polys = [_coerce(item) for item in items]
    names = tuple(sorted({v for p in polys for v in p._names}))
    total = _ring(names).zero
    zero = QQ.zero
    for p in polys:
        for mono, c in _lift(p._rep, p._names, names).items():
            c = total.get(mono, zero) + c
            if c:
                total[mono] = c
            else:
                del total[mono]
    return Poly._wrap(total, names)
