"""Context-free grammars and their formal derivative.

A grammar maps letters to polynomials. Its formal derivative D_G acts on a
polynomial by the Leibniz rule, D_G(p) = sum_v dp/dv * rule(v); letters
without a rule are constants. Iterating D_G from a seed produces statistic
enumerators, e.g. D^n(a) = b^{n+1} A_n(a/b) for the Dumont grammar.

Grammars are written in a small line-based DSL::

    # comment
    a -> a*b
    b -> a*b

Right-hand sides accept integer coefficients, ``+ - * / ^``, parentheses and
multi-character identifiers. Division is only by nonzero constants, which is
how rational coefficients are written (``3/2*x``).
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Tuple, Union

from stirling_lab.exactpoly import (
    InexactDivisionError,
    Poly,
    PolyLike,
    as_poly,
    poly_sum,
)

logger = logging.getLogger(__name__)


class GrammarError(ValueError):
    """Base class for grammar source errors."""


class GrammarSyntaxError(GrammarError):
    """Malformed grammar or polynomial text, tagged with its 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DuplicateRuleError(GrammarError):
    """Two rules for the same letter."""

    def __init__(self, letter: str, line: int, first_line: int):
        super().__init__(
            f"line {line}: duplicate rule for {letter!r} (first defined on line {first_line})"
        )
        self.letter = letter
        self.line = line


class _Token(NamedTuple):
    kind: str
    text: str
    column: int


_TOKEN_RE = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<number>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<arrow>->)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(text: str, line: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if match.lastgroup != "space":
            tokens.append(_Token(match.lastgroup, match.group(), pos + 1))
        pos = match.end()
    return tokens


class _PolyParser:
    """Recursive-descent parser over one line of tokens."""

    def __init__(self, tokens: List[_Token], line: int):
        self.tokens = tokens
        self.line = line
        self.pos = 0

    def peek(self, text: Optional[str] = None) -> Optional[_Token]:
        if self.pos >= len(self.tokens):
            return None
        token = self.tokens[self.pos]
        if text is not None and token.text != text:
            return None
        return token

    def accept(self, text: str) -> Optional[_Token]:
        token = self.peek(text)
        if token is not None and token.kind in ("op", "arrow"):
            self.pos += 1
            return token
        return None

    def fail(self, message: str, token: Optional[_Token]) -> None:
        column = token.column if token is not None else 1
        raise GrammarSyntaxError(message, self.line, column)

    def parse(self) -> Poly:
        if not self.tokens:
            self.fail("empty polynomial", None)
        value = self._expression()
        leftover = self.peek()
        if leftover is not None:
            self.fail(f"unexpected {leftover.text!r}", leftover)
        return value

    # <EXPRESSION> -> <TERM> { ( '+' | '-' ) <TERM> }*
    def _expression(self) -> Poly:
        value = self._term()
        while True:
            if self.accept("+"):
                value = value + self._term()
            elif self.accept("-"):
                value = value - self._term()
            else:
                return value

    # <TERM> -> <UNARY> { ( '*' | '/' ) <UNARY> }*
    def _term(self) -> Poly:
        value = self._unary()
        while True:
            if self.accept("*"):
                value = value * self._unary()
            elif self.peek("/"):
                token = self.tokens[self.pos]
                self.pos += 1
                divisor = self._unary()
                try:
                    value = value / divisor
                except InexactDivisionError:
                    self.fail(f"cannot divide by {divisor}", token)
            else:
                return value

    # <UNARY> -> ( '-' | '+' ) <UNARY> | <POWER>
    def _unary(self) -> Poly:
        if self.accept("-"):
            return -self._unary()
        if self.accept("+"):
            return self._unary()
        return self._power()

    # <POWER> -> <ATOM> [ '^' INTEGER ]
    def _power(self) -> Poly:
        base = self._atom()
        caret = self.accept("^")
        if caret is None:
            return base
        token = self.peek()
        if token is None or token.kind != "number":
            self.fail("exponent must be a nonnegative integer", token or caret)
        self.pos += 1
        return base ** int(token.text)

    # <ATOM> -> INTEGER | NAME | '(' <EXPRESSION> ')'
    def _atom(self) -> Poly:
        token = self.peek()
        if token is None:
            previous = self.tokens[self.pos - 1]
            self.fail(f"expected operand after {previous.text!r}", previous)
        if token.kind == "number":
            self.pos += 1
            return Poly.const(int(token.text))
        if token.kind == "name":
            self.pos += 1
            return Poly.var(token.text)
        if self.accept("("):
            value = self._expression()
            if self.accept(")") is None:
                self.fail("missing ')'", self.peek() or self.tokens[-1])
            return value
        self.fail(f"unexpected {token.text!r}", token)


def _strip_comment(text: str) -> str:
    return text.split("#", 1)[0]


def parse_poly(text: str) -> Poly:
    """Parse a single polynomial, e.g. ``"1 + 10*x + 4*x^2"``."""
    return _PolyParser(_tokenize(_strip_comment(text), 1), 1).parse()


def parse_bindings(text: str) -> Dict[str, Poly]:
    """Parse ``"a=x, b=1"`` into substitution bindings."""
    bindings: Dict[str, Poly] = {}
    for chunk in filter(None, (part.strip() for part in text.split(","))):
        letter, sep, value = chunk.partition("=")
        letter = letter.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", letter):
            raise GrammarSyntaxError(f"bad binding {chunk!r}", 1, text.find(chunk) + 1)
        bindings[letter] = parse_poly(value)
    return bindings


@dataclass(frozen=True)
class Grammar:
    """Substitution rules letter -> polynomial."""

    rules: Mapping[str, Poly]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "rules", MappingProxyType({v: as_poly(p) for v, p in self.rules.items()})
        )

    @property
    def letters(self) -> Tuple[str, ...]:
        return tuple(sorted(self.rules))

    def to_text(self) -> str:
        return "\n".join(f"{v} -> {self.rules[v]}" for v in self.letters)

    def __repr__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"Grammar({label}{', '.join(f'{v}->{self.rules[v]}' for v in self.letters)})"


def parse_grammar(src: str, name: str = "") -> Grammar:
    """Parse DSL text into a Grammar.

    Raises:
        GrammarSyntaxError: malformed line, with line and column.
        DuplicateRuleError: a letter defined twice.
    """
    rules: Dict[str, Poly] = {}
    first_seen: Dict[str, int] = {}
    for line_no, raw in enumerate(src.splitlines(), start=1):
        tokens = _tokenize(_strip_comment(raw), line_no)
        if not tokens:
            continue
        head = tokens[0]
        if head.kind != "name":
            raise GrammarSyntaxError(f"expected a letter, got {head.text!r}", line_no, head.column)
        if len(tokens) < 2 or tokens[1].kind != "arrow":
            where = tokens[1] if len(tokens) > 1 else head
            raise GrammarSyntaxError("expected '->' after the letter", line_no, where.column)
        if len(tokens) == 2:
            raise GrammarSyntaxError("missing right-hand side", line_no, tokens[1].column)
        if head.text in rules:
            raise DuplicateRuleError(head.text, line_no, first_seen[head.text])
        rules[head.text] = _PolyParser(tokens[2:], line_no).parse()
        first_seen[head.text] = line_no
    return Grammar(rules, name=name)


def load_grammar(path: Union[str, Path]) -> Grammar:
    path = Path(path)
    return parse_grammar(path.read_text(encoding="utf-8"), name=path.stem)


def derive(g: Grammar, p: PolyLike) -> Poly:
    """Apply D_G once."""
    p = as_poly(p)
    present = set(p.variables())
    return poly_sum(
        p.partial_derive(v) * rule for v, rule in g.rules.items() if v in present
    )


def derive_n(g: Grammar, p: PolyLike, n: int) -> Poly:
    if n < 0:
        raise ValueError(f"number of steps must be nonnegative, got {n}")
    p = as_poly(p)
    for step in range(n):
        p = derive(g, p)
        logger.debug("%s step %d: %d terms", g.name or "grammar", step + 1, len(p))
    return p


def derive_then_substitute(
    g: Grammar, p: PolyLike, n: int, bindings: Mapping[str, PolyLike]
) -> Poly:
    return derive_n(g, p, n).substitute(bindings)


def alias_mismatches(
    base: Grammar, definitions: Mapping[str, PolyLike], alias: Grammar
) -> Dict[str, Tuple[Poly, Poly]]:
    """Letters of ``alias`` whose rule disagrees with the base grammar.

    For every alias letter L, D_base(def(L)) must equal rule_alias(L) with the
    definitions substituted. Letters without a definition stand for themselves.
    """
    bound = {v: as_poly(d) for v, d in definitions.items()}
    bad = {}
    for letter, rule in alias.rules.items():
        lhs = derive(base, bound.get(letter, Poly.var(letter)))
        rhs = rule.substitute(bound)
        if lhs != rhs:
            bad[letter] = (lhs, rhs)
    return bad


def verify_alias(base: Grammar, definitions: Mapping[str, PolyLike], alias: Grammar) -> bool:
    return not alias_mismatches(base, definitions, alias)


# Named grammars ---------------------------------------------------------

def dumont() -> Grammar:
    """D^n(a) = D^n(b) = b^{n+1} A_n(a/b)."""
    return parse_grammar("a -> a*b\nb -> a*b", name="dumont")


def ank(k: int) -> Grammar:
    """D^n(a) = a b^{kn} A_n^(k)(a^k / b^k)."""
    return parse_grammar(f"a -> a*b^{k}\nb -> a^{k}*b", name=f"ank_k{k}")


def ank_symbolic() -> Grammar:
    """D^n(a) at a=1, beta=1, alpha=x equals A_n^(k)(x); k stays symbolic."""
    return parse_grammar(
        "a -> a*beta\nb -> alpha*b\nalpha -> k*alpha*beta\nbeta -> k*alpha*beta",
        name="ank_symbolic",
    )


def ank_symbolic_alias() -> Grammar:
    return parse_grammar(
        "I -> I*w\nw -> (k + k^2)*u\nu -> k*u*v\nv -> 2*k*u",
        name="ank_symbolic_alias",
    )


def cycle() -> Grammar:
    """D^n(I) = I sum over S_n of x^exc y^drop p^fix q^cyc."""
    return parse_grammar("I -> I*p*q\np -> x*y\nx -> x*y\ny -> x*y", name="cycle")


def keylemma() -> Grammar:
    """D^n(I) = I sum over S_n of x^exc y^drop p^fix q^(n-cyc)."""
    return parse_grammar(
        "I -> I*p\np -> q*x*y\nx -> q*x*y\ny -> q*x*y", name="keylemma"
    )


def ji() -> Grammar:
    """D^n(ab) = ab sum over S_{n+1} of x^asc* y^des* alpha^(lrmax-1) beta^(rlmax-1)."""
    return parse_grammar(
        "a -> a*alpha*x\nb -> b*beta*y\nx -> x*y\ny -> x*y", name="ji"
    )


def ji_alias() -> Grammar:
    return parse_grammar(
        "I -> I*J\nJ -> (alpha + beta)*x*y\nx -> x*y\ny -> x*y", name="ji_alias"
    )


def proper_plateau(k: int = 2) -> Grammar:
    """D^n(I) = I sum over Q_n^(k) of x^implap y^plap z^(n-lap)."""
    suffix = "" if k == 2 else f"_k{k}"
    return parse_grammar(
        f"I -> I*y\ny -> {k}*x*z\nx -> {k}*x*z\nz -> {k}*x*z",
        name=f"proper_plateau{suffix}",
    )


def lap_ap() -> Grammar:
    """D^n(I) at I=1, J=x, x=xy, z=1 gives sum over Q_n of x^lap y^ap."""
    return parse_grammar(
        "I -> J*z\nJ -> J*z^2 + I*x*z\nx -> 2*x*z^2\nz -> x*z", name="lap_ap"
    )


def lap_ap_alias() -> Grammar:
    return parse_grammar("u -> 2*u*v\nv -> 4*u", name="lap_ap_alias")


def lrmin_plateau(k: int = 2) -> Grammar:
    """D^n(I) = I sum over Q_n^(k) of x^ap2 q^lrmin y^(kn - 2 ap2)."""
    suffix = "" if k == 2 else f"_k{k}"
    return parse_grammar(
        f"I -> q*I*y^{k}\nx -> 2*x*y^{k}\ny -> x*y^{k - 1}",
        name=f"lrmin_plateau{suffix}",
    )


def lrmin_plateau_alias() -> Grammar:
    return parse_grammar(
        "A -> A*(q*v + (2 - q)*x)\nx -> 2*u\nu -> 2*u*v\nv -> 4*u",
        name="lrmin_plateau_alias",
    )


def g3() -> Grammar:
    """D^n(IJ) = IJ sum over S_{n+1} of x1^impdes x2^pdes y1^impasc y2^pasc p^(lrmin-1) q^(rlmin-1)."""
    return parse_grammar(
        "I -> I*p*x2\nJ -> J*q*y2\nx1 -> x1*y1\nx2 -> x1*y1\ny1 -> x1*y1\ny2 -> x1*y1",
        name="g3",
    )


def g3_alias() -> Grammar:
    return parse_grammar(
        "a -> a*b\nb -> (p + q)*x1*y1\nx1 -> x1*y1\ny1 -> x1*y1", name="g3_alias"
    )


@dataclass(frozen=True)
class AliasSystem:
    """A base grammar, alias definitions over its letters, and the alias grammar."""

    name: str
    base: Callable[[], Grammar]
    definitions: Mapping[str, str]
    alias: Callable[[], Grammar]

    def mismatches(self) -> Dict[str, Tuple[Poly, Poly]]:
        defs = {v: parse_poly(text) for v, text in self.definitions.items()}
        return alias_mismatches(self.base(), defs, self.alias())


ALIAS_SYSTEMS: Tuple[AliasSystem, ...] = (
    AliasSystem(
        "ank_symbolic",
        ank_symbolic,
        {"I": "a*beta", "w": "beta + k*alpha", "u": "alpha*beta", "v": "alpha + beta"},
        ank_symbolic_alias,
    ),
    AliasSystem("ji", ji, {"I": "a*b", "J": "alpha*x + beta*y"}, ji_alias),
    AliasSystem("lap_ap", lap_ap, {"u": "x*z^2", "v": "x + z^2"}, lap_ap_alias),
    AliasSystem(
        "lrmin_plateau",
        lrmin_plateau,
        {"A": "I*y^2", "u": "x*y^2", "v": "x + y^2"},
        lrmin_plateau_alias,
    ),
    AliasSystem("g3", g3, {"a": "I*J", "b": "p*x2 + q*y2"}, g3_alias),
)

# File stem under grammars/ -> constructor.
GRAMMAR_FILES: Dict[str, Callable[[], Grammar]] = {
    "dumont": dumont,
    "ank_k2": lambda: ank(2),
    "ank_symbolic": ank_symbolic,
    "ank_symbolic_alias": ank_symbolic_alias,
    "cycle": cycle,
    "keylemma": keylemma,
    "ji": ji,
    "ji_alias": ji_alias,
    "proper_plateau": proper_plateau,
    "proper_plateau_k3": lambda: proper_plateau(3),
    "lap_ap": lap_ap,
    "lap_ap_alias": lap_ap_alias,
    "lrmin_plateau": lrmin_plateau,
    "lrmin_plateau_alias": lrmin_plateau_alias,
    "g3": g3,
    "g3_alias": g3_alias,
}
