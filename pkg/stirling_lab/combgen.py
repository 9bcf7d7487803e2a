"""Exhaustive generators for permutations, signed permutations and
k-Stirling permutations, plus standard cycle decomposition.

All generators are pure functions of their arguments and yield objects in a
fixed order, so repeated runs produce identical streams.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import factorial, prod
from typing import Iterator, List, Optional, Sequence, Tuple

from stirling_lab.config import GuardConfig, get_config

logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]
SignedPerm = Tuple[int, ...]


class GuardExceeded(ValueError):
    """Raised when an enumeration would exceed its configured size bound."""

    def __init__(self, what: str, count: int, limit: int, flag: str):
        self.count = count
        self.limit = limit
        self.flag = flag
        super().__init__(
            f"{what} would produce {count} objects (limit {limit}); raise the bound with {flag}"
        )


@dataclass(frozen=True, slots=True)
class StirlingWord:
    """A k-Stirling permutation of the multiset {1^k, ..., n^k}."""

    word: Tuple[int, ...]
    k: int

    @property
    def n(self) -> int:
        return len(self.word) // self.k

    def __str__(self) -> str:
        return "".join(str(v) for v in self.word) if self.n < 10 else " ".join(map(str, self.word))


@dataclass(frozen=True, slots=True)
class CycleForm:
    """Cycles with smallest entry first, ordered by their first entries."""

    cycles: Tuple[Tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.cycles)

    def __str__(self) -> str:
        return "".join("(" + ",".join(map(str, c)) + ")" for c in self.cycles)


def _guards(guards: Optional[GuardConfig]) -> GuardConfig:
    return guards if guards is not None else get_config().guards


def stirling_count(n: int, k: int) -> int:
    """Number of k-Stirling permutations of order n."""
    return prod(k * (m - 1) + 1 for m in range(1, n + 1))


def gen_perms(n: int, guards: Optional[GuardConfig] = None) -> Iterator[Perm]:
    """Yield all permutations of [n] in lexicographic order."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    limit = _guards(guards).max_perm_n
    if n > limit:
        raise GuardExceeded(f"gen_perms({n})", factorial(n), factorial(limit), "--max-perm-n")
    logger.debug("enumerating %d permutations of [%d]", factorial(n), n)
    yield from itertools.permutations(range(1, n + 1))


def gen_signed_perms(n: int, guards: Optional[GuardConfig] = None) -> Iterator[SignedPerm]:
    """Yield all 2^n n! signed permutations: positive signs first, then by pattern."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    limit = _guards(guards).max_signed_n
    if n > limit:
        raise GuardExceeded(
            f"gen_signed_perms({n})", 2 ** n * factorial(n), 2 ** limit * factorial(limit), "--max-signed-n"
        )
    logger.debug("enumerating %d signed permutations of [%d]", 2 ** n * factorial(n), n)
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            yield tuple(s * v for s, v in zip(signs, perm))


def gen_stirling(n: int, k: int, guards: Optional[GuardConfig] = None) -> Iterator[StirlingWord]:
    """Yield every k-Stirling permutation of order n.

    Words are built by inserting the block m^k into each of the k(m-1)+1 gaps
    of a word on [m-1], gaps taken left to right, depth first.

    Args:
        n: Number of distinct letters.
        k: Multiplicity of each letter, at least 1.
        guards: Size bounds; defaults to the active configuration.

    Returns:
        Iterator over StirlingWord objects, each exactly once.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    count = stirling_count(n, k)
    limit = _guards(guards).max_stirling_count
    if count > limit:
        raise GuardExceeded(f"gen_stirling({n}, {k})", count, limit, "--max-stirling-count")
    logger.debug("enumerating %d %d-Stirling permutations of order %d", count, k, n)

    def grow(word: Tuple[int, ...], m: int) -> Iterator[Tuple[int, ...]]:
        if m > n:
            yield word
            return
        block = (m,) * k
        for gap in range(len(word) + 1):
            yield from grow(word[:gap] + block + word[gap:], m + 1)

    for word in grow((), 1):
        yield StirlingWord(word, k)


def is_stirling(word: Sequence[int], k: int) -> bool:
    """Check the Stirling condition directly from its definition.

    Each of 1..n must occur exactly k times, and every entry between two
    occurrences of a value v must be at least v.
    """
    if k < 1 or len(word) % k:
        return False
    n = len(word) // k
    if sorted(word) != [v for v in range(1, n + 1) for _ in range(k)]:
        return False
    for v in range(1, n + 1):
        first = word.index(v)
        last = len(word) - 1 - word[::-1].index(v)
        if any(word[s] < v for s in range(first, last + 1)):
            return False
    return True


def cycle_form(p: Sequence[int]) -> CycleForm:
    """Standard cycle decomposition of a permutation in one-line notation."""
    n = len(p)
    seen = [False] * (n + 1)
    cycles: List[Tuple[int, ...]] = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cycle = []
        v = start
        while not seen[v]:
            seen[v] = True
            cycle.append(v)
            v = p[v - 1]
        cycles.append(tuple(cycle))
    return CycleForm(tuple(cycles))


def from_cycles(cycles: Sequence[Sequence[int]]) -> Perm:
    """Inverse of cycle_form: one-line notation of a product of disjoint cycles."""
    n = sum(len(c) for c in cycles)
    image = [0] * (n + 1)
    for c in cycles:
        for a, b in zip(c, tuple(c[1:]) + (c[0],)):
            image[a] = b
    if sorted(image[1:]) != list(range(1, n + 1)):
        raise ValueError(f"cycles {cycles!r} do not form a permutation of [{n}]")
    return tuple(image[1:])
