"""Permutation, signed-permutation and Stirling-word statistics.

Boundary conventions: a permutation is padded as pi(0) = pi(n+1) = 0 and a
Stirling word as sigma_0 = sigma_{kn+1} = 0. Statistics are evaluated once per
object into frozen records; whole generator streams are collected into
pandas frames whose grouped counts give distributions.
"""

from __future__ import annotations

import itertools
import logging
from contextlib import contextmanager
from dataclasses import astuple, dataclass, fields, replace
from functools import lru_cache
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple

import pandas as pd

from stirling_lab.combgen import (
    StirlingWord,
    cycle_form,
    gen_perms,
    gen_signed_perms,
    gen_stirling,
)
from stirling_lab.config import GuardConfig, get_config
from stirling_lab.exactpoly import Poly, PolyLike, ZERO, as_poly

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class PermStatRecord:
    des: int
    asc: int
    des_star: int
    asc_star: int
    exc: int
    drop: int
    fix: int
    cyc: int
    lrmin: int
    rlmin: int
    lrmax: int
    rlmax: int
    pk: int
    val: int
    dasc: int
    ddes: int
    pasc: int
    pdes: int
    impasc: int
    impdes: int
    pasc_hat: int
    impasc_hat: int


@dataclass(frozen=True, slots=True)
class StirlingStatRecord:
    ap: int
    lap: int
    ap2: int
    plap: int
    implap: int
    lrmin: int
    rlmin: int


@dataclass(frozen=True, slots=True)
class SignedStatRecord:
    des_B: int


PERM_FIELDS = tuple(f.name for f in fields(PermStatRecord))
STIRLING_FIELDS = tuple(f.name for f in fields(StirlingStatRecord))
SIGNED_FIELDS = tuple(f.name for f in fields(SignedStatRecord))

FIELDS_BY_KIND: Dict[str, Tuple[str, ...]] = {
    "perm": PERM_FIELDS,
    "stirling": STIRLING_FIELDS,
    "signed": SIGNED_FIELDS,
}


# Mutation hook ----------------------------------------------------------
# Test-only: perturb one statistic on every record produced inside a
# ``mutated`` block. Cached frames are keyed by the active token.

_mutations: Dict[str, Callable[[int], int]] = {}
_token_counter = itertools.count(1)
_token = 0


def mutation_token() -> int:
    """0 when no mutation is active, otherwise a token unique to the block."""
    return _token


@contextmanager
def mutated(field: str, fn: Callable[[int], int] = lambda v: v + 1) -> Iterator[int]:
    """Apply ``fn`` to ``field`` of every record computed inside the block."""
    global _token
    if not any(field in names for names in FIELDS_BY_KIND.values()):
        raise ValueError(f"unknown statistic {field!r}")
    saved_token, saved = _token, _mutations.get(field)
    _mutations[field] = fn
    _token = next(_token_counter)
    logger.info("statistic %s mutated (token %d)", field, _token)
    try:
        yield _token
    finally:
        if saved is None:
            del _mutations[field]
        else:
            _mutations[field] = saved
        _token = saved_token


def _apply_mutations(record):
    if not _mutations:
        return record
    names = {f.name for f in fields(record)}
    changes = {f: fn(getattr(record, f)) for f, fn in _mutations.items() if f in names}
    return replace(record, **changes) if changes else record


# Single objects ---------------------------------------------------------

def _left_to_right_records(values: Sequence[int], better: Callable[[int, int], bool]) -> int:
    count = 0
    best = None
    for v in values:
        if best is None or better(v, best):
            count += 1
            best = v
    return count


def perm_stats(p: Sequence[int]) -> PermStatRecord:
    """Evaluate every permutation statistic of ``p`` (one-line notation)."""
    n = len(p)
    ext = (0,) + tuple(p) + (0,)
    pos = [0] * (n + 1)
    for i, v in enumerate(p, start=1):
        pos[v] = i
    # Largest / smallest position among values below v.
    below_last = [0] * (n + 2)
    below_first = [n + 1] * (n + 2)
    for v in range(2, n + 1):
        below_last[v] = max(below_last[v - 1], pos[v - 1])
        below_first[v] = min(below_first[v - 1], pos[v - 1])

    asc = des = asc_star = des_star = 0
    pk = val = dasc = ddes = 0
    pasc = pdes = pasc_hat = 0
    for i in range(1, n + 1):
        prev, cur, nxt = ext[i - 1], ext[i], ext[i + 1]
        up, down = prev < cur, cur > nxt
        if up:
            asc += 1
            if i >= 2:
                asc_star += 1
            if below_last[cur] < i:
                pasc_hat += 1
                if i >= 2:
                    pasc += 1
        if down:
            des += 1
            if i <= n - 1:
                des_star += 1
                if below_first[cur] > i:
                    pdes += 1
        if up and down:
            pk += 1
        elif up:
            dasc += 1
        elif down:
            ddes += 1
        else:
            val += 1

    exc = sum(1 for i, v in enumerate(p, start=1) if v > i)
    drop = sum(1 for i, v in enumerate(p, start=1) if v < i)
    fix = n - exc - drop
    rev = tuple(reversed(p))
    record = PermStatRecord(
        des=des,
        asc=asc,
        des_star=des_star,
        asc_star=asc_star,
        exc=exc,
        drop=drop,
        fix=fix,
        cyc=len(cycle_form(p)),
        lrmin=_left_to_right_records(p, lambda v, b: v < b),
        rlmin=_left_to_right_records(rev, lambda v, b: v < b),
        lrmax=_left_to_right_records(p, lambda v, b: v > b),
        rlmax=_left_to_right_records(rev, lambda v, b: v > b),
        pk=pk,
        val=val,
        dasc=dasc,
        ddes=ddes,
        pasc=pasc,
        pdes=pdes,
        impasc=asc_star - pasc,
        impdes=des_star - pdes,
        pasc_hat=pasc_hat,
        impasc_hat=asc - pasc_hat,
    )
    return _apply_mutations(record)


def stirling_stats(w: StirlingWord) -> StirlingStatRecord:
    """Evaluate the ascent-plateau family of statistics on a Stirling word."""
    word, k = w.word, w.k
    length = len(word)
    ext = (0,) + word + (0,)
    last = {}
    for i, v in enumerate(word, start=1):
        last[v] = i
    n = len(last)
    below_last = [0] * (n + 2)
    for v in range(2, n + 1):
        below_last[v] = max(below_last[v - 1], last[v - 1])

    lap = ap = plap = ap2 = 0
    for i in range(1, length - k + 2):
        cur = ext[i]
        if ext[i - 1] < cur and all(ext[i + t] == cur for t in range(1, k)):
            lap += 1
            if i >= 2:
                ap += 1
            if below_last[cur] < i:
                plap += 1
    for i in range(2, length):
        if ext[i - 1] < ext[i] == ext[i + 1]:
            ap2 += 1

    record = StirlingStatRecord(
        ap=ap,
        lap=lap,
        ap2=ap2,
        plap=plap,
        implap=lap - plap,
        lrmin=_left_to_right_records(word, lambda v, b: v < b),
        rlmin=_left_to_right_records(tuple(reversed(word)), lambda v, b: v < b),
    )
    return _apply_mutations(record)


def signed_stats(s: Sequence[int]) -> SignedStatRecord:
    ext = (0,) + tuple(s)
    des_b = sum(1 for i in range(len(s)) if ext[i] > ext[i + 1])
    return _apply_mutations(SignedStatRecord(des_B=des_b))


# Whole streams ----------------------------------------------------------

def _records(kind: str, n: int, k: int, guards: GuardConfig) -> Iterator[tuple]:
    if kind == "perm":
        for p in gen_perms(n, guards):
            yield (p,) + astuple(perm_stats(p))
    elif kind == "signed":
        for s in gen_signed_perms(n, guards):
            yield (s,) + astuple(signed_stats(s))
    elif kind == "stirling":
        for w in gen_stirling(n, k, guards):
            yield (w.word,) + astuple(stirling_stats(w))
    else:
        raise ValueError(f"unknown object kind {kind!r}; expected perm, signed or stirling")


# Guards are part of the key so a lowered bound is enforced on cached sizes too.
@lru_cache(maxsize=64)
def _stat_frame(kind: str, n: int, k: int, token: int, guards: GuardConfig) -> pd.DataFrame:
    logger.debug("building %s frame n=%d k=%d (token %d)", kind, n, k, token)
    columns = ["obj", *FIELDS_BY_KIND.get(kind, ())]
    return pd.DataFrame.from_records(list(_records(kind, n, k, guards)), columns=columns)


def stat_frame(kind: str, n: int, k: int = 2) -> pd.DataFrame:
    """All objects of one kind with their statistics, one row per object.

    The ``obj`` column holds the object (a tuple); the remaining columns are
    the record fields. The frame is cached and must not be modified.

    Args:
        kind: ``perm``, ``signed`` or ``stirling``.
        n: Size of the objects.
        k: Letter multiplicity, used only for ``stirling``.
    """
    if kind != "stirling":
        k = 1
    return _stat_frame(kind, n, k, mutation_token(), get_config().guards)


def distribution(
    kind: str,
    n: int,
    stat_fields: Sequence[str],
    weight: Callable[..., PolyLike],
    k: int = 2,
    where: Optional[Callable[[tuple], bool]] = None,
) -> Poly:
    """Sum of ``weight(*stats)`` over all objects, grouped by the named fields.

    Args:
        kind: Object kind passed to stat_frame.
        n: Object size.
        stat_fields: Record fields passed positionally to ``weight``.
        weight: Maps one combination of field values to a polynomial.
        k: Letter multiplicity for Stirling words.
        where: Optional filter on the object itself.

    Returns:
        The exact enumerator polynomial.
    """
    frame = stat_frame(kind, n, k)
    if where is not None:
        frame = frame[frame["obj"].map(where).astype(bool)]
    if frame.empty:
        return ZERO
    stat_fields = list(stat_fields)
    counts = frame.groupby(stat_fields, sort=True).size()
    total = ZERO
    for key, count in counts.items():
        key = key if isinstance(key, tuple) else (key,)
        total = total + as_poly(weight(*(int(v) for v in key))) * int(count)
    return total
