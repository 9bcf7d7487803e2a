"""Tests for permutation, signed permutation and Stirling word generators."""

import itertools
from math import factorial

import pytest

from stirling_lab.combgen import (
    GuardExceeded,
    StirlingWord,
    cycle_form,
    from_cycles,
    gen_perms,
    gen_signed_perms,
    gen_stirling,
    is_stirling,
    stirling_count,
)
from stirling_lab.config import GuardConfig


def brute_force_stirling(n, k):
    """All arrangements of {1^k..n^k} kept by a pairwise check of the Stirling condition."""
    letters = [v for v in range(1, n + 1) for _ in range(k)]
    found = set()
    for word in set(itertools.permutations(letters)):
        ok = True
        for i, j in itertools.combinations(range(len(word)), 2):
            if word[i] == word[j] and min(word[i:j + 1]) < word[i]:
                ok = False
                break
        if ok:
            found.add(word)
    return found


def test_perms_are_lexicographic():
    """Permutations come out in lexicographic order."""
    assert list(gen_perms(3)) == [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]
    assert list(gen_perms(0)) == [()]


def test_signed_perm_count():
    """There are 2^n n! signed permutations, each distinct."""
    for n in range(5):
        signed = list(gen_signed_perms(n))
        assert len(signed) == 2 ** n * factorial(n)
        assert len(set(signed)) == len(signed)
    assert list(gen_signed_perms(1)) == [(1,), (-1,)]


def test_stirling_order():
    """Blocks are inserted into gaps from left to right."""
    assert [str(w) for w in gen_stirling(2, 2)] == ["2211", "1221", "1122"]
    assert [w.word for w in gen_stirling(0, 2)] == [()]


@pytest.mark.parametrize("n,k,count", [(1, 2, 1), (3, 2, 15), (4, 2, 105), (4, 3, 280), (5, 1, 120)])
def test_stirling_count(n, k, count):
    """Generated words are distinct and match the product formula."""
    words = [w.word for w in gen_stirling(n, k)]
    assert stirling_count(n, k) == count
    assert len(words) == count
    assert len(set(words)) == count


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_stirling_matches_brute_force(n):
    """Block insertion gives exactly the filtered multiset permutations."""
    assert {w.word for w in gen_stirling(n, 2)} == brute_force_stirling(n, 2)


def test_every_word_satisfies_the_condition():
    """The independent predicate accepts every generated word."""
    for k in (1, 2, 3):
        for n in range(5):
            assert all(is_stirling(w.word, k) for w in gen_stirling(n, k))
    assert not is_stirling((1, 2, 1, 2), 2)
    assert not is_stirling((1, 1, 2), 2)


def test_k1_words_are_permutations():
    """1-Stirling permutations are the permutations of [n]."""
    assert {w.word for w in gen_stirling(4, 1)} == set(gen_perms(4))


def test_guards_fail_fast():
    """Exceeding a bound raises before any object is produced."""
    with pytest.raises(GuardExceeded) as info:
        list(gen_perms(4, GuardConfig(max_perm_n=3)))
    assert info.value.flag == "--max-perm-n"
    assert info.value.count == 24
    with pytest.raises(GuardExceeded) as info:
        list(gen_stirling(4, 2, GuardConfig(max_stirling_count=100)))
    assert info.value.count == 105
    assert "--max-stirling-count" in str(info.value)
    with pytest.raises(GuardExceeded):
        list(gen_signed_perms(3, GuardConfig(max_signed_n=2)))


def test_invalid_arguments():
    """Negative sizes and nonpositive k are rejected."""
    with pytest.raises(ValueError):
        list(gen_perms(-1))
    with pytest.raises(ValueError):
        list(gen_stirling(2, 0))


def test_cycle_form():
    """Cycles start at their smallest entry and are ordered by it."""
    p = (3, 6, 5, 2, 1, 4, 7)
    form = cycle_form(p)
    assert str(form) == "(1,3,5)(2,6,4)(7)"
    assert len(form) == 3
    assert from_cycles(form.cycles) == p
    assert len(cycle_form(())) == 0


def test_from_cycles_rejects_overlaps():
    """Cycles that do not partition [n] are an error."""
    with pytest.raises(ValueError):
        from_cycles([(1, 2), (2, 3)])


def test_word_str():
    """Words with fewer than ten letters print without separators."""
    assert str(StirlingWord((1, 2, 2, 1), 2)) == "1221"
    assert StirlingWord((1, 2, 2, 1), 2).n == 2
