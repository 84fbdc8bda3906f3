"""Multiset extension of a strict/equivalence pair, decided by cover search."""

from __future__ import annotations

import enum
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
Rel = Callable[[T, T], bool]


class MultisetResult(enum.Enum):
    STRICT = "strict"
    WEAK_ONLY = "weak-only"
    NONE = "none"

    def __bool__(self):
        return self is not MultisetResult.NONE


def strict_cover_exists(strict: Rel, equiv: Rel, left: Sequence, right: Sequence) -> bool:
    """Search a cover of right by left with at least one strictly decreasing left element.

    Each right element is covered either by a left element that is strictly
    greater (that left element may cover many), or by an equivalent left
    element that covers nothing else.
    """
    n, m = len(left), len(right)
    if n == 0:
        return False
    gt = [[strict(a, b) for b in right] for a in left]
    eq = [[equiv(a, b) for b in right] for a in left]
    # fast failure: every right element needs some candidate
    for j in range(m):
        if not any(gt[i][j] or eq[i][j] for i in range(n)):
            return False
    # role[i]: None = unused, "eq" = paired by equivalence, "gt" = strict coverer
    role: list = [None] * n
    order = sorted(range(m), key=lambda j: sum(gt[i][j] + eq[i][j] for i in range(n)))

    def go(k: int) -> bool:
        if k == m:
            return any(r != "eq" for r in role)
        j = order[k]
        for i in range(n):
            if gt[i][j] and role[i] != "eq":
                prev = role[i]
                role[i] = "gt"
                if go(k + 1):
                    return True
                role[i] = prev
        for i in range(n):
            if eq[i][j] and role[i] is None:
                role[i] = "eq"
                if go(k + 1):
                    return True
                role[i] = None
        return False

    return go(0)


def equal_up_to(equiv: Rel, left: Sequence, right: Sequence) -> bool:
    """Perfect matching of left and right under equiv."""
    if len(left) != len(right):
        return False
    used = [False] * len(right)

    def go(i: int) -> bool:
        if i == len(left):
            return True
        for j, b in enumerate(right):
            if not used[j] and equiv(left[i], b):
                used[j] = True
                if go(i + 1):
                    return True
                used[j] = False
        return False

    return go(0)


def multiset_compare(strict: Rel, equiv: Rel, left: Sequence, right: Sequence) -> MultisetResult:
    if strict_cover_exists(strict, equiv, left, right):
        return MultisetResult.STRICT
    if equal_up_to(equiv, left, right):
        return MultisetResult.WEAK_ONLY
    return MultisetResult.NONE
