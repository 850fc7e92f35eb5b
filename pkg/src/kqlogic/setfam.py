"""Enumeration of minimal sets for monotone set predicates.

Used in two places: the definable-set equivalence oracle (minimal unions of
partition blocks admitting a witness) and the back part of characteristic
formulae (maximal witness-free unions of equivalence classes, obtained as
complements of minimal transversals).
"""
from __future__ import annotations

from typing import Callable, Iterable, Sequence


def minimal_true_sets(
    predicate: Callable[[frozenset], bool], items: Sequence
) -> list[frozenset]:
    """All inclusion-minimal subsets S of `items` with predicate(S) true.

    `predicate` must be monotone: S <= T and predicate(S) imply predicate(T).
    Enumeration is by branching on exclusion sets (Reiter-style); worst-case
    exponential in the number of minimal sets, which stays tiny at desk scale.
    """
    items = list(items)
    full = frozenset(items)
    if not predicate(full):
        return []

    def shrink(base: frozenset) -> frozenset:
        current = set(base)
        for item in items:
            if item in current:
                current.remove(item)
                if not predicate(frozenset(current)):
                    current.add(item)
        return frozenset(current)

    results: list[frozenset] = []
    found: set[frozenset] = set()
    visited: set[frozenset] = set()
    stack: list[frozenset] = [frozenset()]
    while stack:
        excluded = stack.pop()
        if excluded in visited:
            continue
        visited.add(excluded)
        base = full - excluded
        if not predicate(base):
            continue
        minimal = shrink(base)
        if minimal not in found:
            found.add(minimal)
            results.append(minimal)
        for item in minimal:
            stack.append(excluded | {item})
    return sorted(results, key=lambda s: (len(s), sorted(map(items.index, s))))


def minimal_hitting_sets(family: Iterable[frozenset], items: Sequence) -> list[frozenset]:
    """All inclusion-minimal subsets of `items` meeting every member of `family`.

    If some member of `family` is empty there is no hitting set; if `family`
    is empty, the empty set is the unique minimal hitting set.
    """
    family = [frozenset(f) for f in family]
    return minimal_true_sets(lambda s: all(s & f for f in family), items)
