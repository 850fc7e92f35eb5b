"""Direct products, filters over finite index sets, and reduced products.

Every ultrafilter over a finite index set is principal, so a finite-index
ultraproduct is isomorphic to one of its components.  The Łoś-style check
here therefore validates the quotient construction itself (relation clause,
class transport of assignments, truth-value map), not the Łoś property of
any logic; the report says so explicitly.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import formulas as fm
from .semantics import evaluate
from .structures import Assignment, Structure, check_assignment

PRODUCT_UNIVERSE_CAP = 512
CLASS_SEPARATOR = "|"


class ProductError(ValueError):
    """Invalid filter, mismatched family, or a capped construction."""


@dataclass(frozen=True)
class FiniteFilter:
    """An extensionally given filter: upward closed, intersection closed, no empty set."""

    index: tuple[str, ...]
    sets: frozenset[frozenset[str]]

    @staticmethod
    def of(index: Iterable[str], sets: Iterable[Iterable[str]]) -> "FiniteFilter":
        index = tuple(index)
        if not index:
            raise ProductError("the index set must be non-empty")
        if len(set(index)) != len(index):
            raise ProductError("index labels must be distinct")
        ground = frozenset(index)
        family = frozenset(frozenset(s) for s in sets)
        if not family:
            raise ProductError("a filter must contain at least one set")
        for member in family:
            if not member:
                raise ProductError("the empty set cannot belong to a filter")
            if not member <= ground:
                raise ProductError(f"member {sorted(member)} is not a subset of the index set")
        for member in family:
            rest = sorted(ground - member)
            for r in range(1, len(rest) + 1):
                for extra in itertools.combinations(rest, r):
                    if member | frozenset(extra) not in family:
                        raise ProductError(
                            f"not upward closed: {sorted(member)} is a member but {sorted(member | frozenset(extra))} is not"
                        )
        for one, two in itertools.combinations(family, 2):
            meet = one & two
            if not meet:
                raise ProductError(f"members {sorted(one)} and {sorted(two)} have empty intersection")
            if meet not in family:
                raise ProductError(f"not intersection closed: missing {sorted(meet)}")
        return FiniteFilter(index, family)

    def contains(self, subset: Iterable[str]) -> bool:
        return frozenset(subset) in self.sets

    def is_ultrafilter(self) -> bool:
        ground = frozenset(self.index)
        for r in range(len(self.index) + 1):
            for combo in itertools.combinations(self.index, r):
                j = frozenset(combo)
                if j not in self.sets and (ground - j) not in self.sets:
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "index": list(self.index),
            "sets": sorted([sorted(s) for s in self.sets], key=lambda s: (len(s), s)),
        }


def trivial_filter(index: Iterable[str]) -> FiniteFilter:
    index = tuple(index)
    return FiniteFilter.of(index, [frozenset(index)])


def principal_ultrafilter(index: Iterable[str], at: str) -> FiniteFilter:
    """The up-set of {at}: the unique ultrafilter with that generator."""
    index = tuple(index)
    if at not in index:
        raise ProductError(f"index label {at!r} not in the index set")
    rest = [i for i in index if i != at]
    sets = []
    for r in range(len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            sets.append(frozenset({at, *combo}))
    return FiniteFilter.of(index, sets)


def enumerate_ultrafilters(index: Iterable[str]) -> list[FiniteFilter]:
    """All ultrafilters over a finite index set: one principal filter per label."""
    index = tuple(index)
    if not index:
        raise ProductError("the index set must be non-empty")
    return [principal_ultrafilter(index, at) for at in index]


def generate_filter(index: Iterable[str], base: Iterable[Iterable[str]]) -> FiniteFilter:
    """Close a family under supersets and intersections; reject if it collapses."""
    index = tuple(index)
    ground = frozenset(index)
    family = {frozenset(s) for s in base}
    family.add(ground)
    changed = True
    while changed:
        changed = False
        for one, two in itertools.combinations(list(family), 2):
            meet = one & two
            if meet not in family:
                if not meet:
                    raise ProductError("the base generates the empty set; no filter extends it")
                family.add(meet)
                changed = True
        for member in list(family):
            rest = sorted(ground - member)
            for r in range(1, len(rest) + 1):
                for extra in itertools.combinations(rest, r):
                    sup = member | frozenset(extra)
                    if sup not in family:
                        family.add(sup)
                        changed = True
    return FiniteFilter.of(index, family)


def load_filter(text: str) -> FiniteFilter:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProductError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "index" not in doc or "sets" not in doc:
        raise ProductError('filter document must be an object with "index" and "sets"')
    return FiniteFilter.of(doc["index"], doc["sets"])


def all_filters(index: Iterable[str]) -> list[FiniteFilter]:
    """Every filter over a small index set, by exhaustive validation (|I| <= 3)."""
    index = tuple(index)
    if len(index) > 3:
        raise ProductError("exhaustive filter enumeration is limited to |I| <= 3")
    nonempty = []
    for r in range(1, len(index) + 1):
        nonempty.extend(frozenset(c) for c in itertools.combinations(index, r))
    filters = []
    for r in range(1, len(nonempty) + 1):
        for family in itertools.combinations(nonempty, r):
            try:
                filters.append(FiniteFilter.of(index, family))
            except ProductError:
                continue
    return filters


@dataclass
class ReducedProduct:
    """A reduced product together with its quotient data."""

    structure: Structure
    family: tuple[Structure, ...]
    filter: FiniteFilter
    class_name: dict[tuple, str]
    representative: dict[str, tuple]

    def class_of(self, element_tuple: Sequence[str]) -> str:
        key = tuple(element_tuple)
        if key not in self.class_name:
            raise ProductError(f"{key!r} is not an element tuple of this product")
        return self.class_name[key]

    def transport(self, assignments: Sequence[Assignment]) -> Assignment:
        """Carry one k-assignment per component to a k-assignment of the quotient."""
        if len(assignments) != len(self.family):
            raise ProductError("need exactly one assignment per component structure")
        k = len(assignments[0])
        for s, alpha in zip(self.family, assignments):
            check_assignment(s, alpha, k)
        return tuple(
            self.class_of(tuple(assignments[i][j] for i in range(len(self.family))))
            for j in range(k)
        )


def reduced_product(family: Sequence[Structure], filt: FiniteFilter) -> ReducedProduct:
    """Quotient of the direct product by agreement on a filter member.

    Relations hold of a class tuple iff they hold componentwise on a filter
    member; class representatives are the lexicographically least index
    tuples, which fixes the quotient universe order.
    """
    family = tuple(family)
    if not family:
        raise ProductError("the product family must be non-empty")
    signature = family[0].signature
    for s in family[1:]:
        if s.signature != signature:
            raise ProductError("all structures in a product family must share the signature")
    if len(filt.index) != len(family):
        raise ProductError(
            f"filter index has {len(filt.index)} labels but the family has {len(family)} structures"
        )
    total = 1
    for s in family:
        total *= len(s.universe)
    if total > PRODUCT_UNIVERSE_CAP:
        raise ProductError(f"product universe of size {total} exceeds the cap of {PRODUCT_UNIVERSE_CAP}")

    labels = filt.index
    tuples = list(itertools.product(*(s.universe for s in family)))

    def agree(u: tuple, v: tuple) -> bool:
        return filt.contains(frozenset(labels[i] for i in range(len(family)) if u[i] == v[i]))

    representatives: list[tuple] = []
    class_name: dict[tuple, str] = {}
    for u in tuples:  # canonical order = lexicographic, so first-seen reps are least
        for rep in representatives:
            if agree(u, rep):
                class_name[u] = CLASS_SEPARATOR.join(rep)
                break
        else:
            representatives.append(u)
            class_name[u] = CLASS_SEPARATOR.join(u)

    universe = [CLASS_SEPARATOR.join(rep) for rep in representatives]
    rep_of = {CLASS_SEPARATOR.join(rep): rep for rep in representatives}

    interpretation: dict[str, list[list[str]]] = {}
    for rel, arity in signature.relations:
        holds: list[list[str]] = []
        for combo in itertools.product(representatives, repeat=arity):
            where = frozenset(
                labels[i]
                for i in range(len(family))
                if tuple(combo[j][i] for j in range(arity)) in family[i].rel(rel)
            )
            if filt.contains(where):
                holds.append([CLASS_SEPARATOR.join(rep) for rep in combo])
        interpretation[rel] = holds

    structure = Structure(signature, universe, interpretation)
    return ReducedProduct(structure, family, filt, class_name, rep_of)


def direct_product(family: Sequence[Structure]) -> Structure:
    """The plain direct product: the reduced product by the trivial filter {I}."""
    labels = tuple(str(i) for i in range(len(family)))
    return reduced_product(family, trivial_filter(labels)).structure


def truth_value_set(
    family: Sequence[Structure], assignments: Sequence[Assignment], formula: fm.Formula
) -> frozenset[str]:
    """The component labels at which the formula holds (its filter-algebra truth value)."""
    family = tuple(family)
    if len(assignments) != len(family):
        raise ProductError("need exactly one assignment per component structure")
    labels = tuple(str(i) for i in range(len(family)))
    return frozenset(
        labels[i] for i, (s, alpha) in enumerate(zip(family, assignments)) if evaluate(s, alpha, formula)
    )


@dataclass
class LosReport:
    """Both sides of the ultraproduct satisfaction equivalence, evaluated."""

    formula: str
    satisfied_in_product: bool
    truth_values: frozenset[str]
    truth_value_in_ultrafilter: bool
    agree: bool
    principal_at: str
    note: str = (
        "finite-index ultrafilters are principal, so agreement validates the "
        "reduced-product construction, not the Łoś property of the logic"
    )

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "satisfiedInProduct": self.satisfied_in_product,
            "truthValues": sorted(self.truth_values),
            "truthValueInUltrafilter": self.truth_value_in_ultrafilter,
            "agree": self.agree,
            "principalAt": self.principal_at,
            "note": self.note,
        }


def los_check(
    family: Sequence[Structure],
    assignments: Sequence[Assignment],
    ultra: FiniteFilter,
    formula: fm.Formula,
) -> LosReport:
    """Evaluate both sides of: ultraproduct satisfies phi iff [[phi]] is in U."""
    if not ultra.is_ultrafilter():
        raise ProductError("los_check needs an ultrafilter")
    if tuple(ultra.index) != tuple(str(i) for i in range(len(family))):
        raise ProductError('los_check expects index labels "0", "1", ... matching the family order')
    rp = reduced_product(family, ultra)
    alpha_u = rp.transport(assignments)
    left = evaluate(rp.structure, alpha_u, formula)
    values = truth_value_set(family, assignments, formula)
    right = ultra.contains(values)
    generator = min(
        (label for label in ultra.index if ultra.contains(frozenset({label}))),
    )
    return LosReport(
        formula=fm.print_formula(formula),
        satisfied_in_product=left,
        truth_values=values,
        truth_value_in_ultrafilter=right,
        agree=left == right,
        principal_at=generator,
    )
