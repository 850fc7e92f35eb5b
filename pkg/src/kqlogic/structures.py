"""Finite relational signatures and structures.

Element names are opaque strings.  The universe is an ordered tuple; that
order fixes the canonical iteration order of every enumeration downstream
(tuple spaces, witness lists, game relations), which keeps all outputs
reproducible.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional


class StructureError(ValueError):
    """A structure, assignment, or operation violated a validity constraint."""


class DocumentError(StructureError):
    """A structure document could not be parsed."""


EQUALITY_RELATION = "eq"


@dataclass(frozen=True)
class Signature:
    """Relation names with fixed arities, kept in declaration order."""

    relations: tuple[tuple[str, int], ...]

    @staticmethod
    def of(arities: Mapping[str, int] | Iterable[tuple[str, int]]) -> "Signature":
        items = tuple(arities.items()) if isinstance(arities, Mapping) else tuple(arities)
        seen: set[str] = set()
        for name, arity in items:
            if not isinstance(name, str) or not name:
                raise StructureError(f"invalid relation name {name!r}")
            if name in seen:
                raise StructureError(f"duplicate relation name {name!r}")
            if not isinstance(arity, int) or isinstance(arity, bool) or arity < 1:
                raise StructureError(f"relation {name!r}: arity must be a positive integer, got {arity!r}")
            seen.add(name)
        return Signature(items)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def arity(self, name: str) -> int:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        raise StructureError(f"relation {name!r} not in signature")

    def __contains__(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)

    def contains(self, other: "Signature") -> bool:
        """True if every relation of `other` occurs here with the same arity."""
        return all(name in self and self.arity(name) == arity for name, arity in other.relations)

    def to_dict(self) -> dict[str, int]:
        return dict(self.relations)


class Structure:
    """An immutable finite relational structure.

    Every relation of the signature is interpreted (possibly empty); every
    tuple is checked against the universe and the declared arity.
    """

    __slots__ = ("signature", "universe", "interpretation", "_elements", "_index", "_tuple_cache", "_succ_cache")

    def __init__(
        self,
        signature: Signature,
        universe: Iterable[str],
        interpretation: Mapping[str, Iterable[Iterable[str]]],
    ):
        universe = tuple(universe)
        if not universe:
            raise StructureError("empty universe (assignments would be impossible)")
        elements = set(universe)
        if len(elements) != len(universe):
            raise StructureError("universe contains duplicate element names")
        for e in universe:
            if not isinstance(e, str) or not e:
                raise StructureError(f"invalid element name {e!r}")

        interp: dict[str, frozenset[tuple[str, ...]]] = {}
        for name, arity in signature.relations:
            tuples = set()
            for raw in interpretation.get(name, ()):
                tup = tuple(raw)
                if len(tup) != arity:
                    raise StructureError(
                        f"relation {name!r}: tuple {list(tup)!r} has length {len(tup)}, declared arity is {arity}"
                    )
                for e in tup:
                    if e not in elements:
                        raise StructureError(f"relation {name!r}: tuple {list(tup)!r} mentions unknown element {e!r}")
                tuples.add(tup)
            interp[name] = frozenset(tuples)
        extras = set(interpretation) - set(signature.names())
        if extras:
            raise StructureError(f"interpretation given for undeclared relation(s): {sorted(extras)}")

        self.signature = signature
        self.universe = universe
        self.interpretation = interp
        self._elements = frozenset(elements)
        self._index = {e: i for i, e in enumerate(universe)}
        self._tuple_cache: dict[int, tuple[tuple[str, ...], ...]] = {}
        self._succ_cache: dict[str, dict[str, tuple[str, ...]]] = {}

    def rel(self, name: str) -> frozenset[tuple[str, ...]]:
        if name not in self.interpretation:
            raise StructureError(f"relation {name!r} not in signature")
        return self.interpretation[name]

    def has_element(self, e: str) -> bool:
        return e in self._elements

    def element_index(self, e: str) -> int:
        return self._index[e]

    def k_tuples(self, k: int) -> tuple[tuple[str, ...], ...]:
        """All k-tuples over the universe, in canonical (lexicographic) order."""
        if k < 1:
            raise StructureError(f"k must be positive, got {k}")
        cached = self._tuple_cache.get(k)
        if cached is None:
            cached = tuple(itertools.product(self.universe, repeat=k))
            self._tuple_cache[k] = cached
        return cached

    def successors(self, relation: str, element: str) -> tuple[str, ...]:
        """R-successors of an element, in universe order.  Requires a binary relation."""
        if self.signature.arity(relation) != 2:
            raise StructureError(f"relation {relation!r} is not binary")
        per_rel = self._succ_cache.get(relation)
        if per_rel is None:
            per_rel = {e: [] for e in self.universe}
            for (x, y) in sorted(self.rel(relation), key=lambda t: (self._index[t[0]], self._index[t[1]])):
                per_rel[x].append(y)
            per_rel = {e: tuple(v) for e, v in per_rel.items()}
            self._succ_cache[relation] = per_rel
        return per_rel[element]

    def reachable_from(self, relation: str, element: str) -> tuple[str, ...]:
        """Elements reachable by an R-path of length >= 0, in universe order."""
        seen = {element}
        frontier = [element]
        while frontier:
            nxt = []
            for e in frontier:
                for c in self.successors(relation, e):
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            frontier = nxt
        return tuple(e for e in self.universe if e in seen)

    def sort_key(self, tup: tuple[str, ...]) -> tuple[int, ...]:
        return tuple(self._index[e] for e in tup)

    def to_dict(self) -> dict:
        return {
            "signature": self.signature.to_dict(),
            "universe": list(self.universe),
            "relations": {
                name: sorted([list(t) for t in self.interpretation[name]])
                for name in self.signature.names()
            },
        }

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Structure)
            and self.signature == other.signature
            and self.universe == other.universe
            and self.interpretation == other.interpretation
        )

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        rels = ", ".join(f"{n}(|{len(self.interpretation[n])}|)" for n in self.signature.names())
        return f"Structure(|A|={len(self.universe)}, {rels})"


Assignment = tuple[str, ...]


def parse_assignment(text: str) -> Assignment:
    """Parse the CLI form of a k-assignment: comma-separated element names."""
    parts = tuple(p.strip() for p in text.split(","))
    if any(not p for p in parts):
        raise StructureError(f"malformed assignment {text!r}")
    return parts


def check_assignment(structure: Structure, alpha: Assignment, k: Optional[int] = None) -> Assignment:
    alpha = tuple(alpha)
    if k is not None and len(alpha) != k:
        raise StructureError(f"assignment {alpha!r} has length {len(alpha)}, expected k={k}")
    if not alpha:
        raise StructureError("assignments must have length k >= 1")
    for e in alpha:
        if not structure.has_element(e):
            raise StructureError(f"assignment element {e!r} not in the universe")
    return alpha


@dataclass(frozen=True)
class PointedStructure:
    """A structure with a distinguished k-tuple of elements."""

    structure: Structure
    assignment: Assignment
    k: int

    def __post_init__(self):
        check_assignment(self.structure, self.assignment, self.k)

    @staticmethod
    def of(structure: Structure, assignment: Iterable[str]) -> "PointedStructure":
        alpha = tuple(assignment)
        return PointedStructure(structure, alpha, len(alpha))


def load_structure(text: str, with_equality: bool = False) -> Structure:
    """Parse and validate a structure document (JSON).

    With `with_equality`, a binary relation "eq" interpreted as the diagonal
    is added to the signature.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("structure document must be a JSON object")
    for key in ("signature", "universe"):
        if key not in doc:
            raise DocumentError(f"structure document missing {key!r}")
    if not isinstance(doc["signature"], dict):
        raise DocumentError('"signature" must map relation names to arities')
    if not isinstance(doc["universe"], list):
        raise DocumentError('"universe" must be a list of element names')
    relations = doc.get("relations", {})
    if not isinstance(relations, dict):
        raise DocumentError('"relations" must map relation names to tuple lists')

    signature = Signature.of(doc["signature"])
    if with_equality:
        if EQUALITY_RELATION in signature:
            raise StructureError(f"signature already declares {EQUALITY_RELATION!r}; cannot add equality")
        signature = Signature.of(signature.relations + ((EQUALITY_RELATION, 2),))
        relations = dict(relations)
        relations[EQUALITY_RELATION] = [[e, e] for e in doc["universe"]]
    return Structure(signature, doc["universe"], relations)


def load_structure_file(path: str, with_equality: bool = False) -> Structure:
    with open(path, "r", encoding="utf-8") as handle:
        return load_structure(handle.read(), with_equality=with_equality)


def serialize_structure(structure: Structure) -> str:
    """Inverse of load_structure on validated structures (round-trips)."""
    return json.dumps(structure.to_dict(), indent=2, sort_keys=False)


def apply_bijection(structure: Structure, mapping: Mapping[str, str]) -> Structure:
    """Rename every element through a bijection; relations map pointwise."""
    missing = [e for e in structure.universe if e not in mapping]
    if missing:
        raise StructureError(f"mapping not total on the universe; missing {missing}")
    images = [mapping[e] for e in structure.universe]
    if len(set(images)) != len(images):
        raise StructureError("mapping is not injective on the universe")
    renamed = {
        name: [[mapping[e] for e in tup] for tup in tuples]
        for name, tuples in structure.interpretation.items()
    }
    return Structure(structure.signature, images, renamed)


def reduct(structure: Structure, subsignature: Signature) -> Structure:
    """Restrict the interpretation to a sub-signature; universe unchanged."""
    for name, arity in subsignature.relations:
        if name not in structure.signature:
            raise StructureError(f"relation {name!r} absent from the structure's signature")
        if structure.signature.arity(name) != arity:
            raise StructureError(
                f"relation {name!r}: arity {arity} requested, structure declares {structure.signature.arity(name)}"
            )
    return Structure(
        subsignature,
        structure.universe,
        {name: structure.interpretation[name] for name, _ in subsignature.relations},
    )


def are_isomorphic(left: Structure, right: Structure) -> Optional[dict[str, str]]:
    """Brute-force isomorphism search; returns a witnessing bijection or None.

    Intended for universes of size <= 8.
    """
    if left.signature != right.signature:
        raise StructureError("isomorphism check requires identical signatures")
    if len(left.universe) != len(right.universe):
        return None
    for name in left.signature.names():
        if len(left.rel(name)) != len(right.rel(name)):
            return None
    for perm in itertools.permutations(right.universe):
        mapping = dict(zip(left.universe, perm))
        if all(
            frozenset(tuple(mapping[e] for e in tup) for tup in left.rel(name)) == right.rel(name)
            for name in left.signature.names()
        ):
            return mapping
    return None
