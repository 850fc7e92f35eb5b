"""The closed registry of built-in witness-set quantifier families.

Every quantifier exposes three methods:

* ``is_witness``            -- membership of a tuple set in the witness family,
* ``minimal_witnesses``     -- the inclusion-minimal witnesses, canonically ordered,
* ``admits_within``         -- whether some witness lies inside a given tuple set
                               (the existential core of the Q-formula clause).

All three depend only on the quantifier's own signature sigma_Q, i.e. on the
sigma_Q-reduct of the structure they are given.

Powerset-based fallbacks (``oracle_*``) derive the latter two methods from
``is_witness`` by exhaustive enumeration; they are the independent reference
used by the verification suites and are guarded to universes of size <= 4.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional

from .structures import Assignment, Structure, StructureError, check_assignment

WitnessSet = FrozenSet[tuple]

# Families whose semantics read a binary relation through a single point.
POINT_FAMILIES = ("dia", "dia_ge", "cyc", "inf", "reach")
FAMILIES = POINT_FAMILIES + ("all", "some", "ex_ge")

ORACLE_UNIVERSE_LIMIT = 4
CYCLE_SEARCH_LIMIT = 12


class QuantifierError(ValueError):
    """Invalid quantifier instantiation or use."""


@dataclass(frozen=True)
class QuantifierDef:
    """An instantiated quantifier: family plus parameters, fixed k."""

    family: str
    k: int
    relation: Optional[str] = None
    n: Optional[int] = None
    var_index: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise QuantifierError(f"unknown quantifier family {self.family!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise QuantifierError(f"k must be a positive integer, got {self.k!r}")
        if self.family in POINT_FAMILIES:
            # The modal-style families are defined on single points only.
            if self.k != 1:
                raise QuantifierError(f"quantifier {self.family!r} is only available at k=1")
            if not self.relation:
                raise QuantifierError(f"quantifier {self.family!r} needs a relation parameter")
        else:
            if self.relation is not None:
                raise QuantifierError(f"quantifier {self.family!r} takes no relation parameter")
        if self.family in ("dia_ge", "ex_ge"):
            if not isinstance(self.n, int) or self.n < 1:
                raise QuantifierError(f"quantifier {self.family!r} needs a threshold n >= 1")
        elif self.n is not None:
            raise QuantifierError(f"quantifier {self.family!r} takes no threshold")
        if self.family == "ex_ge":
            if not isinstance(self.var_index, int) or not 1 <= self.var_index <= self.k:
                raise QuantifierError(
                    f"quantifier ex>= needs a variable index between 1 and k={self.k}, got {self.var_index!r}"
                )
        elif self.var_index is not None:
            raise QuantifierError(f"quantifier {self.family!r} takes no variable index")

    @property
    def name(self) -> str:
        if self.family == "dia":
            return f"dia[{self.relation}]"
        if self.family == "dia_ge":
            return f"dia>={self.n}[{self.relation}]"
        if self.family == "cyc":
            return f"cyc[{self.relation}]"
        if self.family == "inf":
            return f"inf[{self.relation}]"
        if self.family == "reach":
            return f"reach[{self.relation}]"
        if self.family == "ex_ge":
            return f"ex>={self.n}[x{self.var_index}]"
        return self.family  # all, some

    @property
    def sigma(self) -> dict[str, int]:
        """The quantifier's own signature sigma_Q."""
        if self.relation is not None:
            return {self.relation: 2}
        return {}

    def check_structure(self, structure: Structure) -> None:
        for name, arity in self.sigma.items():
            if name not in structure.signature:
                raise QuantifierError(f"quantifier {self.name}: relation {name!r} not in structure signature")
            if structure.signature.arity(name) != arity:
                raise QuantifierError(
                    f"quantifier {self.name}: relation {name!r} has arity "
                    f"{structure.signature.arity(name)}, expected {arity}"
                )

    # -- the three evaluation methods ------------------------------------

    def is_witness(self, structure: Structure, alpha: Assignment, witness: Iterable[tuple]) -> bool:
        """Membership of `witness` in the witness family at (structure, alpha)."""
        alpha = self._checked(structure, alpha)
        witness = frozenset(tuple(t) for t in witness)
        for tup in witness:
            if len(tup) != self.k or any(not structure.has_element(e) for e in tup):
                raise QuantifierError(f"witness member {tup!r} is not a valid {self.k}-tuple over the universe")
        f = self.family
        if f == "dia":
            if len(witness) != 1:
                return False
            (sole,) = witness
            return sole[0] in structure.successors(self.relation, alpha[0])
        if f == "dia_ge":
            succ = set(structure.successors(self.relation, alpha[0]))
            return sum(1 for (c,) in witness if c in succ) >= self.n
        if f == "all":
            return witness == frozenset(structure.k_tuples(self.k))
        if f == "some":
            return bool(witness)
        if f == "cyc":
            return self._cycle_is_witness(structure, witness)
        if f == "inf":
            return False  # no infinite subset of a finite universe
        if f == "reach":
            if len(witness) != 1:
                return False
            (sole,) = witness
            return sole[0] in structure.reachable_from(self.relation, alpha[0])
        if f == "ex_ge":
            return len(witness) >= self.n and all(self._on_line(alpha, tup) for tup in witness)
        raise AssertionError(self.family)

    def minimal_witnesses(self, structure: Structure, alpha: Assignment) -> list[WitnessSet]:
        """Inclusion-minimal witnesses, ordered lexicographically by tuple order."""
        alpha = self._checked(structure, alpha)
        f = self.family
        if f == "dia":
            succ = structure.successors(self.relation, alpha[0])
            out = [frozenset({(c,)}) for c in succ]
        elif f == "dia_ge":
            succ = structure.successors(self.relation, alpha[0])
            out = [frozenset((c,) for c in combo) for combo in itertools.combinations(succ, self.n)]
        elif f == "all":
            out = [frozenset(structure.k_tuples(self.k))]
        elif f == "some":
            out = [frozenset({t}) for t in structure.k_tuples(self.k)]
        elif f == "cyc":
            cycles = _simple_cycle_sets(structure, self.relation, set(structure.universe))
            minimal = [c for c in cycles if not any(o < c for o in cycles)]
            out = [frozenset((e,) for e in c) for c in minimal]
        elif f == "inf":
            out = []
        elif f == "reach":
            out = [frozenset({(c,)}) for c in structure.reachable_from(self.relation, alpha[0])]
        elif f == "ex_ge":
            line = self._line(structure, alpha)
            out = [frozenset(combo) for combo in itertools.combinations(line, self.n)]
        else:
            raise AssertionError(self.family)
        return sorted(out, key=lambda w: _witness_key(structure, w))

    def admits_within(self, structure: Structure, alpha: Assignment, extension: Iterable[tuple]) -> bool:
        """True iff some witness at (structure, alpha) is a subset of `extension`."""
        alpha = self._checked(structure, alpha)
        extension = frozenset(tuple(t) for t in extension)
        f = self.family
        if f == "dia":
            return any((c,) in extension for c in structure.successors(self.relation, alpha[0]))
        if f == "dia_ge":
            return sum(1 for c in structure.successors(self.relation, alpha[0]) if (c,) in extension) >= self.n
        if f == "all":
            return len(extension) == len(structure.universe) ** self.k
        if f == "some":
            return bool(extension)
        if f == "cyc":
            allowed = {t[0] for t in extension}
            return _has_simple_cycle(structure, self.relation, allowed)
        if f == "inf":
            return False
        if f == "reach":
            return any((c,) in extension for c in structure.reachable_from(self.relation, alpha[0]))
        if f == "ex_ge":
            return sum(1 for tup in extension if self._on_line(alpha, tup)) >= self.n
        raise AssertionError(self.family)

    # -- helpers ----------------------------------------------------------

    def _checked(self, structure: Structure, alpha: Assignment) -> Assignment:
        self.check_structure(structure)
        return check_assignment(structure, alpha, self.k)

    def _on_line(self, alpha: Assignment, tup: tuple) -> bool:
        i = self.var_index - 1
        return all(tup[j] == alpha[j] for j in range(self.k) if j != i)

    def _line(self, structure: Structure, alpha: Assignment) -> list[tuple]:
        i = self.var_index - 1
        return [alpha[:i] + (e,) + alpha[i + 1:] for e in structure.universe]

    def _cycle_is_witness(self, structure: Structure, witness: WitnessSet) -> bool:
        elements = [t[0] for t in witness]
        if len(elements) < 3:
            return False
        if len(elements) > CYCLE_SEARCH_LIMIT:
            raise QuantifierError(f"cycle witness check limited to {CYCLE_SEARCH_LIMIT} elements")
        edges = structure.rel(self.relation)
        first, rest = elements[0], elements[1:]
        for perm in itertools.permutations(rest):
            order = (first,) + perm
            if all((order[i], order[(i + 1) % len(order)]) in edges for i in range(len(order))):
                return True
        return False


def _witness_key(structure: Structure, witness: WitnessSet):
    return tuple(sorted(structure.sort_key(t) for t in witness))


def _has_simple_cycle(structure: Structure, relation: str, allowed: set[str]) -> bool:
    """Existence of a simple directed cycle of length >= 3 inside `allowed`."""
    order = [e for e in structure.universe if e in allowed]
    rank = {e: i for i, e in enumerate(order)}
    adj = {e: [c for c in structure.successors(relation, e) if c in allowed] for e in order}

    def search(start: str, current: str, on_path: set[str]) -> bool:
        for nxt in adj[current]:
            if nxt == start and len(on_path) >= 3:
                return True
            if rank.get(nxt, -1) > rank[start] and nxt not in on_path:
                on_path.add(nxt)
                if search(start, nxt, on_path):
                    return True
                on_path.remove(nxt)
        return False

    return any(search(e, e, {e}) for e in order)


def _simple_cycle_sets(structure: Structure, relation: str, allowed: set[str]) -> list[frozenset[str]]:
    """Vertex sets of all simple directed cycles of length >= 3 inside `allowed`."""
    if len(allowed) > CYCLE_SEARCH_LIMIT:
        raise QuantifierError(f"cycle enumeration limited to {CYCLE_SEARCH_LIMIT} elements")
    order = [e for e in structure.universe if e in allowed]
    rank = {e: i for i, e in enumerate(order)}
    adj = {e: [c for c in structure.successors(relation, e) if c in allowed] for e in order}
    found: set[frozenset[str]] = set()

    def search(start: str, current: str, on_path: list[str]) -> None:
        for nxt in adj[current]:
            if nxt == start and len(on_path) >= 3:
                found.add(frozenset(on_path))
            elif rank.get(nxt, -1) > rank[start] and nxt not in on_path:
                on_path.append(nxt)
                search(start, nxt, on_path)
                on_path.pop()

    for e in order:
        search(e, e, [e])
    return sorted(found, key=lambda c: sorted(rank[e] for e in c))


# -- quantifier names (shared by the formula grammar and the CLI) ---------

def parse_quantifier(name: str, k: int) -> QuantifierDef:
    """Parse a quantifier name such as ``dia[R]``, ``dia>=2[R]`` or ``ex>=1[x2]``."""
    text = name.strip()

    def bracket_arg(head: str) -> str:
        inner = text[len(head):]
        if not (inner.startswith("[") and inner.endswith("]")) or len(inner) < 3:
            raise QuantifierError(f"malformed quantifier name {name!r}")
        return inner[1:-1]

    if text == "all":
        return QuantifierDef("all", k)
    if text == "some":
        return QuantifierDef("some", k)
    for head, family in (("dia", "dia"), ("cyc", "cyc"), ("inf", "inf"), ("reach", "reach")):
        if text.startswith(head + "["):
            return QuantifierDef(family, k, relation=bracket_arg(head))
    for head, family in (("dia>=", "dia_ge"), ("ex>=", "ex_ge")):
        if text.startswith(head):
            rest = text[len(head):]
            digits = "".join(itertools.takewhile(str.isdigit, rest))
            if not digits:
                raise QuantifierError(f"malformed quantifier name {name!r}")
            n = int(digits)
            arg = bracket_arg(head + digits)
            if family == "dia_ge":
                return QuantifierDef(family, k, relation=arg, n=n)
            if not (arg.startswith("x") and arg[1:].isdigit()):
                raise QuantifierError(f"quantifier {name!r}: expected a variable such as x1")
            return QuantifierDef(family, k, n=n, var_index=int(arg[1:]))
    raise QuantifierError(f"unknown quantifier {name!r}")


def parse_quantifier_list(text: str, k: int) -> list[QuantifierDef]:
    return [parse_quantifier(part, k) for part in text.split(",") if part.strip()]


def default_registry(structure: Structure, k: int) -> list[QuantifierDef]:
    """A reasonable default: dia per binary relation, plus all/some/ex>=1."""
    registry: list[QuantifierDef] = []
    if k == 1:
        for name, arity in structure.signature.relations:
            if arity == 2:
                registry.append(QuantifierDef("dia", 1, relation=name))
    registry.append(QuantifierDef("all", k))
    registry.append(QuantifierDef("some", k))
    registry.extend(QuantifierDef("ex_ge", k, n=1, var_index=i) for i in range(1, k + 1))
    return registry


# -- powerset-based reference implementations (oracle mode) ---------------

def _guard_oracle(structure: Structure, limit: Optional[int] = None) -> None:
    cap = ORACLE_UNIVERSE_LIMIT if limit is None else limit
    if len(structure.universe) > cap:
        raise QuantifierError(f"oracle mode is limited to universes of size <= {cap}")


def all_witness_candidates(structure: Structure, k: int) -> list[WitnessSet]:
    """Every subset of the k-tuple space, in canonical order (exponential)."""
    tuples = structure.k_tuples(k)
    out = []
    for r in range(len(tuples) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(tuples, r))
    return out


def oracle_witnesses(q: QuantifierDef, structure: Structure, alpha: Assignment) -> list[WitnessSet]:
    """All witnesses, found by filtering the powerset through is_witness."""
    _guard_oracle(structure)
    return [w for w in all_witness_candidates(structure, q.k) if q.is_witness(structure, alpha, w)]


def oracle_minimal_witnesses(q: QuantifierDef, structure: Structure, alpha: Assignment) -> list[WitnessSet]:
    witnesses = oracle_witnesses(q, structure, alpha)
    minimal = [w for w in witnesses if not any(o < w for o in witnesses)]
    return sorted(minimal, key=lambda w: _witness_key(structure, w))


def oracle_admits_within(
    q: QuantifierDef, structure: Structure, alpha: Assignment, extension: Iterable[tuple]
) -> bool:
    """Brute-force admits: any subset of the extension that is a witness."""
    _guard_oracle(structure)
    extension = sorted((tuple(t) for t in extension), key=structure.sort_key)
    for r in range(len(extension) + 1):
        for combo in itertools.combinations(extension, r):
            if q.is_witness(structure, alpha, frozenset(combo)):
                return True
    return False
