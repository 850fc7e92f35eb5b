"""Model checking, team satisfaction, and the definable-set equivalence oracle.

Evaluation is extension-based: the set of satisfying k-tuples is computed
bottom-up once per subformula, so a quantified formula costs one
``admits_within`` call per tuple.  The equivalence oracle never plays the
bisimulation game; it tracks which tuple sets are definable by formulas of
each rank, which makes it an independent cross-check for the game solver and
the characteristic formulae.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import formulas as fm
from .quantifiers import QuantifierDef, oracle_admits_within
from .setfam import minimal_true_sets
from .structures import Assignment, PointedStructure, Structure, check_assignment

# A tuple tagged with the side ("A" or "B") it lives on.
TaggedTuple = tuple[str, tuple]


class SemanticsError(ValueError):
    """Evaluation was asked something ill-formed or over the size guard."""


def extension(
    structure: Structure,
    k: int,
    formula: fm.Formula,
    oracle: bool = False,
    memo: Optional[dict[int, frozenset]] = None,
) -> frozenset:
    """The set of k-tuples satisfying `formula`, computed bottom-up.

    Sharing-aware: subformula objects are memoized by identity, so the DAGs
    produced by characteristic-formula construction evaluate in linear time.
    A caller may pass a persistent `memo` to share work across calls on the
    same structure (the formula objects must then be kept alive).  With
    `oracle` set, quantifier clauses run on the powerset-based reference
    semantics instead of the built-in algorithms.
    """
    if memo is None:
        fm.validate_formula(formula, k, structure.signature)
        memo = {}
    elif id(formula) in memo:
        return memo[id(formula)]
    full = frozenset(structure.k_tuples(k))

    stack: list[tuple[fm.Formula, bool]] = [(formula, False)]
    seen: set[int] = set()
    while stack:
        f, expanded = stack.pop()
        if not expanded:
            if id(f) in memo or id(f) in seen:
                continue
            seen.add(id(f))
            stack.append((f, True))
            for child in fm._children(f):
                if id(child) not in memo and id(child) not in seen:
                    stack.append((child, False))
            continue
        if isinstance(f, fm.Top):
            result = full
        elif isinstance(f, fm.Atom):
            indices = [v - 1 for v in f.variables]
            rel = structure.rel(f.relation)
            result = frozenset(t for t in full if tuple(t[i] for i in indices) in rel)
        elif isinstance(f, fm.Not):
            result = full - memo[id(f.sub)]
        elif isinstance(f, fm.And):
            result = memo[id(f.left)] & memo[id(f.right)]
        else:  # Quant
            body = memo[id(f.sub)]
            q = f.quantifier
            if oracle:
                result = frozenset(t for t in full if oracle_admits_within(q, structure, t, body))
            else:
                result = frozenset(t for t in full if q.admits_within(structure, t, body))
        memo[id(f)] = result
    return memo[id(formula)]


def evaluate(structure: Structure, alpha: Assignment, formula: fm.Formula, oracle: bool = False) -> bool:
    """The satisfaction relation at a k-pointed structure."""
    alpha = check_assignment(structure, alpha)
    return tuple(alpha) in extension(structure, len(alpha), formula, oracle=oracle)


def evaluate_team(
    structure: Structure,
    team: Iterable[tuple],
    formula: fm.Formula,
    k: Optional[int] = None,
    oracle: bool = False,
) -> bool:
    """Flat team satisfaction: every member satisfies; vacuously true on the empty team."""
    members = [tuple(t) for t in team]
    if not members:
        return True
    if k is None:
        k = len(members[0])
    ext = extension(structure, k, formula, oracle=oracle)
    return all(check_assignment(structure, t, k) in ext for t in members)


def subformula_trace(structure: Structure, k: int, formula: fm.Formula, oracle: bool = False):
    """(subformula, extension) pairs in evaluation (post-) order, for --trace output."""
    out = []
    for sub in fm.subformulas(formula):
        out.append((sub, extension(structure, k, sub, oracle=oracle)))
    return out


# -- the definable-set closure and the rank equivalence oracle -------------


@dataclass(frozen=True)
class DefinableSetPair:
    """The extension of one formula evaluated in two structures at once."""

    ext_a: frozenset
    ext_b: frozenset
    rank: int
    formula: fm.Formula


def _atom_slots(signature, k: int):
    for rel, arity in signature.relations:
        for vs in itertools.product(range(k), repeat=arity):
            yield rel, vs


def definable_sets(
    a: Structure,
    b: Structure,
    k: int,
    q: int,
    registry: Sequence[QuantifierDef],
    max_pairs: int = 4096,
) -> list[DefinableSetPair]:
    """The stratified closure of definable extension pairs up to rank q.

    Level 0 is the boolean closure of the atom extensions (plus full/empty);
    level r+1 additionally closes over the quantifier image of every level-r
    pair.  Deduplication is by extension, with the first-seen representative
    formula retained and the rank recorded at first appearance.  The closure
    is a boolean algebra, so it is materialized as all unions of the blocks
    of the partition its generators induce; `max_pairs` guards the blow-up.
    """
    if a.signature != b.signature:
        raise SemanticsError("definable-set closure requires identical signatures")
    full_a = frozenset(a.k_tuples(k))
    full_b = frozenset(b.k_tuples(k))

    generators: dict[tuple[frozenset, frozenset], fm.Formula] = {}
    generators[(full_a, full_b)] = fm.TOP
    for rel, vs in _atom_slots(a.signature, k):
        atom = fm.Atom(rel, tuple(v + 1 for v in vs))
        ea = frozenset(t for t in full_a if tuple(t[i] for i in vs) in a.rel(rel))
        eb = frozenset(t for t in full_b if tuple(t[i] for i in vs) in b.rel(rel))
        generators.setdefault((ea, eb), atom)

    pairs: dict[tuple[frozenset, frozenset], DefinableSetPair] = {}

    def close_level(level: int) -> None:
        # Partition the tagged tuple space by generator membership profile.
        tagged = [("A", t) for t in a.k_tuples(k)] + [("B", t) for t in b.k_tuples(k)]
        gen_items = list(generators.items())
        profiles: dict[tuple, list[TaggedTuple]] = {}
        for tag, t in tagged:
            prof = tuple(
                (t in ea) if tag == "A" else (t in eb) for (ea, eb), _ in gen_items
            )
            profiles.setdefault(prof, []).append((tag, t))
        blocks = list(profiles.items())
        if 2 ** len(blocks) > max_pairs:
            raise SemanticsError(
                f"definable-set closure needs 2^{len(blocks)} pairs, over the guard of {max_pairs}"
            )
        block_formulas = []
        for prof, members in blocks:
            literals = [f if inside else fm.Not(f) for inside, (_, f) in zip(prof, gen_items)]
            block_formulas.append(fm.conj_all(literals))
        # Record generator extensions themselves first: they carry the
        # shortest representative formulas.
        for (ea, eb), f in gen_items:
            key = (ea, eb)
            if key not in pairs:
                pairs[key] = DefinableSetPair(ea, eb, level, f)
        for picks in itertools.product((False, True), repeat=len(blocks)):
            ea = frozenset().union(
                *(frozenset(t for tag, t in blocks[i][1] if tag == "A") for i in range(len(blocks)) if picks[i])
            ) if any(picks) else frozenset()
            eb = frozenset().union(
                *(frozenset(t for tag, t in blocks[i][1] if tag == "B") for i in range(len(blocks)) if picks[i])
            ) if any(picks) else frozenset()
            key = (ea, eb)
            if key not in pairs:
                rep = fm.disj_all([block_formulas[i] for i in range(len(blocks)) if picks[i]])
                pairs[key] = DefinableSetPair(ea, eb, level, rep)

    close_level(0)
    for level in range(1, q + 1):
        for pair in list(pairs.values()):
            if pair.rank != level - 1:
                continue  # images of older pairs are already generators
            for qd in registry:
                ea = frozenset(t for t in full_a if qd.admits_within(a, t, pair.ext_a))
                eb = frozenset(t for t in full_b if qd.admits_within(b, t, pair.ext_b))
                generators.setdefault((ea, eb), fm.Quant(qd, pair.formula))
        close_level(level)

    ordered = sorted(
        pairs.values(),
        key=lambda p: (p.rank, sorted(map(a.sort_key, p.ext_a)), sorted(map(b.sort_key, p.ext_b))),
    )
    return ordered


def equivalence_partitions(
    a: Structure,
    b: Structure,
    k: int,
    q: int,
    registry: Sequence[QuantifierDef],
) -> list[list[frozenset]]:
    """Partitions of the joint tuple space A^k (+) B^k by rank-r equivalence, r = 0..q.

    Each partition's blocks are the classes of tuples indistinguishable by
    any formula of the corresponding rank over `registry`.  The blocks are
    exactly the atoms of the boolean algebra of definable pairs, so two
    tuples land in the same block iff no definable set of that rank
    separates them; this never materializes the closure itself.
    """
    partitions = [_atom_partition(a, b, k)]
    for _ in range(q):
        partitions.append(_refine_partition(a, b, partitions[-1], registry))
    return partitions


def stabilized_equivalence(
    a: Structure,
    b: Structure,
    k: int,
    registry: Sequence[QuantifierDef],
) -> tuple[list[list[frozenset]], int]:
    """Refine to the fixed point; returns (partitions, stabilization index)."""
    partitions = [_atom_partition(a, b, k)]
    while True:
        nxt = _refine_partition(a, b, partitions[-1], registry)
        if _same_partition(nxt, partitions[-1]):
            return partitions, len(partitions) - 1
        partitions.append(nxt)


def equiv_rank_oracle(
    a: Structure,
    alpha: Assignment,
    b: Structure,
    beta: Assignment,
    q: int,
    registry: Sequence[QuantifierDef],
) -> bool:
    """True iff no definable pair of rank <= q separates alpha from beta."""
    alpha = check_assignment(a, alpha)
    beta = check_assignment(b, beta)
    if len(alpha) != len(beta):
        raise SemanticsError("assignments must have the same length k")
    partitions = equivalence_partitions(a, b, len(alpha), q, registry)
    return same_class(partitions[q], ("A", tuple(alpha)), ("B", tuple(beta)))


def same_class(partition: list[frozenset], x: TaggedTuple, y: TaggedTuple) -> bool:
    for block in partition:
        if x in block:
            return y in block
    raise SemanticsError(f"tuple {x!r} not covered by the partition")


def _atom_partition(a: Structure, b: Structure, k: int) -> list[frozenset]:
    if a.signature != b.signature:
        raise SemanticsError("equivalence oracle requires identical signatures")
    slots = list(_atom_slots(a.signature, k))
    groups: dict[tuple, list[TaggedTuple]] = {}
    for tag, s in (("A", a), ("B", b)):
        for t in s.k_tuples(k):
            prof = tuple(tuple(t[i] for i in vs) in s.rel(rel) for rel, vs in slots)
            groups.setdefault(prof, []).append((tag, t))
    return [frozenset(g) for g in groups.values()]


def _refine_partition(
    a: Structure,
    b: Structure,
    partition: list[frozenset],
    registry: Sequence[QuantifierDef],
) -> list[frozenset]:
    """One refinement round: split blocks by quantifier behaviour on unions of blocks.

    A tuple's behaviour towards a quantifier is the antichain of minimal
    block unions within which the quantifier admits a witness; by upward
    monotonicity this antichain determines the admits verdict on every
    union, i.e. on the extension of every formula of the previous rank.
    """
    a_parts = [frozenset(t for tag, t in blk if tag == "A") for blk in partition]
    b_parts = [frozenset(t for tag, t in blk if tag == "B") for blk in partition]
    union_cache: dict[tuple[str, frozenset], frozenset] = {}

    def side_union(tag: str, indices: frozenset) -> frozenset:
        got = union_cache.get((tag, indices))
        if got is None:
            parts = a_parts if tag == "A" else b_parts
            got = frozenset().union(*(parts[i] for i in indices)) if indices else frozenset()
            union_cache[(tag, indices)] = got
        return got

    indices = range(len(partition))
    out: list[frozenset] = []
    for block in partition:
        if len(block) == 1:
            out.append(block)
            continue
        groups: dict[tuple, list[TaggedTuple]] = {}
        for tag, t in sorted(block, key=lambda x: (x[0], (a if x[0] == "A" else b).sort_key(x[1]))):
            side = a if tag == "A" else b
            signature = tuple(
                frozenset(
                    minimal_true_sets(
                        lambda S, qd=qd, side=side, t=t, tag=tag: qd.admits_within(side, t, side_union(tag, S)),
                        indices,
                    )
                )
                for qd in registry
            )
            groups.setdefault(signature, []).append((tag, t))
        out.extend(frozenset(g) for g in groups.values())
    return out


def _same_partition(x: list[frozenset], y: list[frozenset]) -> bool:
    return frozenset(x) == frozenset(y)


def class_count(partition: list[frozenset]) -> int:
    return len(partition)


def check_type_realization(
    structure: Structure,
    alpha: Assignment,
    quantifier: QuantifierDef,
    formulas: Sequence[fm.Formula],
    oracle: bool = False,
) -> Optional[frozenset]:
    """Find a witness realizing a finite quantifier type, or None.

    If Q(/\\ formulas) holds at (structure, alpha) -- which on finite formula
    sets subsumes the condition for every finite subset -- return a witness
    inside the conjunction's extension with flat-team satisfaction.  Finite
    structures always realize such types, so None means the type condition
    itself fails.
    """
    alpha = check_assignment(structure, alpha, quantifier.k)
    conj = fm.conj_all(list(formulas))
    body = extension(structure, quantifier.k, conj, oracle=oracle)
    admits = (
        oracle_admits_within(quantifier, structure, alpha, body)
        if oracle
        else quantifier.admits_within(structure, alpha, body)
    )
    if not admits:
        return None
    for w in quantifier.minimal_witnesses(structure, alpha):
        if w <= body:
            return w
    raise SemanticsError(
        f"quantifier {quantifier.name} admits a witness inside the extension "
        "but none of its minimal witnesses is contained in it"
    )


@dataclass(frozen=True)
class TheoryHandle:
    """A pointed structure viewed through its rank-bounded theory."""

    pointed: PointedStructure
    comparison: tuple[Structure, ...]
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise SemanticsError("rank bound must be >= 0")

    def models(self, formula: fm.Formula) -> bool:
        return evaluate(self.pointed.structure, self.pointed.assignment, formula)

    def agrees_with(self, other: "TheoryHandle", registry: Sequence[QuantifierDef]) -> bool:
        """Rank-bounded elementary equivalence with another handle."""
        q = min(self.rank, other.rank)
        return equiv_rank_oracle(
            self.pointed.structure,
            self.pointed.assignment,
            other.pointed.structure,
            other.pointed.assignment,
            q,
            registry,
        )
