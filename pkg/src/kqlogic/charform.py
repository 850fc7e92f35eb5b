"""Characteristic formulae relative to a finite comparison universe.

A rank-q characteristic formula for a pointed structure pins down its
q-round game behaviour: the base level records the atomic type, and each
further level conjoins

* forth conjuncts -- for every quantifier and every minimal witness, the
  quantified disjunction of the member classes one level down, and
* back conjuncts  -- for every quantifier, the negated quantified
  disjunction of every maximal witness-free union of one-level-down classes.

Restricting to minimal witnesses and maximal unions is an equivalence-
preserving shrink (monotonicity of quantifiers in the formula argument);
restricting the class set to classes realized inside the comparison
universe is sound because extensions evaluated inside the universe only
ever see realized classes.  Both restrictions are exercised against the
game solver and the definable-set oracle by the verification suites.

Formulas are interned per context: equivalent pointed tuples share one
formula object, and conjuncts/disjunctions are shared across classes, so
the per-level tables stay DAG-shaped and evaluate in linear time.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import formulas as fm
from . import games
from .quantifiers import QuantifierDef
from .semantics import extension
from .setfam import minimal_hitting_sets, minimal_true_sets
from .structures import Assignment, Signature, Structure, check_assignment


class CharformError(ValueError):
    """Invalid context, or a query about a structure outside of it."""


@dataclass
class ClassInfo:
    """One equivalence class at one level: representative formula and extensions."""

    index: int
    formula: fm.Formula
    extensions: tuple[frozenset, ...]  # per context structure
    representative: tuple[int, tuple]  # (structure index, tuple)


@dataclass
class _Level:
    classes: list[ClassInfo]
    class_of: dict[tuple[int, tuple], int]


class CharContext:
    """A finite comparison universe, a finite registry, and the chi tables."""

    def __init__(self, structures: Sequence[Structure], registry: Sequence[QuantifierDef], k: int):
        structures = tuple(structures)
        if not structures:
            raise CharformError("the comparison universe must contain at least one structure")
        signature = structures[0].signature
        for s in structures[1:]:
            if s.signature != signature:
                raise CharformError("all structures in the comparison universe must share the signature")
        if not isinstance(k, int) or k < 1:
            raise CharformError(f"k must be a positive integer, got {k!r}")
        deduped: list[QuantifierDef] = []
        seen: set[str] = set()
        for qd in registry:
            if qd.k != k:
                raise CharformError(f"quantifier {qd.name} built for k={qd.k}, context has k={k}")
            for s in structures:
                qd.check_structure(s)
            if qd.name not in seen:
                seen.add(qd.name)
                deduped.append(qd)
        self.structures = structures
        self.registry = tuple(deduped)
        self.signature: Signature = signature
        self.k = k
        self._levels: list[_Level] = []
        self._ext_memos: list[dict[int, frozenset]] = [dict() for _ in structures]
        self._conjunct_cache: dict = {}
        self._disj_cache: dict = {}
        # The extension memos are keyed by object identity, so every formula
        # ever memoized must stay alive for the context's lifetime; dropping
        # one would let a recycled id alias a stale cache entry.
        self._keepalive: list[fm.Formula] = []

    # -- bookkeeping -------------------------------------------------------

    def index_of(self, structure: Structure) -> int:
        for i, s in enumerate(self.structures):
            if s is structure:
                return i
        for i, s in enumerate(self.structures):
            if s == structure:
                return i
        raise CharformError("structure is outside the comparison universe")

    def ext(self, i: int, formula: fm.Formula) -> frozenset:
        return extension(self.structures[i], self.k, formula, memo=self._ext_memos[i])

    def _vector(self, formula: fm.Formula) -> tuple[frozenset, ...]:
        return tuple(self.ext(i, formula) for i in range(len(self.structures)))

    def level(self, q: int) -> _Level:
        while len(self._levels) <= q:
            if not self._levels:
                self._levels.append(self._build_level0())
            else:
                self._levels.append(self._build_next_level())
        return self._levels[q]

    def classes(self, q: int) -> list[ClassInfo]:
        """Delta_q: the pairwise-inequivalent level-q characteristic formulae."""
        return list(self.level(q).classes)

    def class_index(self, q: int, structure: Structure, alpha: Assignment) -> int:
        i = self.index_of(structure)
        alpha = tuple(check_assignment(self.structures[i], alpha, self.k))
        return self.level(q).class_of[(i, alpha)]

    # -- construction ------------------------------------------------------

    def _atom_slots(self):
        import itertools

        for rel, arity in self.signature.relations:
            for vs in itertools.product(range(1, self.k + 1), repeat=arity):
                yield rel, vs

    def _build_level0(self) -> _Level:
        slots = list(self._atom_slots())
        profile_formula: dict[tuple, fm.Formula] = {}
        entries: list[tuple[int, tuple, fm.Formula]] = []
        for i, s in enumerate(self.structures):
            for t in s.k_tuples(self.k):
                profile = tuple(
                    tuple(t[v - 1] for v in vs) in s.rel(rel) for rel, vs in slots
                )
                formula = profile_formula.get(profile)
                if formula is None:
                    literals: list[fm.Formula] = [fm.TOP]
                    for holds, (rel, vs) in zip(profile, slots):
                        atom = fm.Atom(rel, vs)
                        literals.append(atom if holds else fm.Not(atom))
                    formula = fm.conj_all(literals)
                    profile_formula[profile] = formula
                    self._keepalive.append(formula)
                entries.append((i, t, formula))
        return self._intern(entries)

    def _build_next_level(self) -> _Level:
        prev = self._levels[-1]
        q = len(self._levels) - 1
        delta = prev.classes
        level0 = self._levels[0]
        built: dict[tuple, fm.Formula] = {}
        entries: list[tuple[int, tuple, fm.Formula]] = []
        for i, s in enumerate(self.structures):
            ext_here = [c.extensions[i] for c in delta]
            for t in s.k_tuples(self.k):
                forth: list[frozenset] = []
                back: list[frozenset] = []
                for qd in self.registry:
                    profiles = frozenset(
                        frozenset(prev.class_of[(i, g)] for g in w)
                        for w in qd.minimal_witnesses(s, t)
                    )
                    forth.append(profiles)
                    back.append(self._max_witness_free(qd, s, t, ext_here))
                key = (level0.class_of[(i, t)], tuple(forth), tuple(back))
                formula = built.get(key)
                if formula is None:
                    formula = self._assemble(q, level0.classes[key[0]].formula, forth, back)
                    built[key] = formula
                    self._keepalive.append(formula)
                entries.append((i, t, formula))
        return self._intern(entries)

    def _max_witness_free(
        self, qd: QuantifierDef, s: Structure, t: tuple, ext_here: list[frozenset]
    ) -> frozenset:
        """Maximal class-index sets Phi with no witness inside their union."""
        indices = range(len(ext_here))

        def admits_union(chosen: frozenset) -> bool:
            joined = frozenset().union(*(ext_here[j] for j in chosen)) if chosen else frozenset()
            return qd.admits_within(s, t, joined)

        min_admitting = minimal_true_sets(admits_union, indices)
        edge_items = sorted(set().union(*min_admitting)) if min_admitting else []
        transversals = minimal_hitting_sets(min_admitting, edge_items)
        full = frozenset(indices)
        return frozenset(full - hit for hit in transversals)

    def _assemble(
        self, q: int, atom_formula: fm.Formula, forth: list[frozenset], back: list[frozenset]
    ) -> fm.Formula:
        conjuncts: list[fm.Formula] = [atom_formula]
        for qd, profiles in zip(self.registry, forth):
            for profile in sorted(profiles, key=lambda p: (len(p), sorted(p))):
                conjuncts.append(self._conjunct(q, qd, profile, negated=False))
        for qd, phis in zip(self.registry, back):
            for phi in sorted(phis, key=lambda p: (len(p), sorted(p))):
                conjuncts.append(self._conjunct(q, qd, phi, negated=True))
        return fm.conj_all(conjuncts)

    def _conjunct(self, q: int, qd: QuantifierDef, class_set: frozenset, negated: bool) -> fm.Formula:
        key = (q, qd, class_set, negated)
        got = self._conjunct_cache.get(key)
        if got is None:
            body = self._disjunction(q, class_set)
            got = fm.Not(fm.Quant(qd, body)) if negated else fm.Quant(qd, body)
            self._conjunct_cache[key] = got
        return got

    def _disjunction(self, q: int, class_set: frozenset) -> fm.Formula:
        key = (q, class_set)
        got = self._disj_cache.get(key)
        if got is None:
            delta = self._levels[q].classes
            got = fm.disj_all([delta[j].formula for j in sorted(class_set)])
            self._disj_cache[key] = got
        return got

    def _intern(self, entries: list[tuple[int, tuple, fm.Formula]]) -> _Level:
        classes: list[ClassInfo] = []
        by_vector: dict[tuple, int] = {}
        vector_of: dict[int, tuple] = {}
        class_of: dict[tuple[int, tuple], int] = {}
        for i, t, formula in entries:
            vec = vector_of.get(id(formula))
            if vec is None:
                vec = self._vector(formula)
                vector_of[id(formula)] = vec
            idx = by_vector.get(vec)
            if idx is None:
                idx = len(classes)
                by_vector[vec] = idx
                classes.append(ClassInfo(idx, formula, vec, (i, t)))
            class_of[(i, t)] = idx
        return _Level(classes, class_of)


# -- the public operations ---------------------------------------------------


def chi(ctx: CharContext, structure: Structure, alpha: Assignment, q: int) -> fm.Formula:
    """The rank-q characteristic formula of (structure, alpha) in the context."""
    if q < 0:
        raise CharformError("rank must be >= 0")
    idx = ctx.class_index(q, structure, alpha)
    return ctx.level(q).classes[idx].formula


def check_char(
    ctx: CharContext,
    a: Structure,
    alpha: Assignment,
    b: Structure,
    beta: Assignment,
    q: int,
) -> bool:
    """Does (b, beta) satisfy the rank-q characteristic formula of (a, alpha)?"""
    formula = chi(ctx, a, alpha, q)
    j = ctx.index_of(b)
    beta = tuple(check_assignment(ctx.structures[j], beta, ctx.k))
    return beta in ctx.ext(j, formula)


def normal_form(ctx: CharContext, formula: fm.Formula) -> fm.Formula:
    """The disjunction of the characteristic formulae of the satisfying classes.

    Equivalent to `formula` at every pointed structure of the comparison
    universe (and of quantifier rank bounded by the input's).
    """
    fm.validate_formula(formula, ctx.k, ctx.signature)
    names = {qd.name for qd in ctx.registry}
    for node in fm.subformulas(formula):
        if isinstance(node, fm.Quant) and node.quantifier.name not in names:
            raise CharformError(f"quantifier {node.quantifier.name} is outside the context registry")
    q = fm.quantifier_rank(formula)
    level = ctx.level(q)
    satisfied: set[int] = set()
    for i, s in enumerate(ctx.structures):
        ext = extension(s, ctx.k, formula)
        for t in ext:
            satisfied.add(level.class_of[(i, t)])
    return fm.disj_all([level.classes[j].formula for j in sorted(satisfied)])


def distinguishing_formula(
    ctx: CharContext,
    a: Structure,
    alpha: Assignment,
    b: Structure,
    beta: Assignment,
) -> Optional[fm.Formula]:
    """A minimal-rank formula separating two pointed structures, or None.

    Returns the characteristic formula of (a, alpha) at the least round at
    which the bisimulation game fails; by the rank-q equivalence theorem no
    lower-rank formula can separate the pair.
    """
    i, j = ctx.index_of(a), ctx.index_of(b)
    alpha = tuple(check_assignment(ctx.structures[i], alpha, ctx.k))
    beta = tuple(check_assignment(ctx.structures[j], beta, ctx.k))
    relation = games.bisim(ctx.structures[i], ctx.structures[j], ctx.k, ctx.registry)
    if relation.related(alpha, beta):
        return None
    q_star = relation.least_failing_round(alpha, beta)
    return chi(ctx, a, alpha, q_star)
