"""Randomized and exhaustive verification suites.

Each suite mechanically checks one of the core equivalence/invariance
results at desk scale, against independent procedures wherever one exists:
the game solver, the characteristic formulae, and the definable-set oracle
are three separately implemented roads to the same relations, and the
powerset-based quantifier reference is a fourth for the witness machinery.

Counterexamples are serialized with the full instance (structure documents,
k, registry, ranks) plus a ready-to-run CLI command.
"""
from __future__ import annotations

import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import charform, games, products, semantics
from . import formulas as fm
from .quantifiers import (
    QuantifierDef,
    oracle_admits_within,
    oracle_minimal_witnesses,
    parse_quantifier,
)
from .structures import PointedStructure, Signature, Structure, are_isomorphic

ELEMENT_NAMES = ("a", "b", "c", "d", "e", "f", "g", "h")


class VerifyError(ValueError):
    pass


ALL_FAMILIES = ("dia", "dia_ge", "cyc", "inf", "reach", "all", "some", "ex_ge")


@dataclass(frozen=True)
class Corpus:
    """Deterministic generation parameters; every suite derives its own RNG."""

    seed: int = 7
    count: int = 40
    max_size: int = 4
    max_relations: int = 2
    max_arity: int = 2
    max_k: int = 2
    max_rank: int = 3
    probes: int = 500
    families: tuple[str, ...] = ALL_FAMILIES

    def rng(self, salt: str) -> random.Random:
        return random.Random(f"{self.seed}:{salt}")


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    checks: int
    failures: list = field(default_factory=list)
    skipped: int = 0
    duration: float = 0.0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": self.checks,
            "failures": self.failures,
            "skipped": self.skipped,
            "duration": round(self.duration, 3),
            "meta": self.meta,
        }

    def summary(self) -> str:
        verdict = "PASS" if self.passed else f"FAIL ({len(self.failures)} counterexample(s))"
        skip = f", {self.skipped} skipped" if self.skipped else ""
        return f"[{self.suite}] {verdict} — {self.checks} checks{skip} in {self.duration:.1f}s"


# -- generators ---------------------------------------------------------------


def gen_signature(rng: random.Random, corpus: Corpus) -> Signature:
    names = ("R", "S")
    relations = []
    for i in range(rng.randint(1, corpus.max_relations)):
        relations.append((names[i], rng.randint(1, corpus.max_arity)))
    # modal-style quantifiers need a binary relation; keep most signatures interesting
    if corpus.max_arity >= 2 and all(a != 2 for _, a in relations) and rng.random() < 0.75:
        relations[0] = (relations[0][0], 2)
    return Signature.of(relations)


def gen_structure(rng: random.Random, signature: Signature, size: int) -> Structure:
    universe = ELEMENT_NAMES[:size]
    interpretation = {
        name: [t for t in itertools.product(universe, repeat=arity) if rng.random() < 0.5]
        for name, arity in signature.relations
    }
    return Structure(signature, universe, interpretation)


def edge_structures(signature: Signature, size: int) -> list[Structure]:
    """The fixed deterministic sub-corpus: all-empty and all-full relations."""
    universe = ELEMENT_NAMES[:size]
    empty = Structure(signature, universe, {})
    full = Structure(
        signature,
        universe,
        {name: list(itertools.product(universe, repeat=arity)) for name, arity in signature.relations},
    )
    return [empty, full]


def gen_structures(corpus: Corpus) -> list[Structure]:
    """A deterministic list of structures over one drawn signature.

    The fixed sub-corpus (singleton/max-size, empty/full relations) comes
    first; the remainder is random with each tuple included at probability 1/2.
    """
    rng = corpus.rng("structures")
    signature = gen_signature(rng, corpus)
    out = edge_structures(signature, 1) + edge_structures(signature, corpus.max_size)
    while len(out) < corpus.count:
        out.append(gen_structure(rng, signature, rng.randint(1, corpus.max_size)))
    return out[: corpus.count]


def quantifier_pool(signature: Signature, k: int, families: Sequence[str] = ALL_FAMILIES) -> list[str]:
    """Registry candidates for a game instance.  The infinity quantifier is
    excluded: its witness family is empty on finite structures, so it never
    contributes a move."""
    pool: list[str] = []
    binary = [name for name, arity in signature.relations if arity == 2]
    per_family = {
        "dia": [f"dia[{r}]" for r in binary],
        "dia_ge": [f"dia>=2[{r}]" for r in binary],
        "reach": [f"reach[{r}]" for r in binary],
        "cyc": [f"cyc[{r}]" for r in binary],
        "all": ["all"],
        "some": ["some"],
        "ex_ge": [f"ex>={n}[x{i}]" for n in (1, 2) for i in range(1, k + 1)],
    }
    for family, names in per_family.items():
        if family in families and (k == 1 or family in ("all", "some", "ex_ge")):
            pool += names
    return pool


@dataclass
class Instance:
    index: int
    a: Structure
    b: Structure
    k: int
    registry: tuple[QuantifierDef, ...]

    def describe(self) -> dict:
        return {
            "index": self.index,
            "k": self.k,
            "quantifiers": [q.name for q in self.registry],
            "left": self.a.to_dict(),
            "right": self.b.to_dict(),
        }


def gen_instances(corpus: Corpus, max_size: Optional[int] = None, k_two_share: float = 0.3) -> list[Instance]:
    """Structure pairs with a shared signature, k, and a drawn registry."""
    rng = corpus.rng("instances")
    cap = corpus.max_size if max_size is None else max_size
    out = []
    for idx in range(corpus.count):
        signature = gen_signature(rng, corpus)
        k = 2 if corpus.max_k >= 2 and rng.random() < k_two_share else 1

        def draw() -> Structure:
            size = rng.randint(1, cap)
            if rng.random() < 0.15:
                return rng.choice(edge_structures(signature, size))
            return gen_structure(rng, signature, size)

        a = draw()
        roll = rng.random()
        if roll < 0.2:
            b = a  # identical sides: guarantees bisimilar pairs for invariance checks
        elif roll < 0.5:
            b = gen_structure(rng, signature, len(a.universe))
        else:
            b = draw()
        pool = quantifier_pool(signature, k, corpus.families)
        names = rng.sample(pool, k=min(len(pool), rng.randint(1, 3)))
        registry = tuple(parse_quantifier(n, k) for n in sorted(names))
        out.append(Instance(idx, a, b, k, registry))
    return out


def gen_fig1_family(n: int) -> tuple[PointedStructure, PointedStructure]:
    """The spoke family: a root with chains of every length up to a bound.

    The left structure has spokes of chain length 0..n from the root; the
    right adds one spoke of length n+1 (the finite stand-in for an infinite
    ray).  With the diamond registry they agree up to a round threshold that
    grows with n but are not bisimilar in the unbounded game.
    """
    if n < 1:
        raise VerifyError("the spoke family needs n >= 1")

    def build(spoke_lengths) -> Structure:
        universe = ["a"]
        edges = []
        for m in spoke_lengths:
            previous = "a"
            for j in range(m + 1):
                node = f"s{m}_{j}"
                universe.append(node)
                edges.append((previous, node))
                previous = node
        return Structure(Signature.of({"R": 2}), universe, {"R": edges})

    left = build(range(0, n + 1))
    right = build(range(0, n + 2))
    return PointedStructure.of(left, ("a",)), PointedStructure.of(right, ("a",))


# -- failure serialization ----------------------------------------------------


def _cli_repro(instance: Instance, alpha=None, beta=None, rounds=None) -> str:
    parts = [
        "kqlogic bisim left.json right.json",
        f"--k {instance.k}",
        f"--quantifiers '{','.join(q.name for q in instance.registry)}'",
    ]
    if alpha is not None:
        parts.append(f"--alpha {','.join(alpha)}")
    if beta is not None:
        parts.append(f"--beta {','.join(beta)}")
    if rounds is not None:
        parts.append(f"--rounds {rounds}")
    return " ".join(parts)


def _failure(detail: dict, instance: Optional[Instance] = None, command: Optional[str] = None) -> dict:
    record = {"detail": detail}
    if instance is not None:
        record["instance"] = instance.describe()
        record["note"] = "save instance.left/right as left.json/right.json, then run `command`"
    if command is not None:
        record["command"] = command
    return record


# -- probe helpers ------------------------------------------------------------


def _probe_quantifiers(corpus: Corpus) -> list[QuantifierDef]:
    """One instantiation per selected family (both k where applicable)."""
    names_k1 = {
        "dia": ["dia[R]"], "dia_ge": ["dia>=2[R]"], "cyc": ["cyc[R]"],
        "inf": ["inf[R]"], "reach": ["reach[R]"],
        "all": ["all"], "some": ["some"], "ex_ge": ["ex>=1[x1]", "ex>=2[x1]"],
    }
    quants = [
        parse_quantifier(n, 1)
        for family in corpus.families
        for n in names_k1.get(family, [])
    ]
    if corpus.max_k >= 2:
        names_k2 = {"all": ["all"], "some": ["some"], "ex_ge": ["ex>=1[x1]", "ex>=2[x2]"]}
        quants += [
            parse_quantifier(n, 2)
            for family in corpus.families
            for n in names_k2.get(family, [])
        ]
    return quants


_PROBE_SIGNATURE = Signature.of({"R": 2, "P": 1})


def _random_probe(rng: random.Random, qd: QuantifierDef, corpus: Corpus, heavy_ok: bool):
    """A random (structure, assignment, extension) triple for one quantifier.

    At k=2 the powerset reference blows up as 2^(size^2); sizes are kept at 3
    with occasional size-4/extension-capped probes so the brute force stays
    inside the stated time budget.
    """
    if qd.k == 1:
        size = rng.randint(1, corpus.max_size)
    else:
        size = rng.randint(1, 3) if not heavy_ok else corpus.max_size
    structure = gen_structure(rng, _PROBE_SIGNATURE, size)
    alpha = tuple(rng.choice(structure.universe) for _ in range(qd.k))
    tuples = structure.k_tuples(qd.k)
    if qd.k == 2 and heavy_ok:
        chosen = rng.sample(tuples, k=min(len(tuples), 10))
        ext = frozenset(t for t in chosen if rng.random() < 0.7)
    else:
        ext = frozenset(t for t in tuples if rng.random() < 0.5)
    return structure, alpha, ext


# -- suites -------------------------------------------------------------------


def suite_monotone(corpus: Corpus) -> SuiteReport:
    """Upward monotonicity of admits_within in the extension argument."""
    report = SuiteReport("monotone", True, 0)
    for qd in _probe_quantifiers(corpus):
        rng = corpus.rng(f"monotone:{qd.name}:{qd.k}")
        for _ in range(corpus.probes):
            size = rng.randint(1, corpus.max_size)
            structure = gen_structure(rng, _PROBE_SIGNATURE, size)
            alpha = tuple(rng.choice(structure.universe) for _ in range(qd.k))
            tuples = structure.k_tuples(qd.k)
            larger = frozenset(t for t in tuples if rng.random() < 0.6)
            smaller = frozenset(t for t in larger if rng.random() < 0.6)
            report.checks += 1
            if qd.admits_within(structure, alpha, smaller) and not qd.admits_within(structure, alpha, larger):
                report.passed = False
                report.failures.append(
                    _failure(
                        {
                            "quantifier": qd.name,
                            "structure": structure.to_dict(),
                            "alpha": list(alpha),
                            "smaller": sorted(map(list, smaller)),
                            "larger": sorted(map(list, larger)),
                        }
                    )
                )
    return report


def suite_minimal_witness(corpus: Corpus) -> SuiteReport:
    """Witness machinery against the powerset reference, and the
    minimal-witness game against the all-witness game."""
    report = SuiteReport("minimal-witness", True, 0)

    # admits_within vs brute force over subsets of the extension
    for qd in _probe_quantifiers(corpus):
        rng = corpus.rng(f"minwit:admits:{qd.name}:{qd.k}")
        for i in range(corpus.probes):
            structure, alpha, ext = _random_probe(rng, qd, corpus, heavy_ok=(qd.k == 2 and i % 16 == 0))
            report.checks += 1
            fast = qd.admits_within(structure, alpha, ext)
            slow = oracle_admits_within(qd, structure, alpha, ext)
            if fast != slow:
                report.passed = False
                report.failures.append(
                    _failure(
                        {
                            "quantifier": qd.name,
                            "structure": structure.to_dict(),
                            "alpha": list(alpha),
                            "extension": sorted(map(list, ext)),
                            "admits_within": fast,
                            "powerset_reference": slow,
                        }
                    )
                )

    # minimal_witnesses vs powerset filtering
    for qd in _probe_quantifiers(corpus):
        rng = corpus.rng(f"minwit:minimal:{qd.name}:{qd.k}")
        for _ in range(max(50, corpus.probes // 5)):
            size = rng.randint(1, corpus.max_size if qd.k == 1 else 3)
            structure = gen_structure(rng, _PROBE_SIGNATURE, size)
            alpha = tuple(rng.choice(structure.universe) for _ in range(qd.k))
            report.checks += 1
            fast = qd.minimal_witnesses(structure, alpha)
            slow = oracle_minimal_witnesses(qd, structure, alpha)
            if fast != slow:
                report.passed = False
                report.failures.append(
                    _failure(
                        {
                            "quantifier": qd.name,
                            "structure": structure.to_dict(),
                            "alpha": list(alpha),
                            "minimal_witnesses": [sorted(map(list, w)) for w in fast],
                            "powerset_reference": [sorted(map(list, w)) for w in slow],
                        }
                    )
                )

    # the minimal-witness game vs the all-witness game, exhaustive tiny slice
    sig = Signature.of({"R": 2})
    k1_registry = tuple(parse_quantifier(n, 1) for n in ("dia[R]", "some", "ex>=1[x1]"))
    small: list[Structure] = []
    for size in (1, 2):
        universe = ELEMENT_NAMES[:size]
        cells = list(itertools.product(universe, repeat=2))
        for bits in itertools.product((False, True), repeat=len(cells)):
            small.append(Structure(sig, universe, {"R": [c for c, keep in zip(cells, bits) if keep]}))
    for a, b in itertools.product(small, repeat=2):
        report.checks += 1
        fast = games.bisim_rank(a, b, 1, 2, k1_registry)
        slow = games.bisim_rank_exhaustive(a, b, 1, 2, k1_registry)
        if [set(fast.level(r)) for r in range(3)] != [set(slow.level(r)) for r in range(3)]:
            report.passed = False
            report.failures.append(
                _failure({"left": a.to_dict(), "right": b.to_dict(), "k": 1,
                          "quantifiers": [q.name for q in k1_registry]})
            )

    # random slice with drawn registries
    slice_corpus = replace(corpus, count=max(20, corpus.count // 2))
    for inst in gen_instances(slice_corpus, max_size=3, k_two_share=0.25):
        if inst.k == 2 and (len(inst.a.universe) > 2 or len(inst.b.universe) > 2):
            continue  # the all-witness game is doubly exponential in k
        report.checks += 1
        fast = games.bisim_rank(inst.a, inst.b, inst.k, 2, inst.registry)
        slow = games.bisim_rank_exhaustive(inst.a, inst.b, inst.k, 2, inst.registry)
        if [set(fast.level(r)) for r in range(3)] != [set(slow.level(r)) for r in range(3)]:
            report.passed = False
            report.failures.append(_failure({"mismatch": "game levels"}, inst, _cli_repro(inst, rounds=2)))
    return report


def _triple_check(report: SuiteReport, inst: Instance, q_max: int) -> None:
    rel = games.bisim_rank(inst.a, inst.b, inst.k, q_max, inst.registry)
    parts = semantics.equivalence_partitions(inst.a, inst.b, inst.k, q_max, inst.registry)
    ctx = charform.CharContext([inst.a, inst.b], inst.registry, inst.k)
    for q in range(q_max + 1):
        for alpha in inst.a.k_tuples(inst.k):
            for beta in inst.b.k_tuples(inst.k):
                report.checks += 1
                game = rel.related(alpha, beta, q)
                oracle = semantics.same_class(parts[q], ("A", alpha), ("B", beta))
                char = charform.check_char(ctx, inst.a, alpha, inst.b, beta, q)
                if not (game == oracle == char):
                    report.passed = False
                    report.failures.append(
                        _failure(
                            {"q": q, "alpha": list(alpha), "beta": list(beta),
                             "game": game, "oracle": oracle, "characteristic": char},
                            inst,
                            _cli_repro(inst, alpha, beta, q),
                        )
                    )


def fig1_thresholds(n: int) -> dict:
    """The agreement threshold of the spoke family, via all three procedures."""
    left, right = gen_fig1_family(n)
    a, b = left.structure, right.structure
    registry = (parse_quantifier("dia[R]", 1),)
    root_a, root_b = left.assignment, right.assignment

    rel = games.bisim(a, b, 1, registry)
    game_level = rel.survival_level(root_a, root_b)

    parts, _ = semantics.stabilized_equivalence(a, b, 1, registry)
    oracle_level: float = -1
    for q, partition in enumerate(parts):
        if semantics.same_class(partition, ("A", root_a), ("B", root_b)):
            oracle_level = q
        else:
            break
    else:
        oracle_level = math.inf  # equal at the fixed point: equivalent at all ranks

    ctx = charform.CharContext([a, b], registry, 1)
    chi_level: float = -1
    cap = len(parts) + 2
    for q in range(cap + 1):
        if charform.check_char(ctx, a, root_a, b, root_b, q):
            chi_level = q
        else:
            break
    else:
        chi_level = math.inf

    return {
        "n": n,
        "game": game_level,
        "oracle": oracle_level,
        "characteristic": chi_level,
        "unbounded_bisimilar": rel.related(root_a, root_b),
    }


def suite_ef(corpus: Corpus) -> SuiteReport:
    """Triple agreement of game, characteristic formulae, and oracle, plus
    the spoke-family thresholds."""
    report = SuiteReport("ef", True, 0)
    q_max = min(3, corpus.max_rank)
    for inst in gen_instances(corpus):
        _triple_check(report, inst, q_max)

    thresholds = []
    for n in (1, 2, 3):
        result = fig1_thresholds(n)
        thresholds.append(result)
        report.checks += 1
        same = result["game"] == result["oracle"] == result["characteristic"]
        finite = result["game"] != math.inf and not result["unbounded_bisimilar"]
        if not (same and finite):
            report.passed = False
            report.failures.append(_failure({"fig1": result}))
    report.meta["fig1_thresholds"] = [
        {k: (str(v) if v == math.inf else v) for k, v in t.items()} for t in thresholds
    ]
    return report


def suite_charform(corpus: Corpus) -> SuiteReport:
    """Self-satisfaction, rank bounds, symmetry, and normal forms of chi."""
    report = SuiteReport("charform", True, 0)
    q_max = min(3, corpus.max_rank)
    rng = corpus.rng("charform")
    for inst in gen_instances(corpus):
        ctx = charform.CharContext([inst.a, inst.b], inst.registry, inst.k)
        for i, s in enumerate((inst.a, inst.b)):
            for t in s.k_tuples(inst.k):
                for q in range(q_max + 1):
                    formula = charform.chi(ctx, s, t, q)
                    report.checks += 1
                    self_sat = t in ctx.ext(i, formula)
                    rank = fm.quantifier_rank(formula)
                    rank_ok = rank <= q and (q > 0 or rank == 0)
                    if not (self_sat and rank_ok):
                        report.passed = False
                        report.failures.append(
                            _failure(
                                {"side": "left" if i == 0 else "right", "tuple": list(t), "q": q,
                                 "self_satisfied": self_sat, "rank": rank},
                                inst,
                            )
                        )
        # symmetry spot checks: chi acceptance is a symmetric relation
        for _ in range(4):
            alpha = rng.choice(inst.a.k_tuples(inst.k))
            beta = rng.choice(inst.b.k_tuples(inst.k))
            q = rng.randint(0, q_max)
            report.checks += 1
            forward = charform.check_char(ctx, inst.a, alpha, inst.b, beta, q)
            backward = charform.check_char(ctx, inst.b, beta, inst.a, alpha, q)
            if forward != backward:
                report.passed = False
                report.failures.append(
                    _failure({"asymmetric": {"alpha": list(alpha), "beta": list(beta), "q": q,
                                             "forward": forward, "backward": backward}}, inst)
                )
        # normal form agrees pointwise on the comparison universe
        for _ in range(2):
            formula = _random_formula(rng, inst, depth=2)
            normal = charform.normal_form(ctx, formula)
            for i, s in enumerate((inst.a, inst.b)):
                original = semantics.extension(s, inst.k, formula)
                rebuilt = ctx.ext(i, normal)
                report.checks += 1
                if original != rebuilt:
                    report.passed = False
                    report.failures.append(
                        _failure({"normal_form_disagrees": fm.print_formula(formula),
                                  "side": "left" if i == 0 else "right"}, inst)
                    )
    return report


def _random_formula(rng: random.Random, inst: Instance, depth: int) -> fm.Formula:
    signature = inst.a.signature
    if depth == 0 or rng.random() < 0.3:
        choices: list[fm.Formula] = [fm.TOP]
        for rel, arity in signature.relations:
            variables = tuple(rng.randint(1, inst.k) for _ in range(arity))
            choices.append(fm.Atom(rel, variables))
        return rng.choice(choices)
    roll = rng.random()
    if roll < 0.35 and inst.registry:
        return fm.Quant(rng.choice(inst.registry), _random_formula(rng, inst, depth - 1))
    if roll < 0.65:
        return fm.Not(_random_formula(rng, inst, depth - 1))
    return fm.And(_random_formula(rng, inst, depth - 1), _random_formula(rng, inst, depth - 1))


def suite_invariance(corpus: Corpus) -> SuiteReport:
    """Bisimilar pairs agree on every rank-<=3 formula class (evaluated anew)."""
    report = SuiteReport("invariance", True, 0)
    q_max = min(3, corpus.max_rank)
    instances_with_pairs = 0
    for inst in gen_instances(corpus):
        relation = games.bisim(inst.a, inst.b, inst.k, inst.registry)
        bisimilar = sorted(relation.final(), key=lambda p: (inst.a.sort_key(p[0]), inst.b.sort_key(p[1])))
        if not bisimilar:
            continue
        instances_with_pairs += 1
        try:
            pairs = semantics.definable_sets(inst.a, inst.b, inst.k, q_max, inst.registry, max_pairs=1024)
        except semantics.SemanticsError:
            report.skipped += 1
            continue
        memo_a: dict = {}
        memo_b: dict = {}
        for pair in pairs:
            ext_a = semantics.extension(inst.a, inst.k, pair.formula, memo=memo_a)
            ext_b = semantics.extension(inst.b, inst.k, pair.formula, memo=memo_b)
            report.checks += 1
            if ext_a != pair.ext_a or ext_b != pair.ext_b:
                report.passed = False
                report.failures.append(
                    _failure({"closure_extension_mismatch": fm.print_formula(pair.formula)}, inst)
                )
                continue
            for alpha, beta in bisimilar:
                report.checks += 1
                if (alpha in ext_a) != (beta in ext_b):
                    report.passed = False
                    report.failures.append(
                        _failure(
                            {"formula": fm.print_formula(pair.formula), "rank": pair.rank,
                             "alpha": list(alpha), "beta": list(beta)},
                            inst,
                            _cli_repro(inst, alpha, beta),
                        )
                    )
    report.meta["instances_with_bisimilar_pairs"] = instances_with_pairs
    return report


def _joint_class_count(inst: Instance, rel_ab, rel_aa, rel_bb, r: int) -> int:
    nodes = [("A", t) for t in inst.a.k_tuples(inst.k)] + [("B", t) for t in inst.b.k_tuples(inst.k)]
    parent = {node: node for node in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        root_x, root_y = find(x), find(y)
        if root_x != root_y:
            parent[root_x] = root_y

    for alpha, beta in rel_ab.level(r):
        union(("A", alpha), ("B", beta))
    for alpha, alpha2 in rel_aa.level(r):
        union(("A", alpha), ("A", alpha2))
    for beta, beta2 in rel_bb.level(r):
        union(("B", beta), ("B", beta2))
    return len({find(node) for node in nodes})


def suite_finite_index(corpus: Corpus) -> SuiteReport:
    """Monotone refinement, bounded stable index, and gfp agreement."""
    report = SuiteReport("finite-index", True, 0)
    for inst in gen_instances(corpus):
        rel_ab = games.bisim(inst.a, inst.b, inst.k, inst.registry)
        rel_aa = games.bisim(inst.a, inst.a, inst.k, inst.registry)
        rel_bb = games.bisim(inst.b, inst.b, inst.k, inst.registry)
        depth = max(len(rel_ab.levels), len(rel_aa.levels), len(rel_bb.levels))
        previous_count = None
        ok = True
        for r in range(depth):
            if r + 1 < len(rel_ab.levels) and not rel_ab.levels[r + 1] <= rel_ab.levels[r]:
                ok = False
                break
            count = _joint_class_count(inst, rel_ab, rel_aa, rel_bb, r)
            if previous_count is not None and count < previous_count:
                ok = False
                break
            previous_count = count
        size_bound = len(inst.a.k_tuples(inst.k)) + len(inst.b.k_tuples(inst.k))
        index_ok = previous_count is not None and previous_count <= size_bound
        recheck = games.bisim_rank(inst.a, inst.b, inst.k, depth + 2, inst.registry)
        gfp_ok = recheck.stabilized and set(recheck.final()) == set(rel_ab.final())
        report.checks += 1
        if not (ok and index_ok and gfp_ok):
            report.passed = False
            report.failures.append(
                _failure(
                    {"monotone_refinement": ok, "index_bounded": index_ok, "gfp_agreement": gfp_ok,
                     "final_index": previous_count, "bound": size_bound},
                    inst,
                    _cli_repro(inst),
                )
            )
        else:
            report.meta.setdefault("indices", []).append(previous_count)
    return report


def suite_hm(corpus: Corpus) -> SuiteReport:
    """Stabilized elementary equivalence coincides with stabilized bisimilarity."""
    report = SuiteReport("hm", True, 0)
    for inst in gen_instances(corpus):
        parts, _ = semantics.stabilized_equivalence(inst.a, inst.b, inst.k, inst.registry)
        final = parts[-1]
        rel_ab = games.bisim(inst.a, inst.b, inst.k, inst.registry).final()
        rel_aa = games.bisim(inst.a, inst.a, inst.k, inst.registry).final()
        rel_bb = games.bisim(inst.b, inst.b, inst.k, inst.registry).final()

        def game_related(x, y) -> bool:
            (tag_x, t_x), (tag_y, t_y) = x, y
            if tag_x == "A" and tag_y == "A":
                return (t_x, t_y) in rel_aa
            if tag_x == "B" and tag_y == "B":
                return (t_x, t_y) in rel_bb
            if tag_x == "A":
                return (t_x, t_y) in rel_ab
            return (t_y, t_x) in rel_ab

        nodes = [("A", t) for t in inst.a.k_tuples(inst.k)] + [("B", t) for t in inst.b.k_tuples(inst.k)]
        for x in nodes:
            for y in nodes:
                report.checks += 1
                game = game_related(x, y)
                oracle = semantics.same_class(final, x, y)
                if game != oracle:
                    report.passed = False
                    report.failures.append(
                        _failure({"x": list(x), "y": list(y), "game": game, "oracle": oracle},
                                 inst, _cli_repro(inst)),
                    )
    return report


def suite_products(corpus: Corpus) -> SuiteReport:
    """Principal ultraproducts, atomic filter equivalence, and Łoś checks."""
    report = SuiteReport("products", True, 0)
    rng = corpus.rng("products")
    family_count = max(6, corpus.count // 5)
    size_profiles = [
        (2, 2, 2), (1, 2, 3), (1, 2, 4), (2, 2), (2, 3), (2, 4),
        (1, 1, 2), (3,), (4,), (8,), (1, 8), (3, 2, 1),
    ]  # every shape with <= 3 components and product universe <= 8
    for family_index in range(family_count):
        signature = gen_signature(rng, corpus)
        sizes = size_profiles[family_index % len(size_profiles)]
        family = [gen_structure(rng, signature, size) for size in sizes]
        labels = tuple(str(i) for i in range(len(family)))

        # principal reduced products are isomorphic to their component
        for i, ultra in enumerate(products.enumerate_ultrafilters(labels)):
            rp = products.reduced_product(family, ultra)
            report.checks += 1
            if are_isomorphic(rp.structure, family[i]) is None:
                report.passed = False
                report.failures.append(
                    _failure({"family": [s.to_dict() for s in family], "principal_at": i,
                              "product": rp.structure.to_dict()})
                )

        # atomic equivalence for every validated filter
        k_atom = 2 if any(arity == 2 for _, arity in signature.relations) else 1
        slots = [
            (rel, vs)
            for rel, arity in signature.relations
            for vs in itertools.product(range(1, k_atom + 1), repeat=arity)
        ]
        for filt in products.all_filters(labels):
            rp = products.reduced_product(family, filt)
            for _ in range(3):
                assignments = [tuple(rng.choice(s.universe) for _ in range(k_atom)) for s in family]
                transported = rp.transport(assignments)
                for rel, vs in slots:
                    atom = fm.Atom(rel, vs)
                    report.checks += 1
                    left = semantics.evaluate(rp.structure, transported, atom)
                    right = filt.contains(products.truth_value_set(family, assignments, atom))
                    if left != right:
                        report.passed = False
                        report.failures.append(
                            _failure({"family": [s.to_dict() for s in family],
                                      "filter": filt.to_dict(), "atom": fm.print_formula(atom),
                                      "product_side": left, "truth_value_side": right})
                        )

        # Łoś check for every rank-<=2 formula class over each principal ultrafilter
        binary = [name for name, arity in signature.relations if arity == 2]
        registry_names = [f"dia[{binary[0]}]", "some"] if binary else ["some", "ex>=1[x1]"]
        registry = tuple(parse_quantifier(n, 1) for n in registry_names)
        for i, ultra in enumerate(products.enumerate_ultrafilters(labels)):
            rp = products.reduced_product(family, ultra)
            try:
                reps = semantics.definable_sets(rp.structure, family[i], 1, 2, registry, max_pairs=4096)
            except semantics.SemanticsError:
                report.skipped += 1
                continue
            assignments = [ (rng.choice(s.universe),) for s in family]
            for pair in reps:
                los = products.los_check(family, assignments, ultra, pair.formula)
                report.checks += 1
                if not los.agree:
                    report.passed = False
                    report.failures.append(
                        _failure({"family": [s.to_dict() for s in family], "principal_at": i,
                                  "los": los.to_dict()})
                    )
    return report


_SUITES = {
    "ef": suite_ef,
    "hm": suite_hm,
    "monotone": suite_monotone,
    "invariance": suite_invariance,
    "minimal-witness": suite_minimal_witness,
    "charform": suite_charform,
    "products": suite_products,
    "finite-index": suite_finite_index,
}

SUITE_NAMES = tuple(_SUITES)


def run_suite(name: str, corpus: Optional[Corpus] = None, **overrides) -> SuiteReport:
    """Run one named suite; overrides replace corpus fields (seed, count, ...)."""
    if name not in _SUITES:
        raise VerifyError(f"unknown suite {name!r}; available: {', '.join(SUITE_NAMES)}")
    corpus = corpus or Corpus()
    if overrides:
        corpus = replace(corpus, **overrides)
    started = time.perf_counter()
    report = _SUITES[name](corpus)
    report.duration = time.perf_counter() - started
    return report
