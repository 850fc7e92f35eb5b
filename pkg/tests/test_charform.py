import itertools
import random

import pytest

from kqlogic import charform, games
from kqlogic import formulas as fm
from kqlogic.quantifiers import QuantifierDef
from kqlogic.semantics import equiv_rank_oracle, equivalence_partitions, evaluate, same_class
from kqlogic.structures import Signature, Structure

DIA = QuantifierDef("dia", 1, relation="R")
SOME = QuantifierDef("some", 1)


def conjuncts(formula):
    out = []
    while isinstance(formula, fm.And):
        out.append(formula.left)
        formula = formula.right
    out.append(formula)
    return out


def test_chi_level0_is_the_atomic_type(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    chi0 = charform.chi(ctx, k1, ("a",), 0)
    got = set(conjuncts(chi0))
    assert got == {fm.TOP, fm.Not(fm.Atom("R", (1, 1))), fm.Not(fm.Atom("P", (1,)))}
    assert fm.quantifier_rank(chi0) == 0


def test_chi_self_satisfaction_and_rank(k1):
    ctx = charform.CharContext([k1], [DIA, SOME], 1)
    for e in k1.universe:
        for q in range(4):
            formula = charform.chi(ctx, k1, (e,), q)
            assert evaluate(k1, (e,), formula)
            assert fm.quantifier_rank(formula) <= q


def test_check_char_examples(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    assert charform.check_char(ctx, k1, ("a",), k1, ("a",), 3)
    assert not charform.check_char(ctx, k1, ("a",), k1, ("c",), 1)
    for q in range(3):
        for x in k1.universe:
            for y in k1.universe:
                assert charform.check_char(ctx, k1, (x,), k1, (y,), q) == \
                    charform.check_char(ctx, k1, (y,), k1, (x,), q)


def test_outside_context_rejected(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    stranger = Structure(k1.signature, ["z"], {})
    with pytest.raises(charform.CharformError, match="outside"):
        charform.chi(ctx, stranger, ("z",), 0)


def test_triple_agreement_random_corpus():
    sig = Signature.of({"R": 2, "P": 1})
    rng = random.Random(13)
    registries = [
        [DIA],
        [DIA, SOME],
        [QuantifierDef("dia_ge", 1, relation="R", n=2), QuantifierDef("all", 1)],
        [QuantifierDef("reach", 1, relation="R"), QuantifierDef("cyc", 1, relation="R")],
        [QuantifierDef("ex_ge", 1, n=2, var_index=1)],
    ]
    for _ in range(15):
        def draw():
            universe = ["a", "b", "c", "d"][: rng.randint(1, 4)]
            return Structure(sig, universe, {
                "R": [t for t in itertools.product(universe, repeat=2) if rng.random() < 0.5],
                "P": [(e,) for e in universe if rng.random() < 0.5],
            })
        a, b = draw(), draw()
        registry = rng.choice(registries)
        ctx = charform.CharContext([a, b], registry, 1)
        rel = games.bisim_rank(a, b, 1, 3, registry)
        parts = equivalence_partitions(a, b, 1, 3, registry)
        for q in range(4):
            for alpha in a.k_tuples(1):
                for beta in b.k_tuples(1):
                    game = rel.related(alpha, beta, q)
                    oracle = same_class(parts[q], ("A", alpha), ("B", beta))
                    char = charform.check_char(ctx, a, alpha, b, beta, q)
                    assert game == oracle == char, (a.to_dict(), b.to_dict(), q, alpha, beta)


def test_normal_form_examples(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    sig = k1.signature
    top_nf = charform.normal_form(ctx, fm.TOP)
    assert all(evaluate(k1, (e,), top_nf) for e in k1.universe)
    assert charform.normal_form(ctx, fm.FALSE) == fm.FALSE
    f = fm.parse_formula("dia[R] P(x1)", 1, sig)
    nf = charform.normal_form(ctx, f)
    for e in k1.universe:
        assert evaluate(k1, (e,), nf) == (e == "a")
    assert fm.quantifier_rank(nf) <= fm.quantifier_rank(f)


def test_normal_form_rejects_outside_registry(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    foreign = fm.Quant(SOME, fm.TOP)
    with pytest.raises(charform.CharformError, match="outside the context registry"):
        charform.normal_form(ctx, foreign)


def test_distinguishing_formula(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    formula = charform.distinguishing_formula(ctx, k1, ("a",), k1, ("c",))
    assert formula is not None
    assert fm.quantifier_rank(formula) == 1
    assert evaluate(k1, ("a",), formula)
    assert not evaluate(k1, ("c",), formula)
    # minimality: no separating formula of rank 0 exists
    assert equiv_rank_oracle(k1, ("a",), k1, ("c",), 0, [DIA])
    assert charform.distinguishing_formula(ctx, k1, ("a",), k1, ("a",)) is None


def test_distinguishing_formula_minimal_rank_randomized():
    sig = Signature.of({"R": 2})
    rng = random.Random(29)
    registry = [DIA, SOME]
    for _ in range(20):
        def draw():
            universe = ["a", "b", "c"][: rng.randint(1, 3)]
            return Structure(sig, universe,
                             {"R": [t for t in itertools.product(universe, repeat=2) if rng.random() < 0.5]})
        a, b = draw(), draw()
        ctx = charform.CharContext([a, b], registry, 1)
        alpha = (rng.choice(a.universe),)
        beta = (rng.choice(b.universe),)
        formula = charform.distinguishing_formula(ctx, a, alpha, b, beta)
        if formula is None:
            assert games.bisim(a, b, 1, registry).related(alpha, beta)
            continue
        rank = fm.quantifier_rank(formula)
        assert evaluate(a, alpha, formula) and not evaluate(b, beta, formula)
        if rank > 0:
            assert equiv_rank_oracle(a, alpha, b, beta, rank - 1, registry)


def test_delta_classes_partition_the_tuples(k1):
    ctx = charform.CharContext([k1], [DIA], 1)
    for q in range(3):
        classes = ctx.classes(q)
        for t in k1.k_tuples(1):
            containing = [c for c in classes if t in c.extensions[0]]
            assert len(containing) == 1


def test_context_validation(k1):
    with pytest.raises(charform.CharformError):
        charform.CharContext([], [DIA], 1)
    with pytest.raises(charform.CharformError):
        charform.CharContext([k1], [QuantifierDef("all", 2)], 1)
    other = Structure(Signature.of({"Q": 1}), ["a"], {})
    with pytest.raises(charform.CharformError, match="share the signature"):
        charform.CharContext([k1, other], [DIA], 1)
