import random

import pytest

from kqlogic import formulas as fm
from kqlogic.quantifiers import QuantifierDef
from kqlogic.structures import Signature


def parse(text, k=1, sig=None):
    return fm.parse_formula(text, k, sig or Signature.of({"R": 2, "P": 1}))


def test_parse_quantified_atom():
    f = parse("dia[R] P(x1)")
    assert f == fm.Quant(QuantifierDef("dia", 1, relation="R"), fm.Atom("P", (1,)))


def test_desugar_disjunction():
    p = fm.Atom("P", (1,))
    assert parse("(P(x1) | !P(x1))") == fm.Not(fm.And(fm.Not(p), fm.Not(fm.Not(p))))


def test_desugar_implication_and_iff():
    p, r = fm.Atom("P", (1,)), fm.Atom("R", (1, 1))
    assert parse("(P(x1) -> R(x1,x1))") == fm.Not(fm.And(p, fm.Not(r)))
    assert parse("(P(x1) <-> P(x1))") == fm.And(fm.Not(fm.And(p, fm.Not(p))), fm.Not(fm.And(p, fm.Not(p))))


def test_false_abbreviation():
    assert parse("false") == fm.Not(fm.TOP)


def test_quantifier_signature_check():
    with pytest.raises(fm.FormulaParseError, match="quantifier signature not contained"):
        parse("dia[S] true")


def test_unknown_relation_and_arity():
    with pytest.raises(fm.FormulaParseError, match="unknown relation"):
        parse("Q(x1)")
    with pytest.raises(fm.FormulaParseError, match="arity"):
        parse("R(x1)")


def test_variable_bounds():
    with pytest.raises(fm.FormulaParseError, match="out of range"):
        parse("P(x2)", k=1)
    parse("R(x1,x2)", k=2)
    with pytest.raises(fm.FormulaParseError):
        parse("P(x0)", k=1)


def test_quantifier_parameter_validation():
    with pytest.raises(fm.FormulaParseError):
        parse("ex>=0[x1] true")
    with pytest.raises(fm.FormulaParseError):
        parse("ex>=1[x2] true", k=1)
    with pytest.raises(fm.FormulaParseError, match="k=1"):
        # modal families are 1-quantifiers only
        parse("dia[R] true", k=2)


def test_print_examples():
    assert fm.print_formula(parse("dia[R] P(x1)")) == "dia[R] P(x1)"
    assert fm.print_formula(fm.TOP) == "true"
    f = parse("(P(x1) & (R(x1,x1) & true))")
    assert fm.print_formula(f) == "(P(x1) & (R(x1,x1) & true))"
    assert fm.print_formula(parse("ex>=2[x1] true")) == "ex>=2[x1] true"
    assert fm.print_formula(parse("dia>=3[R] true")) == "dia>=3[R] true"


def test_rank_examples():
    assert fm.quantifier_rank(parse("true")) == 0
    assert fm.quantifier_rank(parse("dia[R] dia[R] P(x1)")) == 2
    assert fm.quantifier_rank(parse("(P(x1) & dia[R] true)")) == 1


def test_rank_recursion_rules():
    f = parse("dia[R] P(x1)")
    assert fm.quantifier_rank(fm.Not(f)) == fm.quantifier_rank(f)
    g = parse("some dia[R] true")
    assert fm.quantifier_rank(fm.And(f, g)) == max(fm.quantifier_rank(f), fm.quantifier_rank(g))


def _random_formula(rng, k, sig, depth):
    if depth == 0 or rng.random() < 0.3:
        atoms = [fm.TOP] + [
            fm.Atom(rel, tuple(rng.randint(1, k) for _ in range(ar))) for rel, ar in sig.relations
        ]
        return rng.choice(atoms)
    roll = rng.random()
    if roll < 0.3:
        quant = rng.choice(
            [
                QuantifierDef("dia", 1, relation="R"),
                QuantifierDef("dia_ge", 1, relation="R", n=rng.randint(1, 3)),
                QuantifierDef("all", 1),
                QuantifierDef("some", 1),
                QuantifierDef("cyc", 1, relation="R"),
                QuantifierDef("inf", 1, relation="R"),
                QuantifierDef("reach", 1, relation="R"),
                QuantifierDef("ex_ge", 1, n=rng.randint(1, 2), var_index=1),
            ]
        )
        return fm.Quant(quant, _random_formula(rng, k, sig, depth - 1))
    if roll < 0.6:
        return fm.Not(_random_formula(rng, k, sig, depth - 1))
    return fm.And(_random_formula(rng, k, sig, depth - 1), _random_formula(rng, k, sig, depth - 1))


def test_round_trip_random_asts():
    sig = Signature.of({"R": 2, "P": 1})
    rng = random.Random(42)
    for _ in range(300):
        f = _random_formula(rng, 1, sig, 4)
        assert fm.parse_formula(fm.print_formula(f), 1, sig) == f


def test_parse_then_print_is_canonical():
    sig = Signature.of({"R": 2, "P": 1})
    for text in ["dia[R] P(x1)", "!(P(x1) & true)", "reach[R] true", "(true & !false)"]:
        once = fm.print_formula(fm.parse_formula(text, 1, sig))
        twice = fm.print_formula(fm.parse_formula(once, 1, sig))
        assert once == twice


def test_formula_file_parsing():
    sig = Signature.of({"R": 2, "P": 1})
    text = "# comment line\ndia[R] P(x1)\n\nP(x1) # trailing\n"
    formulas = fm.parse_formula_lines(text, 1, sig)
    assert len(formulas) == 2


def test_conj_disj_helpers():
    assert fm.conj_all([]) == fm.TOP
    assert fm.disj_all([]) == fm.FALSE
    p = fm.Atom("P", (1,))
    assert fm.conj_all([p]) == p
    assert fm.conj_all([p, fm.TOP]) == fm.And(p, fm.TOP)


def test_validate_formula_k_mismatch():
    sig = Signature.of({"R": 2})
    quant = QuantifierDef("all", 2)
    with pytest.raises(fm.FormulaError, match="built for k=2"):
        fm.validate_formula(fm.Quant(quant, fm.TOP), 1, sig)
