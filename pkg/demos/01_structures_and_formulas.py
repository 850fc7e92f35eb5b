"""Structures, formulas, and model checking.

The running example is a three-element structure K1 with one binary
relation R (a chain a -> b -> c) and one unary relation P marking b.
"""
import json

from kqlogic.formulas import parse_formula, print_formula, quantifier_rank
from kqlogic.semantics import evaluate, subformula_trace
from kqlogic.structures import load_structure, serialize_structure

K1_DOC = {
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"]], "P": [["b"]]},
}

k1 = load_structure(json.dumps(K1_DOC))
print("Loaded:", k1)
print("Serialization round-trips:", load_structure(serialize_structure(k1)) == k1)

print("\n-- Formulas ------------------------------------------------------")
for text in ["dia[R] P(x1)", "(P(x1) | !P(x1))", "reach[R] P(x1)", "ex>=2[x1] !P(x1)"]:
    formula = parse_formula(text, 1, k1.signature)
    print(f"  {text!r:28} rank {quantifier_rank(formula)}  prints as {print_formula(formula)!r}")

print("\n-- Model checking at each point ---------------------------------")
diamond = parse_formula("dia[R] P(x1)", 1, k1.signature)
for e in k1.universe:
    print(f"  K1, {e} |= dia[R] P(x1)  ->  {evaluate(k1, (e,), diamond)}")

print("\n-- Subformula trace ----------------------------------------------")
nested = parse_formula("dia[R] dia[R] P(x1)", 1, k1.signature)
for sub, ext in subformula_trace(k1, 1, nested):
    members = ", ".join(t[0] for t in sorted(ext))
    print(f"  [[{print_formula(sub)}]] = {{{members}}}")
print("  (so dia[R] dia[R] P(x1) fails at a: R[b] = {c} and c is not in P)")
