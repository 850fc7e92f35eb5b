"""Characteristic formulae, distinguishing formulae, and normal forms.

The rank-q characteristic formula of a pointed structure is satisfied by
exactly the q-round-equivalent pointed structures; a pair that is not
bisimilar is separated by the characteristic formula at the first failing
round, which is a minimal-rank separator.
"""
import json

from kqlogic import charform
from kqlogic.formulas import parse_formula, print_formula, quantifier_rank
from kqlogic.quantifiers import parse_quantifier
from kqlogic.semantics import evaluate
from kqlogic.structures import load_structure

k1 = load_structure(json.dumps({
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"]], "P": [["b"]]},
}))
dia = parse_quantifier("dia[R]", 1)
ctx = charform.CharContext([k1], [dia], 1)

print("-- chi at increasing rank for (K1, a) ------------------------------")
for q in range(3):
    chi = charform.chi(ctx, k1, ("a",), q)
    print(f"  rank {q} (qr={quantifier_rank(chi)}): {print_formula(chi)}")

print("\n-- satisfaction table of chi^1(a) ----------------------------------")
chi1 = charform.chi(ctx, k1, ("a",), 1)
for e in k1.universe:
    print(f"  K1, {e} |= chi^1(a)  ->  {evaluate(k1, (e,), chi1)}")

print("\n-- minimal-rank separators ------------------------------------------")
for x, y in [("a", "c"), ("a", "b"), ("b", "b")]:
    separator = charform.distinguishing_formula(ctx, k1, (x,), k1, (y,))
    if separator is None:
        print(f"  ({x}) vs ({y}): bisimilar")
    else:
        print(f"  ({x}) vs ({y}): rank {quantifier_rank(separator)} separator {print_formula(separator)}")

print("\n-- normal form over the comparison universe -------------------------")
formula = parse_formula("dia[R] P(x1)", 1, k1.signature)
normal = charform.normal_form(ctx, formula)
print(f"  dia[R] P(x1)  ~  {print_formula(normal)}")
print("  pointwise agreement on K1:",
      all(evaluate(k1, (e,), formula) == evaluate(k1, (e,), normal) for e in k1.universe))
