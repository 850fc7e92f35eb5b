"""Filters, reduced products, and truth-value checks at finite index.

Over a finite index set every ultrafilter is principal, so ultraproducts
collapse (up to isomorphism) onto one component; the check here validates
the quotient construction, relation clause, and assignment transport.
"""
import json

from kqlogic import products
from kqlogic.formulas import parse_formula
from kqlogic.structures import are_isomorphic, load_structure

k1 = load_structure(json.dumps({
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"]], "P": [["b"]]},
}))
loop = load_structure(json.dumps({
    "signature": {"R": 2, "P": 1},
    "universe": ["u", "v"],
    "relations": {"R": [["u", "v"], ["v", "u"]], "P": [["u"]]},
}))

print("-- direct product ----------------------------------------------------")
product = products.direct_product([k1, loop])
print(f"  |K1 x Loop| = {len(product.universe)}; R holds componentwise: |R| = {len(product.rel('R'))}")

print("\n-- filters over {0,1} -------------------------------------------------")
for filt in products.all_filters(("0", "1")):
    kind = "ultrafilter" if filt.is_ultrafilter() else "filter"
    members = sorted(sorted(s) for s in filt.sets)
    print(f"  {kind:11} {members}")

print("\n-- principal ultraproducts collapse onto a component -------------------")
for i, ultra in enumerate(products.enumerate_ultrafilters(("0", "1"))):
    rp = products.reduced_product([k1, loop], ultra)
    component = [k1, loop][i]
    iso = are_isomorphic(rp.structure, component)
    print(f"  principal at {i}: quotient has {len(rp.structure.universe)} elements, "
          f"isomorphic to component {i}: {iso is not None}")

print("\n-- the satisfaction / truth-value equivalence ---------------------------")
formula = parse_formula("dia[R] P(x1)", 1, k1.signature)
assignments = [("a",), ("v",)]
values = products.truth_value_set([k1, loop], assignments, formula)
print(f"  [[dia[R] P(x1)]] over the family at (a; v) = {sorted(values)}")
for i, ultra in enumerate(products.enumerate_ultrafilters(("0", "1"))):
    report = products.los_check([k1, loop], assignments, ultra, formula)
    print(f"  principal at {i}: product side {report.satisfied_in_product}, "
          f"truth-value side {report.truth_value_in_ultrafilter}, agree {report.agree}")
print("\n  " + report.note)
