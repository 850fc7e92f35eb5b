"""The built-in quantifier families and their witness sets.

A quantifier maps each pointed structure to a family of witness sets;
`Q phi` holds when some witness lies inside the extension of phi.  Every
family answers three questions: is this set a witness, what are the
minimal witnesses, and does a witness fit inside a given extension.
"""
import json

from kqlogic.quantifiers import parse_quantifier, oracle_admits_within
from kqlogic.structures import load_structure

k1 = load_structure(json.dumps({
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"]], "P": [["b"]]},
}))
triangle = load_structure(json.dumps({
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"], ["c", "a"]], "P": []},
}))

def show(structure, label):
    print(f"\n-- minimal witnesses at ({label}, a) -----------------------------")
    for name in ["dia[R]", "dia>=2[R]", "all", "some", "cyc[R]", "inf[R]", "reach[R]", "ex>=2[x1]"]:
        quantifier = parse_quantifier(name, 1)
        witnesses = quantifier.minimal_witnesses(structure, ("a",))
        pretty = ", ".join("{" + ",".join(t[0] for t in sorted(w)) + "}" for w in witnesses)
        print(f"  {name:10} -> [{pretty}]")

show(k1, "chain")
show(triangle, "triangle")

print("\n-- admits_within: does a witness fit inside E? -------------------")
dia = parse_quantifier("dia[R]", 1)
cyc = parse_quantifier("cyc[R]", 1)
cases = [
    (dia, k1, {("b",)}, "dia on the chain, E={b}"),
    (dia, k1, {("a",), ("c",)}, "dia on the chain, E={a,c}"),
    (cyc, k1, {("a",), ("b",), ("c",)}, "cyc on the acyclic chain, E=everything"),
    (cyc, triangle, {("a",), ("b",), ("c",)}, "cyc on the triangle, E=everything"),
]
for quantifier, structure, ext, label in cases:
    fast = quantifier.admits_within(structure, ("a",), ext)
    slow = oracle_admits_within(quantifier, structure, ("a",), ext)
    print(f"  {label:42} -> {fast}  (powerset reference agrees: {fast == slow})")

print("\nNote: inf[R] asks for infinitely many reflexive successors, so its")
print("witness family is empty on every finite structure; `inf[R] phi` is")
print("constantly false here.")
