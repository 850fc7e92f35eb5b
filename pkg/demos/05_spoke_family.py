"""The spoke family: rank-bounded agreement without bisimilarity.

The left structure hangs chains of length 0..n off a root; the right adds
one longer spoke (a finite stand-in for an infinite ray).  With only the
diamond quantifier the two roots agree for more and more rounds as n
grows, yet the unbounded game always separates them -- the finite shadow
of the classical modal-equivalence-without-bisimilarity example.  The
agreement threshold is computed three independent ways.
"""
from kqlogic import games
from kqlogic.quantifiers import parse_quantifier
from kqlogic.verify import fig1_thresholds, gen_fig1_family

for n in (1, 2, 3):
    left, right = gen_fig1_family(n)
    result = fig1_thresholds(n)
    print(f"n={n}: |left|={len(left.structure.universe)}, |right|={len(right.structure.universe)}")
    print(f"  game threshold          : ~^{result['game']} holds, ~^{result['game'] + 1} fails")
    print(f"  oracle threshold        : {result['oracle']}")
    print(f"  characteristic threshold: {result['characteristic']}")
    print(f"  unbounded game bisimilar: {result['unbounded_bisimilar']}")

print("\nHow Challenger wins from the roots (n=1):")
left, right = gen_fig1_family(1)
dia = parse_quantifier("dia[R]", 1)
state = games.new_game(left.structure, left.assignment, right.structure, right.assignment, [dia])
print("  status:", state.status()["label"])
heads = right.structure.successors("R", right.assignment[0])
longest = max(heads, key=lambda e: len(right.structure.reachable_from("R", e)))
state = games.game_step(state, {"side": "right", "quantifier": "dia[R]", "witness": [[longest]]})
print(f"  Challenger picks the head of the extra spoke ({longest}); the engine answers",
      sorted(state.pending["response"]))
print("  From there Challenger walks down the longer chain and the engine's")
print("  shorter chain runs out one round before his does.")
