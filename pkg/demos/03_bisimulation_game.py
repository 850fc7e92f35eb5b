"""Solving and playing the bisimulation game.

Challenger (Player 1) picks a side, a quantifier, and a witness there;
Duplicator (Player 2) answers with a witness on the other side; Challenger
picks a tuple from the answer; Duplicator matches it inside the challenge.
Duplicator survives forever exactly on the greatest-fixed-point relation.
"""
import json

from kqlogic import games
from kqlogic.quantifiers import parse_quantifier
from kqlogic.structures import load_structure

k1 = load_structure(json.dumps({
    "signature": {"R": 2, "P": 1},
    "universe": ["a", "b", "c"],
    "relations": {"R": [["a", "b"], ["b", "c"]], "P": [["b"]]},
}))
dia = parse_quantifier("dia[R]", 1)

print("-- stratified relations on K1 vs K1 with {dia[R]} -----------------")
relation = games.bisim(k1, k1, 1, [dia])
for r, level in enumerate(relation.levels):
    pairs = ", ".join(f"({a[0]},{b[0]})" for a, b in sorted(level))
    print(f"  ~{r}: {pairs}")
print(f"  stabilized at round {relation.stabilization_index}")
print("  (a,c) are atom-equivalent but split at round 1: a has an R-successor, c has none")

print("\n-- playing out the forced win from (a, c) --------------------------")
state = games.new_game(k1, ("a",), k1, ("c",), [dia])
print("  status:", state.status()["label"])
state = games.game_step(state, {"side": "left", "quantifier": "dia[R]", "witness": [["b"]]})
print("  Challenger plays witness {b} on the left; engine:", state.status()["label"],
      f"({state.outcome_reason})")

print("\n-- the engine holds a safe position forever ------------------------")
state = games.new_game(k1, ("a",), k1, ("a",), [dia])
print("  status:", state.status()["label"])
while True:
    challenges = games.minimal_witnesses_at(state, "left", dia)
    if not challenges:
        print(f"  at ({state.alpha[0]},{state.beta[0]}) Challenger has no dia challenge left;")
        print("  the play continues indefinitely without loss, so Duplicator wins.")
        break
    witness = [list(t) for t in challenges[0]]
    state = games.game_step(state, {"side": "left", "quantifier": "dia[R]", "witness": witness})
    picked = sorted(state.pending["response"])[0]
    state = games.game_step(state, {"challenge": list(picked)})
    print(f"  one round played; now at ({state.alpha[0]},{state.beta[0]}):", state.status()["label"])
