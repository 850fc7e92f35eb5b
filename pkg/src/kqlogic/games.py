"""Bisimulation games over witness-set quantifiers.

Solves the q-round and the unbounded two-player game between Challenger
(Player 1) and Duplicator (Player 2): stratified relations by refinement,
the greatest fixed point by iterating to stability, strategy extraction for
Player 2, and stepwise play for interactive sessions.

The solver restricts both players to inclusion-minimal witnesses.  Any
witness contains a minimal one; a challenge shrinks monotonically in the
challenger's favour and a response in the responder's, so the restricted
game has the same value -- the claim is not assumed but cross-checked
against the all-witness game (`bisim_rank_exhaustive`) by the test suites.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .quantifiers import QuantifierDef, QuantifierError, oracle_witnesses
from .structures import Assignment, PointedStructure, Structure, check_assignment

Pair = tuple[tuple, tuple]  # (alpha in A^k, beta in B^k)


class GameError(ValueError):
    """Illegal move or request, with a machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class GamePosition:
    left: PointedStructure
    right: PointedStructure

    def __post_init__(self):
        if self.left.structure.signature != self.right.structure.signature:
            raise GameError("signature_mismatch", "positions require identical signatures")
        if self.left.k != self.right.k:
            raise GameError("k_mismatch", "positions require the same k on both sides")


def atoms_agree(a: Structure, alpha: Assignment, b: Structure, beta: Assignment) -> bool:
    """Atom equivalence: agreement on every relational atom over x1..xk."""
    if a.signature != b.signature:
        raise GameError("signature_mismatch", "atom equivalence requires identical signatures")
    alpha = check_assignment(a, alpha)
    beta = check_assignment(b, beta, len(alpha))
    k = len(alpha)
    for rel, arity in a.signature.relations:
        for vs in itertools.product(range(k), repeat=arity):
            if (tuple(alpha[i] for i in vs) in a.rel(rel)) != (tuple(beta[i] for i in vs) in b.rel(rel)):
                return False
    return True


def atom_equiv(position: GamePosition) -> bool:
    return atoms_agree(
        position.left.structure, position.left.assignment,
        position.right.structure, position.right.assignment,
    )


@dataclass(frozen=True)
class BisimRelation:
    """Stratified game relations ~^r and, when reached, their fixed point."""

    a: Structure
    b: Structure
    k: int
    registry: tuple[QuantifierDef, ...]
    levels: tuple[frozenset, ...]  # levels[r] = pairs where P2 survives r rounds
    stabilized: bool
    stabilization_index: Optional[int]

    def level(self, r: int) -> frozenset:
        if r < len(self.levels):
            return self.levels[r]
        if self.stabilized:
            return self.levels[-1]
        raise GameError("depth_exceeded", f"relation computed only to round {len(self.levels) - 1}")

    def final(self) -> frozenset:
        return self.levels[-1]

    def related(self, alpha, beta, r: Optional[int] = None) -> bool:
        pair = (tuple(alpha), tuple(beta))
        return pair in (self.final() if r is None else self.level(r))

    def survival_level(self, alpha, beta) -> float:
        """Largest r with (alpha, beta) in ~^r; -1 if atom-inequivalent, inf if in the fixed point."""
        pair = (tuple(alpha), tuple(beta))
        if pair not in self.levels[0]:
            return -1
        if self.stabilized and pair in self.levels[-1]:
            return math.inf
        level = 0
        for r in range(1, len(self.levels)):
            if pair in self.levels[r]:
                level = r
            else:
                break
        return level

    def least_failing_round(self, alpha, beta) -> Optional[int]:
        """Least r with (alpha, beta) outside ~^r, or None within the computed horizon."""
        pair = (tuple(alpha), tuple(beta))
        for r, lv in enumerate(self.levels):
            if pair not in lv:
                return r
        return None


WitnessProvider = Callable[[Structure, tuple, QuantifierDef], Sequence[frozenset]]


def _minimal_witness_provider() -> WitnessProvider:
    cache: dict = {}

    def provide(structure: Structure, alpha: tuple, qd: QuantifierDef):
        key = (id(structure), alpha, qd)
        got = cache.get(key)
        if got is None:
            got = qd.minimal_witnesses(structure, alpha)
            cache[key] = got
        return got

    return provide


def _exhaustive_witness_provider() -> WitnessProvider:
    cache: dict = {}

    def provide(structure: Structure, alpha: tuple, qd: QuantifierDef):
        key = (id(structure), alpha, qd)
        got = cache.get(key)
        if got is None:
            got = oracle_witnesses(qd, structure, alpha)
            cache[key] = got
        return got

    return provide


def _survives_one_round(
    a: Structure,
    b: Structure,
    registry: Sequence[QuantifierDef],
    prev: frozenset,
    pair: Pair,
    witnesses_of: WitnessProvider,
) -> bool:
    """Player 2's one-round condition: every challenge has a response whose
    members are all matched back into the challenge within `prev`."""
    alpha, beta = pair
    for qd in registry:
        left_witnesses = witnesses_of(a, alpha, qd)
        right_witnesses = witnesses_of(b, beta, qd)
        for s in left_witnesses:  # challenge played on the left
            if not any(all(any((g, d) in prev for g in s) for d in t) for t in right_witnesses):
                return False
        for t in right_witnesses:  # challenge played on the right
            if not any(all(any((g, d) in prev for d in t) for g in s) for s in left_witnesses):
                return False
    return True


def _solve(
    a: Structure,
    b: Structure,
    k: int,
    registry: Sequence[QuantifierDef],
    q: Optional[int],
    witnesses_of: WitnessProvider,
) -> BisimRelation:
    registry = tuple(registry)
    for qd in registry:
        if qd.k != k:
            raise GameError("k_mismatch", f"quantifier {qd.name} built for k={qd.k}, game plays k={k}")
        qd.check_structure(a)
        qd.check_structure(b)
    level0 = frozenset(
        (alpha, beta)
        for alpha in a.k_tuples(k)
        for beta in b.k_tuples(k)
        if atoms_agree(a, alpha, b, beta)
    )
    levels = [level0]
    stabilized = False
    stab_index: Optional[int] = None
    while q is None or len(levels) <= q:
        prev = levels[-1]
        nxt = frozenset(p for p in prev if _survives_one_round(a, b, registry, prev, p, witnesses_of))
        if nxt == prev:
            stabilized = True
            stab_index = len(levels) - 1
            break
        levels.append(nxt)
    return BisimRelation(a, b, k, registry, tuple(levels), stabilized, stab_index)


def bisim_rank(a: Structure, b: Structure, k: int, q: int, registry: Sequence[QuantifierDef]) -> BisimRelation:
    """The q-round game relations ~^0 .. ~^q (early-stopped when stable)."""
    if q < 0:
        raise GameError("bad_round_bound", "round bound must be >= 0")
    return _solve(a, b, k, registry, q, _minimal_witness_provider())


def bisim(a: Structure, b: Structure, k: int, registry: Sequence[QuantifierDef]) -> BisimRelation:
    """The unbounded game: refine until the greatest fixed point."""
    return _solve(a, b, k, registry, None, _minimal_witness_provider())


def bisim_rank_exhaustive(
    a: Structure, b: Structure, k: int, q: int, registry: Sequence[QuantifierDef]
) -> BisimRelation:
    """The q-round game with players ranging over ALL witnesses (powerset
    enumeration through is_witness); reference implementation for the
    minimal-witness soundness suite.  Guarded to tiny universes."""
    if q < 0:
        raise GameError("bad_round_bound", "round bound must be >= 0")
    return _solve(a, b, k, registry, q, _exhaustive_witness_provider())


# -- strategies -------------------------------------------------------------


def _witness_sort_key(structure: Structure, witness: frozenset):
    return tuple(sorted(structure.sort_key(t) for t in witness))


@dataclass(frozen=True)
class Strategy:
    """Player 2's certified responses inside the winning region.

    Responses outside the region raise; heuristic best-effort play for lost
    positions lives in the game session, not here.
    """

    relation: BisimRelation

    def _sides(self, side: str):
        rel = self.relation
        if side == "left":
            return rel.a, rel.b
        if side == "right":
            return rel.b, rel.a
        raise GameError("unknown_side", f"side must be 'left' or 'right', got {side!r}")

    def _oriented(self, side: str, challenge_member, response_member) -> Pair:
        # Pairs are always (A-tuple, B-tuple).
        if side == "left":
            return (challenge_member, response_member)
        return (response_member, challenge_member)

    def response_witness(
        self, alpha, beta, side: str, qd: QuantifierDef, challenge: frozenset, target: frozenset
    ) -> frozenset:
        """A minimal response witness on the opposite side, every member of
        which is matched into the challenge within `target`."""
        challenge_structure, response_structure = self._sides(side)
        response_point = tuple(beta) if side == "left" else tuple(alpha)
        for t in qd.minimal_witnesses(response_structure, response_point):
            if all(
                any(self._oriented(side, g, d) in target for g in challenge)
                for d in t
            ):
                return t
        raise GameError("no_winning_strategy", "position is outside Player 2's winning region")

    def response_tuple(
        self, side: str, challenge: frozenset, picked, target: frozenset
    ) -> tuple:
        """The matching member of the challenge for Player 1's pick from the response."""
        challenge_structure, _ = self._sides(side)
        for g in sorted(challenge, key=challenge_structure.sort_key):
            if self._oriented(side, g, picked) in target:
                return g
        raise GameError("no_winning_strategy", "position is outside Player 2's winning region")

    def to_table(self) -> dict:
        """The full response table at the relation's deepest computed level."""
        rel = self.relation
        top = len(rel.levels) - 1
        region = rel.level(top)
        target = rel.level(max(top - 1, 0)) if not rel.stabilized else rel.final()
        positions = []
        for (alpha, beta) in sorted(region, key=lambda p: (rel.a.sort_key(p[0]), rel.b.sort_key(p[1]))):
            moves = []
            for side in ("left", "right"):
                structure, point = (rel.a, alpha) if side == "left" else (rel.b, beta)
                for qd in rel.registry:
                    for challenge in qd.minimal_witnesses(structure, point):
                        response = self.response_witness(alpha, beta, side, qd, challenge, target)
                        matches = {
                            picked: self.response_tuple(side, challenge, picked, target)
                            for picked in sorted(response, key=(rel.b if side == "left" else rel.a).sort_key)
                        }
                        moves.append(
                            {
                                "side": side,
                                "quantifier": qd.name,
                                "witness": [list(t) for t in sorted(challenge, key=structure.sort_key)],
                                "response": [list(t) for t in sorted(response, key=(rel.b if side == "left" else rel.a).sort_key)],
                                "matches": [
                                    {"picked": list(p), "answer": list(g)} for p, g in matches.items()
                                ],
                            }
                        )
            positions.append({"alpha": list(alpha), "beta": list(beta), "moves": moves})
        return {
            "rounds": top,
            "stabilized": rel.stabilized,
            "positions": positions,
        }


def extract_strategy(
    a: Structure, b: Structure, registry: Sequence[QuantifierDef], relation: BisimRelation
) -> Strategy:
    if relation.a is not a or relation.b is not b:
        if relation.a != a or relation.b != b:
            raise GameError("relation_mismatch", "relation was computed for different structures")
    return Strategy(relation)


# -- stepwise play ----------------------------------------------------------


@dataclass(frozen=True)
class GameState:
    """One interactive play: the human is Player 1, the engine is Player 2."""

    a: Structure
    b: Structure
    k: int
    registry: tuple[QuantifierDef, ...]
    rounds: Optional[int]  # total round budget; None = unbounded game
    relation: BisimRelation
    strategy: Strategy
    alpha: tuple
    beta: tuple
    rounds_left: Optional[int]
    phase: str  # "awaiting_witness" | "awaiting_challenge" | "finished"
    pending: Optional[dict]
    winner: Optional[str]
    outcome_reason: Optional[str]
    history: tuple = field(default_factory=tuple)

    def position(self) -> Pair:
        return (self.alpha, self.beta)

    def in_winning_region(self) -> bool:
        pair = self.position()
        if self.rounds is None:
            return pair in self.relation.final()
        return pair in self.relation.level(self.rounds_left)

    def status(self) -> dict:
        """Current verdict, derived from the precomputed relation."""
        if self.phase == "finished":
            label = "Player 1 won" if self.winner == "player1" else "Player 2 won"
            return {
                "state": "finished",
                "winner": self.winner,
                "reason": self.outcome_reason,
                "label": label,
            }
        safe = self.in_winning_region()
        if safe:
            return {"state": "ongoing", "verdict": "player2_safe", "label": "Player 2 safe"}
        failing = self.relation.least_failing_round(self.alpha, self.beta)
        rounds = failing if failing is not None else len(self.relation.levels)
        plural = "" if rounds == 1 else "s"
        return {
            "state": "ongoing",
            "verdict": "player1_forced_win",
            "inRounds": rounds,
            "label": f"Player 1 forced win in {rounds} round{plural}",
        }


def new_game(
    a: Structure,
    alpha: Assignment,
    b: Structure,
    beta: Assignment,
    registry: Sequence[QuantifierDef],
    rounds: Optional[int] = None,
) -> GameState:
    alpha = check_assignment(a, alpha)
    beta = check_assignment(b, beta, len(alpha))
    k = len(alpha)
    seen = set()
    deduped = []
    for qd in registry:
        if qd.name not in seen:
            seen.add(qd.name)
            deduped.append(qd)
    registry = tuple(deduped)
    if rounds is None:
        relation = bisim(a, b, k, registry)
    else:
        if rounds < 0:
            raise GameError("bad_round_bound", "round bound must be >= 0")
        relation = bisim_rank(a, b, k, rounds, registry)
    strategy = extract_strategy(a, b, registry, relation)
    state = GameState(
        a=a, b=b, k=k, registry=registry, rounds=rounds,
        relation=relation, strategy=strategy,
        alpha=tuple(alpha), beta=tuple(beta),
        rounds_left=rounds, phase="awaiting_witness", pending=None,
        winner=None, outcome_reason=None, history=(),
    )
    if not atoms_agree(a, alpha, b, beta):
        return replace(state, phase="finished", winner="player1", outcome_reason="atom_violation")
    if rounds == 0:
        return replace(state, phase="finished", winner="player2", outcome_reason="rounds_survived")
    return state


def _heuristic_response_witness(state: GameState, side: str, qd: QuantifierDef, challenge: frozenset):
    """Best-effort response outside the winning region: maximize the number
    of rounds the engine survives against the worst follow-up challenge."""
    rel = state.relation
    response_structure, response_point = (rel.b, state.beta) if side == "left" else (rel.a, state.alpha)
    candidates = qd.minimal_witnesses(response_structure, response_point)
    if not candidates:
        return None

    def pair_for(challenge_member, response_member):
        return (challenge_member, response_member) if side == "left" else (response_member, challenge_member)

    def value(t: frozenset) -> float:
        if not t:
            return math.inf  # Player 1 cannot pick from an empty response
        worst = math.inf
        for d in t:
            best = max(
                (rel.survival_level(*pair_for(g, d)) for g in challenge),
                default=-1,
            )
            worst = min(worst, best)
        return worst

    return sorted(candidates, key=lambda t: (-value(t), _witness_sort_key(response_structure, t)))[0]


def _heuristic_response_tuple(state: GameState, side: str, challenge: frozenset, picked):
    rel = state.relation
    challenge_structure = rel.a if side == "left" else rel.b

    def pair_for(g):
        return (g, picked) if side == "left" else (picked, g)

    return sorted(
        challenge,
        key=lambda g: (-rel.survival_level(*pair_for(g)), challenge_structure.sort_key(g)),
    )[0]


def minimal_witnesses_at(state: GameState, side: str, qd: QuantifierDef):
    """Move palette: the minimal witnesses at the current position on one side."""
    if side not in ("left", "right"):
        raise GameError("unknown_side", f"side must be 'left' or 'right', got {side!r}")
    structure, point = (state.a, state.alpha) if side == "left" else (state.b, state.beta)
    return qd.minimal_witnesses(structure, point)


def _target_region(state: GameState) -> frozenset:
    """Where Player 2's responses must land: one level down in the bounded
    game, the fixed point in the unbounded one."""
    rel = state.relation
    if state.rounds is None:
        return rel.final()
    return rel.level(max(state.rounds_left - 1, 0))


def _current_region(state: GameState) -> frozenset:
    rel = state.relation
    return rel.final() if state.rounds is None else rel.level(state.rounds_left)


def game_step(state: GameState, move: dict) -> GameState:
    """Apply one Player 1 move; the engine's Player 2 reply is attached."""
    if state.phase == "finished":
        raise GameError("game_finished", "the game is over")

    if "challenge" in move or move.get("type") == "challenge":
        return _apply_challenge(state, move)
    return _apply_witness(state, move)


def _apply_witness(state: GameState, move: dict) -> GameState:
    if state.phase != "awaiting_witness":
        raise GameError("wrong_phase", "expected a challenge pick, not a witness move")
    side = move.get("side")
    if side not in ("left", "right"):
        raise GameError("unknown_side", f"side must be 'left' or 'right', got {side!r}")
    qname = move.get("quantifier")
    qd = next((q for q in state.registry if q.name == qname), None)
    if qd is None:
        raise GameError("unknown_quantifier", f"quantifier {qname!r} is not in this session's registry")
    raw = move.get("witness")
    if raw is None or not isinstance(raw, (list, tuple, set, frozenset)):
        raise GameError("malformed_witness", "move must carry a witness: a list of k-tuples")
    structure, point = (state.a, state.alpha) if side == "left" else (state.b, state.beta)
    try:
        challenge = frozenset(tuple(t) for t in raw)
        if not qd.is_witness(structure, point, challenge):
            raise GameError("not_a_witness", f"the declared set is not a witness of {qd.name} here")
    except (QuantifierError, ValueError) as exc:
        if isinstance(exc, GameError):
            raise
        raise GameError("malformed_witness", str(exc)) from exc

    pair = state.position()
    entry = {"player": 1, "move": "witness", "side": side, "quantifier": qd.name,
             "witness": sorted([list(t) for t in challenge])}
    in_region = pair in _current_region(state)
    if in_region:
        response = state.strategy.response_witness(
            state.alpha, state.beta, side, qd, challenge, _target_region(state)
        )
    else:
        response = _heuristic_response_witness(state, side, qd, challenge)
        if response is None:
            history = state.history + (entry, {"player": 2, "move": "stuck", "detail": "no witness available"})
            return replace(state, phase="finished", winner="player1",
                           outcome_reason="player2_stuck_no_witness", history=history)
    reply = {"player": 2, "move": "witness", "witness": sorted([list(t) for t in response])}
    history = state.history + (entry, reply)
    if not response:
        # Player 1 cannot pick a member of the empty response: stuck.
        return replace(state, phase="finished", winner="player2",
                       outcome_reason="player1_stuck_empty_response", history=history)
    pending = {"side": side, "quantifier": qd, "challenge": challenge, "response": response}
    return replace(state, phase="awaiting_challenge", pending=pending, history=history)


def _apply_challenge(state: GameState, move: dict) -> GameState:
    if state.phase != "awaiting_challenge":
        raise GameError("wrong_phase", "expected a witness move, not a challenge pick")
    raw = move.get("challenge") if "challenge" in move else move.get("tuple")
    if raw is None:
        raise GameError("malformed_witness", "challenge move must carry the picked tuple")
    picked = tuple(raw)
    pending = state.pending
    if picked not in pending["response"]:
        raise GameError("not_in_response", "the picked tuple is not in the engine's witness")
    side, qd, challenge = pending["side"], pending["quantifier"], pending["challenge"]
    entry = {"player": 1, "move": "challenge", "tuple": list(picked)}
    if not challenge:
        history = state.history + (entry, {"player": 2, "move": "stuck", "detail": "challenge witness is empty"})
        return replace(state, phase="finished", winner="player1",
                       outcome_reason="player2_stuck_empty_challenge", history=history)
    pair = state.position()
    if pair in _current_region(state):
        answer = state.strategy.response_tuple(side, challenge, picked, _target_region(state))
    else:
        answer = _heuristic_response_tuple(state, side, challenge, picked)
    reply = {"player": 2, "move": "answer", "tuple": list(answer)}
    history = state.history + (entry, reply)
    if side == "left":
        new_alpha, new_beta = answer, picked
    else:
        new_alpha, new_beta = picked, answer
    rounds_left = None if state.rounds is None else state.rounds_left - 1
    nxt = replace(
        state, alpha=new_alpha, beta=new_beta, rounds_left=rounds_left,
        phase="awaiting_witness", pending=None, history=history,
    )
    if not atoms_agree(state.a, new_alpha, state.b, new_beta):
        return replace(nxt, phase="finished", winner="player1", outcome_reason="atom_violation")
    if rounds_left == 0:
        return replace(nxt, phase="finished", winner="player2", outcome_reason="rounds_survived")
    return nxt
