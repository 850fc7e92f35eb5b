"""Game sessions over HTTP for the explorer UI.

Sessions live in memory, keyed by id, with optional JSON snapshots under a
state directory.  A snapshot stores the creation request and the Player 1
moves; the engine is deterministic, so replaying them reconstructs the
session exactly (that determinism is itself a tested invariant).
"""
from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import games
from .formulas import FormulaError
from .quantifiers import QuantifierError, parse_quantifier
from .structures import StructureError, load_structure


class ServiceError(ValueError):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.status = status


def _parse_assignment_field(value) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(","))
    if isinstance(value, (list, tuple)):
        return tuple(str(v) for v in value)
    raise ServiceError("validation_error", "assignments must be a list of element names or a comma-separated string", 422)


@dataclass
class Session:
    id: str
    request: dict
    state: games.GameState
    lock: threading.Lock

    def player1_moves(self) -> list[dict]:
        moves = []
        for entry in self.state.history:
            if entry.get("player") != 1:
                continue
            if entry["move"] == "witness":
                moves.append({"side": entry["side"], "quantifier": entry["quantifier"],
                              "witness": entry["witness"]})
            else:
                moves.append({"challenge": entry["tuple"]})
        return moves

    def to_json(self) -> dict:
        state = self.state
        pending = None
        if state.pending is not None:
            pending = {
                "side": state.pending["side"],
                "quantifier": state.pending["quantifier"].name,
                "witness": sorted([list(t) for t in state.pending["challenge"]]),
                "response": sorted([list(t) for t in state.pending["response"]]),
            }
        relation = state.relation
        return {
            "id": self.id,
            "request": self.request,
            "k": state.k,
            "quantifiers": [q.name for q in state.registry],
            "rounds": state.rounds,
            "roundsLeft": state.rounds_left,
            "left": state.a.to_dict(),
            "right": state.b.to_dict(),
            "position": {"alpha": list(state.alpha), "beta": list(state.beta)},
            "phase": state.phase,
            "pending": pending,
            "history": [dict(h) for h in state.history],
            "status": state.status(),
            "relationSummary": {
                "positions": len(state.a.k_tuples(state.k)) * len(state.b.k_tuples(state.k)),
                "levelSizes": [len(level) for level in relation.levels],
                "stabilized": relation.stabilized,
                "stabilizationIndex": relation.stabilization_index,
            },
        }


def build_session_state(request: dict) -> games.GameState:
    """Validate a creation request and set up the game (relation + strategy)."""
    for key in ("left", "right", "k", "alpha", "beta", "quantifiers"):
        if key not in request or request[key] is None:
            raise ServiceError("validation_error", f"session request is missing {key!r}", 422)
    k = request["k"]
    if not isinstance(k, int) or k < 1:
        raise ServiceError("validation_error", "k must be a positive integer", 422)
    try:
        left = load_structure(json.dumps(request["left"]))
        right = load_structure(json.dumps(request["right"]))
        if left.signature != right.signature:
            raise ServiceError("validation_error", "the two structures must share a signature", 422)
        registry = [parse_quantifier(name, k) for name in request["quantifiers"]]
        for qd in registry:
            qd.check_structure(left)
            qd.check_structure(right)
        alpha = _parse_assignment_field(request["alpha"])
        beta = _parse_assignment_field(request["beta"])
        if len(alpha) != k or len(beta) != k:
            raise ServiceError("validation_error", f"assignments must have length k={k}", 422)
        rounds = request.get("rounds")
        if rounds is not None and (not isinstance(rounds, int) or rounds < 0):
            raise ServiceError("validation_error", "rounds must be a non-negative integer", 422)
        return games.new_game(left, alpha, right, beta, registry, rounds)
    except (StructureError, QuantifierError, FormulaError, games.GameError) as exc:
        code = exc.code if isinstance(exc, games.GameError) else "validation_error"
        raise ServiceError(code, str(exc), 422) from exc


class SessionStore:
    """In-memory sessions; mutations serialized per session id."""

    def __init__(self, state_dir: Optional[str] = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.state_dir = state_dir
        if state_dir:
            os.makedirs(state_dir, exist_ok=True)
            self._restore()

    def create(self, request: dict, session_id: Optional[str] = None) -> Session:
        state = build_session_state(request)
        sid = session_id or uuid.uuid4().hex[:12]
        session = Session(sid, request, state, threading.Lock())
        with self._lock:
            self._sessions[sid] = session
        self._snapshot(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise ServiceError("unknown_session", f"no session {session_id!r}", 404)
        return session

    def move(self, session_id: str, move: dict) -> Session:
        session = self.get(session_id)
        with session.lock:
            session.state = games.game_step(session.state, move)
        self._snapshot(session)
        return session

    def _snapshot(self, session: Session) -> None:
        if not self.state_dir:
            return
        path = os.path.join(self.state_dir, f"{session.id}.json")
        payload = {"id": session.id, "request": session.request, "moves": session.player1_moves()}
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)

    def _restore(self) -> None:
        for name in sorted(os.listdir(self.state_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(self.state_dir, name), "r", encoding="utf-8") as handle:
                payload = json.load(handle)
            try:
                session = self.create(payload["request"], session_id=payload["id"])
                for move in payload["moves"]:
                    self.move(session.id, move)
            except (ServiceError, games.GameError):
                continue  # stale snapshot; skip rather than fail startup


def replay_session(session_json: dict) -> dict:
    """Rebuild a session from its request and Player 1 moves; returns the result
    as session JSON (used to assert replay determinism)."""
    store = SessionStore()
    session = store.create(session_json["request"], session_id=session_json["id"])
    for move in _player1_moves_from_history(session_json["history"]):
        store.move(session.id, move)
    return store.get(session.id).to_json()


def _player1_moves_from_history(history: list[dict]) -> list[dict]:
    moves = []
    for entry in history:
        if entry.get("player") != 1:
            continue
        if entry["move"] == "witness":
            moves.append({"side": entry["side"], "quantifier": entry["quantifier"],
                          "witness": entry["witness"]})
        else:
            moves.append({"challenge": entry["tuple"]})
    return moves


class SessionRequest(BaseModel):
    left: dict
    right: dict
    k: int
    alpha: object
    beta: object
    quantifiers: list[str]
    rounds: Optional[int] = None


class MoveRequest(BaseModel):
    side: Optional[str] = None
    quantifier: Optional[str] = None
    witness: Optional[list] = None
    challenge: Optional[list] = None


def create_app(state_dir: Optional[str] = None, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="kqlogic game service", version="1")
    store = SessionStore(state_dir)
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(games.GameError)
    async def game_error_handler(_request: Request, exc: games.GameError):
        return JSONResponse(status_code=400, content={"code": exc.code, "message": str(exc)})

    @app.post("/api/v1/session", status_code=201)
    def create_session(body: SessionRequest):
        session = store.create(body.model_dump())
        doc = session.to_json()
        return {"id": session.id, "status": doc["status"], "relationSummary": doc["relationSummary"]}

    @app.get("/api/v1/session/{session_id}")
    def get_session(session_id: str):
        return store.get(session_id).to_json()

    @app.post("/api/v1/session/{session_id}/move")
    def post_move(session_id: str, body: MoveRequest):
        move = {key: value for key, value in body.model_dump().items() if value is not None}
        return store.move(session_id, move).to_json()

    @app.get("/api/v1/session/{session_id}/witnesses")
    def get_witnesses(session_id: str, side: str, quantifier: str):
        session = store.get(session_id)
        state = session.state
        qd = next((q for q in state.registry if q.name == quantifier), None)
        if qd is None:
            raise ServiceError("unknown_quantifier", f"quantifier {quantifier!r} is not in this session", 404)
        if side not in ("left", "right"):
            raise ServiceError("unknown_side", f"side must be 'left' or 'right', got {side!r}", 422)
        witnesses = games.minimal_witnesses_at(state, side, qd)
        structure = state.a if side == "left" else state.b
        return {
            "side": side,
            "quantifier": quantifier,
            "witnesses": [
                [list(t) for t in sorted(w, key=structure.sort_key)] for w in witnesses
            ],
        }

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="explorer")
    return app


def run_server(host: str = "127.0.0.1", port: int = 8000,
               state_dir: Optional[str] = None, static_dir: Optional[str] = None) -> None:
    import uvicorn

    uvicorn.run(create_app(state_dir, static_dir), host=host, port=port, log_level="info")
