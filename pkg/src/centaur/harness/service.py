"""HTTP service for human-manager sessions.

A session is one game where the human arbitrates every disagreement.
Recommendation cards are optionally blinded: labels A/B are randomly
assigned per decision and the unblinding map appears only in the final
record.  Finished sessions persist with the same schema as automated
games, chooser "human:<session id>".
"""

from __future__ import annotations

import asyncio
import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from centaur.chess import (
    Color,
    GameOutcome,
    Termination,
    apply_move,
    game_result,
    san,
    serialize_fen,
    square_name,
)
from centaur.engine import best_move, spawn_engine
from centaur.harness.pgn import write_pgn
from centaur.seeding import stable_seed
from centaur.team import Choice, DecisionRecord, GameRecord, Member


class CreateSessionRequest(BaseModel):
    team_color: str = "white"
    blind: bool = True
    opening_fen: Optional[str] = None
    seed: Optional[int] = None


class ChoiceRequest(BaseModel):
    label: str


@dataclass
class Session:
    session_id: str
    team_color: Color
    blind: bool
    rng: random.Random
    handles: object
    record: GameRecord
    position: object
    keys: list
    status: str = "engine_thinking"  # awaiting_human | engine_thinking | finished
    pending: Optional[dict] = None  # label -> Recommendation info
    pending_map: Optional[dict] = None  # label -> Member
    unblinding: list = field(default_factory=list)
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def state_json(self) -> dict:
        pending = None
        if self.pending is not None:
            pending = {label: {k: v for k, v in card.items()
                               if self.blind is False or k != "engine"}
                       for label, card in self.pending.items()}
        result = None
        if self.status == "finished":
            result = self.result_json()
        return {
            "session_id": self.session_id,
            "status": self.status,
            "fen": serialize_fen(self.position),
            "team_color": self.team_color.name.lower(),
            "moves": list(self.record.moves),
            "ply": self.position.ply,
            "pending": pending,
            "result": result,
            "version": self.version,
        }

    def result_json(self) -> Optional[dict]:
        if self.record.outcome is None:
            return None
        return {
            "result": self.record.outcome.result_for(self.team_color),
            "termination": self.record.outcome.termination.value,
            "reward": self.record.reward,
            "moves": list(self.record.moves),
            "unblinding": self.unblinding,
            "engines": self.record.engine_names,
        }


class SessionService:
    def __init__(self, cfg, output_dir=None):
        self.cfg = cfg
        self.output_dir = Path(output_dir or cfg.output_dir) / "sessions"
        self.sessions = {}

    # -- game driving ------------------------------------------------------

    def create_session(self, req: CreateSessionRequest) -> Session:
        from centaur.chess import parse_fen, starting_position
        from centaur.harness.match import _WorkerHandles

        session_id = uuid.uuid4().hex[:12]
        seed = req.seed if req.seed is not None \
            else stable_seed("session", session_id)
        opening = (parse_fen(req.opening_fen) if req.opening_fen
                   else starting_position())
        handles = _WorkerHandles(self.cfg, need_manager=False)
        team_color = Color.WHITE if req.team_color == "white" else Color.BLACK
        record = GameRecord(
            opening_id="session", opening_fen=serialize_fen(opening),
            team_color=team_color, game_id=session_id, seed=seed,
            engine_names={"M": self.cfg.engine_m.name,
                          "L": self.cfg.engine_l.name,
                          "adversary": self.cfg.adversary.name,
                          "manager": f"human:{session_id}"})
        session = Session(
            session_id=session_id, team_color=team_color, blind=req.blind,
            rng=random.Random(seed), handles=handles, record=record,
            position=opening, keys=[opening.repetition_key()])
        self.sessions[session_id] = session
        with session.lock:
            self._advance(session)
        return session

    def _advance(self, session: Session):
        """Play until the next human decision or the end of the game."""
        while True:
            outcome = game_result(session.position, session.keys)
            if outcome is None and len(session.record.moves) >= \
                    self.cfg.max_ply:
                outcome = GameOutcome(None, Termination.ADJUDICATED)
            if outcome is not None:
                self._finish(session, outcome)
                return
            history = (session.record.opening_fen, session.record.moves)
            if session.position.side_to_move != session.team_color:
                move = best_move(session.handles.adversary, session.position,
                                 history=history)
                self._push_move(session, move)
                continue
            rec_m = best_move(session.handles.m, session.position,
                              history=history)
            rec_l = best_move(session.handles.l, session.position,
                              history=history)
            if rec_m.uci() == rec_l.uci():
                self._push_move(session, rec_m)
                continue
            self._present(session, rec_m, rec_l)
            return

    def _present(self, session: Session, rec_m, rec_l):
        members = [(Member.M, rec_m), (Member.L, rec_l)]
        if session.blind and session.rng.random() < 0.5:
            members.reverse()
        labels = ("A", "B")
        session.pending = {}
        session.pending_map = {}
        for label, (member, move) in zip(labels, members):
            engine = session.record.engine_names[member.value]
            session.pending[label] = {
                "move": move.uci(),
                "san": san(session.position, move),
                "origin": square_name(move.origin),
                "destination": square_name(move.destination),
                "engine": engine,
            }
            session.pending_map[label] = member
        session.status = "awaiting_human"
        session.version += 1

    def _push_move(self, session: Session, move):
        session.position = apply_move(session.position, move)
        session.record.moves.append(move.uci())
        if session.position.halfmove_clock == 0:
            session.keys = [session.position.repetition_key()]
        else:
            session.keys.append(session.position.repetition_key())
        session.version += 1

    def _finish(self, session: Session, outcome):
        session.record.outcome = outcome
        session.record.reward = outcome.reward_for(session.team_color)
        session.status = "finished"
        session.pending = None
        session.version += 1
        session.handles.close()
        self._persist(session)

    def _persist(self, session: Session):
        self.output_dir.mkdir(parents=True, exist_ok=True)
        base = self.output_dir / session.session_id
        write_pgn([session.record], base.with_suffix(".pgn"),
                  event=f"session:{session.session_id}")
        with open(base.with_suffix(".jsonl"), "w") as fh:
            for decision in session.record.decisions:
                fh.write(json.dumps(decision.to_json_dict(), sort_keys=True))
                fh.write("\n")

    def post_choice(self, session: Session, label: str) -> Session:
        with session.lock:
            if session.status != "awaiting_human":
                raise ConflictError("no decision is pending")
            if label not in session.pending:
                raise ConflictError(f"unknown label {label!r}")
            member = session.pending_map[label]
            card = session.pending[label]
            rec_m_card = [c for lab, c in session.pending.items()
                          if session.pending_map[lab] is Member.M][0]
            rec_l_card = [c for lab, c in session.pending.items()
                          if session.pending_map[lab] is Member.L][0]
            decision = DecisionRecord(
                fen=serialize_fen(session.position),
                rec_m=rec_m_card["move"], rec_l=rec_l_card["move"],
                choice=(Choice.FIRST if member is Member.M
                        else Choice.SECOND),
                chooser=f"human:{session.session_id}",
                resolved_member=member, game_id=session.session_id,
                ply=session.position.ply, seed=session.record.seed)
            session.record.decisions.append(decision)
            session.unblinding.append({
                "ply": session.position.ply,
                "labels": {lab: session.pending_map[lab].value
                           for lab in session.pending},
                "chosen": label,
            })
            from centaur.chess import move_from_uci
            move = move_from_uci(session.position, card["move"])
            session.pending = None
            session.pending_map = None
            session.status = "engine_thinking"
            session.version += 1
            self._push_move(session, move)
            self._advance(session)
        return session


class ConflictError(Exception):
    pass


def create_app(cfg, output_dir=None) -> FastAPI:
    service = SessionService(cfg, output_dir)
    app = FastAPI(title="centaur human-manager service")
    app.state.service = service

    def get_session(session_id: str) -> Session:
        session = service.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404,
                                detail=f"no session {session_id}")
        return session

    @app.post("/sessions")
    def create(req: CreateSessionRequest):
        if req.team_color not in ("white", "black"):
            raise HTTPException(status_code=422, detail="bad team_color")
        session = service.create_session(req)
        return session.state_json()

    @app.get("/sessions/{session_id}")
    def state(session_id: str):
        return get_session(session_id).state_json()

    @app.post("/sessions/{session_id}/choice")
    def choose(session_id: str, req: ChoiceRequest):
        session = get_session(session_id)
        try:
            service.post_choice(session, req.label)
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return session.state_json()

    @app.get("/sessions/{session_id}/result")
    def result(session_id: str):
        session = get_session(session_id)
        if session.status != "finished":
            raise HTTPException(status_code=409,
                                detail="session not finished")
        return session.result_json()

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        session = service.sessions.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        last_version = -1
        try:
            while True:
                if session.version != last_version:
                    last_version = session.version
                    await websocket.send_json(session.state_json())
                    if session.status == "finished":
                        break
                await asyncio.sleep(0.02)
        except WebSocketDisconnect:
            return
        await websocket.close()

    return app
