"""The team protocol: agreement short-circuit, disagreement arbitration,
full games against the adversary, and the per-game records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from centaur.chess import (
    Color,
    GameOutcome,
    Move,
    Position,
    Termination,
    apply_move,
    game_result,
    serialize_fen,
)
from centaur.engine import EngineHandle, best_move
from centaur.team.managers import Choice, Manager, Member


@dataclass(frozen=True)
class DecisionRecord:
    """One arbitrated disagreement."""

    fen: str
    rec_m: str  # uci
    rec_l: str
    choice: Choice
    chooser: str
    resolved_member: Member
    game_id: str
    ply: int
    coin: Optional[int] = None  # recorded flip for indifferent choices
    seed: Optional[int] = None  # the owning game's seed

    def to_json_dict(self) -> dict:
        return {
            "fen": self.fen, "recM": self.rec_m, "recL": self.rec_l,
            "choice": self.choice.value, "chooser": self.chooser,
            "resolved": self.resolved_member.value, "game_id": self.game_id,
            "ply": self.ply, "coin": self.coin, "seed": self.seed,
        }


@dataclass
class GameRecord:
    opening_id: str
    opening_fen: str
    team_color: Color
    moves: list = field(default_factory=list)  # uci strings
    outcome: Optional[GameOutcome] = None
    reward: Optional[float] = None
    decisions: list = field(default_factory=list)
    engine_names: dict = field(default_factory=dict)
    game_id: str = ""
    seed: Optional[int] = None

    def result_tag(self) -> str:
        """PGN result from White's perspective."""
        if self.outcome is None or self.outcome.winner is None:
            return "1/2-1/2"
        return "1-0" if self.outcome.winner == Color.WHITE else "0-1"


def team_move(p: Position, handle_m: EngineHandle, handle_l: EngineHandle,
              manager: Manager, rng, history=None, game_id: str = "",
              ply: Optional[int] = None, seed: Optional[int] = None):
    """One team decision: agreement plays straight through, disagreement
    goes to the manager, indifference is settled by a fair coin."""
    rec_m = best_move(handle_m, p, history=history)
    rec_l = best_move(handle_l, p, history=history)
    if rec_m.uci() == rec_l.uci():
        return rec_m, None

    choice = manager.decide(p, rec_m, rec_l, rng)
    coin = None
    if choice is Choice.FIRST:
        resolved = Member.M
    elif choice is Choice.SECOND:
        resolved = Member.L
    else:
        coin = 1 if rng.random() < 0.5 else 0
        resolved = Member.M if coin else Member.L
    move = rec_m if resolved is Member.M else rec_l
    record = DecisionRecord(
        fen=serialize_fen(p), rec_m=rec_m.uci(), rec_l=rec_l.uci(),
        choice=choice, chooser=manager.name, resolved_member=resolved,
        game_id=game_id, ply=ply if ply is not None else p.ply, coin=coin,
        seed=seed)
    return move, record


def play_game(opening: Position, handle_m: EngineHandle,
              handle_l: EngineHandle, manager: Manager,
              adversary: EngineHandle, team_color: Color, rng,
              max_ply: int = 512, opening_id: str = "", game_id: str = "",
              seed: Optional[int] = None) -> GameRecord:
    """Play one game from `opening` to termination or adjudication.

    The team moves through the MoE protocol whenever `team_color` is to
    move; otherwise the adversary engine moves.  Games longer than
    `max_ply` plies (from the opening) adjudicate as draws.
    """
    record = GameRecord(
        opening_id=opening_id, opening_fen=serialize_fen(opening),
        team_color=team_color, game_id=game_id, seed=seed,
        engine_names={
            "M": handle_m.config.name, "L": handle_l.config.name,
            "adversary": adversary.config.name, "manager": manager.name,
        })
    root_fen = record.opening_fen
    current = opening
    keys = [current.repetition_key()]
    plies_played = 0

    while True:
        outcome = game_result(current, keys)
        if outcome is None and plies_played >= max_ply:
            outcome = GameOutcome(None, Termination.ADJUDICATED)
        if outcome is not None:
            record.outcome = outcome
            record.reward = outcome.reward_for(team_color)
            return record

        history = (root_fen, record.moves)
        if current.side_to_move == team_color:
            move, decision = team_move(
                current, handle_m, handle_l, manager, rng, history=history,
                game_id=game_id, ply=current.ply, seed=seed)
            if decision is not None:
                record.decisions.append(decision)
        else:
            move = best_move(adversary, current, history=history)

        current = apply_move(current, move)
        record.moves.append(move.uci())
        plies_played += 1
        if current.halfmove_clock == 0:
            keys = [current.repetition_key()]
        else:
            keys.append(current.repetition_key())


def play_solo_game(opening: Position, player: EngineHandle,
                   adversary: EngineHandle, player_color: Color,
                   max_ply: int = 512, opening_id: str = "",
                   game_id: str = "") -> GameRecord:
    """Single engine vs adversary; the baseline for synergy."""
    record = GameRecord(
        opening_id=opening_id, opening_fen=serialize_fen(opening),
        team_color=player_color, game_id=game_id,
        engine_names={"player": player.config.name,
                      "adversary": adversary.config.name,
                      "manager": "solo"})
    root_fen = record.opening_fen
    current = opening
    keys = [current.repetition_key()]
    plies_played = 0
    while True:
        outcome = game_result(current, keys)
        if outcome is None and plies_played >= max_ply:
            outcome = GameOutcome(None, Termination.ADJUDICATED)
        if outcome is not None:
            record.outcome = outcome
            record.reward = outcome.reward_for(player_color)
            return record
        handle = player if current.side_to_move == player_color else adversary
        move = best_move(handle, current, history=(root_fen, record.moves))
        current = apply_move(current, move)
        record.moves.append(move.uci())
        plies_played += 1
        if current.halfmove_clock == 0:
            keys = [current.repetition_key()]
        else:
            keys.append(current.repetition_key())


def replay_moves(opening: Position, moves) -> Position:
    """Apply a uci move list; raises if any move is illegal."""
    from centaur.chess import move_from_uci

    current = opening
    for uci in moves:
        current = apply_move(current, move_from_uci(current, uci))
    return current
