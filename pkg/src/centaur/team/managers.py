"""Managers: the selection mechanisms that arbitrate team disagreements."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from centaur.chess import (
    Color,
    Move,
    Position,
    apply_move,
    game_result,
    legal_moves,
    serialize_fen,
)
from centaur.engine import EngineHandle, best_move, score_moves


class Member(enum.Enum):
    M = "M"
    L = "L"

    @property
    def other(self) -> "Member":
        return Member.L if self is Member.M else Member.M


class Choice(enum.Enum):
    FIRST = "first"
    SECOND = "second"
    INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class Recommendation:
    member: Member
    move: Move


@dataclass(frozen=True)
class ManagerSpec:
    """Serializable description of a manager; built into an instance by the
    harness once engine handles and models exist."""

    kind: str  # random | fixed | expert | oracle | model | feature_model | human
    p_first: float = 0.5
    member: str = "M"
    superior: str = "M"
    indifference_threshold: float = 0.0
    trajectories: int = 1
    model_path: Optional[str] = None
    params: dict = field(default_factory=dict)

    _KINDS = ("random", "fixed", "expert", "oracle", "model",
              "feature_model", "human")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown manager kind {self.kind!r}")
        if not 0.0 <= self.p_first <= 1.0:
            raise ValueError("p_first must lie in [0, 1]")
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")

    @property
    def input_mode(self) -> str:
        if self.kind in ("expert", "oracle", "human"):
            return "state_and_moves"
        return "state_only"


class Manager:
    """Decision contract: (state, recommendation pair) -> Choice.

    `decide` is only invoked on disagreements; the team protocol resolves
    INDIFFERENT with a fair coin from the game's rng.
    """

    name = "manager"
    input_mode = "state_only"

    def decide(self, p: Position, rec_m: Move, rec_l: Move, rng) -> Choice:
        raise NotImplementedError


class RandomManager(Manager):
    """Chooses First with probability `p_first`, never indifferent."""

    def __init__(self, p_first: float = 0.5):
        if not 0.0 <= p_first <= 1.0:
            raise ValueError("p_first must lie in [0, 1]")
        self.p_first = p_first
        self.name = f"random(p={p_first:g})"

    def decide(self, p, rec_m, rec_l, rng) -> Choice:
        return Choice.FIRST if rng.random() < self.p_first else Choice.SECOND


class FixedManager(Manager):
    def __init__(self, member: Member):
        self.member = member
        self.name = f"fixed({member.value})"

    def decide(self, p, rec_m, rec_l, rng) -> Choice:
        return Choice.FIRST if self.member is Member.M else Choice.SECOND


def expert_decide(sme: EngineHandle, p: Position, rec_m: Move,
                  rec_l: Move) -> Choice:
    """Argmax over the expert's scores of the two recommendations.

    Strictly higher score wins; an exact tie is indifference (resolved by
    the protocol's coin, per the general indifference rule).
    """
    scored = score_moves(sme, p, [rec_m, rec_l])
    score_m, score_l = scored[0].score, scored[1].score
    if score_m > score_l:
        return Choice.FIRST
    if score_l > score_m:
        return Choice.SECOND
    return Choice.INDIFFERENT


class ExpertManager(Manager):
    input_mode = "state_and_moves"

    def __init__(self, sme: EngineHandle):
        self.sme = sme
        self.name = f"expert({sme.config.name})"

    def decide(self, p, rec_m, rec_l, rng) -> Choice:
        return expert_decide(self.sme, p, rec_m, rec_l)


def _simulate_branch(p: Position, first_move: Move, team_color: Color,
                     superior: EngineHandle, adversary: EngineHandle,
                     max_ply: int, seed=None) -> float:
    """Play out one recommendation: apply it, then the fully modeled
    adversary and the superior member alternate to termination.  Returns
    the team's reward under the same adjudication rules as real games."""
    root_fen = serialize_fen(p)
    moves = [first_move.uci()]
    current = apply_move(p, first_move)
    keys = [current.repetition_key()]
    plies = 1
    while True:
        outcome = game_result(current, keys)
        if outcome is not None:
            return outcome.reward_for(team_color)
        if plies >= max_ply:
            return 0.5  # adjudicated draw, same cap as real games
        handle = adversary if current.side_to_move != team_color else superior
        move = best_move(handle, current, seed=seed,
                         history=(root_fen, moves))
        moves.append(move.uci())
        current = apply_move(current, move)
        plies += 1
        if current.halfmove_clock == 0:
            keys = [current.repetition_key()]
        else:
            keys.append(current.repetition_key())


def oracle_decide(p: Position, rec_m: Move, rec_l: Move,
                  superior: EngineHandle, adversary: EngineHandle, rng,
                  trajectories: int = 1, max_ply: int = 512) -> Choice:
    """Approximate oracle: simulate both recommendations against the true
    adversary, continuing with the superior team member, and pick the
    branch with the better outcome.  Equal rewards mean indifference.

    The adversary replies first in each branch (the team just moved).
    """
    rewards = []
    for rec in (rec_m, rec_l):
        total = 0.0
        for _ in range(trajectories):
            seed = rng.getrandbits(32) if trajectories > 1 else None
            total += _simulate_branch(p, rec, p.side_to_move, superior,
                                      adversary, max_ply, seed=seed)
        rewards.append(total / trajectories)
    if rewards[0] > rewards[1]:
        return Choice.FIRST
    if rewards[1] > rewards[0]:
        return Choice.SECOND
    return Choice.INDIFFERENT


class OracleManager(Manager):
    input_mode = "state_and_moves"

    def __init__(self, superior: EngineHandle, adversary: EngineHandle,
                 trajectories: int = 1, max_ply: int = 512):
        self.superior = superior
        self.adversary = adversary
        self.trajectories = trajectories
        self.max_ply = max_ply
        self.name = "oracle"

    def decide(self, p, rec_m, rec_l, rng) -> Choice:
        return oracle_decide(p, rec_m, rec_l, self.superior, self.adversary,
                             rng, self.trajectories, self.max_ply)


def model_decide(model, p: Position, threshold: float = 0.0) -> Choice:
    """Decision from a state-only model exposing choice_probabilities().

    The model sees the position only, never the recommendations.  A
    probability gap within `threshold` is indifference (default: exact
    ties only).
    """
    prob_m, prob_l = model.choice_probabilities(p)
    if prob_m > prob_l + threshold:
        return Choice.FIRST
    if prob_l > prob_m + threshold:
        return Choice.SECOND
    return Choice.INDIFFERENT


class ModelManager(Manager):
    def __init__(self, model, threshold: float = 0.0, name: str = "model"):
        self.model = model
        self.threshold = threshold
        self.name = name

    def decide(self, p, rec_m, rec_l, rng) -> Choice:
        return model_decide(self.model, p, self.threshold)


@dataclass
class ChoiceDistribution:
    """Proportions over non-indifferent decisions; indifference discounted."""

    n_first: int
    n_second: int
    n_indifferent: int
    defined: bool
    proportion_first: Optional[float] = None
    proportion_second: Optional[float] = None

    @property
    def n(self) -> int:
        return self.n_first + self.n_second


def choice_distribution(records) -> ChoiceDistribution:
    n_first = sum(1 for r in records if r.choice is Choice.FIRST)
    n_second = sum(1 for r in records if r.choice is Choice.SECOND)
    n_indifferent = sum(1 for r in records if r.choice is Choice.INDIFFERENT)
    total = n_first + n_second
    if total == 0:
        return ChoiceDistribution(n_first, n_second, n_indifferent,
                                  defined=False)
    return ChoiceDistribution(n_first, n_second, n_indifferent, defined=True,
                              proportion_first=n_first / total,
                              proportion_second=n_second / total)
