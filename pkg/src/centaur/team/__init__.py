"""The MoE team protocol and its managers."""

from centaur.team.managers import (
    Choice,
    ChoiceDistribution,
    ExpertManager,
    FixedManager,
    Manager,
    ManagerSpec,
    Member,
    ModelManager,
    OracleManager,
    RandomManager,
    Recommendation,
    choice_distribution,
    expert_decide,
    model_decide,
    oracle_decide,
)
from centaur.team.play import (
    DecisionRecord,
    GameRecord,
    play_game,
    play_solo_game,
    replay_moves,
    team_move,
)

__all__ = [
    "Choice", "ChoiceDistribution", "ExpertManager", "FixedManager",
    "Manager", "ManagerSpec", "Member", "ModelManager", "OracleManager",
    "RandomManager", "Recommendation", "choice_distribution", "expert_decide",
    "model_decide", "oracle_decide", "DecisionRecord", "GameRecord",
    "play_game", "play_solo_game", "replay_moves", "team_move",
]
