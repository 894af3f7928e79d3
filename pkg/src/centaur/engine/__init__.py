"""UCI engine subprocess orchestration."""

from centaur.engine.uci import (
    EngineConfig,
    EngineError,
    EngineHandle,
    EngineProtocolError,
    EngineStartupError,
    MoveScore,
    Role,
    Score,
    best_move,
    score_moves,
    shutdown,
    spawn_engine,
)

__all__ = [
    "EngineConfig", "EngineError", "EngineHandle", "EngineProtocolError",
    "EngineStartupError", "MoveScore", "Role", "Score", "best_move",
    "score_moves", "shutdown", "spawn_engine",
]
