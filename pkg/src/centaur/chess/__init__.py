"""Self-contained chess rules, features and board tokenization."""

from centaur.chess.board import (
    Color,
    FenError,
    GameOutcome,
    IllegalMoveError,
    Move,
    Piece,
    PieceKind,
    Position,
    STARTING_FEN,
    Termination,
    apply_move,
    game_result,
    in_check,
    is_attacked,
    legal_moves,
    move_from_uci,
    parse_fen,
    parse_move,
    parse_square,
    perft,
    san,
    serialize_fen,
    square,
    square_file,
    square_name,
    square_rank,
    starting_position,
)
from centaur.chess.features import (
    BoardFeatures,
    MoveFeatures,
    board_features,
    move_features,
)
from centaur.chess.tokens import (
    TokenSequence,
    decode_tokens,
    shuffle_position,
    tokenize,
)

__all__ = [
    "Color", "FenError", "GameOutcome", "IllegalMoveError", "Move", "Piece",
    "PieceKind", "Position", "STARTING_FEN", "Termination", "apply_move",
    "game_result", "in_check", "is_attacked", "legal_moves", "move_from_uci",
    "parse_fen", "parse_move", "parse_square", "perft", "san",
    "serialize_fen", "square", "square_file", "square_name", "square_rank",
    "starting_position", "BoardFeatures", "MoveFeatures", "board_features",
    "move_features", "TokenSequence", "decode_tokens", "shuffle_position",
    "tokenize",
]
