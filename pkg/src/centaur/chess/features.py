"""Board-level and move-level features used by probes and distilled managers."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from centaur.chess.board import (
    Color,
    Move,
    PieceKind,
    Position,
    _bit_squares,
    _legal_move_ints,
    is_attacked,
    legal_moves,
    square_file,
    square_rank,
)

# traditional point values, king = 0
MATERIAL_POINTS = {PieceKind.PAWN: 1, PieceKind.KNIGHT: 3, PieceKind.BISHOP: 3,
                   PieceKind.ROOK: 5, PieceKind.QUEEN: 9, PieceKind.KING: 0}

# pairwise piece distances are Euclidean in board units (square side = 1)
CONCENTRATION_METRIC = "euclidean"


@dataclass(frozen=True)
class BoardFeatures:
    """Strategic board features for the side to move ("self") vs the opponent."""

    ply: float
    material_points: float
    adversary_material_points: float
    pawn_islands: float
    adversary_pawn_islands: float
    defended_pieces: float
    adversary_defended_pieces: float
    concentration: float
    adversary_concentration: float
    legal_moves: float
    adversary_legal_moves: float
    attacks: float
    adversary_attacks: float
    king_freedom: float
    adversary_king_freedom: float

    def as_vector(self) -> list:
        return [float(getattr(self, f.name)) for f in fields(self)]


BOARD_FEATURE_NAMES = [f.name for f in fields(BoardFeatures)]


@dataclass(frozen=True)
class MoveFeatures:
    """Binary move descriptors; exactly one piece indicator is set."""

    is_backward: bool
    is_flank: bool
    piece_is_pawn: bool
    piece_is_knight: bool
    piece_is_bishop: bool
    piece_is_rook: bool
    piece_is_queen: bool
    piece_is_king: bool
    gives_check: bool
    is_capture: bool
    is_castle: bool

    def as_vector(self) -> list:
        return [float(getattr(self, f.name)) for f in fields(self)]


MOVE_FEATURE_NAMES = [f.name for f in fields(MoveFeatures)]


def _material(p: Position, color: Color) -> int:
    total = 0
    for kind in PieceKind:
        bb = p.boards[color * 6 + kind]
        total += MATERIAL_POINTS[kind] * bin(bb).count("1")
    return total


def _pawn_islands(p: Position, color: Color) -> int:
    pawns = p.boards[color * 6 + PieceKind.PAWN]
    files = [bool(pawns & (0x0101010101010101 << f)) for f in range(8)]
    islands = 0
    prev = False
    for occupied in files:
        if occupied and not prev:
            islands += 1
        prev = occupied
    return islands


def _defended_proportion(p: Position, color: Color) -> float:
    own = p.occupancy(color) & ~p.boards[color * 6 + PieceKind.KING]
    total = bin(own).count("1")
    if total == 0:
        return 0.0
    defended = sum(1 for sq in _bit_squares(own) if is_attacked(p, sq, color))
    return defended / total


def _concentration(p: Position, color: Color) -> float:
    squares = list(_bit_squares(p.occupancy(color)))
    if len(squares) < 2:
        return 0.0
    total = 0.0
    pairs = 0
    for i, a in enumerate(squares):
        fa, ra = a & 7, a >> 3
        for b in squares[i + 1:]:
            total += math.hypot(fa - (b & 7), ra - (b >> 3))
            pairs += 1
    return total / pairs


def _move_counts(p: Position, king_sq: int):
    """(#legal moves, #capture moves, #king moves excl. castling)."""
    occ_them = p.occupancy(p.side_to_move.opponent)
    n_moves = n_captures = n_king = 0
    ep = p.en_passant
    pawns = p.boards[p.side_to_move * 6 + PieceKind.PAWN]
    for enc in _legal_move_ints(p):
        origin = enc & 63
        dest = (enc >> 6) & 63
        n_moves += 1
        if occ_them >> dest & 1 or (dest == ep and pawns >> origin & 1
                                    and (origin & 7) != (dest & 7)):
            n_captures += 1
        if origin == king_sq and abs(dest - origin) != 2:
            n_king += 1  # castling counts as a legal move, not king freedom
    return n_moves, n_captures, n_king


def _adversary_view(p: Position) -> Position:
    """Null-move flip used for the opponent's move-dependent features."""
    return Position(list(p.boards), p.side_to_move.opponent, p.castling,
                    None, p.halfmove_clock, p.fullmove_number)


def board_features(p: Position) -> BoardFeatures:
    """All 15 features, self = side to move, adversary = opponent.

    Adversary move counts come from a null-move flip of the position.  When
    the side to move is in check that flip is an illegal position; the
    opponent's moves are then its legal moves with king captures dropped,
    a documented approximation.
    """
    us = p.side_to_move
    them = us.opponent
    own_king = p.king_square(us)

    n_moves, n_captures, n_king = _move_counts(p, own_king)

    flipped = _adversary_view(p)
    our_king_bb_sq = own_king
    a_moves = a_captures = a_king = 0
    their_king = p.king_square(them)
    occ_us = p.occupancy(us)
    their_pawns = p.boards[them * 6 + PieceKind.PAWN]
    for enc in _legal_move_ints(flipped):
        dest = (enc >> 6) & 63
        if dest == our_king_bb_sq:
            continue  # capturing the king is not a real move
        origin = enc & 63
        a_moves += 1
        if occ_us >> dest & 1:
            a_captures += 1
        if origin == their_king and abs(dest - origin) != 2:
            a_king += 1

    return BoardFeatures(
        ply=float(p.ply),
        material_points=float(_material(p, us)),
        adversary_material_points=float(_material(p, them)),
        pawn_islands=float(_pawn_islands(p, us)),
        adversary_pawn_islands=float(_pawn_islands(p, them)),
        defended_pieces=_defended_proportion(p, us),
        adversary_defended_pieces=_defended_proportion(p, them),
        concentration=_concentration(p, us),
        adversary_concentration=_concentration(p, them),
        legal_moves=float(n_moves),
        adversary_legal_moves=float(a_moves),
        attacks=float(n_captures),
        adversary_attacks=float(a_captures),
        king_freedom=float(n_king),
        adversary_king_freedom=float(a_king),
    )


_QUEENSIDE_FILES = {0, 1, 2}
_KINGSIDE_FILES = {5, 6, 7}


def move_features(p: Position, m: Move) -> MoveFeatures:
    """Binary features of a legal move in `p`; flags are recomputed here."""
    piece = p.piece_at(m.origin)
    if piece is None or piece.color != p.side_to_move:
        raise ValueError(f"no {p.side_to_move.name} piece on move origin")

    of, df = square_file(m.origin), square_file(m.destination)
    orank, drank = square_rank(m.origin), square_rank(m.destination)
    if p.side_to_move == Color.WHITE:
        backward = drank < orank
    else:
        backward = drank > orank
    flank = ({of, df} <= _QUEENSIDE_FILES) or ({of, df} <= _KINGSIDE_FILES)

    match = next((lm for lm in legal_moves(p)
                  if lm.origin == m.origin and lm.destination == m.destination
                  and lm.promotion == m.promotion), None)
    if match is None:
        raise ValueError(f"move {m.uci()} not legal here")

    return MoveFeatures(
        is_backward=backward,
        is_flank=flank,
        piece_is_pawn=piece.kind == PieceKind.PAWN,
        piece_is_knight=piece.kind == PieceKind.KNIGHT,
        piece_is_bishop=piece.kind == PieceKind.BISHOP,
        piece_is_rook=piece.kind == PieceKind.ROOK,
        piece_is_queen=piece.kind == PieceKind.QUEEN,
        piece_is_king=piece.kind == PieceKind.KING,
        gives_check=match.gives_check,
        is_capture=match.is_capture,
        is_castle=match.is_castle,
    )
