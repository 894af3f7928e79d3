"""Fixed-length board tokenization for the manager network.

Layout (68 tokens):
  0..63   square contents, a1 first: 0 empty, 1-6 white PNBRQK, 7-12 black
  64      side to move (0 white, 1 black)
  65      castling rights, 4-bit mask (WK=1, WQ=2, BK=4, BQ=8)
  66      side-to-move in check (0/1)
  67      CLS marker (always 0 in its own slot)

En passant and the move clocks are deliberately not encoded.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from centaur.chess.board import Color, Piece, PieceKind, Position, in_check

SEQUENCE_LENGTH = 68
SQUARE_VOCAB = 13
SIDE_VOCAB = 2
CASTLING_VOCAB = 16
CHECK_VOCAB = 2
CLS_VOCAB = 1

SLOT_VOCAB_SIZES = (SQUARE_VOCAB,) * 64 + (SIDE_VOCAB, CASTLING_VOCAB,
                                           CHECK_VOCAB, CLS_VOCAB)

# offsets mapping per-slot ids into one shared embedding vocabulary
_SLOT_OFFSETS = (0,) * 64 + (
    SQUARE_VOCAB,
    SQUARE_VOCAB + SIDE_VOCAB,
    SQUARE_VOCAB + SIDE_VOCAB + CASTLING_VOCAB,
    SQUARE_VOCAB + SIDE_VOCAB + CASTLING_VOCAB + CHECK_VOCAB,
)
GLOBAL_VOCAB = (SQUARE_VOCAB + SIDE_VOCAB + CASTLING_VOCAB + CHECK_VOCAB
                + CLS_VOCAB)

CLS_INDEX = 67


@dataclass(frozen=True)
class TokenSequence:
    """68 token ids, each within its slot's vocabulary."""

    ids: tuple

    def __post_init__(self):
        if len(self.ids) != SEQUENCE_LENGTH:
            raise ValueError(f"expected {SEQUENCE_LENGTH} tokens, "
                             f"got {len(self.ids)}")
        for i, (tok, vocab) in enumerate(zip(self.ids, SLOT_VOCAB_SIZES)):
            if not 0 <= tok < vocab:
                raise ValueError(f"token {tok} out of range at slot {i}")

    def global_ids(self) -> tuple:
        """Slot ids shifted into the shared embedding vocabulary."""
        return tuple(tok + off for tok, off in zip(self.ids, _SLOT_OFFSETS))


def _square_token(piece: Optional[Piece]) -> int:
    if piece is None:
        return 0
    return 1 + piece.kind + (6 if piece.color == Color.BLACK else 0)


def tokenize(p: Position) -> TokenSequence:
    ids = [_square_token(p.piece_at(sq)) for sq in range(64)]
    ids.append(int(p.side_to_move))
    ids.append(p.castling)
    ids.append(1 if in_check(p) else 0)
    ids.append(0)
    return TokenSequence(tuple(ids))


def decode_tokens(t: TokenSequence):
    """Recover (placement, side_to_move, castling, check_flag).

    Placement is a dict square -> Piece for occupied squares.  En passant
    and clocks are not represented in the sequence.
    """
    placement = {}
    for sq, tok in enumerate(t.ids[:64]):
        if tok == 0:
            continue
        color = Color.WHITE if tok <= 6 else Color.BLACK
        kind = PieceKind((tok - 1) % 6)
        placement[sq] = Piece(color, kind)
    return placement, Color(t.ids[64]), t.ids[65], bool(t.ids[66])


def shuffle_position(p: Position, seed) -> Position:
    """Uniform random permutation of the 64 square contents.

    The piece multiset is preserved and metadata copied unchanged.  The
    result is generally illegal as chess; it feeds tokenization and attack
    queries only, never move generation.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    contents = [p.piece_at(sq) for sq in range(64)]
    rng.shuffle(contents)
    boards = [0] * 12
    for sq, piece in enumerate(contents):
        if piece is not None:
            boards[piece.color * 6 + piece.kind] |= 1 << sq
    return Position(boards, p.side_to_move, p.castling, p.en_passant,
                    p.halfmove_clock, p.fullmove_number)
