"""Chess rules on bitboards: FEN I/O, legal move generation, perft, results.

Squares are integers 0..63 with a1 = 0, b1 = 1, ..., h8 = 63
(index = rank * 8 + file).  Positions are immutable; every operation
returns a new value, so they are safe to share across workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

FILE_NAMES = "abcdefgh"
RANK_NAMES = "12345678"

FULL_BB = (1 << 64) - 1

STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


class Color(enum.IntEnum):
    WHITE = 0
    BLACK = 1

    @property
    def opponent(self) -> "Color":
        return Color(self ^ 1)


class PieceKind(enum.IntEnum):
    PAWN = 0
    KNIGHT = 1
    BISHOP = 2
    ROOK = 3
    QUEEN = 4
    KING = 5


PIECE_CHARS = "PNBRQK"


@dataclass(frozen=True)
class Piece:
    color: Color
    kind: PieceKind

    @property
    def symbol(self) -> str:
        ch = PIECE_CHARS[self.kind]
        return ch if self.color == Color.WHITE else ch.lower()

    @classmethod
    def from_symbol(cls, ch: str) -> "Piece":
        kind = PieceKind(PIECE_CHARS.index(ch.upper()))
        return cls(Color.WHITE if ch.isupper() else Color.BLACK, kind)


class Termination(enum.Enum):
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    FIFTY_MOVE = "fifty_move"
    THREEFOLD_REPETITION = "threefold_repetition"
    INSUFFICIENT_MATERIAL = "insufficient_material"
    ADJUDICATED = "adjudicated"


@dataclass(frozen=True)
class GameOutcome:
    """Final result of a game; `winner` is None for draws."""

    winner: Optional[Color]
    termination: Termination

    def reward_for(self, side: Color) -> float:
        if self.winner is None:
            return 0.5
        return 1.0 if self.winner == side else 0.0

    def result_for(self, side: Color) -> str:
        if self.winner is None:
            return "draw"
        return "win" if self.winner == side else "loss"


class IllegalMoveError(ValueError):
    pass


class FenError(ValueError):
    """Raised on malformed FEN text; message names the offending field."""


def square(file: int, rank: int) -> int:
    return rank * 8 + file


def square_file(sq: int) -> int:
    return sq & 7


def square_rank(sq: int) -> int:
    return sq >> 3


def square_name(sq: int) -> str:
    return FILE_NAMES[sq & 7] + RANK_NAMES[sq >> 3]


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in FILE_NAMES or name[1] not in RANK_NAMES:
        raise ValueError(f"bad square name {name!r}")
    return square(FILE_NAMES.index(name[0]), RANK_NAMES.index(name[1]))


_PROMO_CHARS = {PieceKind.KNIGHT: "n", PieceKind.BISHOP: "b",
                PieceKind.ROOK: "r", PieceKind.QUEEN: "q"}
_CHAR_PROMOS = {v: k for k, v in _PROMO_CHARS.items()}


@dataclass(frozen=True)
class Move:
    """A move with derived flags; identity is (origin, destination, promotion)."""

    origin: int
    destination: int
    promotion: Optional[PieceKind] = None
    is_capture: bool = False
    gives_check: bool = False
    is_castle: bool = False
    is_en_passant: bool = False

    def uci(self) -> str:
        text = square_name(self.origin) + square_name(self.destination)
        if self.promotion is not None:
            text += _PROMO_CHARS[self.promotion]
        return text

    def __str__(self) -> str:
        return self.uci()


# ---------------------------------------------------------------------------
# Precomputed attack tables
# ---------------------------------------------------------------------------

def _stepper(deltas):
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        bb = 0
        for df, dr in deltas:
            nf, nr = f + df, r + dr
            if 0 <= nf < 8 and 0 <= nr < 8:
                bb |= 1 << (nr * 8 + nf)
        table.append(bb)
    return table


KNIGHT_ATTACKS = _stepper([(1, 2), (2, 1), (2, -1), (1, -2),
                           (-1, -2), (-2, -1), (-2, 1), (-1, 2)])
KING_ATTACKS = _stepper([(df, dr) for df in (-1, 0, 1) for dr in (-1, 0, 1)
                         if df or dr])
# PAWN_ATTACKS[color][sq]: squares a pawn of `color` on sq attacks
PAWN_ATTACKS = (_stepper([(-1, 1), (1, 1)]), _stepper([(-1, -1), (1, -1)]))


def _ray(sq: int, df: int, dr: int, occ: int = 0) -> int:
    bb = 0
    f, r = (sq & 7) + df, (sq >> 3) + dr
    while 0 <= f < 8 and 0 <= r < 8:
        s = r * 8 + f
        bb |= 1 << s
        if occ >> s & 1:
            break
        f += df
        r += dr
    return bb


def _subset_table(dirs):
    """Per-square dict of masked occupancy -> attack set for two opposite rays."""
    masks = []
    tables = []
    for sq in range(64):
        mask = _ray(sq, *dirs[0]) | _ray(sq, *dirs[1])
        table = {}
        sub = 0
        while True:
            table[sub] = _ray(sq, *dirs[0], sub) | _ray(sq, *dirs[1], sub)
            sub = (sub - mask) & mask
            if not sub:
                break
        masks.append(mask)
        tables.append(table)
    return masks, tables


RANK_MASKS, RANK_TABLES = _subset_table([(1, 0), (-1, 0)])
FILE_MASKS, FILE_TABLES = _subset_table([(0, 1), (0, -1)])
DIAG_MASKS, DIAG_TABLES = _subset_table([(1, 1), (-1, -1)])
ANTI_MASKS, ANTI_TABLES = _subset_table([(1, -1), (-1, 1)])


def rook_attacks(sq: int, occ: int) -> int:
    return (RANK_TABLES[sq][occ & RANK_MASKS[sq]]
            | FILE_TABLES[sq][occ & FILE_MASKS[sq]])


def bishop_attacks(sq: int, occ: int) -> int:
    return (DIAG_TABLES[sq][occ & DIAG_MASKS[sq]]
            | ANTI_TABLES[sq][occ & ANTI_MASKS[sq]])


def _build_lines():
    between = [[0] * 64 for _ in range(64)]
    line = [[0] * 64 for _ in range(64)]
    for a in range(64):
        for df, dr in [(1, 0), (-1, 0), (0, 1), (0, -1),
                       (1, 1), (-1, -1), (1, -1), (-1, 1)]:
            ray_a = _ray(a, df, dr)
            bb = ray_a
            while bb:
                b = (bb & -bb).bit_length() - 1
                bb &= bb - 1
                between[a][b] = ray_a & _ray(b, -df, -dr)
                line[a][b] = (ray_a | _ray(a, -df, -dr) | (1 << a))
    return between, line


BETWEEN, LINE = _build_lines()

_FILE_A = 0x0101010101010101
_FILE_H = _FILE_A << 7
_RANK_BB = [0xFF << (8 * r) for r in range(8)]

_CASTLE_WK, _CASTLE_WQ, _CASTLE_BK, _CASTLE_BQ = 1, 2, 4, 8
_CASTLE_CHARS = [("K", _CASTLE_WK), ("Q", _CASTLE_WQ),
                 ("k", _CASTLE_BK), ("q", _CASTLE_BQ)]

# castling rights cleared when a piece moves from / is captured on a square
_CASTLE_CLEAR = [15] * 64
_CASTLE_CLEAR[parse_square("e1")] &= ~(_CASTLE_WK | _CASTLE_WQ)
_CASTLE_CLEAR[parse_square("a1")] &= ~_CASTLE_WQ
_CASTLE_CLEAR[parse_square("h1")] &= ~_CASTLE_WK
_CASTLE_CLEAR[parse_square("e8")] &= ~(_CASTLE_BK | _CASTLE_BQ)
_CASTLE_CLEAR[parse_square("a8")] &= ~_CASTLE_BQ
_CASTLE_CLEAR[parse_square("h8")] &= ~_CASTLE_BK


def _bit_squares(bb: int) -> Iterator[int]:
    while bb:
        lsb = bb & -bb
        yield lsb.bit_length() - 1
        bb ^= lsb


# ---------------------------------------------------------------------------
# Position
# ---------------------------------------------------------------------------

class Position:
    """Immutable chess position.

    `boards` holds 12 bitboards indexed color * 6 + kind.  Constructed via
    `parse_fen` / `apply_move`; the raw constructor performs no validation
    (shuffled boards from the explainability probes are legal inputs for
    tokenization and attack queries but not for move generation).
    """

    __slots__ = ("boards", "occ_white", "occ_black", "occ", "side_to_move",
                 "castling", "en_passant", "halfmove_clock", "fullmove_number")

    def __init__(self, boards, side_to_move, castling, en_passant,
                 halfmove_clock, fullmove_number):
        object.__setattr__(self, "boards", tuple(boards))
        object.__setattr__(self, "occ_white",
                           boards[0] | boards[1] | boards[2]
                           | boards[3] | boards[4] | boards[5])
        object.__setattr__(self, "occ_black",
                           boards[6] | boards[7] | boards[8]
                           | boards[9] | boards[10] | boards[11])
        object.__setattr__(self, "occ", self.occ_white | self.occ_black)
        object.__setattr__(self, "side_to_move", Color(side_to_move))
        object.__setattr__(self, "castling", castling)
        object.__setattr__(self, "en_passant", en_passant)
        object.__setattr__(self, "halfmove_clock", halfmove_clock)
        object.__setattr__(self, "fullmove_number", fullmove_number)

    def __setattr__(self, *args):
        raise AttributeError("Position is immutable")

    def piece_at(self, sq: int) -> Optional[Piece]:
        bit = 1 << sq
        if not self.occ & bit:
            return None
        for idx, bb in enumerate(self.boards):
            if bb & bit:
                return Piece(Color(idx // 6), PieceKind(idx % 6))
        raise AssertionError("occupancy out of sync")

    def occupancy(self, color: Color) -> int:
        return self.occ_white if color == Color.WHITE else self.occ_black

    def king_square(self, color: Color) -> int:
        return (self.boards[color * 6 + PieceKind.KING].bit_length() - 1)

    @property
    def ply(self) -> int:
        return (self.fullmove_number - 1) * 2 + (1 if self.side_to_move else 0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Position)
                and self.boards == other.boards
                and self.side_to_move == other.side_to_move
                and self.castling == other.castling
                and self.en_passant == other.en_passant
                and self.halfmove_clock == other.halfmove_clock
                and self.fullmove_number == other.fullmove_number)

    def __hash__(self) -> int:
        return hash((self.boards, self.side_to_move, self.castling,
                     self.en_passant))

    def __repr__(self) -> str:
        return f"Position({serialize_fen(self)!r})"

    def repetition_key(self):
        """Identity used for threefold repetition.

        The en-passant square only distinguishes positions when an
        en-passant capture is actually legal (FIDE reading).
        """
        ep = self.en_passant
        if ep is not None:
            pawns = self.boards[self.side_to_move * 6 + PieceKind.PAWN]
            capturable = any(
                (m >> 6) & 63 == ep and (m & 7) != (ep & 7)
                and pawns >> (m & 63) & 1
                for m in _legal_move_ints(self))
            if not capturable:
                ep = None
        return (self.boards, self.side_to_move, self.castling, ep)

    def mirrored(self) -> "Position":
        """Color-flipped, vertically flipped position with side swapped."""
        def flip(bb: int) -> int:
            out = 0
            for sq in _bit_squares(bb):
                out |= 1 << (sq ^ 56)
            return out

        boards = [0] * 12
        for idx, bb in enumerate(self.boards):
            color, kind = divmod(idx, 6)
            boards[(1 - color) * 6 + kind] = flip(bb)
        castling = ((self.castling & 3) << 2) | ((self.castling >> 2) & 3)
        ep = self.en_passant ^ 56 if self.en_passant is not None else None
        return Position(boards, self.side_to_move.opponent, castling, ep,
                        self.halfmove_clock, self.fullmove_number)


# ---------------------------------------------------------------------------
# FEN
# ---------------------------------------------------------------------------

def parse_fen(text: str) -> Position:
    fields = text.split()
    if len(fields) != 6:
        raise FenError(f"expected 6 FEN fields, got {len(fields)}")
    placement, stm_str, castling_str, ep_str, half_str, full_str = fields

    ranks = placement.split("/")
    if len(ranks) != 8:
        raise FenError("placement: expected 8 ranks")
    boards = [0] * 12
    for rank_offset, row in enumerate(ranks):
        rank = 7 - rank_offset
        file = 0
        for ch in row:
            if ch.isdigit():
                step = int(ch)
                if not 1 <= step <= 8:
                    raise FenError(f"placement: bad empty run {ch!r}")
                file += step
            else:
                if ch.upper() not in PIECE_CHARS:
                    raise FenError(f"placement: unknown piece {ch!r}")
                if file > 7:
                    raise FenError(f"placement: rank {rank + 1} overflows")
                piece = Piece.from_symbol(ch)
                boards[piece.color * 6 + piece.kind] |= 1 << square(file, rank)
                file += 1
        if file != 8:
            raise FenError(f"placement: rank {rank + 1} has {file} files")

    for color, name in ((Color.WHITE, "white"), (Color.BLACK, "black")):
        kings = bin(boards[color * 6 + PieceKind.KING]).count("1")
        if kings != 1:
            raise FenError(f"placement: {name} has {kings} kings")
    pawn_bb = boards[PieceKind.PAWN] | boards[6 + PieceKind.PAWN]
    if pawn_bb & (_RANK_BB[0] | _RANK_BB[7]):
        raise FenError("placement: pawn on back rank")

    if stm_str not in ("w", "b"):
        raise FenError(f"side to move: {stm_str!r}")
    stm = Color.WHITE if stm_str == "w" else Color.BLACK

    castling = 0
    if castling_str != "-":
        for ch in castling_str:
            for sym, bit in _CASTLE_CHARS:
                if ch == sym:
                    if castling & bit:
                        raise FenError(f"castling: duplicate {ch!r}")
                    castling |= bit
                    break
            else:
                raise FenError(f"castling: unknown flag {ch!r}")
    for bit, ksq, rsq, kch in (
            (_CASTLE_WK, "e1", "h1", "K"), (_CASTLE_WQ, "e1", "a1", "K"),
            (_CASTLE_BK, "e8", "h8", "k"), (_CASTLE_BQ, "e8", "a8", "k")):
        if castling & bit:
            color = Color.WHITE if kch == "K" else Color.BLACK
            if not boards[color * 6 + PieceKind.KING] >> parse_square(ksq) & 1:
                raise FenError("castling: right without king in place")
            if not boards[color * 6 + PieceKind.ROOK] >> parse_square(rsq) & 1:
                raise FenError("castling: right without rook in place")

    ep = None
    if ep_str != "-":
        try:
            ep = parse_square(ep_str)
        except ValueError:
            raise FenError(f"en passant: bad square {ep_str!r}") from None
        if square_rank(ep) not in (2, 5):
            raise FenError("en passant: square not on rank 3 or 6")

    try:
        halfmove = int(half_str)
        fullmove = int(full_str)
    except ValueError:
        raise FenError("clocks: not integers") from None
    if halfmove < 0 or fullmove < 1:
        raise FenError("clocks: out of range")

    pos = Position(boards, stm, castling, ep, halfmove, fullmove)
    if _attackers_to(pos, pos.king_square(stm.opponent), stm, pos.occ):
        raise FenError("side to move: opponent king already in check")
    return pos


def serialize_fen(p: Position) -> str:
    rows = []
    for rank in range(7, -1, -1):
        row = ""
        run = 0
        for file in range(8):
            piece = p.piece_at(square(file, rank))
            if piece is None:
                run += 1
            else:
                if run:
                    row += str(run)
                    run = 0
                row += piece.symbol
        if run:
            row += str(run)
        rows.append(row)
    castling = "".join(sym for sym, bit in _CASTLE_CHARS if p.castling & bit)
    return " ".join([
        "/".join(rows),
        "w" if p.side_to_move == Color.WHITE else "b",
        castling or "-",
        square_name(p.en_passant) if p.en_passant is not None else "-",
        str(p.halfmove_clock),
        str(p.fullmove_number),
    ])


def starting_position() -> Position:
    return parse_fen(STARTING_FEN)


# ---------------------------------------------------------------------------
# Attacks
# ---------------------------------------------------------------------------

def _attackers_to(p: Position, sq: int, by: Color, occ: int) -> int:
    base = by * 6
    boards = p.boards
    attackers = (PAWN_ATTACKS[by ^ 1][sq] & boards[base + PieceKind.PAWN]
                 | KNIGHT_ATTACKS[sq] & boards[base + PieceKind.KNIGHT]
                 | KING_ATTACKS[sq] & boards[base + PieceKind.KING])
    queens = boards[base + PieceKind.QUEEN]
    attackers |= bishop_attacks(sq, occ) & (boards[base + PieceKind.BISHOP]
                                            | queens)
    attackers |= rook_attacks(sq, occ) & (boards[base + PieceKind.ROOK]
                                          | queens)
    return attackers


def is_attacked(p: Position, sq: int, by: Color) -> bool:
    """Pseudo-legal attack test: pins ignored, pawn attacks diagonal only."""
    return bool(_attackers_to(p, sq, by, p.occ))


def in_check(p: Position) -> bool:
    return is_attacked(p, p.king_square(p.side_to_move),
                       p.side_to_move.opponent)


def _attack_map(p: Position, by: Color, occ: int) -> int:
    """All squares attacked by `by`, given occupancy `occ`."""
    base = by * 6
    boards = p.boards
    pawns = boards[base + PieceKind.PAWN]
    if by == Color.WHITE:
        attacks = ((pawns & ~_FILE_A) << 7 | (pawns & ~_FILE_H) << 9) & FULL_BB
    else:
        attacks = (pawns & ~_FILE_H) >> 7 | (pawns & ~_FILE_A) >> 9
    for sq in _bit_squares(boards[base + PieceKind.KNIGHT]):
        attacks |= KNIGHT_ATTACKS[sq]
    queens = boards[base + PieceKind.QUEEN]
    for sq in _bit_squares(boards[base + PieceKind.BISHOP] | queens):
        attacks |= bishop_attacks(sq, occ)
    for sq in _bit_squares(boards[base + PieceKind.ROOK] | queens):
        attacks |= rook_attacks(sq, occ)
    attacks |= KING_ATTACKS[p.king_square(by)]
    return attacks


# ---------------------------------------------------------------------------
# Move generation (fully legal, checkmask / pinmask based)
# ---------------------------------------------------------------------------
# Internal move encoding: origin | destination << 6 | promotion << 12
# (promotion nibble 0 = none, else PieceKind value).

def _legal_move_ints(p: Position) -> list:
    us = p.side_to_move
    them = us ^ 1
    boards = p.boards
    base = us * 6
    ebase = them * 6
    occ = p.occ
    occ_us = p.occupancy(us)
    occ_them = p.occupancy(Color(them))
    ksq = p.king_square(us)
    king_bb = 1 << ksq

    moves = []

    danger = _attack_map(p, Color(them), occ ^ king_bb)
    targets = KING_ATTACKS[ksq] & ~occ_us & ~danger
    for to in _bit_squares(targets):
        moves.append(ksq | to << 6)

    checkers = _attackers_to(p, ksq, Color(them), occ)
    if checkers & (checkers - 1):  # double check: king moves only
        return moves

    if checkers:
        csq = checkers.bit_length() - 1
        check_mask = BETWEEN[ksq][csq] | checkers
    else:
        check_mask = FULL_BB
        # castling: only when not in check; path squares must be safe
        if us == Color.WHITE:
            if (p.castling & _CASTLE_WK and not occ & 0x60
                    and not _attackers_to(p, 5, Color(them), occ)
                    and not _attackers_to(p, 6, Color(them), occ)):
                moves.append(4 | 6 << 6)
            if (p.castling & _CASTLE_WQ and not occ & 0x0E
                    and not _attackers_to(p, 3, Color(them), occ)
                    and not _attackers_to(p, 2, Color(them), occ)):
                moves.append(4 | 2 << 6)
        else:
            if (p.castling & _CASTLE_BK and not occ & (0x60 << 56)
                    and not _attackers_to(p, 61, Color(them), occ)
                    and not _attackers_to(p, 62, Color(them), occ)):
                moves.append(60 | 62 << 6)
            if (p.castling & _CASTLE_BQ and not occ & (0x0E << 56)
                    and not _attackers_to(p, 59, Color(them), occ)
                    and not _attackers_to(p, 58, Color(them), occ)):
                moves.append(60 | 58 << 6)

    # absolute pins: own piece alone between king and an enemy slider
    pin_line = {}
    equeens = boards[ebase + PieceKind.QUEEN]
    snipers = (rook_attacks(ksq, occ_them)
               & (boards[ebase + PieceKind.ROOK] | equeens)
               | bishop_attacks(ksq, occ_them)
               & (boards[ebase + PieceKind.BISHOP] | equeens))
    for ssq in _bit_squares(snipers):
        blockers = BETWEEN[ksq][ssq] & occ
        if blockers and not blockers & (blockers - 1) and blockers & occ_us:
            pin_line[blockers.bit_length() - 1] = LINE[ksq][ssq]

    open_targets = ~occ_us & check_mask

    for sq in _bit_squares(boards[base + PieceKind.KNIGHT]):
        if sq in pin_line:
            continue  # a pinned knight can never stay on the pin line
        for to in _bit_squares(KNIGHT_ATTACKS[sq] & open_targets):
            moves.append(sq | to << 6)

    for sq in _bit_squares(boards[base + PieceKind.BISHOP]):
        t = bishop_attacks(sq, occ) & open_targets
        if sq in pin_line:
            t &= pin_line[sq]
        for to in _bit_squares(t):
            moves.append(sq | to << 6)

    for sq in _bit_squares(boards[base + PieceKind.ROOK]):
        t = rook_attacks(sq, occ) & open_targets
        if sq in pin_line:
            t &= pin_line[sq]
        for to in _bit_squares(t):
            moves.append(sq | to << 6)

    for sq in _bit_squares(boards[base + PieceKind.QUEEN]):
        t = (bishop_attacks(sq, occ) | rook_attacks(sq, occ)) & open_targets
        if sq in pin_line:
            t &= pin_line[sq]
        for to in _bit_squares(t):
            moves.append(sq | to << 6)

    pawns = boards[base + PieceKind.PAWN]
    if us == Color.WHITE:
        single = (pawns << 8) & ~occ & FULL_BB
        double = ((single & _RANK_BB[2]) << 8) & ~occ
        cap_w = ((pawns & ~_FILE_A) << 7) & occ_them
        cap_e = ((pawns & ~_FILE_H) << 9) & occ_them & FULL_BB
        pawn_sets = ((single, -8), (double, -16), (cap_w, -7), (cap_e, -9))
        promo_rank = _RANK_BB[7]
    else:
        single = (pawns >> 8) & ~occ
        double = ((single & _RANK_BB[5]) >> 8) & ~occ
        cap_w = ((pawns & ~_FILE_A) >> 9) & occ_them
        cap_e = ((pawns & ~_FILE_H) >> 7) & occ_them
        pawn_sets = ((single, 8), (double, 16), (cap_w, 9), (cap_e, 7))
        promo_rank = _RANK_BB[0]

    for target_set, back, in pawn_sets:
        for to in _bit_squares(target_set & check_mask):
            sq = to + back
            if sq in pin_line and not pin_line[sq] >> to & 1:
                continue
            if 1 << to & promo_rank:
                enc = sq | to << 6
                moves.extend((enc | PieceKind.QUEEN << 12,
                              enc | PieceKind.ROOK << 12,
                              enc | PieceKind.BISHOP << 12,
                              enc | PieceKind.KNIGHT << 12))
            else:
                moves.append(sq | to << 6)

    if p.en_passant is not None:
        ep = p.en_passant
        cap_sq = ep - 8 if us == Color.WHITE else ep + 8
        for sq in _bit_squares(PAWN_ATTACKS[them][ep] & pawns):
            # simulate the capture: both pawns leave their squares
            occ2 = occ ^ (1 << sq) ^ (1 << cap_sq) | (1 << ep)
            if (rook_attacks(ksq, occ2)
                    & (boards[ebase + PieceKind.ROOK] | equeens)
                    & ~(1 << cap_sq)):
                continue
            if (bishop_attacks(ksq, occ2)
                    & (boards[ebase + PieceKind.BISHOP] | equeens)):
                continue
            # non-slider checks must still be resolved by this capture
            if checkers and not checkers == 1 << cap_sq \
                    and not check_mask >> ep & 1:
                continue
            moves.append(sq | ep << 6)

    return moves


def _apply_int(p: Position, enc: int) -> Position:
    """Apply an internal move encoding; no legality validation."""
    us = p.side_to_move
    them = us ^ 1
    origin = enc & 63
    dest = (enc >> 6) & 63
    promo = (enc >> 12) & 15
    boards = list(p.boards)
    base = us * 6
    ebase = them * 6
    origin_bb = 1 << origin
    dest_bb = 1 << dest

    kind = None
    for k in range(6):
        if boards[base + k] & origin_bb:
            kind = k
            break

    capture = bool(p.occ & dest_bb & p.occupancy(Color(them)))
    is_ep = (kind == PieceKind.PAWN and p.en_passant == dest
             and not p.occ & dest_bb)

    boards[base + kind] ^= origin_bb
    if promo:
        boards[base + promo] |= dest_bb
    else:
        boards[base + kind] |= dest_bb

    if capture:
        for k in range(6):
            if boards[ebase + k] & dest_bb:
                boards[ebase + k] ^= dest_bb
                break
    elif is_ep:
        cap_sq = dest - 8 if us == Color.WHITE else dest + 8
        boards[ebase + PieceKind.PAWN] ^= 1 << cap_sq
        capture = True

    if kind == PieceKind.KING and abs(dest - origin) == 2:
        rank_base = 0 if us == Color.WHITE else 56
        if dest > origin:  # kingside
            boards[base + PieceKind.ROOK] ^= (1 << (rank_base + 7)
                                              | 1 << (rank_base + 5))
        else:
            boards[base + PieceKind.ROOK] ^= (1 << rank_base
                                              | 1 << (rank_base + 3))

    castling = p.castling & _CASTLE_CLEAR[origin] & _CASTLE_CLEAR[dest]

    ep = None
    if kind == PieceKind.PAWN and abs(dest - origin) == 16:
        ep = (origin + dest) // 2

    halfmove = 0 if capture or kind == PieceKind.PAWN else p.halfmove_clock + 1
    fullmove = p.fullmove_number + (1 if us == Color.BLACK else 0)
    return Position(boards, Color(them), castling, ep, halfmove, fullmove)


def _decorate(p: Position, enc: int, compute_check: bool = True) -> Move:
    origin = enc & 63
    dest = (enc >> 6) & 63
    promo = (enc >> 12) & 15
    piece = p.piece_at(origin)
    is_ep = (piece.kind == PieceKind.PAWN and p.en_passant == dest
             and not p.occ >> dest & 1)
    is_castle = piece.kind == PieceKind.KING and abs(dest - origin) == 2
    is_capture = bool(p.occupancy(p.side_to_move.opponent) >> dest & 1) or is_ep
    gives_check = False
    if compute_check:
        after = _apply_int(p, enc)
        gives_check = in_check(after)
    return Move(origin, dest, PieceKind(promo) if promo else None,
                is_capture=is_capture, gives_check=gives_check,
                is_castle=is_castle, is_en_passant=is_ep)


def legal_moves(p: Position) -> list:
    """All legal moves for the side to move, with derived flags filled."""
    return [_decorate(p, enc) for enc in _legal_move_ints(p)]


def _encode(move: Move) -> int:
    enc = move.origin | move.destination << 6
    if move.promotion is not None:
        enc |= move.promotion << 12
    return enc


def apply_move(p: Position, move: Move) -> Position:
    """Apply a legal move, returning the successor position."""
    enc = _encode(move)
    if enc not in _legal_move_ints(p):
        raise IllegalMoveError(f"illegal move {move.uci()} "
                               f"in {serialize_fen(p)}")
    return _apply_int(p, enc)


def perft(p: Position, depth: int) -> int:
    """Leaf count of the legal move tree at exactly `depth` plies."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = _legal_move_ints(p)
    if depth == 1:
        return len(moves)
    total = 0
    for enc in moves:
        total += perft(_apply_int(p, enc), depth - 1)
    return total


# ---------------------------------------------------------------------------
# Move text: UCI and SAN
# ---------------------------------------------------------------------------

def move_from_uci(p: Position, text: str) -> Move:
    for move in legal_moves(p):
        if move.uci() == text:
            return move
    raise IllegalMoveError(f"move {text!r} not legal in {serialize_fen(p)}")


def san(p: Position, move: Move) -> str:
    """Standard algebraic notation for a legal move."""
    after = _apply_int(p, _encode(move))
    suffix = ""
    if in_check(after):
        suffix = "#" if not _legal_move_ints(after) else "+"

    if move.is_castle:
        body = "O-O" if move.destination > move.origin else "O-O-O"
        return body + suffix

    piece = p.piece_at(move.origin)
    dest = square_name(move.destination)
    if piece.kind == PieceKind.PAWN:
        body = dest
        if move.is_capture:
            body = FILE_NAMES[square_file(move.origin)] + "x" + dest
        if move.promotion is not None:
            body += "=" + PIECE_CHARS[move.promotion]
        return body + suffix

    # disambiguate against other same-kind moves to the same square
    rivals = [m for m in legal_moves(p)
              if m.destination == move.destination and m.origin != move.origin
              and p.piece_at(m.origin).kind == piece.kind]
    disambig = ""
    if rivals:
        same_file = any(square_file(m.origin) == square_file(move.origin)
                        for m in rivals)
        same_rank = any(square_rank(m.origin) == square_rank(move.origin)
                        for m in rivals)
        if not same_file:
            disambig = FILE_NAMES[square_file(move.origin)]
        elif not same_rank:
            disambig = RANK_NAMES[square_rank(move.origin)]
        else:
            disambig = square_name(move.origin)
    body = (PIECE_CHARS[piece.kind] + disambig
            + ("x" if move.is_capture else "") + dest)
    return body + suffix


def parse_move(p: Position, text: str) -> Move:
    """Parse a move given as UCI long algebraic or SAN."""
    stripped = text.strip().rstrip("+#!?").replace("0", "O")
    candidates = legal_moves(p)
    for move in candidates:
        if move.uci() == text.strip():
            return move
    for move in candidates:
        if san(p, move).rstrip("+#") == stripped:
            return move
    raise IllegalMoveError(f"cannot parse move {text!r} "
                           f"in {serialize_fen(p)}")


# ---------------------------------------------------------------------------
# Game termination
# ---------------------------------------------------------------------------

def _insufficient_material(p: Position) -> bool:
    boards = p.boards
    if (boards[PieceKind.PAWN] | boards[6 + PieceKind.PAWN]
            | boards[PieceKind.ROOK] | boards[6 + PieceKind.ROOK]
            | boards[PieceKind.QUEEN] | boards[6 + PieceKind.QUEEN]):
        return False
    knights = boards[PieceKind.KNIGHT] | boards[6 + PieceKind.KNIGHT]
    bishops = boards[PieceKind.BISHOP] | boards[6 + PieceKind.BISHOP]
    minors = bin(knights | bishops).count("1")
    if minors <= 1:
        return True
    if knights:
        return False
    # bishops only: dead when all are on one square color
    light = 0x55AA55AA55AA55AA
    return not (bishops & light) or not (bishops & ~light)


def game_result(p: Position, history=()) -> Optional[GameOutcome]:
    """Terminal outcome of `p`, or None if the game continues.

    `history` holds the positions since the last irreversible move,
    including `p` itself; entries may be Positions or precomputed
    `repetition_key()` tuples (game loops cache keys to stay linear).
    """
    if not _legal_move_ints(p):
        if in_check(p):
            return GameOutcome(p.side_to_move.opponent, Termination.CHECKMATE)
        return GameOutcome(None, Termination.STALEMATE)
    if p.halfmove_clock >= 100:
        return GameOutcome(None, Termination.FIFTY_MOVE)
    if _insufficient_material(p):
        return GameOutcome(None, Termination.INSUFFICIENT_MATERIAL)
    if history:
        key = p.repetition_key()
        seen = sum(
            1 for h in history
            if (h.repetition_key() if isinstance(h, Position) else h) == key)
        if seen >= 3:
            return GameOutcome(None, Termination.THREEFOLD_REPETITION)
    return None
