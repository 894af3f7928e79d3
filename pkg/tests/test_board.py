import random

import pytest

from centaur.chess import (
    Color,
    FenError,
    GameOutcome,
    IllegalMoveError,
    Move,
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
    san,
    serialize_fen,
    starting_position,
)

from oracle_board import OracleBoard


class TestFen:
    def test_start_position_roundtrip(self):
        p = parse_fen(STARTING_FEN)
        assert serialize_fen(p) == STARTING_FEN
        assert p.side_to_move == Color.WHITE
        assert p.castling == 0b1111
        assert p.fullmove_number == 1

    def test_two_lone_kings(self):
        p = parse_fen("8/8/8/8/8/8/8/K6k w - - 0 1")
        assert p.piece_at(parse_square("a1")).kind == PieceKind.KING
        assert p.piece_at(parse_square("h1")).kind == PieceKind.KING

    def test_two_white_kings_rejected(self):
        with pytest.raises(FenError, match="king"):
            parse_fen("8/8/8/8/8/8/8/KK5k w - - 0 1")

    def test_pawn_on_back_rank_rejected(self):
        with pytest.raises(FenError, match="pawn"):
            parse_fen("P7/8/8/8/8/8/8/K6k w - - 0 1")

    def test_wrong_field_count(self):
        with pytest.raises(FenError, match="field"):
            parse_fen("8/8/8/8/8/8/8/K6k w - -")

    def test_bad_en_passant_rank(self):
        with pytest.raises(FenError, match="en passant"):
            parse_fen("8/8/8/8/8/8/8/K6k w - e4 0 1")

    def test_side_not_to_move_in_check_rejected(self):
        # white queen gives check but black is not to move
        with pytest.raises(FenError, match="check"):
            parse_fen("7k/7Q/8/8/8/8/8/K7 w - - 0 1")

    def test_roundtrip_on_sampled_positions(self, sampled_positions):
        for p in sampled_positions:
            assert parse_fen(serialize_fen(p)) == p


class TestLegalMoves:
    def test_start_has_twenty_moves(self):
        assert len(legal_moves(starting_position())) == 20

    def test_matches_oracle_on_fixed_position(self):
        fen = "k7/8/8/8/8/8/5PPP/7K w - - 0 1"
        ours = sorted(m.uci() for m in legal_moves(parse_fen(fen)))
        assert ours == OracleBoard(fen).legal_moves_uci()
        for uci in ("f2f3", "f2f4", "g2g3", "g2g4", "h2h3", "h2h4"):
            assert uci in ours
        assert "h1g2" not in ours  # occupied by own pawn
        assert "h1h2" not in ours

    def test_stalemate_returns_empty(self):
        p = parse_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
        assert legal_moves(p) == []

    def test_matches_oracle_on_sampled_positions(self, sampled_positions):
        for p in sampled_positions:
            fen = serialize_fen(p)
            ours = sorted(m.uci() for m in legal_moves(p))
            assert ours == OracleBoard(fen).legal_moves_uci(), fen

    def test_flags_on_en_passant(self):
        p = parse_fen("8/8/8/3pP3/8/8/8/k1K5 w - d6 0 1")
        move = move_from_uci(p, "e5d6")
        assert move.is_en_passant and move.is_capture

    def test_flags_on_castle(self):
        p = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1")
        kingside = move_from_uci(p, "e1g1")
        assert kingside.is_castle and not kingside.is_capture


class TestApplyMove:
    def test_e4_bookkeeping(self):
        p = starting_position()
        after = apply_move(p, move_from_uci(p, "e2e4"))
        assert serialize_fen(after) == \
            "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1"
        # the original is untouched
        assert serialize_fen(p) == STARTING_FEN

    def test_castling_relocates_rook_and_clears_rights(self):
        p = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1")
        after = apply_move(p, move_from_uci(p, "e1g1"))
        assert after.piece_at(parse_square("f1")).kind == PieceKind.ROOK
        assert after.piece_at(parse_square("h1")) is None
        assert after.castling & 0b0011 == 0  # both white rights gone
        assert after.castling & 0b1100 == 0b1100

    def test_en_passant_removes_passed_pawn(self):
        p = parse_fen("8/8/8/3pP3/8/8/8/k1K5 w - d6 0 1")
        after = apply_move(p, move_from_uci(p, "e5d6"))
        assert after.piece_at(parse_square("d5")) is None
        assert after.piece_at(parse_square("d6")).kind == PieceKind.PAWN

    def test_illegal_move_rejected_by_name(self):
        p = starting_position()
        with pytest.raises(IllegalMoveError, match="e2e5"):
            apply_move(p, Move(parse_square("e2"), parse_square("e5")))

    def test_promotion(self):
        p = parse_fen("8/P7/8/8/8/8/8/k1K5 w - - 0 1")
        after = apply_move(p, move_from_uci(p, "a7a8q"))
        assert after.piece_at(parse_square("a8")).kind == PieceKind.QUEEN

    def test_side_alternates_and_king_safe(self, sampled_positions):
        for p in sampled_positions[:80]:
            for m in legal_moves(p):
                after = apply_move(p, m)
                assert after.side_to_move == p.side_to_move.opponent
                assert not is_attacked(after, after.king_square(p.side_to_move),
                                       after.side_to_move)


class TestIsAttacked:
    def test_start_e4_not_attacked_by_white(self):
        p = starting_position()
        assert not is_attacked(p, parse_square("e4"), Color.WHITE)

    def test_start_f3_attacked_by_white(self):
        p = starting_position()
        assert is_attacked(p, parse_square("f3"), Color.WHITE)

    def test_lone_kings_far_apart(self):
        p = parse_fen("7k/8/8/8/8/8/8/K7 w - - 0 1")
        assert not is_attacked(p, parse_square("h8"), Color.WHITE)

    def test_matches_oracle_attack_map(self, sampled_positions):
        for p in sampled_positions[:40]:
            oracle = OracleBoard(serialize_fen(p))
            for sq in range(64):
                for color in (Color.WHITE, Color.BLACK):
                    assert is_attacked(p, sq, color) == \
                        oracle.attacked_by(sq & 7, sq >> 3,
                                           color == Color.WHITE)


class TestGameResult:
    def test_back_rank_mate(self):
        p = parse_fen("R5k1/5ppp/8/8/8/8/8/6K1 b - - 0 1")
        outcome = game_result(p)
        assert outcome == GameOutcome(Color.WHITE, Termination.CHECKMATE)
        assert outcome.reward_for(Color.WHITE) == 1.0
        assert outcome.reward_for(Color.BLACK) == 0.0

    def test_stalemate(self):
        p = parse_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
        assert game_result(p) == GameOutcome(None, Termination.STALEMATE)

    def test_kings_only_insufficient(self):
        p = parse_fen("8/8/8/8/8/8/8/K6k w - - 0 1")
        outcome = game_result(p)
        assert outcome.termination == Termination.INSUFFICIENT_MATERIAL
        assert outcome.reward_for(Color.WHITE) == 0.5

    def test_fifty_move_rule(self):
        p = parse_fen("7k/8/8/8/8/8/R7/K7 w - - 100 80")
        assert game_result(p).termination == Termination.FIFTY_MOVE

    def test_threefold_repetition(self):
        p = parse_fen("7k/8/8/8/8/8/R7/K7 w - - 0 1")
        history = []
        current = p
        for uci in ["a2b2", "h8g8", "b2a2", "g8h8"] * 2:
            history.append(current)
            current = apply_move(current, move_from_uci(current, uci))
        history.append(current)
        assert game_result(current, history).termination == \
            Termination.THREEFOLD_REPETITION

    def test_ongoing_game_returns_none(self):
        assert game_result(starting_position()) is None


class TestMoveText:
    def test_san_basics(self):
        p = starting_position()
        assert san(p, move_from_uci(p, "g1f3")) == "Nf3"
        assert san(p, move_from_uci(p, "e2e4")) == "e4"

    def test_san_capture_check_mate(self):
        # black pawn b4 stops the rook lift to b8, so Ra8 is mate
        p = parse_fen("6k1/5ppp/8/8/1p6/8/1r3PPP/R5K1 w - - 0 1")
        assert san(p, move_from_uci(p, "a1a8")) == "Ra8#"
        # the same rook check is only "+" when it can be captured
        p2 = parse_fen("6k1/5ppp/8/8/1p6/8/1r3PPP/R5K1 b - - 0 1")
        assert san(p2, move_from_uci(p2, "b2b1")) == "Rb1+"

    def test_san_disambiguation(self):
        p = parse_fen("k7/8/8/8/8/8/8/KR4R1 w - - 0 1")
        assert san(p, move_from_uci(p, "b1d1")) == "Rbd1"
        assert san(p, move_from_uci(p, "g1d1")) == "Rgd1"

    def test_parse_move_accepts_san_and_uci(self):
        p = starting_position()
        assert parse_move(p, "Nf3").uci() == "g1f3"
        assert parse_move(p, "g1f3").uci() == "g1f3"
        with pytest.raises(IllegalMoveError):
            parse_move(p, "Nf6")

    def test_san_roundtrip_on_sampled(self, sampled_positions):
        for p in sampled_positions[:60]:
            for m in legal_moves(p):
                assert parse_move(p, san(p, m)).uci() == m.uci()


class TestMirror:
    def test_mirror_is_involution(self, sampled_positions):
        for p in sampled_positions[:30]:
            assert p.mirrored().mirrored() == p

    def test_mirror_swaps_move_sets(self, sampled_positions):
        for p in sampled_positions[:30]:
            ours = {m.uci() for m in legal_moves(p)}
            theirs = {m.uci() for m in legal_moves(p.mirrored())}

            def flip_uci(u):
                def fs(s):
                    return s[0] + str(9 - int(s[1]))
                return fs(u[:2]) + fs(u[2:4]) + u[4:]

            assert {flip_uci(u) for u in theirs} == ours


class TestRandomWalkAgainstOracle:
    def test_long_random_game_stays_in_sync(self):
        rng = random.Random(7)
        p = starting_position()
        oracle = OracleBoard(STARTING_FEN)
        for _ in range(120):
            ours = sorted(m.uci() for m in legal_moves(p))
            assert ours == oracle.legal_moves_uci(), serialize_fen(p)
            if not ours or game_result(p) is not None:
                break
            choice = rng.choice(ours)
            p = apply_move(p, move_from_uci(p, choice))
            oracle = oracle.apply_uci(choice)
            assert in_check(p) == oracle.in_check()
