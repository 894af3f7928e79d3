"""PGN export and a small reader for replay validation.

Team decisions appear as inline comments on the team's moves, naming the
chooser, the choice, and both recommendations.
"""

from __future__ import annotations

from centaur.chess import (
    Color,
    STARTING_FEN,
    apply_move,
    parse_fen,
    parse_move,
    san,
    serialize_fen,
)

RESULT_TAGS = {"1-0", "0-1", "1/2-1/2", "*"}


def game_to_pgn(record, event: str = "match", date: str = "????.??.??",
                round_tag: str = "1") -> str:
    """One GameRecord as a PGN string (deterministic for fixed inputs)."""
    team_name = (f"team[{record.engine_names.get('M', 'M')}+"
                 f"{record.engine_names.get('L', 'L')}/"
                 f"{record.engine_names.get('manager', '?')}]")
    solo = "player" in record.engine_names
    if solo:
        team_name = record.engine_names["player"]
    adversary = record.engine_names.get("adversary", "adversary")
    white = team_name if record.team_color == Color.WHITE else adversary
    black = adversary if record.team_color == Color.WHITE else team_name

    headers = [
        ("Event", event), ("Site", "centaur-harness"), ("Date", date),
        ("Round", round_tag), ("White", white), ("Black", black),
        ("Result", record.result_tag()),
    ]
    if record.opening_fen != STARTING_FEN:
        headers += [("SetUp", "1"), ("FEN", record.opening_fen)]
    headers += [("GameId", record.game_id or "?"),
                ("OpeningId", record.opening_id or "?"),
                ("Termination", record.outcome.termination.value
                 if record.outcome else "?")]
    if record.seed is not None:
        headers.append(("Seed", str(record.seed)))

    decisions_by_ply = {d.ply: d for d in record.decisions}
    tokens = []
    position = parse_fen(record.opening_fen)
    for uci in record.moves:
        if position.side_to_move == Color.WHITE:
            tokens.append(f"{position.fullmove_number}.")
        elif not tokens:
            tokens.append(f"{position.fullmove_number}...")
        move = next(m for m in _legal(position) if m.uci() == uci)
        tokens.append(san(position, move))
        decision = decisions_by_ply.get(position.ply)
        if decision is not None:
            tokens.append(
                "{" + f"chooser={decision.chooser} "
                f"choice={decision.choice.value} "
                f"recM={decision.rec_m} recL={decision.rec_l}" + "}")
        position = apply_move(position, move)
    tokens.append(record.result_tag())

    lines = [f'[{key} "{value}"]' for key, value in headers]
    lines.append("")
    lines.extend(_wrap(tokens, width=80))
    lines.append("")
    return "\n".join(lines)


def _legal(position):
    from centaur.chess import legal_moves
    return legal_moves(position)


def _wrap(tokens, width=80):
    lines = []
    current = ""
    for token in tokens:
        if not current:
            current = token
        elif len(current) + 1 + len(token) <= width:
            current += " " + token
        else:
            lines.append(current)
            current = token
    if current:
        lines.append(current)
    return lines


def write_pgn(records, path, event="match", date="????.??.??"):
    with open(path, "w") as fh:
        for i, record in enumerate(records, 1):
            fh.write(game_to_pgn(record, event=event, date=date,
                                 round_tag=str(i)))
            fh.write("\n")


def read_pgn_games(path):
    """Minimal PGN reader: yields (headers dict, uci move list).

    Comments and move numbers are skipped; SAN is resolved through the
    rules core, so every yielded game has replayed cleanly.
    """
    games = []
    headers = {}
    movetext = []

    def finish():
        nonlocal headers, movetext
        if not headers and not movetext:
            return
        fen = headers.get("FEN", STARTING_FEN)
        position = parse_fen(fen)
        ucis = []
        for token in movetext:
            if token in RESULT_TAGS or token.endswith("."):
                continue
            if token[0].isdigit():
                continue
            move = parse_move(position, token)
            ucis.append(move.uci())
            position = apply_move(position, move)
        games.append((headers, ucis))
        headers, movetext = {}, []

    with open(path) as fh:
        in_comment = False
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("[") and not in_comment:
                if movetext:
                    finish()
                key, _, rest = line[1:-1].partition(" ")
                headers[key] = rest.strip('"')
                continue
            for token in line.split():
                if in_comment:
                    if token.endswith("}"):
                        in_comment = False
                    continue
                if token.startswith("{"):
                    if not token.endswith("}"):
                        in_comment = True
                    continue
                movetext.append(token)
    finish()
    return games
