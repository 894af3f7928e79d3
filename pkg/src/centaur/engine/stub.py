"""Deterministic scripted UCI engine for tests, demos and dry runs.

Run as `python3 -m centaur.engine.stub`.  Move selection policies:

  lexico   first legal move in sorted UCI order (default)
  seeded   stable hash of (fen, seed) picks among legal moves
  script   JSON file maps canonical FENs to moves and move scores,
           falling back to lexico where the script is silent

Script file schema:
  {"moves": {"<fen>": "<uci>"},
   "scores": {"<fen>": {"<uci>": <cp int> | "mate <n>"}}}

All choices and scores are pure functions of (position, options), so
fixed configurations replay byte-identical transcripts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from centaur.chess import legal_moves, parse_fen, serialize_fen


def _stable_int(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


class StubEngine:
    def __init__(self, policy="lexico", seed=0, script_file=None,
                 name="centaur-stub"):
        self.policy = policy
        self.seed = seed
        self.name = name
        self.script = {"moves": {}, "scores": {}}
        if script_file:
            self._load_script(script_file)
        self.position = parse_fen(
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1")

    def _load_script(self, path):
        with open(path) as fh:
            raw = json.load(fh)
        moves = {}
        for fen, uci in raw.get("moves", {}).items():
            moves[serialize_fen(parse_fen(fen))] = uci
        scores = {}
        for fen, table in raw.get("scores", {}).items():
            scores[serialize_fen(parse_fen(fen))] = dict(table)
        self.script = {"moves": moves, "scores": scores}

    # -- selection -----------------------------------------------------

    def choose(self, candidates):
        fen = serialize_fen(self.position)
        ucis = sorted(m.uci() for m in candidates)
        scripted = self.script["moves"].get(fen)
        if scripted in ucis:
            return scripted
        if self.policy == "seeded":
            return ucis[_stable_int(fen, self.seed) % len(ucis)]
        return ucis[0]

    def score_for(self, uci):
        fen = serialize_fen(self.position)
        table = self.script["scores"].get(fen, {})
        if uci in table:
            value = table[uci]
            if isinstance(value, str):
                return value  # e.g. "mate 2"
            return f"cp {value}"
        # stable pseudo-score in [-100, 100]
        return f"cp {_stable_int(fen, uci, self.seed) % 201 - 100}"

    # -- protocol --------------------------------------------------------

    def handle(self, line, out):
        parts = line.split()
        if not parts:
            return True
        cmd = parts[0]
        if cmd == "uci":
            out(f"id name {self.name}")
            out("id author centaur project")
            out("option name Policy type string default lexico")
            out("option name Seed type spin default 0 min 0 max 999999999")
            out("option name ScriptFile type string default <empty>")
            out("uciok")
        elif cmd == "isready":
            out("readyok")
        elif cmd == "setoption":
            self._setoption(parts)
        elif cmd == "ucinewgame":
            pass
        elif cmd == "position":
            self._position(parts)
        elif cmd == "go":
            self._go(parts, out)
        elif cmd == "stop":
            pass
        elif cmd == "quit":
            return False
        return True

    def _setoption(self, parts):
        try:
            name_i = parts.index("name") + 1
            value_i = parts.index("value")
            name = " ".join(parts[name_i:value_i]).lower()
            value = " ".join(parts[value_i + 1:])
        except ValueError:
            return
        if name == "policy":
            self.policy = value
        elif name == "seed":
            self.seed = int(value)
        elif name == "scriptfile":
            self._load_script(value)

    def _position(self, parts):
        if len(parts) > 1 and parts[1] == "startpos":
            fen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"
            rest = parts[2:]
        elif len(parts) > 1 and parts[1] == "fen":
            fen = " ".join(parts[2:8])
            rest = parts[8:]
        else:
            return
        pos = parse_fen(fen)
        if rest and rest[0] == "moves":
            for uci in rest[1:]:
                from centaur.chess import apply_move, move_from_uci
                pos = apply_move(pos, move_from_uci(pos, uci))
        self.position = pos

    def _go(self, parts, out):
        moves = legal_moves(self.position)
        if "searchmoves" in parts:
            wanted = set(parts[parts.index("searchmoves") + 1:])
            moves = [m for m in moves if m.uci() in wanted]
        if not moves:
            out("bestmove (none)")
            return
        choice = self.choose(moves)
        out(f"info depth 1 score {self.score_for(choice)} nodes 1 pv {choice}")
        out(f"bestmove {choice}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--policy", default="lexico",
                        choices=["lexico", "seeded", "script"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--script-file", default=None)
    parser.add_argument("--name", default="centaur-stub")
    args = parser.parse_args(argv)

    engine = StubEngine(policy=args.policy, seed=args.seed,
                        script_file=args.script_file, name=args.name)

    def out(text):
        sys.stdout.write(text + "\n")
        sys.stdout.flush()

    for line in sys.stdin:
        if not engine.handle(line.strip(), out):
            break


if __name__ == "__main__":
    main()
