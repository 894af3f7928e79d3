"""UCI engine subprocess client.

One handle wraps one engine process.  Requests on a handle are strictly
serialized behind a lock; distinct handles run fully in parallel.
"""

from __future__ import annotations

import enum
import functools
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Optional

from centaur.chess import Move, Position, legal_moves, serialize_fen


class EngineError(RuntimeError):
    """Base class for engine failures; carries the transcript tail."""

    def __init__(self, message, transcript_tail=()):
        if transcript_tail:
            message += "\n--- transcript tail ---\n" + "\n".join(transcript_tail)
        super().__init__(message)


class EngineStartupError(EngineError):
    pass


class EngineProtocolError(EngineError):
    pass


class Role(enum.Enum):
    TEAM_MEMBER_M = "team_member_m"
    TEAM_MEMBER_L = "team_member_l"
    ADVERSARY = "adversary"
    EXPERT = "expert"


@dataclass(frozen=True)
class EngineConfig:
    executable: str  # path, optionally with arguments (shell-style split)
    name: str
    role: Role = Role.ADVERSARY
    options: dict = field(default_factory=dict)
    depth: Optional[int] = None
    nodes: Optional[int] = None
    handshake_timeout: float = 10.0
    search_timeout: float = 120.0
    transcript_path: Optional[str] = None

    def __post_init__(self):
        if (self.depth is None) == (self.nodes is None):
            raise ValueError("exactly one of depth/nodes must be set")
        limit = self.depth if self.depth is not None else self.nodes
        if limit < 1:
            raise ValueError("search limit must be >= 1")

    @property
    def go_limit(self) -> str:
        if self.depth is not None:
            return f"depth {self.depth}"
        return f"nodes {self.nodes}"

    def argv(self) -> list:
        return shlex.split(self.executable)


@functools.total_ordering
@dataclass(frozen=True)
class Score:
    """Engine evaluation from the side-to-move perspective.

    Either centipawns or mate distance; mate scores order above all
    centipawn scores, and mate in k beats mate in k+1.
    """

    cp: Optional[int] = None
    mate: Optional[int] = None

    def __post_init__(self):
        if (self.cp is None) == (self.mate is None):
            raise ValueError("exactly one of cp/mate must be set")
        if self.mate == 0:
            raise ValueError("mate distance cannot be 0")

    def sort_key(self):
        if self.mate is not None:
            if self.mate > 0:
                return (1, -self.mate)
            return (-1, -self.mate)
        return (0, self.cp)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.mate is not None:
            return f"mate {self.mate}"
        return f"cp {self.cp}"

    @classmethod
    def parse(cls, kind: str, value: str) -> "Score":
        if kind == "cp":
            return cls(cp=int(value))
        if kind == "mate":
            return cls(mate=int(value))
        raise ValueError(f"unknown score kind {kind!r}")


@dataclass(frozen=True)
class MoveScore:
    move: Move
    score: Score


class EngineHandle:
    """A live UCI engine subprocess; create via `spawn_engine`."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.alive = False
        self._lock = threading.Lock()
        self._lines: queue.Queue = queue.Queue()
        self._transcript: list = []
        self._transcript_file = None
        if config.transcript_path:
            self._transcript_file = open(config.transcript_path, "w")
        try:
            self._proc = subprocess.Popen(
                config.argv(), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True, bufsize=1)
        except OSError as exc:
            raise EngineStartupError(
                f"cannot spawn {config.executable!r}: {exc}") from exc
        self.alive = True
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        self._handshake()

    # -- plumbing ----------------------------------------------------------

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)  # EOF marker

    def _log(self, direction, line):
        self._transcript.append(f"{direction} {line}")
        if self._transcript_file:
            self._transcript_file.write(f"{direction} {line}\n")
            self._transcript_file.flush()

    def transcript_tail(self, n=12):
        return self._transcript[-n:]

    def _send(self, line: str):
        if not self.alive:
            raise EngineError(f"engine {self.config.name} is shut down")
        self._log(">>", line)
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.alive = False
            raise EngineError(f"engine {self.config.name} pipe broken",
                              self.transcript_tail()) from exc

    def _read_until(self, token: str, timeout: float):
        """Collect lines until one starts with `token`; returns all lines."""
        collected = []
        while True:
            try:
                line = self._lines.get(timeout=timeout)
            except queue.Empty:
                raise EngineError(
                    f"engine {self.config.name} timed out waiting "
                    f"for {token!r}", self.transcript_tail()) from None
            if line is None:
                self.alive = False
                raise EngineError(
                    f"engine {self.config.name} exited unexpectedly",
                    self.transcript_tail())
            self._log("<<", line)
            collected.append(line)
            if line.split(maxsplit=1)[:1] == [token] or line == token:
                return collected

    # -- protocol ----------------------------------------------------------

    def _handshake(self):
        timeout = self.config.handshake_timeout
        try:
            self._send("uci")
            self._read_until("uciok", timeout)
            for key, value in self.config.options.items():
                self._send(f"setoption name {key} value {value}")
            self._send("isready")
            self._read_until("readyok", timeout)
        except EngineError as exc:
            self._kill()
            raise EngineStartupError(str(exc)) from exc

    def new_game(self):
        with self._lock:
            self._send("ucinewgame")
            self._send("isready")
            self._read_until("readyok", self.config.handshake_timeout)

    def _position_command(self, p: Position, history=None) -> str:
        if history is not None:
            root_fen, moves = history
            cmd = f"position fen {root_fen}"
            if moves:
                cmd += " moves " + " ".join(moves)
            return cmd
        return f"position fen {serialize_fen(p)}"

    def _search_go(self, go_command: str):
        """Send a go command, read to bestmove; returns (best, last score)."""
        self._send(go_command)
        lines = self._read_until("bestmove", self.config.search_timeout)
        score = None
        best = None
        for line in lines:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "info" and "score" in parts:
                i = parts.index("score")
                try:
                    score = Score.parse(parts[i + 1], parts[i + 2])
                except (IndexError, ValueError):
                    pass
            elif parts[0] == "bestmove":
                best = parts[1] if len(parts) > 1 else None
        return best, score

    def play_move(self, p: Position, seed=None, history=None) -> Move:
        """Search `p` under the configured limits and return the bestmove,
        validated against the rules core."""
        legal = {m.uci(): m for m in legal_moves(p)}
        if not legal:
            raise ValueError("play_move called on a terminal position")
        with self._lock:
            if seed is not None:
                self._send(f"setoption name Seed value {seed}")
            self._send(self._position_command(p, history))
            best, _ = self._search_go(f"go {self.config.go_limit}")
        if best is None or best in ("(none)", "0000"):
            raise EngineProtocolError(
                f"engine {self.config.name} returned no move",
                self.transcript_tail())
        move = legal.get(best)
        if move is None:
            raise EngineProtocolError(
                f"engine {self.config.name} returned illegal move {best}",
                self.transcript_tail())
        return move

    def score_candidates(self, p: Position, moves, history=None) -> list:
        """One restricted search per candidate move, order-preserving."""
        legal = {m.uci() for m in legal_moves(p)}
        for m in moves:
            if m.uci() not in legal:
                raise ValueError(
                    f"move {m.uci()} not legal in scored position")
        results = []
        with self._lock:
            for m in moves:
                self._send(self._position_command(p, history))
                best, score = self._search_go(
                    f"go {self.config.go_limit} searchmoves {m.uci()}")
                if score is None:
                    raise EngineProtocolError(
                        f"engine {self.config.name} gave no score "
                        f"for {m.uci()}", self.transcript_tail())
                results.append(MoveScore(m, score))
        return results

    def close(self):
        """Send quit and reap the process; kill on an unresponsive engine."""
        if not self.alive:
            self._kill()
            return
        with self._lock:
            try:
                self._send("quit")
            except EngineError:
                pass
            try:
                self._proc.wait(timeout=3.0)
            except subprocess.TimeoutExpired:
                self._kill()
            self.alive = False
        if self._transcript_file:
            self._transcript_file.close()
            self._transcript_file = None

    def _kill(self):
        if self._proc.poll() is None:
            self._proc.kill()
            try:
                self._proc.wait(timeout=3.0)
            except subprocess.TimeoutExpired:
                pass
        self.alive = False
        if self._transcript_file:
            self._transcript_file.close()
            self._transcript_file = None


def spawn_engine(config: EngineConfig) -> EngineHandle:
    """Spawn and handshake a UCI engine."""
    return EngineHandle(config)


def shutdown(handle: EngineHandle):
    """Close a handle; idempotent, never raises on a dead process."""
    handle.close()


def best_move(handle, p: Position, seed=None, history=None) -> Move:
    """The engine's bestmove for `p` under its configured limits.

    `history` is an optional (root_fen, [uci moves]) pair giving the engine
    the game context (repetition detection, scripted stubs).
    """
    return handle.play_move(p, seed=seed, history=history)


def score_moves(handle, p: Position, moves, history=None) -> list:
    """Score each move via restricted search, order-preserving.

    Scores are from the side-to-move perspective of `p`, so candidate
    moves for the same position are directly comparable.
    """
    return handle.score_candidates(p, moves, history=history)
