"""Opening-suite ingestion: FEN or EPD files, one position per line."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from centaur.chess import FenError, Position, parse_fen, serialize_fen


@dataclass
class OpeningSet:
    positions: list  # Position, deduplicated, input order preserved
    ids: list  # stable string ids aligned with positions
    content_hash: str
    source: str = ""
    diagnostics: list = field(default_factory=list)  # (line_no, message)
    duplicates: int = 0

    def __len__(self):
        return len(self.positions)


def _parse_line(line: str) -> Position:
    """Accept a 6-field FEN or a 4-field EPD (opcodes ignored)."""
    fields = line.split()
    if len(fields) >= 6:
        try:
            return parse_fen(" ".join(fields[:6]))
        except FenError:
            pass  # fall through: EPD with opcodes that look like clocks
    if len(fields) >= 4:
        return parse_fen(" ".join(fields[:4]) + " 0 1")
    raise FenError(f"expected FEN or EPD, got {len(fields)} fields")


def ingest_openings(path) -> OpeningSet:
    """Read an opening suite; invalid lines are reported with line numbers,
    duplicates (by canonical FEN) dropped with a count, and the content
    hash is stable over the canonical deduplicated sequence."""
    positions = []
    ids = []
    seen = {}
    diagnostics = []
    duplicates = 0
    with open(path) as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                position = _parse_line(line)
            except (FenError, ValueError) as exc:
                diagnostics.append((line_no, str(exc)))
                continue
            canonical = serialize_fen(position)
            if canonical in seen:
                duplicates += 1
                continue
            seen[canonical] = line_no
            ids.append(f"o{len(positions):05d}")
            positions.append(position)
    if not positions:
        raise ValueError(f"no valid positions in {path} "
                         f"({len(diagnostics)} bad lines)")
    digest = hashlib.sha256()
    for position in positions:
        digest.update(serialize_fen(position).encode())
        digest.update(b"\n")
    return OpeningSet(positions=positions, ids=ids,
                      content_hash=digest.hexdigest(), source=str(path),
                      diagnostics=diagnostics, duplicates=duplicates)


def assert_disjoint(a: OpeningSet, b: OpeningSet):
    """Hash-checked train/test separation."""
    fens_a = {serialize_fen(p) for p in a.positions}
    fens_b = {serialize_fen(p) for p in b.positions}
    overlap = fens_a & fens_b
    if overlap:
        raise ValueError(f"opening sets overlap on {len(overlap)} positions "
                         f"(e.g. {sorted(overlap)[0]!r})")
