"""Attention probes over the manager network, with the two controls:
an untrained fresh-seed network and shuffled board positions."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Optional

from centaur.chess import is_attacked, legal_moves, serialize_fen, shuffle_position
from centaur.models.transformer import TransformerConfig, TransformerManager, extract_cls_attention
from centaur.analysis.stats import BoxStats, EffectReport, a_w

CONDITIONS = ("trained", "untrained", "shuffled")


def _position_set_hash(positions) -> str:
    digest = hashlib.sha256()
    for p in positions:
        digest.update(serialize_fen(p).encode())
        digest.update(b"\n")
    return digest.hexdigest()


def model_hash(model) -> str:
    digest = hashlib.sha256()
    for name, tensor in sorted(model.state_dict().items()):
        digest.update(name.encode())
        digest.update(tensor.detach().cpu().contiguous().numpy().tobytes())
    return digest.hexdigest()


def untrained_twin(model, seed: int = 1) -> TransformerManager:
    """Same architecture, fresh initialization seed, no training steps."""
    base = model.config.__dict__
    return TransformerManager(TransformerConfig(
        **{**base, "seed": seed, "zero_init_head": True}))


@dataclass
class ConditionResult:
    effect: EffectReport
    group_high_name: str
    group_low_name: str
    box_high: BoxStats
    box_low: BoxStats
    n_positions: int
    n_skipped: int


@dataclass
class ProbeReport:
    probe: str
    conditions: dict  # condition name -> ConditionResult
    position_set_hash: str
    model_hashes: dict
    seeds: dict = field(default_factory=dict)

    def condition(self, name) -> ConditionResult:
        return self.conditions[name]


def _paired_condition(per_position_pairs, high_name, low_name,
                      n_skipped) -> Optional[ConditionResult]:
    if not per_position_pairs:
        return None
    highs = [pair[0] for pair in per_position_pairs]
    lows = [pair[1] for pair in per_position_pairs]
    return ConditionResult(
        effect=a_w(highs, lows), group_high_name=high_name,
        group_low_name=low_name, box_high=BoxStats.from_values(highs),
        box_low=BoxStats.from_values(lows),
        n_positions=len(per_position_pairs), n_skipped=n_skipped)


def _occupied_vs_empty(model, boards):
    pairs = []
    skipped = 0
    for board in boards:
        squares, _ = extract_cls_attention(model, board)
        occupied = [float(squares[sq]) for sq in range(64)
                    if board.occ >> sq & 1]
        empty = [float(squares[sq]) for sq in range(64)
                 if not board.occ >> sq & 1]
        if not occupied or not empty:
            skipped += 1
            continue
        pairs.append((sum(occupied) / len(occupied),
                      sum(empty) / len(empty)))
    return pairs, skipped


def attention_probe_pieces(model, positions, min_positions: int = 1000,
                           untrained_seed: int = 1,
                           shuffle_seed: int = 2024) -> ProbeReport:
    """Does the CLS token attend more to pieces than to empty squares?

    Three conditions: the trained model on real boards, an untrained
    fresh-seed twin on the same boards, and the trained model on shuffled
    boards (occupancy recomputed on the shuffled placement).
    """
    positions = list(positions)
    if len(positions) < min_positions:
        raise ValueError(f"need at least {min_positions} positions, "
                         f"got {len(positions)}")
    twin = untrained_twin(model, seed=untrained_seed)
    shuffle_rng = random.Random(shuffle_seed)
    shuffled = [shuffle_position(p, shuffle_rng) for p in positions]

    conditions = {}
    for name, m, boards in (("trained", model, positions),
                            ("untrained", twin, positions),
                            ("shuffled", model, shuffled)):
        pairs, skipped = _occupied_vs_empty(m, boards)
        result = _paired_condition(pairs, "pieces", "empty", skipped)
        if result is not None:
            conditions[name] = result
    return ProbeReport(
        probe="pieces_vs_empty", conditions=conditions,
        position_set_hash=_position_set_hash(positions),
        model_hashes={"trained": model_hash(model),
                      "untrained": model_hash(twin)},
        seeds={"untrained_seed": untrained_seed,
               "shuffle_seed": shuffle_seed})


def _attacked_vs_not(model, boards):
    """Mean attention to attacked vs unattacked occupied squares.

    Both colors' pieces count; the attacker is the opposite color, the
    attack test pseudo-legal (pins ignored).
    """
    pairs = []
    skipped = 0
    for board in boards:
        squares, _ = extract_cls_attention(model, board)
        attacked = []
        safe = []
        for sq in range(64):
            piece = board.piece_at(sq)
            if piece is None:
                continue
            target = (attacked if is_attacked(board, sq, piece.color.opponent)
                      else safe)
            target.append(float(squares[sq]))
        if not attacked or not safe:
            skipped += 1
            continue
        pairs.append((sum(attacked) / len(attacked), sum(safe) / len(safe)))
    return pairs, skipped


def attention_probe_attacked(model, positions, min_positions: int = 1,
                             untrained_seed: int = 1,
                             shuffle_seed: int = 2025) -> ProbeReport:
    """Does the CLS token attend more to attacked pieces?

    Attack labels on the shuffled control are recomputed on the shuffled
    board, not carried over.
    """
    positions = list(positions)
    if len(positions) < min_positions:
        raise ValueError(f"need at least {min_positions} positions")
    twin = untrained_twin(model, seed=untrained_seed)
    shuffle_rng = random.Random(shuffle_seed)
    shuffled = [shuffle_position(p, shuffle_rng) for p in positions]

    conditions = {}
    for name, m, boards in (("trained", model, positions),
                            ("untrained", twin, positions),
                            ("shuffled", model, shuffled)):
        pairs, skipped = _attacked_vs_not(m, boards)
        result = _paired_condition(pairs, "attacked", "unattacked", skipped)
        if result is not None:
            conditions[name] = result
    return ProbeReport(
        probe="attacked_vs_unattacked", conditions=conditions,
        position_set_hash=_position_set_hash(positions),
        model_hashes={"trained": model_hash(model),
                      "untrained": model_hash(twin)},
        seeds={"untrained_seed": untrained_seed,
               "shuffle_seed": shuffle_seed})


@dataclass
class MoveAttentionReport:
    """Attention at recommended-move squares, four sources compared."""

    sources: tuple  # ("member_m", "member_l", "third_party", "random")
    origin_attention: dict  # source -> list of per-position attentions
    destination_attention: dict
    origin_effects: dict  # (source_x, source_y) -> EffectReport
    destination_effects: dict
    origin_boxes: dict
    destination_boxes: dict
    n_positions: int
    n_skipped: int
    position_set_hash: str
    model_hash: str
    random_move_seed: int


def attention_probe_moves(model, positions, recs_m, recs_l, third_party,
                          rng_seed: int = 7) -> MoveAttentionReport:
    """Attention to origin and destination squares of recommended moves,
    compared against a third-party engine and uniform random legal moves.

    `recs_m` / `recs_l` align with `positions`; the random control is
    resampled per position from the logged seed, so reruns reproduce the
    report exactly.
    """
    from centaur.engine import best_move

    positions = list(positions)
    sources = ("member_m", "member_l", "third_party", "random")
    origin = {s: [] for s in sources}
    destination = {s: [] for s in sources}
    rng = random.Random(rng_seed)
    skipped = 0
    used = 0
    for p, rec_m, rec_l in zip(positions, recs_m, recs_l):
        moves = legal_moves(p)
        random_move = rng.choice(moves) if len(moves) >= 2 else None
        if random_move is None:
            skipped += 1
            continue
        third = best_move(third_party, p)
        squares, _ = extract_cls_attention(model, p)
        for source, move in (("member_m", rec_m), ("member_l", rec_l),
                             ("third_party", third), ("random", random_move)):
            origin[source].append(float(squares[move.origin]))
            destination[source].append(float(squares[move.destination]))
        used += 1

    def pairwise(table):
        out = {}
        for i, a in enumerate(sources):
            for b in sources[i + 1:]:
                out[(a, b)] = a_w(table[a], table[b])
        return out

    return MoveAttentionReport(
        sources=sources, origin_attention=origin,
        destination_attention=destination,
        origin_effects=pairwise(origin),
        destination_effects=pairwise(destination),
        origin_boxes={s: BoxStats.from_values(origin[s]) for s in sources},
        destination_boxes={s: BoxStats.from_values(destination[s])
                           for s in sources},
        n_positions=used, n_skipped=skipped,
        position_set_hash=_position_set_hash(positions),
        model_hash=model_hash(model), random_move_seed=rng_seed)
