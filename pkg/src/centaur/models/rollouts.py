"""Rollout labeling of disagreements and the manager training loop:
play games with the current manager, label both recommendations by
playing them out, train the next manager on the labeled set."""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from centaur.chess import Color, apply_move, game_result, move_from_uci, parse_fen
from centaur.engine import EngineError
from centaur.models.checkpoint import save_model
from centaur.models.train import (
    LabeledDecision,
    TrainConfig,
    TrainingError,
    TrainReport,
    train_supervised,
)
from centaur.models.transformer import TransformerConfig, TransformerManager
from centaur.seeding import stable_seed
from centaur.team import Manager, ModelManager, RandomManager, play_game


def rollout_label(p, rec, manager: Manager, handle_m, handle_l, adversary,
                  team_color: Color, rng, rollouts: int = 1,
                  max_ply: int = 512, max_retries: int = 2) -> float:
    """Empirical reward of playing `rec` from `p`: apply it, then the team
    protocol under `manager` plays the game out.  Mean over `rollouts`."""
    after = apply_move(p, rec)
    total = 0.0
    for k in range(rollouts):
        attempts = 0
        while True:
            try:
                outcome = game_result(after)
                if outcome is not None:
                    total += outcome.reward_for(team_color)
                    break
                sub_rng = random.Random(rng.getrandbits(63))
                record = play_game(after, handle_m, handle_l, manager,
                                   adversary, team_color, sub_rng,
                                   max_ply=max_ply,
                                   game_id=f"rollout-{k}")
                total += record.reward
                break
            except EngineError:
                attempts += 1
                if attempts > max_retries:
                    raise
    return total / rollouts


@dataclass
class IterationArtifacts:
    index: int
    games: list = field(default_factory=list)
    new_rows: list = field(default_factory=list)  # LabeledDecision
    model: Optional[TransformerManager] = None
    train_report: Optional[TrainReport] = None
    skipped: bool = False

    @property
    def n_disagreements(self) -> int:
        return sum(len(g.decisions) for g in self.games)

    @property
    def n_labeled(self) -> int:
        return sum(1 for row in self.new_rows if row.label is not None)


@dataclass
class PolicyIterationResult:
    managers: list  # index 0 = the random baseline, then one per iteration
    iterations: list  # IterationArtifacts
    config: TrainConfig

    @property
    def final_manager(self):
        return self.managers[-1]


def policy_iteration(cfg: TrainConfig, handle_m, handle_l, adversary,
                     openings, model_config: TransformerConfig = None,
                     indifference_threshold: float = 0.0,
                     alternate_colors: bool = True, max_ply: int = 512,
                     outdir=None) -> PolicyIterationResult:
    """Iterated manager training.

    Iteration 0 plays under a p=0.5 random manager.  Each iteration plays
    `games_per_iteration` games (openings sampled without replacement),
    labels every disagreement by rolling out both recommendations under
    the current manager, and trains the next model on the cumulative (or
    latest-only) labeled set.  An iteration with no labeled rows is
    skipped with a warning and the manager carried forward.
    """
    if not openings:
        raise ValueError("no openings provided")
    model_config = model_config or TransformerConfig()
    outdir = Path(outdir) if outdir is not None else None

    managers = [RandomManager(0.5)]
    iterations = []
    cumulative_rows = []
    current: Manager = managers[0]

    for i in range(cfg.iterations):
        art = IterationArtifacts(index=i)
        sample_rng = random.Random(stable_seed(cfg.master_seed, "sample", i))
        k = min(cfg.games_per_iteration, len(openings))
        chosen = sample_rng.sample(list(openings), k)

        for g, opening in enumerate(chosen):
            game_id = f"iter{i}-game{g}"
            color = (Color.WHITE if (not alternate_colors or g % 2 == 0)
                     else Color.BLACK)
            game_rng = random.Random(stable_seed(cfg.master_seed, i, g))
            record = play_game(opening, handle_m, handle_l, current,
                               adversary, color, game_rng, max_ply=max_ply,
                               opening_id=str(g), game_id=game_id)
            art.games.append(record)

        for record in art.games:
            for decision in record.decisions:
                p = parse_fen(decision.fen)
                rec_m = move_from_uci(p, decision.rec_m)
                rec_l = move_from_uci(p, decision.rec_l)
                seeds = []
                rewards = []
                for tag, rec in (("M", rec_m), ("L", rec_l)):
                    seed = stable_seed(cfg.master_seed, i, decision.game_id,
                                       decision.ply, tag)
                    seeds.append(seed)
                    rewards.append(rollout_label(
                        p, rec, current, handle_m, handle_l, adversary,
                        record.team_color, random.Random(seed),
                        rollouts=cfg.rollouts_per_recommendation,
                        max_ply=max_ply))
                art.new_rows.append(LabeledDecision.from_rewards(
                    decision.fen, rewards[0], rewards[1], iteration=i,
                    seeds=seeds))

        cumulative_rows.extend(art.new_rows)
        train_rows = (cumulative_rows if cfg.cumulative_dataset
                      else art.new_rows)
        labeled = [r for r in train_rows if r.label is not None]
        if not labeled:
            art.skipped = True
            managers.append(current)
            iterations.append(art)
            _persist_iteration(outdir, art)
            continue

        fresh = TransformerManager(TransformerConfig(
            **{**model_config.__dict__,
               "seed": stable_seed(cfg.master_seed, "model", i)}))
        try:
            art.train_report = train_supervised(fresh, train_rows, cfg)
        except TrainingError:
            art.skipped = True
            managers.append(current)
            iterations.append(art)
            _persist_iteration(outdir, art)
            continue
        art.model = fresh
        current = ModelManager(fresh, threshold=indifference_threshold,
                               name=f"model-iter{i + 1}")
        managers.append(current)
        iterations.append(art)
        _persist_iteration(outdir, art)

    return PolicyIterationResult(managers=managers, iterations=iterations,
                                 config=cfg)


def _persist_iteration(outdir, art: IterationArtifacts):
    if outdir is None:
        return
    folder = outdir / f"iter_{art.index:03d}"
    folder.mkdir(parents=True, exist_ok=True)
    with open(folder / "dataset.jsonl", "w") as fh:
        for row in art.new_rows:
            fh.write(json.dumps(row.to_json_dict(), sort_keys=True) + "\n")
    metrics = {
        "iteration": art.index,
        "games": len(art.games),
        "disagreements": art.n_disagreements,
        "labeled_rows": art.n_labeled,
        "skipped": art.skipped,
        "rewards": [g.reward for g in art.games],
    }
    if art.train_report is not None:
        metrics["best_epoch"] = art.train_report.best_epoch
    with open(folder / "metrics.json", "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
    if art.model is not None:
        save_model(art.model, folder / "model.bin")
    if art.train_report is not None:
        with open(folder / "loss.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_loss", "val_loss"])
            writer.writerows(art.train_report.loss_curve_rows())
