"""Supervised training of manager models and gradient verification."""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Optional

import torch
from torch import nn

from centaur.chess import parse_fen, tokenize
from centaur.chess.tokens import TokenSequence
from centaur.team import Member


@dataclass(frozen=True)
class LabeledDecision:
    """One rollout-labeled disagreement; ties carry no label and are
    excluded from training."""

    fen: str
    tokens: TokenSequence
    q_m: float
    q_l: float
    label: Optional[Member]
    iteration: int
    seeds: tuple = ()

    @classmethod
    def from_rewards(cls, fen, q_m, q_l, iteration, seeds=()):
        label = None
        if q_m > q_l:
            label = Member.M
        elif q_l > q_m:
            label = Member.L
        return cls(fen=fen, tokens=tokenize(parse_fen(fen)), q_m=q_m,
                   q_l=q_l, label=label, iteration=iteration,
                   seeds=tuple(seeds))

    def to_json_dict(self) -> dict:
        return {"fen": self.fen, "qM": self.q_m, "qL": self.q_l,
                "label": self.label.value if self.label else None,
                "iteration": self.iteration, "seeds": list(self.seeds)}

    @classmethod
    def from_json_dict(cls, raw) -> "LabeledDecision":
        return cls(fen=raw["fen"], tokens=tokenize(parse_fen(raw["fen"])),
                   q_m=raw["qM"], q_l=raw["qL"],
                   label=Member(raw["label"]) if raw["label"] else None,
                   iteration=raw["iteration"],
                   seeds=tuple(raw.get("seeds", ())))


@dataclass(frozen=True)
class TrainConfig:
    games_per_iteration: int = 32
    rollouts_per_recommendation: int = 1
    iterations: int = 1
    step_size: float = 1e-4
    batch_size: int = 256
    epochs: int = 20
    validation_fraction: float = 0.1
    master_seed: int = 0
    cumulative_dataset: bool = True

    def __post_init__(self):
        for name in ("games_per_iteration", "rollouts_per_recommendation",
                     "batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if not 0.0 <= self.validation_fraction <= 0.5:
            raise ValueError("validation_fraction must lie in [0, 0.5]")


@dataclass
class TrainReport:
    model: nn.Module
    history: list  # rows: {"epoch", "train_loss", "val_loss"}
    n_rows: int
    n_ties_dropped: int
    best_epoch: int

    def loss_curve_rows(self):
        return [(h["epoch"], h["train_loss"], h["val_loss"])
                for h in self.history]


class TrainingError(ValueError):
    pass


def _evaluate(forward_fn, inputs, targets, batch_size) -> float:
    loss_fn = nn.CrossEntropyLoss(reduction="sum")
    total = 0.0
    with torch.no_grad():
        for start in range(0, len(targets), batch_size):
            batch = slice(start, start + batch_size)
            total += float(loss_fn(forward_fn(inputs[batch]),
                                   targets[batch]))
    return total / len(targets)


def fit_classifier(module, forward_fn, inputs, targets,
                   cfg: TrainConfig) -> TrainReport:
    """Cross-entropy training with a held-out split; the returned module
    carries the parameters from the best validation epoch.

    History starts with an epoch-0 row: the pre-update loss (ln 2 per row
    for a zero-initialized head).
    """
    n = len(targets)
    gen = torch.Generator().manual_seed(cfg.master_seed)
    order = torch.randperm(n, generator=gen)
    n_val = int(round(n * cfg.validation_fraction))
    val_idx, train_idx = order[:n_val], order[n_val:]
    if len(train_idx) == 0:
        raise TrainingError("no training rows after the validation split")

    optimizer = torch.optim.Adam(module.parameters(), lr=cfg.step_size)
    loss_fn = nn.CrossEntropyLoss()

    def epoch_losses():
        train_loss = _evaluate(forward_fn, inputs[train_idx],
                               targets[train_idx], cfg.batch_size)
        val_loss = (_evaluate(forward_fn, inputs[val_idx], targets[val_idx],
                              cfg.batch_size) if n_val else train_loss)
        return train_loss, val_loss

    history = []
    train_loss, val_loss = epoch_losses()
    history.append({"epoch": 0, "train_loss": train_loss,
                    "val_loss": val_loss})
    best = (val_loss, 0, copy.deepcopy(module.state_dict()))

    for epoch in range(1, cfg.epochs + 1):
        perm = train_idx[torch.randperm(len(train_idx), generator=gen)]
        module.train()
        for start in range(0, len(perm), cfg.batch_size):
            batch = perm[start:start + cfg.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(forward_fn(inputs[batch]), targets[batch])
            loss.backward()
            optimizer.step()
        module.eval()
        train_loss, val_loss = epoch_losses()
        history.append({"epoch": epoch, "train_loss": train_loss,
                        "val_loss": val_loss})
        if val_loss < best[0]:
            best = (val_loss, epoch, copy.deepcopy(module.state_dict()))

    module.load_state_dict(best[2])
    return TrainReport(model=module, history=history, n_rows=n,
                       n_ties_dropped=0, best_epoch=best[1])


def train_supervised(model, data, cfg: TrainConfig) -> TrainReport:
    """Train a token-transformer manager on labeled disagreements."""
    labeled = [row for row in data if row.label is not None]
    dropped = len(data) - len(labeled)
    if not labeled:
        raise TrainingError("no labeled rows: every decision was a tie")
    inputs = torch.tensor([row.tokens.global_ids() for row in labeled],
                          dtype=torch.long)
    targets = torch.tensor([0 if row.label is Member.M else 1
                            for row in labeled], dtype=torch.long)
    report = fit_classifier(model, lambda b: model.forward_tokens(b)[0],
                            inputs, targets, cfg)
    report.n_ties_dropped = dropped
    return report


def accuracy(model, data) -> float:
    """Fraction of labeled rows where the model's argmax matches."""
    labeled = [row for row in data if row.label is not None]
    if not labeled:
        raise TrainingError("no labeled rows")
    inputs = torch.tensor([row.tokens.global_ids() for row in labeled],
                          dtype=torch.long)
    targets = torch.tensor([0 if row.label is Member.M else 1
                            for row in labeled], dtype=torch.long)
    with torch.no_grad():
        logits = model.forward_tokens(inputs)[0]
    return float((logits.argmax(dim=-1) == targets).float().mean())


@dataclass
class DistillReport:
    student: nn.Module
    agreement: float  # held-out agreement with the teacher's hard choices
    n_used: int
    n_excluded: int
    history: list


def distill(teacher, positions, student=None,
            cfg: Optional[TrainConfig] = None) -> DistillReport:
    """Train a feature-input student to predict the teacher's choices.

    The teacher's hard choice per position is the target; indifferent
    positions are excluded.  Inputs are the 15 board features.
    """
    from centaur.chess import board_features
    from centaur.models.feature_models import FEATURE_DIM, FeatureMLP
    from centaur.team import Choice, model_decide

    if student is None:
        student = FeatureMLP()
    try:
        with torch.no_grad():
            probe = student(torch.zeros(1, FEATURE_DIM))
        if probe.shape != (1, 2):
            raise TrainingError("student must map features to 2 logits")
    except RuntimeError as exc:
        raise TrainingError(f"student input dimension mismatch: {exc}") from exc
    cfg = cfg or TrainConfig(epochs=20, step_size=1e-3, batch_size=64)

    rows = []
    excluded = 0
    for p in positions:
        choice = model_decide(teacher, p)
        if choice is Choice.INDIFFERENT:
            excluded += 1
            continue
        rows.append((board_features(p).as_vector(),
                     0 if choice is Choice.FIRST else 1))
    if not rows:
        raise TrainingError("teacher was indifferent on every position")

    inputs = torch.tensor([r[0] for r in rows], dtype=torch.float32)
    targets = torch.tensor([r[1] for r in rows], dtype=torch.long)

    gen = torch.Generator().manual_seed(cfg.master_seed)
    order = torch.randperm(len(rows), generator=gen)
    n_held = max(1, int(round(len(rows) * max(cfg.validation_fraction, 0.1)))) \
        if len(rows) > 3 else 0
    held_idx, train_idx = order[:n_held], order[n_held:]

    train_cfg = TrainConfig(
        games_per_iteration=cfg.games_per_iteration,
        rollouts_per_recommendation=cfg.rollouts_per_recommendation,
        iterations=cfg.iterations, step_size=cfg.step_size,
        batch_size=cfg.batch_size, epochs=cfg.epochs,
        validation_fraction=0.0, master_seed=cfg.master_seed,
        cumulative_dataset=cfg.cumulative_dataset)
    report = fit_classifier(student, student, inputs[train_idx],
                            targets[train_idx], train_cfg)

    eval_idx = held_idx if n_held else train_idx
    with torch.no_grad():
        preds = student(inputs[eval_idx]).argmax(dim=-1)
    agreement = float((preds == targets[eval_idx]).float().mean())
    return DistillReport(student=student, agreement=agreement,
                         n_used=len(rows), n_excluded=excluded,
                         history=report.history)


@dataclass
class GradientCheckReport:
    max_relative_error: float
    coords_checked: int
    epsilon: float
    seed: int


def gradient_check(model, tokens: TokenSequence, label: Member,
                   epsilon: float = 1e-5, n_coords: int = 200,
                   seed: int = 0) -> GradientCheckReport:
    """Analytic loss gradients vs central finite differences.

    Runs on a double-precision copy of the model.  The relative error
    denominator is floored at 1e-5: coordinates with smaller gradients are
    compared absolutely (central differences bottom out at roundoff there,
    and a flat zero-loss point passes vacuously).
    """
    n_params = sum(p.numel() for p in model.parameters())
    if n_params > 100_000:
        raise ValueError("model too large for finite differences")

    twin = copy.deepcopy(model).double()
    ids = torch.tensor([tokens.global_ids()], dtype=torch.long)
    target = torch.tensor([0 if label is Member.M else 1])
    loss_fn = nn.CrossEntropyLoss()

    def loss_value() -> float:
        with torch.no_grad():
            return float(loss_fn(twin.forward_tokens(ids)[0], target))

    twin.zero_grad()
    loss = loss_fn(twin.forward_tokens(ids)[0], target)
    loss.backward()

    params = [p for p in twin.parameters()]
    sizes = [p.numel() for p in params]
    total = sum(sizes)
    rng = random.Random(seed)
    coords = sorted(rng.sample(range(total), min(n_coords, total)))

    max_err = 0.0
    denominator_floor = 1e-5
    for coord in coords:
        idx = coord
        for p, size in zip(params, sizes):
            if idx < size:
                break
            idx -= size
        flat = p.data.view(-1)
        original = float(flat[idx])
        flat[idx] = original + epsilon
        plus = loss_value()
        flat[idx] = original - epsilon
        minus = loss_value()
        flat[idx] = original
        numeric = (plus - minus) / (2 * epsilon)
        analytic = float(p.grad.view(-1)[idx])
        err = (abs(analytic - numeric)
               / max(abs(analytic), abs(numeric), denominator_floor))
        max_err = max(max_err, err)

    return GradientCheckReport(max_relative_error=max_err,
                               coords_checked=len(coords), epsilon=epsilon,
                               seed=seed)
