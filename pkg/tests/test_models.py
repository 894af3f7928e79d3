import math
import random

import pytest
import torch

from centaur.chess import parse_fen, shuffle_position, starting_position, tokenize
from centaur.models import (
    LabeledDecision,
    TrainConfig,
    TrainingError,
    TransformerConfig,
    TransformerManager,
    accuracy,
    extract_cls_attention,
    forward,
    gradient_check,
    load_model,
    save_model,
    train_supervised,
)
from centaur.team import Choice, Member, model_decide

TINY = TransformerConfig(layers=1, heads=1, dim=8, ff_dim=16, head_hidden=8,
                         seed=1)
SMALL = TransformerConfig(layers=2, heads=2, dim=32, ff_dim=64,
                          head_hidden=32, seed=7)


def synthetic_queen_rows(n_per_class=40, seed=0):
    """Separable set: a lone white queen labels M, a lone black queen L."""
    rng = random.Random(seed)
    rows = []
    squares = [s for s in range(64) if s not in (0, 63)]
    rng.shuffle(squares)
    for sq in squares:
        file, rank = sq % 8, sq // 8
        for symbol, label in (("Q", "M"), ("q", "L")):
            if len([r for r in rows if r.label is Member(label)]) \
                    >= n_per_class:
                continue
            grid = [["1"] * 8 for _ in range(8)]
            grid[0][0] = "K"
            grid[7][7] = "k"
            grid[rank][file] = symbol
            fen_rows = []
            for r in range(7, -1, -1):
                row = ""
                run = 0
                for c in range(8):
                    ch = grid[r][c]
                    if ch == "1":
                        run += 1
                    else:
                        if run:
                            row += str(run)
                        run = 0
                        row += ch
                if run:
                    row += str(run)
                fen_rows.append(row)
            fen = "/".join(fen_rows) + " w - - 0 1"
            try:
                q = (1.0, 0.0) if label == "M" else (0.0, 1.0)
                rows.append(LabeledDecision.from_rewards(fen, *q, iteration=0))
            except ValueError:
                continue  # discard illegal placements (check on the wrong king)
    return rows


class TestForward:
    def test_shapes_and_row_sums(self):
        model = TransformerManager(TINY)
        logits, attn = forward(model, tokenize(starting_position()))
        assert logits.shape == (2,)
        assert attn.shape == (1, 1, 68, 68)
        sums = attn.sum(dim=-1)
        assert torch.allclose(sums, torch.ones_like(sums), atol=1e-5)

    def test_row_sums_on_default_architecture(self):
        model = TransformerManager(SMALL)
        for fen_seed in range(3):
            p = shuffle_position(starting_position(), seed=fen_seed)
            _, attn = forward(model, tokenize(p))
            assert attn.shape == (2, 2, 68, 68)
            sums = attn.sum(dim=-1)
            assert torch.allclose(sums, torch.ones_like(sums), atol=1e-5)

    def test_zero_init_head_gives_zero_logits(self):
        model = TransformerManager(TINY)
        for seed in range(5):
            p = shuffle_position(starting_position(), seed=seed)
            logits, _ = forward(model, tokenize(p))
            assert torch.equal(logits, torch.zeros(2))
        assert model.choice_probabilities(starting_position()) == (0.5, 0.5)
        assert model_decide(model, starting_position()) is Choice.INDIFFERENT

    def test_same_seed_same_logits(self, sampled_positions):
        a = TransformerManager(TransformerConfig(
            layers=1, heads=2, dim=16, ff_dim=32, zero_init_head=False,
            seed=3))
        b = TransformerManager(TransformerConfig(
            layers=1, heads=2, dim=16, ff_dim=32, zero_init_head=False,
            seed=3))
        for p in sampled_positions[:20]:
            la, _ = forward(a, tokenize(p))
            lb, _ = forward(b, tokenize(p))
            assert torch.equal(la, lb)

    def test_forced_logit_gap_yields_first(self):
        model = TransformerManager(TINY)
        model.head[-1].bias.data = torch.tensor([5.0, 0.0])
        assert model_decide(model, starting_position()) is Choice.FIRST
        model.head[-1].bias.data = torch.tensor([0.0, 5.0])
        assert model_decide(model, starting_position()) is Choice.SECOND

    def test_decide_deterministic(self):
        model = TransformerManager(TransformerConfig(
            layers=1, heads=1, dim=8, ff_dim=16, zero_init_head=False,
            seed=11))
        p = starting_position()
        assert model_decide(model, p) is model_decide(model, p)

    def test_vocabulary_violation_rejected(self):
        model = TransformerManager(TINY)
        bad = torch.full((1, 68), 99, dtype=torch.long)
        with pytest.raises(ValueError, match="vocabulary"):
            model.forward_tokens(bad)


class TestExtractClsAttention:
    def test_length_and_nonnegative(self):
        model = TransformerManager(TINY)
        squares, metadata = extract_cls_attention(model, starting_position())
        assert squares.shape == (64,)
        assert metadata.shape == (4,)
        assert (squares >= 0).all()

    def test_single_head_equals_raw_row(self):
        model = TransformerManager(TINY)
        p = starting_position()
        _, attn = forward(model, tokenize(p))
        squares, _ = extract_cls_attention(model, p)
        raw = attn[0, 0, 67, :64].numpy()
        assert squares == pytest.approx(raw)

    def test_untrained_attention_near_uniform(self):
        model = TransformerManager(SMALL)
        rng = random.Random(0)
        for _ in range(30):
            p = shuffle_position(starting_position(), seed=rng.randrange(10**9))
            squares, metadata = extract_cls_attention(model, p)
            total = float(squares.sum() + metadata.sum())
            assert total == pytest.approx(1.0, abs=1e-4)
            assert squares.max() / squares.min() < 1.5


class TestGradientCheck:
    def test_tiny_model_passes(self):
        model = TransformerManager(TransformerConfig(
            layers=1, heads=2, dim=16, ff_dim=32, head_hidden=16,
            zero_init_head=False, seed=5))
        report = gradient_check(model, tokenize(starting_position()),
                                Member.M, epsilon=1e-5, n_coords=200, seed=0)
        assert report.coords_checked == 200
        assert report.max_relative_error < 1e-4

    def test_zero_loss_point_vacuous(self):
        model = TransformerManager(TINY)
        model.head[-1].bias.data = torch.tensor([60.0, -60.0])  # huge gap
        report = gradient_check(model, tokenize(starting_position()),
                                Member.M, n_coords=100, seed=1)
        assert report.max_relative_error < 1e-4

    def test_same_seed_same_report(self):
        model = TransformerManager(TransformerConfig(
            layers=1, heads=1, dim=8, ff_dim=16, zero_init_head=False,
            seed=2))
        t = tokenize(starting_position())
        a = gradient_check(model, t, Member.L, n_coords=50, seed=9)
        b = gradient_check(model, t, Member.L, n_coords=50, seed=9)
        assert a == b

    def test_refuses_oversized_model(self):
        model = TransformerManager(TransformerConfig(
            layers=4, heads=4, dim=128, ff_dim=512))
        with pytest.raises(ValueError, match="too large"):
            gradient_check(model, tokenize(starting_position()), Member.M)


class TestTrainSupervised:
    def test_first_epoch_loss_is_ln2_with_zero_head(self):
        rows = synthetic_queen_rows(n_per_class=20)
        model = TransformerManager(SMALL)
        cfg = TrainConfig(epochs=1, step_size=1e-3, batch_size=16,
                          validation_fraction=0.2, master_seed=0)
        report = train_supervised(model, rows, cfg)
        assert report.history[0]["epoch"] == 0
        assert report.history[0]["train_loss"] == pytest.approx(math.log(2),
                                                                abs=1e-3)

    def test_separable_dataset_reaches_95_percent(self):
        rows = synthetic_queen_rows(n_per_class=40)
        assert len(rows) >= 70
        model = TransformerManager(SMALL)
        cfg = TrainConfig(epochs=50, step_size=1e-3, batch_size=16,
                          validation_fraction=0.1, master_seed=0)
        train_supervised(model, rows, cfg)
        assert accuracy(model, rows) >= 0.95

    def test_single_repeated_row_memorized(self):
        fen = "7k/8/8/8/8/8/8/KQ6 w - - 0 1"
        rows = [LabeledDecision.from_rewards(fen, 1.0, 0.0, iteration=0)]
        model = TransformerManager(TINY)
        cfg = TrainConfig(epochs=80, step_size=3e-2, batch_size=4,
                          validation_fraction=0.0, master_seed=0)
        train_supervised(model, rows, cfg)
        prob_m, _ = model.choice_probabilities(parse_fen(fen))
        assert prob_m > 0.9

    def test_all_ties_is_an_error(self):
        fen = "7k/8/8/8/8/8/8/KQ6 w - - 0 1"
        rows = [LabeledDecision.from_rewards(fen, 0.5, 0.5, iteration=0)]
        assert rows[0].label is None
        with pytest.raises(TrainingError, match="tie"):
            train_supervised(TransformerManager(TINY), rows,
                             TrainConfig(epochs=1))

    def test_best_validation_epoch_returned(self):
        rows = synthetic_queen_rows(n_per_class=30)
        model = TransformerManager(SMALL)
        cfg = TrainConfig(epochs=8, step_size=1e-3, batch_size=16,
                          validation_fraction=0.2, master_seed=1)
        report = train_supervised(model, rows, cfg)
        losses = [h["val_loss"] for h in report.history]
        assert losses[report.best_epoch] == min(losses)


class TestCheckpoint:
    def test_roundtrip_bit_identical(self, tmp_path):
        model = TransformerManager(TransformerConfig(
            layers=1, heads=2, dim=16, ff_dim=32, zero_init_head=False,
            seed=13))
        path_a = tmp_path / "a.bin"
        path_b = tmp_path / "b.bin"
        save_model(model, path_a)
        reloaded = load_model(path_a)
        save_model(reloaded, path_b)
        assert path_a.read_bytes() == path_b.read_bytes()
        p = starting_position()
        la, _ = forward(model, tokenize(p))
        lb, _ = forward(reloaded, tokenize(p))
        assert torch.equal(la, lb)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTMODEL" + b"\x00" * 32)
        from centaur.models import CheckpointError
        with pytest.raises(CheckpointError, match="magic"):
            load_model(path)

    def test_truncated_file_rejected(self, tmp_path):
        model = TransformerManager(TINY)
        path = tmp_path / "model.bin"
        save_model(model, path)
        clipped = tmp_path / "clipped.bin"
        clipped.write_bytes(path.read_bytes()[:-64])
        from centaur.models import CheckpointError
        with pytest.raises(CheckpointError, match="truncated"):
            load_model(clipped)
