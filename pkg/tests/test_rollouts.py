import random

import pytest
import torch

from centaur.chess import (
    Color,
    Termination,
    apply_move,
    game_result,
    move_from_uci,
    parse_fen,
)
from centaur.models import (
    TrainConfig,
    TransformerConfig,
    policy_iteration,
    rollout_label,
)
from centaur.team import Choice, FixedManager, Manager, Member, RandomManager, model_decide

from fake_engines import FakeHandle
from mate_race import mate_race_rig

RACE_FEN = "6k1/5ppp/8/8/1p6/8/1r3PPP/R5K1 w - - 0 1"
B1_FEN = "6k1/5ppp/8/R7/1p6/8/1r3PPP/6K1 b - - 1 1"
P2_FEN = "6k1/5ppp/8/R7/8/1p6/1r3PPP/6K1 w - - 0 2"
B2_FEN = "6k1/5ppp/8/8/R7/1p6/1r3PPP/6K1 b - - 1 2"


class CyclingManager(Manager):
    """Deterministic choice sequence, for exact-averaging tests."""

    name = "cycling"

    def __init__(self, choices):
        self.choices = list(choices)
        self.i = 0

    def decide(self, p, rec_m, rec_l, rng):
        choice = self.choices[self.i % len(self.choices)]
        self.i += 1
        return choice


def _race_handles():
    handle_m = FakeHandle("m", moves={P2_FEN: "a5a8"})
    handle_l = FakeHandle("l", moves={P2_FEN: "a5a4"})
    adversary = FakeHandle("adv", moves={B1_FEN: "b4b3", B2_FEN: "b2b1"})
    return handle_m, handle_l, adversary


class TestRolloutLabel:
    def test_immediate_mate_is_one_regardless_of_manager(self):
        p = parse_fen(RACE_FEN)
        rec = move_from_uci(p, "a1a8")
        for manager in (FixedManager(Member.L), RandomManager(0.5)):
            reward = rollout_label(p, rec, manager, FakeHandle("m"),
                                   FakeHandle("l"), FakeHandle("adv"),
                                   Color.WHITE, random.Random(0))
            assert reward == 1.0

    def test_scripted_branch_outcomes(self):
        # after a1a5 / b4b3 the team faces the race again a rank higher;
        # the cycling manager forces rewards 1, 0, 1, 1 -> mean 0.75
        p = parse_fen(RACE_FEN)
        rec = move_from_uci(p, "a1a5")
        handle_m, handle_l, adversary = _race_handles()
        manager = CyclingManager([Choice.FIRST, Choice.SECOND, Choice.FIRST,
                                  Choice.FIRST])
        reward = rollout_label(p, rec, manager, handle_m, handle_l,
                               adversary, Color.WHITE, random.Random(0),
                               rollouts=4)
        assert reward == 0.75

    def test_scripted_draw(self):
        # quiet continuation adjudicates at the cap
        p = parse_fen(RACE_FEN)
        rec = move_from_uci(p, "g1h1")  # wait: h1 attacked? no
        handle_m, handle_l, adversary = _race_handles()
        reward = rollout_label(p, rec, FixedManager(Member.M),
                               FakeHandle("m"), FakeHandle("l"),
                               FakeHandle("adv"), Color.WHITE,
                               random.Random(0), max_ply=4)
        assert reward == 0.5

    def test_k_to_infinity_converges_to_coin_mean(self):
        # the random manager wins iff it picks the mating recommendation
        p = parse_fen(RACE_FEN)
        rec = move_from_uci(p, "a1a5")
        handle_m, handle_l, adversary = _race_handles()
        reward = rollout_label(p, rec, RandomManager(0.5), handle_m,
                               handle_l, adversary, Color.WHITE,
                               random.Random(99), rollouts=1000)
        # 3 sigma of a Bernoulli(0.5) mean over 1000 draws
        assert abs(reward - 0.5) < 3 * 0.5 / (1000 ** 0.5)


class TestMateRaceRig:
    def test_every_opening_behaves(self):
        openings, m_script, l_script, adv_script = mate_race_rig()
        assert len(openings) == 64
        for p in openings[:12]:
            mate = apply_move(p, move_from_uci(p, "a1a8"))
            outcome = game_result(mate)
            assert outcome is not None
            assert outcome.termination is Termination.CHECKMATE
            assert outcome.winner is Color.WHITE
            quiet = apply_move(p, move_from_uci(p, "a1a4"))
            from centaur.chess import serialize_fen
            reply = adv_script[serialize_fen(quiet)]
            lost = apply_move(quiet, move_from_uci(quiet, reply))
            outcome = game_result(lost)
            assert outcome is not None
            assert outcome.termination is Termination.CHECKMATE
            assert outcome.winner is Color.BLACK


def _rig_handles():
    openings, m_script, l_script, adv_script = mate_race_rig()
    return (openings, FakeHandle("m", moves=m_script),
            FakeHandle("l", moves=l_script),
            FakeHandle("adv", moves=adv_script))


SMALL_MODEL = TransformerConfig(layers=2, heads=2, dim=32, ff_dim=64,
                                head_hidden=32)


class TestPolicyIteration:
    def test_zero_iterations_returns_baseline_only(self):
        openings, handle_m, handle_l, adversary = _rig_handles()
        result = policy_iteration(
            TrainConfig(iterations=0, games_per_iteration=4),
            handle_m, handle_l, adversary, openings[:4],
            model_config=SMALL_MODEL, alternate_colors=False)
        assert len(result.managers) == 1
        assert isinstance(result.managers[0], RandomManager)

    def test_one_sided_rig_trains_a_first_picking_manager(self):
        openings, handle_m, handle_l, adversary = _rig_handles()
        train, held_out = openings[:40], openings[40:]
        cfg = TrainConfig(iterations=1, games_per_iteration=40,
                          rollouts_per_recommendation=1, step_size=1e-3,
                          batch_size=16, epochs=30, validation_fraction=0.1,
                          master_seed=5)
        result = policy_iteration(cfg, handle_m, handle_l, adversary, train,
                                  model_config=SMALL_MODEL,
                                  alternate_colors=False)
        art = result.iterations[0]
        assert art.n_disagreements == 40
        assert art.n_labeled == 40  # qM != qL everywhere in this rig
        assert all(row.label is Member.M for row in art.new_rows)
        model = result.final_manager.model
        picked_first = sum(
            1 for p in held_out if model_decide(model, p) is Choice.FIRST)
        assert picked_first / len(held_out) >= 0.9

    def test_agreeing_stubs_skip_iteration(self):
        openings, m_script, l_script, adv_script = mate_race_rig()
        both = FakeHandle("m", moves=m_script)
        twin = FakeHandle("l", moves=m_script)  # same script: always agree
        adversary = FakeHandle("adv", moves=adv_script)
        cfg = TrainConfig(iterations=1, games_per_iteration=6)
        result = policy_iteration(cfg, both, twin, adversary, openings[:6],
                                  model_config=SMALL_MODEL,
                                  alternate_colors=False)
        assert result.iterations[0].skipped
        assert result.managers[1] is result.managers[0]

    def test_artifacts_persisted_and_replayable(self, tmp_path):
        openings, handle_m, handle_l, adversary = _rig_handles()
        cfg = TrainConfig(iterations=1, games_per_iteration=10,
                          step_size=1e-3, batch_size=8, epochs=5,
                          validation_fraction=0.1, master_seed=11)
        outs = []
        for run in range(2):
            outdir = tmp_path / f"run{run}"
            result = policy_iteration(cfg, handle_m, handle_l, adversary,
                                      openings[:10], model_config=SMALL_MODEL,
                                      alternate_colors=False, outdir=outdir)
            outs.append((outdir, result))
        a, b = outs[0][0] / "iter_000", outs[1][0] / "iter_000"
        assert (a / "dataset.jsonl").read_bytes() == \
            (b / "dataset.jsonl").read_bytes()
        assert (a / "model.bin").read_bytes() == (b / "model.bin").read_bytes()
        assert (a / "loss.csv").exists() and (a / "metrics.json").exists()
        # identical models produce identical decisions
        model_a, model_b = outs[0][1].final_manager.model, \
            outs[1][1].final_manager.model
        for p in openings[40:50]:
            pa = model_a.choice_probabilities(p)
            pb = model_b.choice_probabilities(p)
            assert pa == pb
