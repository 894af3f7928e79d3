"""Parallel match running with deterministic, byte-stable artifacts."""

from __future__ import annotations

import json
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from centaur.analysis import MatchSummary
from centaur.chess import Color
from centaur.engine import EngineError, Role, spawn_engine
from centaur.harness.config import ExperimentConfig, save_config
from centaur.harness.openings import assert_disjoint, ingest_openings
from centaur.harness.pgn import write_pgn
from centaur.models import load_model
from centaur.seeding import stable_seed
from centaur.team import (
    ExpertManager,
    FixedManager,
    Manager,
    ManagerSpec,
    Member,
    ModelManager,
    OracleManager,
    RandomManager,
    play_game,
    play_solo_game,
)


def build_manager(spec: ManagerSpec, handles, max_ply: int = 512) -> Manager:
    """Instantiate a manager from its spec and a per-worker handle set."""
    if spec.kind == "random":
        return RandomManager(spec.p_first)
    if spec.kind == "fixed":
        return FixedManager(Member(spec.member))
    if spec.kind == "expert":
        if handles.expert is None:
            raise ValueError("expert manager requires an expert engine")
        return ExpertManager(handles.expert)
    if spec.kind == "oracle":
        superior = (handles.m if Member(spec.superior) is Member.M
                    else handles.l)
        return OracleManager(superior, handles.adversary,
                             trajectories=spec.trajectories, max_ply=max_ply)
    if spec.kind in ("model", "feature_model"):
        if spec.model_path is None:
            raise ValueError(f"{spec.kind} manager requires model_path")
        model = load_model(spec.model_path)
        return ModelManager(model, threshold=spec.indifference_threshold,
                            name=f"{spec.kind}:{Path(spec.model_path).name}")
    raise ValueError(f"manager kind {spec.kind!r} is not runnable here")


class _WorkerHandles:
    """Engine handles owned by one worker thread, plus its manager."""

    def __init__(self, cfg: ExperimentConfig, need_manager: bool = True):
        self.m = spawn_engine(cfg.engine_m)
        self.l = spawn_engine(cfg.engine_l)
        self.adversary = spawn_engine(cfg.adversary)
        self.expert = spawn_engine(cfg.expert) if cfg.expert else None
        self.manager = (build_manager(cfg.manager, self, cfg.max_ply)
                        if need_manager else None)

    def close(self):
        for handle in (self.m, self.l, self.adversary, self.expert):
            if handle is not None:
                handle.close()


@dataclass
class GameJob:
    index: int
    opening_id: str
    opening: object
    team_color: Color
    seed: int


def plan_games(cfg: ExperimentConfig, opening_set) -> list:
    """Deterministic game list: sampled openings x colors, seeded."""
    rng = random.Random(stable_seed(cfg.master_seed, "openings",
                                    opening_set.content_hash))
    indices = list(range(len(opening_set.positions)))
    if cfg.openings_count is not None \
            and cfg.openings_count < len(indices):
        indices = sorted(rng.sample(indices, cfg.openings_count))
    jobs = []
    colors = ((Color.WHITE, Color.BLACK) if cfg.both_colors
              else (Color.WHITE,))
    for i in indices:
        for color in colors:
            index = len(jobs)
            jobs.append(GameJob(
                index=index, opening_id=opening_set.ids[i],
                opening=opening_set.positions[i], team_color=color,
                seed=stable_seed(cfg.master_seed, "game", index)))
    return jobs


def _run_jobs(cfg: ExperimentConfig, jobs, play_one, need_manager=True):
    """Run jobs over a worker pool; each worker owns its engine handles.
    Returns (records by index, aborted indices)."""
    workers = cfg.workers
    if workers <= 0:
        import os
        workers = max(1, (os.cpu_count() or 2) - 1)
    workers = min(workers, len(jobs)) or 1

    local = threading.local()
    all_handles = []
    handles_lock = threading.Lock()

    def get_handles():
        if not hasattr(local, "handles"):
            local.handles = _WorkerHandles(cfg, need_manager)
            with handles_lock:
                all_handles.append(local.handles)
        return local.handles

    results = {}
    aborted = []
    results_lock = threading.Lock()

    def run(job):
        handles = get_handles()
        try:
            record = play_one(job, handles)
            with results_lock:
                results[job.index] = record
        except EngineError as exc:
            with results_lock:
                aborted.append((job.index, str(exc)))

    try:
        if workers == 1:
            for job in jobs:
                run(job)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run, jobs))
    finally:
        for handles in all_handles:
            handles.close()
    return results, aborted


def run_match(cfg: ExperimentConfig, solo_member=None):
    """Run a full match per the config; returns (summary, run_dir).

    With `solo_member` set ("M" or "L") the corresponding engine plays
    alone against the adversary: the synergy baseline.
    """
    opening_set = ingest_openings(cfg.openings_path)
    if cfg.train_openings_path:
        assert_disjoint(ingest_openings(cfg.train_openings_path), opening_set)
    jobs = plan_games(cfg, opening_set)

    if solo_member is None:
        def play_one(job, handles):
            rng = random.Random(job.seed)
            return play_game(
                job.opening, handles.m, handles.l, handles.manager,
                handles.adversary, job.team_color, rng, max_ply=cfg.max_ply,
                opening_id=job.opening_id, game_id=f"g{job.index:05d}",
                seed=job.seed)
    else:
        member = Member(solo_member)

        def play_one(job, handles):
            player = handles.m if member is Member.M else handles.l
            record = play_solo_game(
                job.opening, player, handles.adversary, job.team_color,
                max_ply=cfg.max_ply, opening_id=job.opening_id,
                game_id=f"g{job.index:05d}")
            record.seed = job.seed
            return record

    results, aborted = _run_jobs(cfg, jobs, play_one,
                                 need_manager=solo_member is None)
    records = [results[i] for i in sorted(results)]
    abort_rate = len(aborted) / len(jobs) if jobs else 0.0
    valid = abort_rate <= cfg.abort_threshold

    label = cfg.manager.kind if solo_member is None else f"solo-{solo_member}"
    engines = {"M": cfg.engine_m.name, "L": cfg.engine_l.name,
               "adversary": cfg.adversary.name}
    if records:
        summary = MatchSummary.from_rewards(
            [r.reward for r in records], manager=label, engines=engines,
            opening_set=opening_set.content_hash, aborted=len(aborted))
    else:  # every game aborted: no rewards to summarize
        summary = MatchSummary(wins=0, draws=0, losses=0, rewards=[],
                               wdl=float("nan"), sem=0.0, manager=label,
                               engines=engines,
                               opening_set=opening_set.content_hash,
                               aborted=len(aborted))

    run_dir = _persist_run(cfg, records, summary, aborted, valid,
                           solo_member)
    return summary, run_dir


def _persist_run(cfg, records, summary, aborted, valid, solo_member):
    stamp = time.strftime("%Y%m%d-%H%M%S")
    run_dir = Path(cfg.output_dir) / f"{stamp}-{cfg.config_hash()}"
    run_dir.mkdir(parents=True, exist_ok=True)

    save_config(cfg, run_dir / "config.json")
    tag = "baseline" if solo_member else "match"
    write_pgn(records, run_dir / "games.pgn",
              event=f"{cfg.name}:{tag}", date=cfg.pgn_date)
    with open(run_dir / "decisions.jsonl", "w") as fh:
        for record in records:
            for decision in record.decisions:
                fh.write(json.dumps(decision.to_json_dict(), sort_keys=True))
                fh.write("\n")
    payload = summary.to_json_dict()
    if payload["wdl"] != payload["wdl"]:  # NaN: zero completed games
        payload["wdl"] = None
    payload["valid"] = valid
    payload["aborted_games"] = [{"index": i, "error": e.splitlines()[0]}
                                for i, e in sorted(aborted)]
    payload["config_hash"] = cfg.config_hash()
    payload["solo_member"] = solo_member
    with open(run_dir / "summary.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return run_dir
