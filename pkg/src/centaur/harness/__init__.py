"""Experiment orchestration: configs, openings, match running, service, CLI."""

from centaur.harness.config import (
    ENGINE_DIR_ENV,
    ExperimentConfig,
    config_from_dict,
    load_config,
    save_config,
)
from centaur.harness.match import build_manager, plan_games, run_match
from centaur.harness.openings import OpeningSet, assert_disjoint, ingest_openings
from centaur.harness.pgn import game_to_pgn, read_pgn_games, write_pgn
from centaur.harness.recipes import experiment_recipes

__all__ = [
    "ENGINE_DIR_ENV", "ExperimentConfig", "config_from_dict", "load_config",
    "save_config", "build_manager", "plan_games", "run_match", "OpeningSet",
    "assert_disjoint", "ingest_openings", "game_to_pgn", "read_pgn_games",
    "write_pgn", "experiment_recipes",
]
