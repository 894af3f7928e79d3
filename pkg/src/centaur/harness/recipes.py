"""Named experiment presets.

Engine binaries and network weights are configuration, not code: presets
reference them through ${ENGINE_DIR} (the CENTAUR_ENGINE_DIR environment
variable).  The network players run without search (nodes=1 for lc0-style
engines); adversary and expert strength is set by search depth.  The
`demo-*` presets run on the packaged scripted engine and need no binaries.
"""

from __future__ import annotations

import sys

_MEMBER_M = {
    "executable": "${ENGINE_DIR}/lc0",
    "name": "maia-1900",
    "options": {"WeightsFile": "${ENGINE_DIR}/maia-1900.pb.gz",
                "Temperature": 0, "Threads": 1},
    "nodes": 1,
}

_ADVERSARY_V11_D1 = {
    "executable": "${ENGINE_DIR}/stockfish11",
    "name": "stockfish11-d1",
    "options": {"Threads": 1},
    "depth": 1,
}


def _member_l(network: str, name: str) -> dict:
    return {
        "executable": "${ENGINE_DIR}/lc0",
        "name": name,
        "options": {"WeightsFile": f"${{ENGINE_DIR}}/{network}",
                    "Temperature": 0, "Threads": 1},
        "nodes": 1,
    }


def _adversary_v14(depth: int) -> dict:
    return {
        "executable": "${ENGINE_DIR}/stockfish14",
        "name": f"stockfish14-d{depth}",
        "options": {"Threads": 1},
        "depth": depth,
    }


def _expert(depth: int) -> dict:
    cfg = _adversary_v14(depth)
    cfg["name"] = f"expert-sf14-d{depth}"
    return cfg


def _base(name, manager, adversary, member_l, openings="openings/test.epd",
          openings_count=500, seed=2024) -> dict:
    return {
        "name": name,
        "engine_m": dict(_MEMBER_M),
        "engine_l": member_l,
        "adversary": adversary,
        "manager": manager,
        "openings_path": openings,
        "openings_count": openings_count,
        "both_colors": True,
        "master_seed": seed,
        "output_dir": "runs",
    }


def _stub_engine(name, policy="seeded", seed=0) -> dict:
    return {
        "executable": (f"{sys.executable} -m centaur.engine.stub "
                       f"--policy {policy} --seed {seed}"),
        "name": name,
        "depth": 1,
    }


_LEELA_SYM = _member_l("leela-sym.pb.gz", "leela-sym")
_ASYM_LEVELS = {
    1: (_member_l("leela-asym1.pb.gz", "leela-asym1"), 4),
    2: (_member_l("leela-asym2.pb.gz", "leela-asym2"), 7),
    3: (_member_l("leela-asym3.pb.gz", "leela-asym3"), 10),
}


def experiment_recipes() -> dict:
    """All named presets as plain config dictionaries."""
    recipes = {}

    # symmetric team vs stockfish 11 depth 1
    recipes["symmetric-random"] = _base(
        "symmetric-random", {"kind": "random", "p_first": 0.5},
        dict(_ADVERSARY_V11_D1), dict(_LEELA_SYM))
    for depth in (1, 3, 5, 15):
        cfg = _base(f"symmetric-expert-d{depth}", {"kind": "expert"},
                    dict(_ADVERSARY_V11_D1), dict(_LEELA_SYM))
        cfg["expert"] = _expert(depth)
        recipes[f"symmetric-expert-d{depth}"] = cfg
    recipes["symmetric-rl"] = _base(
        "symmetric-rl",
        {"kind": "model", "model_path": "models/symmetric.bin"},
        dict(_ADVERSARY_V11_D1), dict(_LEELA_SYM))
    recipes["symmetric-oracle"] = _base(
        "symmetric-oracle", {"kind": "oracle", "superior": "M"},
        dict(_ADVERSARY_V11_D1), dict(_LEELA_SYM))

    # asymmetric teams: stronger networks, stronger adversaries
    for level, (member_l, depth) in _ASYM_LEVELS.items():
        adversary = _adversary_v14(depth)
        base_name = f"asym{level}"
        cfg = _base(f"{base_name}-expert", {"kind": "expert"}, dict(adversary),
                    dict(member_l))
        cfg["expert"] = _expert(15)
        recipes[f"{base_name}-expert"] = cfg
        recipes[f"{base_name}-rl"] = _base(
            f"{base_name}-rl",
            {"kind": "model", "model_path": f"models/{base_name}.bin"},
            dict(adversary), dict(member_l))
        recipes[f"{base_name}-oracle"] = _base(
            f"{base_name}-oracle", {"kind": "oracle", "superior": "L"},
            dict(adversary), dict(member_l))

    # solo baselines for the synergy line
    recipes["solo-m"] = _base(
        "solo-m", {"kind": "fixed", "member": "M"}, dict(_ADVERSARY_V11_D1),
        dict(_LEELA_SYM))
    recipes["solo-l"] = _base(
        "solo-l", {"kind": "fixed", "member": "L"}, dict(_ADVERSARY_V11_D1),
        dict(_LEELA_SYM))

    # the evaluation protocol: 500 held-out openings, both colors
    eval_cfg = _base("eval-1000", {"kind": "random", "p_first": 0.5},
                     dict(_ADVERSARY_V11_D1), dict(_LEELA_SYM))
    eval_cfg["openings_count"] = 500
    eval_cfg["train_openings_path"] = "openings/train.epd"
    recipes["eval-1000"] = eval_cfg

    # scripted-engine presets: runnable anywhere, reproducibility demos
    demo = {
        "name": "demo-stub",
        "engine_m": _stub_engine("stub-m", "seeded", 11),
        "engine_l": _stub_engine("stub-l", "seeded", 22),
        "adversary": _stub_engine("stub-adv", "seeded", 33),
        "manager": {"kind": "random", "p_first": 0.5},
        "openings_path": "openings/sample.epd",
        "openings_count": 4,
        "both_colors": True,
        "master_seed": 7,
        "max_ply": 120,
        "output_dir": "runs",
    }
    recipes["demo-stub"] = demo
    return recipes
