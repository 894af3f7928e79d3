"""Command-line interface.

Subcommands: play, baseline, train-manager, explain, distill, stats,
serve, recipes.  Configuration is one TOML/JSON file plus repeatable
`--set key=value` overrides; engine paths may reference ${ENGINE_DIR}
(environment variable CENTAUR_ENGINE_DIR).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path


def _add_config_arg(parser):
    parser.add_argument("--config", required=True,
                        help="experiment config file (.toml or .json)")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override a config key (dotted path)")


def cmd_play(args):
    from centaur.harness.config import load_config
    from centaur.harness.match import run_match

    cfg = load_config(args.config, args.overrides)
    summary, run_dir = run_match(cfg)
    print(f"run dir: {run_dir}")
    print(f"games {len(summary.rewards)}  W/D/L "
          f"{summary.wins}/{summary.draws}/{summary.losses}  "
          f"WDL {summary.wdl:.4f}  SEM {summary.sem:.4f}  "
          f"aborted {summary.aborted}")
    return 0


def cmd_baseline(args):
    from centaur.harness.config import load_config
    from centaur.harness.match import run_match

    cfg = load_config(args.config, args.overrides)
    summary, run_dir = run_match(cfg, solo_member=args.member)
    print(f"run dir: {run_dir}")
    print(f"solo-{args.member}: WDL {summary.wdl:.4f} SEM {summary.sem:.4f} "
          f"({summary.wins}/{summary.draws}/{summary.losses})")
    return 0


def cmd_train_manager(args):
    from centaur.harness.config import load_config
    from centaur.harness.match import _WorkerHandles
    from centaur.harness.openings import ingest_openings
    from centaur.models import TrainConfig, TransformerConfig, policy_iteration

    cfg = load_config(args.config, args.overrides)
    train_raw = dict(cfg.train)
    model_raw = train_raw.pop("model", {})
    alternate_colors = train_raw.pop("alternate_colors", True)
    train_cfg = TrainConfig(**train_raw) if train_raw else TrainConfig()
    openings = ingest_openings(cfg.train_openings_path or cfg.openings_path)
    outdir = Path(args.out or (Path(cfg.output_dir) / "training"))
    handles = _WorkerHandles(cfg, need_manager=False)
    try:
        result = policy_iteration(
            train_cfg, handles.m, handles.l, handles.adversary,
            openings.positions,
            model_config=TransformerConfig(**model_raw),
            alternate_colors=alternate_colors,
            max_ply=cfg.max_ply, outdir=outdir)
    finally:
        handles.close()
    for art in result.iterations:
        status = "skipped" if art.skipped else "trained"
        print(f"iteration {art.index}: {len(art.games)} games, "
              f"{art.n_disagreements} disagreements, "
              f"{art.n_labeled} labeled, {status}")
    print(f"artifacts in {outdir}")
    return 0


def cmd_explain(args):
    from centaur.analysis import (
        attention_probe_attacked,
        attention_probe_pieces,
        feature_preference_table,
        probe_report_box_svg,
    )
    from centaur.harness.openings import ingest_openings
    from centaur.models import load_model
    from centaur.team import Choice, Member, model_decide

    model = load_model(args.model)
    openings = ingest_openings(args.positions)
    positions = openings.positions
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    reports = {
        "pieces": attention_probe_pieces(model, positions,
                                         min_positions=args.min_positions),
        "attacked": attention_probe_attacked(model, positions,
                                             min_positions=args.min_positions),
    }
    payload = {}
    for name, report in reports.items():
        payload[name] = {
            cond: {"a_w": res.effect.a_w, "direction": res.effect.direction,
                   "mean_high": res.effect.mean_a,
                   "mean_low": res.effect.mean_b,
                   "n_positions": res.n_positions,
                   "n_skipped": res.n_skipped}
            for cond, res in report.conditions.items()
        }
        (outdir / f"probe_{name}.svg").write_text(
            probe_report_box_svg(report))

    decisions = []
    for p in positions:
        choice = model_decide(model, p)
        if choice is Choice.INDIFFERENT:
            continue
        decisions.append((p, Member.M if choice is Choice.FIRST
                          else Member.L))
    if decisions:
        table = feature_preference_table(decisions)
        payload["feature_preference"] = [
            {"feature": row.feature, "mean_m": row.mean_m,
             "mean_l": row.mean_l,
             "a_w": row.effect.a_w if row.effect else None,
             "direction": row.effect.direction if row.effect else None}
            for row in table.rows]
        with open(outdir / "feature_preference.csv", "w") as fh:
            fh.write("feature,mean_m,mean_l,a_w,direction\n")
            for row in table.rows:
                effect = row.effect
                fh.write(f"{row.feature},{row.mean_m},{row.mean_l},"
                         f"{effect.a_w if effect else ''},"
                         f"{effect.direction if effect else ''}\n")
    with open(outdir / "probes.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    print(f"explainability reports in {outdir}")
    return 0


def cmd_distill(args):
    from centaur.harness.openings import ingest_openings
    from centaur.models import (
        FeatureMLP,
        FeatureMLPConfig,
        TrainConfig,
        distill,
        load_model,
        save_model,
    )

    teacher = load_model(args.model)
    openings = ingest_openings(args.positions)
    student = FeatureMLP(FeatureMLPConfig(hidden_layers=args.layers,
                                          width=args.width))
    report = distill(teacher, openings.positions, student=student,
                     cfg=TrainConfig(epochs=args.epochs, step_size=1e-3,
                                     batch_size=64))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(report.student, out)
    print(f"held-out agreement {report.agreement:.3f} over {report.n_used} "
          f"positions ({report.n_excluded} indifferent excluded)")
    print(f"student saved to {out}")
    return 0


def cmd_stats(args):
    from centaur.analysis import MatchSummary
    from centaur.harness.pgn import read_pgn_games

    run_dir = Path(args.run)
    games = read_pgn_games(run_dir / "games.pgn")
    rewards = []
    for headers, _ in games:
        result = headers.get("Result")
        team_is_white = headers.get("White", "").startswith("team[") or \
            args.perspective == "white"
        if result == "1/2-1/2":
            rewards.append(0.5)
        elif (result == "1-0") == team_is_white:
            rewards.append(1.0)
        else:
            rewards.append(0.0)
    summary = MatchSummary.from_rewards(rewards)
    print(json.dumps(summary.to_json_dict(), indent=2, sort_keys=True))
    return 0


def cmd_serve(args):
    import uvicorn

    from centaur.harness.config import load_config
    from centaur.harness.service import create_app

    cfg = load_config(args.config, args.overrides)
    app = create_app(cfg)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_recipes(args):
    from centaur.harness.recipes import experiment_recipes

    recipes = experiment_recipes()
    if args.write:
        outdir = Path(args.write)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, payload in recipes.items():
            with open(outdir / f"{name}.json", "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        print(f"wrote {len(recipes)} recipe configs to {outdir}")
    else:
        for name in recipes:
            print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="centaur", description="mixture-of-experts chess team harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("play", help="run a team match")
    _add_config_arg(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("baseline", help="run a solo baseline match")
    _add_config_arg(p)
    p.add_argument("--member", choices=["M", "L"], default="M")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("train-manager", help="policy-iteration training")
    _add_config_arg(p)
    p.add_argument("--out", default=None, help="artifact directory")
    p.set_defaults(func=cmd_train_manager)

    p = sub.add_parser("explain", help="attention probes + feature tables")
    p.add_argument("--model", required=True)
    p.add_argument("--positions", required=True, help="EPD/FEN file")
    p.add_argument("--out", required=True)
    p.add_argument("--min-positions", type=int, default=1000)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("distill", help="distill a manager into a feature MLP")
    p.add_argument("--model", required=True)
    p.add_argument("--positions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--layers", type=int, default=20)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--epochs", type=int, default=20)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("stats", help="recompute a run's summary from PGN")
    p.add_argument("--run", required=True)
    p.add_argument("--perspective", choices=["team", "white"],
                   default="team")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="human-manager session service")
    _add_config_arg(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("recipes", help="list or write experiment presets")
    p.add_argument("--write", default=None, metavar="DIR")
    p.set_defaults(func=cmd_recipes)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
