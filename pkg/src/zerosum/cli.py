"""Command-line interface.

    zerosum solve --config cfg.json [--seed-offset N] [--budget-scale X] [--out DIR]
    zerosum compare --baseline DIR --candidate DIR [--increase-threshold X]
    zerosum games list
    zerosum games dump --game '{"kind": "kuhn"}' [--seed N] [--out FILE]

Exit codes: 0 success, 1 runtime failure (partial traces are flushed),
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError
from .games.matrix import MatrixGame
from .games.tree import tree_to_json
from .games.zoo import game_from_spec
from .harness import ExperimentConfig, compare_runs, run_experiment

_GAME_KINDS = ("random_nfg", "bad_case", "fig1", "kuhn", "leduc")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zerosum",
        description="Population-based equilibrium solvers for two-player zero-sum games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a configured experiment")
    solve.add_argument("--config", required=True, help="path to a JSON config file")
    solve.add_argument("--seed-offset", type=int, default=0)
    solve.add_argument("--budget-scale", type=float, default=None)
    solve.add_argument("--out", default=None, help="output directory override")

    compare = sub.add_parser("compare", help="compare two experiment directories")
    compare.add_argument("--baseline", required=True)
    compare.add_argument("--candidate", required=True)
    compare.add_argument("--increase-threshold", type=float, default=1e-9)
    compare.add_argument("--out", default=None, help="write the report JSON here")

    games = sub.add_parser("games", help="list game kinds or dump a game")
    games_sub = games.add_subparsers(dest="games_command", required=True)
    games_sub.add_parser("list", help="list known game kinds")
    dump = games_sub.add_parser("dump", help="dump a game as JSON")
    dump.add_argument(
        "--game", required=True, help="game spec JSON, e.g. '{\"kind\": \"kuhn\"}'"
    )
    dump.add_argument("--seed", type=int, default=0)
    dump.add_argument("--out", default=None)
    return parser


def _cmd_solve(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = ExperimentConfig.from_dict(doc)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    summary = run_experiment(
        config,
        seed_offset=args.seed_offset,
        budget_scale=args.budget_scale,
        out_dir=args.out,
    )
    finals = summary.get("final_exploitability")
    if finals:
        print(
            f"{config.algorithm}: {len(summary['runs'])} run(s), "
            f"median final exploitability {finals['median']:.6g}"
        )
    return 0


def _cmd_compare(args) -> int:
    report = compare_runs(args.baseline, args.candidate, args.increase_threshold)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def _cmd_games(args) -> int:
    if args.games_command == "list":
        for kind in _GAME_KINDS:
            print(kind)
        return 0
    try:
        spec = json.loads(args.game)
        game = game_from_spec(spec, seed=args.seed)
    except (json.JSONDecodeError, ConfigError) as exc:
        print(f"error: invalid game spec: {exc}", file=sys.stderr)
        return 2
    if isinstance(game, MatrixGame):
        text = json.dumps(
            {"type": "matrix_game", "name": game.name, "payoff": game.payoff.tolist()},
            indent=2,
            sort_keys=True,
        )
    else:
        text = tree_to_json(game)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_games(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: partial outputs stay on disk
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
