"""Command-line entry points.

    thoughtcraft run <config.json>
    thoughtcraft evaluate --checkpoint C --profile P --difficulty D --games N --seed S
    thoughtcraft compare <dirA> <dirB> --threshold V

Exit codes: 0 ok, 2 configuration error, 3 runtime failure. THOUGHTCRAFT_OUT
overrides the output root for `run`.
"""
from __future__ import annotations

import argparse
import json
import sys

from .curriculum import evaluate
from .errors import ConfigInvalidError, FileMissingError, MalformedRecordError, ThoughtcraftError
from .experiments import ExperimentConfig, compare_runs, run_experiment
from .policy import load_checkpoint
from .profiles import load_profile
from .techtree import load_specs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thoughtcraft")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="experiment config file")

    p_eval = sub.add_parser("evaluate", help="greedy evaluation of a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--profile", required=True)
    p_eval.add_argument("--catalog", default=None,
                        help="catalog file (defaults to the bundled one)")
    p_eval.add_argument("--difficulty", type=int, default=7)
    p_eval.add_argument("--games", type=int, default=100)
    p_eval.add_argument("--seed", type=int, default=0)

    p_cmp = sub.add_parser("compare", help="time/episodes-to-threshold comparison")
    p_cmp.add_argument("dir_a")
    p_cmp.add_argument("dir_b")
    p_cmp.add_argument("--threshold", type=float, required=True)
    p_cmp.add_argument("-o", "--output", default=None, help="write the report JSON here")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = ExperimentConfig.from_file(args.config)
            manifest = run_experiment(config)
            json.dump(manifest, sys.stdout, indent=2)
            print()
        elif args.command == "evaluate":
            from .profiles import default_catalog_path

            tree = load_specs(args.catalog or default_catalog_path())
            profile = load_profile(args.profile)
            params = load_checkpoint(args.checkpoint)
            result = evaluate(params, tree, profile, args.difficulty, args.games, args.seed)
            json.dump({
                "win_rate": result.win_rate, "wins": result.wins, "losses": result.losses,
                "draws": result.draws, "mean_episode_length": result.mean_episode_length,
            }, sys.stdout, indent=2)
            print()
        elif args.command == "compare":
            report = compare_runs(args.dir_a, args.dir_b, args.threshold)
            text = json.dumps(report, indent=2)
            if args.output:
                with open(args.output, "w") as fh:
                    fh.write(text + "\n")
            print(text)
    except (ConfigInvalidError, FileMissingError, MalformedRecordError) as exc:
        # bad paths or unparseable inputs named on the command line are
        # configuration problems, not runtime failures
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ThoughtcraftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
