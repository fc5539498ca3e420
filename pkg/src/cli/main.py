"""
Command-line entry point.

@help.category CLI
@help.title Command Line
@help.description python -m src.cli {certify, mc-risk, verify-lemmas}. Exit codes: 0 success
(every comparison satisfied), 1 certificate or lemma violation, 2 configuration error,
3 runtime budget exceeded. RESOLV_THREADS caps the Monte Carlo worker threads.
@help.example
    python -m src.cli certify --config experiments/gaussian.json --out results/
    python -m src.cli mc-risk --config experiments/gaussian.json --seed 7 --budget-seconds 120
    python -m src.cli verify-lemmas --seed 1 --trials 1000
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.cli.commands import (
    cmd_certify,
    cmd_mc_risk,
    cmd_verify_lemmas,
    risk_csv,
    write_json,
    write_replays,
    write_text,
)
from src.cli.config import ExperimentConfig, OutputSpec, load_config, validation_messages
from src.config.settings import get_settings
from src.utils.errors import BudgetExceededError
from src.utils.logging_setup import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m src.cli", description="Resolvability risk bounds")
    commands = parser.add_subparsers(dest="command", required=True)

    certify = commands.add_parser("certify", help="compute bound certificates")
    certify.add_argument("--config", required=True, type=Path, help="experiment JSON file")
    certify.add_argument("--out", type=Path, default=Path("."), help="output directory")

    risk = commands.add_parser("mc-risk", help="Monte Carlo risk against certificates")
    risk.add_argument("--config", required=True, type=Path, help="experiment JSON file")
    risk.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    risk.add_argument("--out", type=Path, default=Path("."), help="output directory")
    risk.add_argument("--budget-seconds", type=int, default=None, help="wall-clock budget for the whole command")

    lemmas = commands.add_parser("verify-lemmas", help="run the lemma oracle suite")
    lemmas.add_argument("--seed", type=int, default=None)
    lemmas.add_argument("--trials", type=int, default=None)
    lemmas.add_argument("--out", type=Path, default=Path("."), help="output directory")
    return parser


def _load(path: Path) -> Optional[ExperimentConfig]:
    try:
        return load_config(path)
    except ValidationError as exc:
        print(f"invalid config {path}:", file=sys.stderr)
        for line in validation_messages(exc):
            print(f"  {line}", file=sys.stderr)
    except OSError as exc:
        print(f"cannot read config {path}: {exc}", file=sys.stderr)
    return None


def run_certify(args: argparse.Namespace) -> int:
    config = _load(args.config)
    if config is None:
        return EXIT_CONFIG
    try:
        report = cmd_certify(config, base_dir=args.config.parent)
    except (ValueError, OSError) as exc:
        print(f"cannot certify {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    path = write_json(report, args.out / config.outputs.certificates)
    logger.info("wrote %s", path)
    return EXIT_OK


def run_mc_risk(args: argparse.Namespace) -> int:
    config = _load(args.config)
    if config is None:
        return EXIT_CONFIG
    settings = get_settings()
    seed = args.seed if args.seed is not None else (config.seed if config.seed is not None else settings.default_seed)
    reps = config.reps if config.reps is not None else settings.default_reps
    budget = args.budget_seconds if args.budget_seconds is not None else settings.budget_seconds
    try:
        report = cmd_mc_risk(config, seed, reps, budget_seconds=budget)
        status = EXIT_OK if report.all_satisfied else EXIT_VIOLATION
    except ValueError as exc:
        print(f"invalid config {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        report = exc.partial
        status = EXIT_BUDGET
        print(f"runtime budget exceeded: {exc}", file=sys.stderr)
    write_json(report, args.out / config.outputs.risk_json)
    write_text(risk_csv(report), args.out / config.outputs.risk_csv)
    if status == EXIT_VIOLATION:
        logger.warning("at least one certificate comparison failed")
    return status


def run_verify_lemmas(args: argparse.Namespace) -> int:
    settings = get_settings()
    seed = args.seed if args.seed is not None else settings.default_seed
    trials = args.trials if args.trials is not None else settings.default_trials
    if trials < 1:
        print("--trials must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    report = cmd_verify_lemmas(seed, trials)
    outputs = OutputSpec()
    write_json(report, args.out / outputs.lemmas)
    replays = write_replays(report.ledger, args.out / outputs.replay_dir)
    if replays:
        logger.error("%d checks failed; replay files in %s", len(replays), args.out / outputs.replay_dir)
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {
    "certify": run_certify,
    "mc-risk": run_mc_risk,
    "verify-lemmas": run_verify_lemmas,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(get_settings().log_level)
    return COMMANDS[args.command](args)
