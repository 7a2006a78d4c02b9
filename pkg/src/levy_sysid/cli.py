# levy_sysid/cli.py
"""
Command line entry point.

    levy-sysid run --config <path> [--out <dir>] [--threads k] [--replications R]
    levy-sysid mc  --config <path> [--out <dir>] [--threads k] [--replications R]

``run`` executes the pipeline once on ``config.seed`` when a single
replication is requested and otherwise behaves like ``mc``. Exit codes:
0 success, 2 invalid configuration or unstable system, 3 too few successful
replications, 4 report I/O failure.
"""
import argparse
import asyncio
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from levy_sysid.exceptions import LevySysIdError
from levy_sysid.models.experiment_config import ExperimentConfig
from levy_sysid.monte_carlo import run_monte_carlo
from levy_sysid.pipeline import run_pipeline
from levy_sysid.reporting import emit_report
from levy_sysid.storage.base import ReportStoreProvider
from levy_sysid.storage.providers.file import FileReportStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levy-sysid",
        description="Identify ARMA systems driven by Lévy noise with ECF methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run the three-stage pipeline once (or a study when R > 1)"),
        ("mc", "run a Monte Carlo replication study"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="experiment config (JSON)")
        cmd.add_argument("--out", default=None, help="output directory (overrides config)")
        cmd.add_argument("--threads", type=int, default=1, help="worker threads")
        cmd.add_argument("--replications", type=int, default=None,
                         help="number of replications (overrides config)")
        cmd.add_argument("--log-level", default="INFO",
                         choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def load_config(path: str) -> ExperimentConfig:
    return ExperimentConfig.load(path)


async def execute(args: argparse.Namespace, config: ExperimentConfig) -> List[str]:
    replications = args.replications or config.replications
    formats = config.output.formats
    if args.command == "run" and replications == 1:
        result = run_pipeline(config)
        return await emit_report(result, formats, config=config.model_dump(mode="json"))
    report = await run_monte_carlo(config, threads=args.threads, replications=replications)
    return await emit_report(report, formats)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.threads < 1 or (args.replications is not None and args.replications < 1):
        logger.error("--threads and --replications must be positive")
        return EXIT_CONFIG

    try:
        config = load_config(args.config)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        logger.error(f"Cannot load config {args.config}: {e}")
        return EXIT_CONFIG
    except LevySysIdError as e:
        logger.error(f"Invalid config {args.config}: {e}")
        return e.exit_code

    ReportStoreProvider.set_store(FileReportStore(args.out or config.output.directory))
    try:
        written = asyncio.run(execute(args, config))
    except LevySysIdError as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO

    logger.info(f"Done: {', '.join(written)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
