"""Command-line entry point."""
import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from dfock.cli import register_commands
from dfock.config import get_settings
from dfock.utils.exceptions import USAGE_EXIT_CODE, DfockException, ErrorCode

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Hybrid discrete-continuous teleportation: matrix elements, protocol runs and figure data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default from LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the subcommand and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args, get_settings())
    except DfockException as exc:
        logger.error(f"{exc.error_code.value}: {exc.message}")
        sys.stderr.write(json.dumps(exc.to_dict(), default=str) + "\n")
        return exc.exit_code
    except ValidationError as exc:
        logger.error(f"Invalid parameters: {exc.error_count()} error(s)")
        report = {"error": {"code": ErrorCode.VALIDATION_ERROR.value, "message": str(exc)}}
        sys.stderr.write(json.dumps(report) + "\n")
        return USAGE_EXIT_CODE


if __name__ == "__main__":
    sys.exit(main())
