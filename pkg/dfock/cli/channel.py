"""channel-entropy subcommand: entanglement of the hybrid channel."""
import argparse
import logging

from dfock.config import Settings
from dfock.services.teleport_service import TeleportService
from dfock.utils.csv_writer import write_rows
from dfock.utils.exceptions import OutOfRangeError

logger = logging.getLogger(__name__)

HEADER = ("beta", "phi", "entropy", "closed_form")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("channel-entropy", help="Entropy of the dual-rail half of the channel")
    parser.add_argument("--beta", type=float, nargs="+", required=True, help="Coherent amplitudes")
    parser.add_argument("--phi", type=float, default=0.0, help="Channel phase")
    parser.add_argument("--out", default=None, help="Output CSV path (stdout when omitted)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    service = TeleportService(settings)
    rows = []
    for beta in args.beta:
        if beta < 0:
            raise OutOfRangeError("beta", beta, "beta >= 0")
        entropy = service.channel_entropy(beta, args.phi)
        rows.append((beta, args.phi, entropy, service.channel_entropy_closed(beta, args.phi)))
    write_rows(args.out, HEADER, rows, settings.CSV_SIGNIFICANT_DIGITS)
    return 0
