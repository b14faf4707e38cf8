"""matrix-elements subcommand: table of c_ln(alpha)."""
import argparse
import cmath
import logging

from dfock.config import Settings
from dfock.services.displacement_service import DisplacementService
from dfock.utils.csv_writer import write_rows
from dfock.utils.exceptions import OutOfRangeError

logger = logging.getLogger(__name__)

HEADER = ("l", "n", "re", "im")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("matrix-elements", help="Export c_ln(alpha) = <n|D(alpha)|l> / F")
    parser.add_argument("--alpha", type=float, required=True, help="Displacement magnitude")
    parser.add_argument("--alpha-phase", type=float, default=0.0, help="Displacement phase in radians")
    parser.add_argument("--lmax", type=int, default=3, help="Largest row index l")
    parser.add_argument("--nmax", type=int, default=10, help="Largest column index n")
    parser.add_argument("--out", default=None, help="Output CSV path (stdout when omitted)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    if args.lmax < 0 or args.nmax < 0:
        raise OutOfRangeError("(lmax, nmax)", (args.lmax, args.nmax), "lmax, nmax >= 0")
    alpha = args.alpha * cmath.exp(1j * args.alpha_phase)
    table = DisplacementService(settings).matrix_element_table(alpha, max(args.lmax, args.nmax) + 1)
    rows = (
        (l, n, float(table.values[l, n].real), float(table.values[l, n].imag))
        for l in range(args.lmax + 1)
        for n in range(args.nmax + 1)
    )
    write_rows(args.out, HEADER, rows, settings.CSV_SIGNIFICANT_DIGITS)
    return 0
