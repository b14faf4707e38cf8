"""figure subcommand: curve data of the probability figures."""
import argparse
import logging

from dfock.config import Settings
from dfock.schemas.sweep import FigureId, SweepConfig
from dfock.services.figure_service import DEMOD_ALPHAS, FIGURES, FigureService
from dfock.utils.csv_writer import write_rows

logger = logging.getLogger(__name__)

HEADER = ("a1", "curve", "value")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("figure", help="Export probability curves over |a1|")
    parser.add_argument("--fig", required=True, choices=[figure.value for figure in FigureId], help="Figure panel")
    parser.add_argument("--alpha", type=float, nargs="+", default=None, help="Override the panel's alpha values")
    parser.add_argument("--a1-count", type=int, default=101, help="Grid points over |a1| in [0, 1]")
    parser.add_argument("--out", default=None, help="Output CSV path (stdout when omitted)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    figure = FigureId(args.fig)
    defaults = [FIGURES[figure].alpha] if FIGURES[figure].alpha else list(DEMOD_ALPHAS)
    config = SweepConfig(
        command="figure",
        alphas=args.alpha or defaults,
        a1_count=args.a1_count,
        out=args.out,
    )
    points = FigureService(settings).curves(figure, args.alpha, config.a1_count)
    rows = ((point.a1, point.curve, point.value) for point in points)
    write_rows(config.out, HEADER, rows, settings.CSV_SIGNIFICANT_DIGITS)
    return 0
