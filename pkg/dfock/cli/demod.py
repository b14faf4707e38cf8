"""demod subcommand: teleportation plus demodulation success curves."""
import argparse
import logging

from dfock.config import Settings
from dfock.schemas.demodulation import Branch, Strategy
from dfock.schemas.sweep import DemodPoint, SweepConfig
from dfock.services.figure_service import FigureService, a1_grid
from dfock.utils.csv_writer import write_rows
from dfock.utils.exceptions import StrategyMismatchError

logger = logging.getLogger(__name__)

HEADER = ("alpha", "a1", "value", "formula_id")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("demod", help="Export demodulation success probabilities")
    parser.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    parser.add_argument("--branch", required=True, choices=[b.value for b in Branch])
    parser.add_argument("--alpha", type=float, nargs="+", required=True, help="Displacement amplitudes in (0, 1)")
    parser.add_argument("--a1-count", type=int, default=101, help="Grid points over |a1| in [0, 1]")
    parser.add_argument("--higher-order", action="store_true", help="Include the three-bit outcomes")
    parser.add_argument("--pipeline", action="store_true", help="Simulate demodulation instead of closed forms")
    parser.add_argument("--surrogate-t", type=float, default=None, help="Beam-splitter surrogate for the displacement")
    parser.add_argument("--out", default=None, help="Output CSV path (stdout when omitted)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    strategy, branch = Strategy(args.strategy), Branch(args.branch)
    if args.surrogate_t is not None and strategy != Strategy.COHERENT:
        raise StrategyMismatchError(strategy.value, branch.value, "--surrogate-t applies to coherent demodulation")
    if args.surrogate_t is not None and not args.pipeline:
        raise StrategyMismatchError(strategy.value, branch.value, "--surrogate-t requires --pipeline")
    config = SweepConfig(command="demod", alphas=args.alpha, a1_count=args.a1_count, out=args.out)
    service = FigureService(settings)

    if args.pipeline:
        points = pipeline_points(service, strategy, branch, config, args.higher_order, args.surrogate_t)
    else:
        points = service.demod_curves(strategy, branch, config.alphas, config.a1_count, args.higher_order)
    rows = ((point.alpha, point.a1, point.value, point.formula_id) for point in points)
    write_rows(config.out, HEADER, rows, settings.CSV_SIGNIFICANT_DIGITS)
    return 0


def pipeline_points(service, strategy, branch, config, higher_order, surrogate_t):
    formula_id = f"{strategy.value}-{branch.value}-pipeline"
    points = []
    for alpha in config.alphas:
        for a1 in a1_grid(config.a1_count):
            am = service.am_qubit(branch, alpha, float(a1))
            report = service.demodulation_service.demodulate(am, alpha, strategy, higher_order, surrogate_t)
            points.append(DemodPoint(alpha=alpha, a1=float(a1), value=report.total_probability, formula_id=formula_id))
    return points
