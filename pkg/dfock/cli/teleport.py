"""teleport subcommand: outcome table of the ideal or finite-transmittance protocol."""
import argparse
import logging
import sys
from typing import List, Optional

import numpy as np

from dfock.config import Settings
from dfock.schemas.fock import Truncation
from dfock.schemas.protocol import ChannelSpec, QubitSpec
from dfock.services.teleport_service import TeleportService
from dfock.utils.csv_writer import write_rows

logger = logging.getLogger(__name__)

HEADER = ("j", "m", "probability", "fid_corrected")
FINITE_HEADER = HEADER + ("fid_to_ideal",)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("teleport", help="Run the protocol and export its outcome table")
    parser.add_argument("--k", type=int, default=0, help="First basis photon number")
    parser.add_argument("--n", type=int, default=1, help="Second basis photon number")
    parser.add_argument("--a0", type=complex, required=True, help="Amplitude of |k>, e.g. 0.6 or 0.6+0.1j")
    parser.add_argument("--a1", type=complex, required=True, help="Amplitude of |n>")
    parser.add_argument("--alpha", type=float, required=True, help="Displacement amplitude")
    parser.add_argument("--beta", type=float, default=2.0, help="Channel amplitude of the ideal run")
    parser.add_argument("--t", type=float, default=None, help="Beam-splitter transmittance (finite run)")
    parser.add_argument("--m-max", type=int, default=None, help="Largest recorded photon count")
    parser.add_argument("--cutoff", type=int, default=None, help="Truncation override")
    parser.add_argument("--out", default=None, help="Output CSV path (stdout when omitted)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    qubit, rescaled = QubitSpec.normalized(args.k, args.n, args.a0, args.a1)
    if rescaled:
        logger.warning(f"Qubit amplitudes rescaled to a0={qubit.a0}, a1={qubit.a1}")
    truncation = Truncation(cutoff=args.cutoff) if args.cutoff is not None else None
    service = TeleportService(settings)

    if args.t is not None:
        report = service.run_finite(qubit, args.alpha, args.t, truncation, args.m_max)
        rows = [
            (r.j, r.m, r.probability, r.fidelity_corrected, r.fidelity_to_ideal)
            for r in report.records
        ]
        write_rows(args.out, FINITE_HEADER, rows, settings.CSV_SIGNIFICANT_DIGITS)
        summary = [
            f"records: {len(rows)} -> {args.out or 'stdout'}",
            f"total probability: {report.total_probability:.12f}",
            f"beta: {report.beta:.6f}, overlap with ideal: {report.overlap_to_ideal:.9f}",
        ]
        print_summary(summary, args.out)
        return 0

    phase = service.phase_for_basis(qubit.k, qubit.n)
    channel = ChannelSpec(beta=args.beta, phi=phase.phi)
    records = service.run_ideal(qubit, args.alpha, channel, truncation, args.m_max)
    rows = [
        (r.j, r.m, r.probability, "" if r.fidelity is None else r.fidelity)
        for r in records
    ]
    write_rows(args.out, HEADER, rows, settings.CSV_SIGNIFICANT_DIGITS)
    total = sum(r.probability for r in records)
    summary = [
        f"records: {len(records)} -> {args.out or 'stdout'}",
        f"total probability: {total:.12f}",
    ]

    if (qubit.k, qubit.n) == (0, 1):
        diagonal = service.bob_density_matrix(qubit, args.alpha, channel, truncation).dual_rail().diagonal().real
        deviation = float(np.max(np.abs(diagonal - 0.5)))
        summary.append(
            f"no-signalling diagonal: {diagonal[0]:.12f} {diagonal[1]:.12f}, max deviation {deviation:.3e}"
        )
    print_summary(summary, args.out)
    return 0


def print_summary(lines: List[str], out: Optional[str]) -> None:
    """Summary lines go to stdout unless the table itself is written there."""
    stream = sys.stderr if out in (None, "-") else sys.stdout
    for line in lines:
        logger.info(line)
        stream.write(line + "\n")
