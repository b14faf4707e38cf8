"""Figure service producing the probability curves over |a1|."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dfock.config import Settings, get_settings
from dfock.schemas.demodulation import AMQubit, Branch, Strategy
from dfock.schemas.protocol import ChannelSpec, QubitSpec
from dfock.schemas.sweep import CurvePoint, DemodPoint, FigureId
from dfock.services.demodulation_service import DemodulationService
from dfock.services.teleport_service import TeleportService
from dfock.utils.exceptions import OutOfRangeError, StrategyMismatchError

logger = logging.getLogger(__name__)

DEMOD_ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)


@dataclass(frozen=True)
class FigureSpec:
    """
    Parameters of one figure panel.

    `kind` is "direct" (photon-count probabilities), "am" (AM qubit teleportation),
    "coherent" or "swap" (demodulation success over the alpha family). For the
    first two kinds curves 1-3 are the probabilities at `outcomes` and curve 4 is
    the sum of curves 1 and 2.
    """

    kind: str
    k: int
    n: int
    alpha: float = 0.0
    outcomes: Tuple[int, ...] = ()
    branch: Optional[Branch] = None


FIGURES: Dict[FigureId, FigureSpec] = {
    FigureId.FIG_2A: FigureSpec("direct", 0, 1, 0.2, (0, 1, 2)),
    FigureId.FIG_2B: FigureSpec("direct", 0, 2, 0.2, (0, 2, 1)),
    FigureId.FIG_2C: FigureSpec("direct", 0, 3, 0.1, (0, 3, 2)),
    FigureId.FIG_2D: FigureSpec("direct", 1, 2, 0.2, (1, 2, 3)),
    FigureId.FIG_3A: FigureSpec("am", 0, 1, 0.2, (0, 1, 2), Branch.K_BRANCH),
    FigureId.FIG_3B: FigureSpec("am", 0, 1, 0.3, (1, 0, 2), Branch.N_BRANCH),
    FigureId.FIG_3C: FigureSpec("am", 1, 2, 0.1, (1, 2, 3), Branch.K_BRANCH),
    FigureId.FIG_3D: FigureSpec("am", 1, 2, 0.2, (2, 1, 0), Branch.N_BRANCH),
    FigureId.FIG_4A: FigureSpec("coherent", 0, 1, branch=Branch.K_BRANCH),
    FigureId.FIG_4B: FigureSpec("coherent", 0, 1, branch=Branch.N_BRANCH),
    FigureId.FIG_5A: FigureSpec("swap", 0, 1, branch=Branch.K_BRANCH),
    FigureId.FIG_5B: FigureSpec("swap", 0, 1, branch=Branch.N_BRANCH),
}


def a1_grid(count: int) -> np.ndarray:
    if count < 1:
        raise OutOfRangeError("a1_count", count, "count >= 1")
    return np.linspace(0.0, 1.0, count) if count > 1 else np.zeros(1)


class FigureService:
    """Service for curve data of the probability figures."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.teleport_service = TeleportService(self.settings)
        self.demodulation_service = DemodulationService(self.settings)

    def photon_count_probability(self, qubit: QubitSpec, m: int, alpha: float) -> float:
        """P_m without the cat-overlap correction, i.e. F^2 (|a0 c_km|^2 + |a1 c_nm|^2)."""
        phi = self.teleport_service.phase_for_basis(qubit.k, qubit.n).phi
        return self.teleport_service.success_probability(qubit, m, alpha, ChannelSpec.formula_limit(phi))

    def curves(
        self,
        figure: FigureId,
        alphas: Optional[Sequence[float]] = None,
        a1_count: int = 101,
    ) -> List[CurvePoint]:
        """
        Curve data of a figure, ordered by curve then by |a1|.

        `alphas` overrides the panel's displacement (one value) or the alpha family
        of the demodulation panels.
        """
        spec = FIGURES[FigureId(figure)]
        grid = a1_grid(a1_count)
        if spec.kind in ("direct", "am"):
            alpha = alphas[0] if alphas else spec.alpha
            values = self._outcome_curves(spec, alpha, grid)
        else:
            family = tuple(alphas) if alphas else DEMOD_ALPHAS
            strategy = Strategy(spec.kind)
            values = [
                [self.demod_value(strategy, spec.branch, alpha, a1) for a1 in grid]
                for alpha in family
            ]

        points = [
            CurvePoint(a1=float(a1), curve=index + 1, value=float(value))
            for index, curve in enumerate(values)
            for a1, value in zip(grid, curve)
        ]
        logger.info(f"Figure {FigureId(figure).value}: {len(values)} curves over {len(grid)} points")
        return points

    def _outcome_curves(self, spec: FigureSpec, alpha: float, grid: np.ndarray) -> List[List[float]]:
        curves: List[List[float]] = [[] for _ in range(len(spec.outcomes) + 1)]
        for a1 in grid:
            qubit = QubitSpec.from_magnitude(a1, spec.k, spec.n)
            if spec.kind == "direct":
                values = [self.photon_count_probability(qubit, m, alpha) for m in spec.outcomes]
            else:
                am = self.demodulation_service.make_am_qubit(qubit, spec.branch, alpha)
                values = [self.demodulation_service.am_probability(am, m, alpha) for m in spec.outcomes]
            values.append(values[0] + values[1])
            for curve, value in zip(curves, values):
                curve.append(value)
        return curves

    def am_qubit(self, branch: Branch, alpha: float, a1: float) -> AMQubit:
        qubit = QubitSpec.from_magnitude(a1)
        return self.demodulation_service.make_am_qubit(qubit, branch, alpha)

    def demod_value(
        self, strategy: Strategy, branch: Branch, alpha: float, a1: float, higher_order: bool = False
    ) -> float:
        """Closed-form teleportation plus demodulation success for the (0,1) basis."""
        am = self.am_qubit(branch, alpha, a1)
        if strategy == Strategy.COHERENT:
            return self.demodulation_service.coherent_closed_form(am, alpha, higher_order)
        return self.demodulation_service.swap_closed_form(am, alpha, higher_order)

    def demod_curves(
        self,
        strategy: Strategy,
        branch: Branch,
        alphas: Sequence[float],
        a1_count: int = 101,
        higher_order: bool = False,
    ) -> List[DemodPoint]:
        """Rows of `alpha,a1,value,formula_id` in alpha-major grid order."""
        strategy, branch = Strategy(strategy), Branch(branch)
        if branch not in (Branch.K_BRANCH, Branch.N_BRANCH):
            raise StrategyMismatchError(strategy.value, str(branch), "unknown branch")
        formula_id = f"{strategy.value}-{branch.value}" + ("-higher" if higher_order else "")
        grid = a1_grid(a1_count)
        points = []
        for alpha in alphas:
            for a1 in grid:
                base = self.demod_value(strategy, branch, alpha, a1)
                value = self.demod_value(strategy, branch, alpha, a1, higher_order) if higher_order else base
                if value < base:
                    logger.warning(f"{formula_id} below base at alpha={alpha}, |a1|={a1}")
                points.append(DemodPoint(alpha=alpha, a1=float(a1), value=value, formula_id=formula_id))
        logger.info(f"Demodulation curves {formula_id}: {len(points)} points")
        return points
