"""Optics service for beam-splitter lifts and the displacement they induce."""
import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import comb, gammaln

from dfock.config import Settings, get_settings
from dfock.models import FockVector, PhotonBlock, TwoModeOperator
from dfock.schemas.fock import Truncation
from dfock.schemas.protocol import BeamSplitterSpec, QubitSpec
from dfock.services.displacement_service import DisplacementService, matrix_element_row
from dfock.services.fock_service import FockService
from dfock.utils.exceptions import OutOfRangeError

logger = logging.getLogger(__name__)


def binomial_coefficients(slope: float, offset: float, power: int) -> np.ndarray:
    """Coefficients of (slope * x + offset)^power in increasing powers of x."""
    index = np.arange(power + 1)
    return comb(power, index) * np.power(slope, index) * np.power(offset, power - index)


@lru_cache(maxsize=32)
def lift_beam_splitter(t: float, r: float, cutoffs: Tuple[int, int]) -> TwoModeOperator:
    """
    Fock lift of a1^dagger -> t a1^dagger - r a2^dagger, a2^dagger -> r a1^dagger + t a2^dagger.

    |n1, n2> maps onto the expansion of (t x - r)^n1 (r x + t)^n2, where the power
    of x counts photons left in the first mode. Only basis states inside the
    cutoff box are kept.
    """
    first_cutoff, second_cutoff = cutoffs
    blocks = []
    for total in range(first_cutoff + second_cutoff - 1):
        first = np.arange(max(0, total - second_cutoff + 1), min(total, first_cutoff - 1) + 1)
        second = total - first
        log_out = 0.5 * (gammaln(first + 1) + gammaln(second + 1))
        matrix = np.zeros((len(first), len(first)), dtype=complex)
        for column, (n1, n2) in enumerate(zip(first, second)):
            expansion = np.convolve(
                binomial_coefficients(t, -r, int(n1)),
                binomial_coefficients(r, t, int(n2)),
            )
            log_in = 0.5 * (gammaln(n1 + 1) + gammaln(n2 + 1))
            matrix[:, column] = expansion[first] * np.exp(log_out - log_in)
        blocks.append(PhotonBlock(total, first, matrix))
    return TwoModeOperator((first_cutoff, second_cutoff), tuple(blocks))


class OpticsService:
    """Service for beam-splitter operations."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.fock_service = FockService(self.settings)
        self.displacement_service = DisplacementService(self.settings)

    def bs_unitary(
        self,
        spec: BeamSplitterSpec,
        cutoffs: Tuple[int, int],
        inverse: bool = False,
    ) -> TwoModeOperator:
        """Block-diagonal lift of the beam splitter; `inverse` lifts the transposed matrix."""
        r = -spec.r if inverse else spec.r
        operator = lift_beam_splitter(float(spec.t), float(r), tuple(int(c) for c in cutoffs))
        logger.debug(f"Beam splitter t={spec.t} r={r} lifted on cutoffs {cutoffs}")
        return operator

    @staticmethod
    def coherent_outputs(gamma: complex, delta: complex, spec: BeamSplitterSpec) -> Tuple[complex, complex]:
        """|gamma>|delta> -> |t gamma + r delta>|-r gamma + t delta>."""
        return (
            spec.t * gamma + spec.r * delta,
            -spec.r * gamma + spec.t * delta,
        )

    def htbs_displacement_check(self, beta: float, target: FockVector, t: float) -> float:
        """
        Fidelity between the beam-splitter output and |0,beta> x D(-alpha)|target>.

        alpha = beta r / t. The coherent input keeps its amplitude in the reference
        state, so the fidelity reaches 1 exactly at t = 1.
        """
        spec = BeamSplitterSpec.from_transmittance(t)
        alpha = spec.displacement_for(beta)
        occupied = np.nonzero(np.abs(target.amplitudes) > 0)[0]
        top = int(occupied[-1]) if occupied.size else 0

        first = Truncation(cutoff=self.settings.adaptive_cutoff(beta))
        second = Truncation(cutoff=max(target.cutoff, self.settings.adaptive_cutoff(alpha, extra=top)))
        padded = np.zeros(second.cutoff, dtype=complex)
        padded[: target.cutoff] = target.amplitudes

        coherent = self.displacement_service.coherent_state(beta, first)
        state = self.fock_service.tensor([coherent, FockVector(second, padded)], labels=(1, 2))
        real = self.fock_service.apply_operator(
            state, self.bs_unitary(spec, (first.cutoff, second.cutoff)), (1, 2)
        )

        shifted = np.zeros(second.cutoff, dtype=complex)
        for level in occupied:
            shifted += padded[level] * self.displacement_service.displaced_number_state(
                int(level), -alpha, second
            ).amplitudes
        ideal = self.fock_service.tensor([coherent, FockVector(second, shifted)], labels=(1, 2))

        overlap = abs(ideal.overlap(real)) ** 2
        fidelity = overlap / (ideal.norm_squared * real.norm_squared)
        logger.info(f"HTBS check beta={beta} t={t} alpha={alpha:.6f}: fidelity {fidelity:.12f}")
        return float(fidelity)

    def front_end_fidelity(self, qubit: QubitSpec, alpha: float, t: float) -> float:
        """
        Closed-form estimate of the real-versus-ideal fidelity of the mixing step.

        F^4 exp(-|beta|^2 (1 - 1/t)^2) / 4 * (sum_m t^m |f_m(-alpha)|^2 + sum_m t^m |f_m(alpha)|^2)^2
        with f_m(x) = a0 c_km(x) + a1 c_nm(x).
        """
        if not 0.0 < t <= 1.0:
            raise OutOfRangeError("t", t, "0 < t <= 1")
        # beta (1 - 1/t) rewritten so that t = 1 needs no division by r
        shift = alpha * math.sqrt((1.0 - t) / (1.0 + t))
        cutoff = self.settings.adaptive_cutoff(alpha, extra=qubit.n)
        photons = np.arange(cutoff)
        weights = np.power(t, photons)

        sums = []
        for sign in (-1.0, 1.0):
            amplitude = sign * alpha
            f = (
                qubit.a0 * matrix_element_row(qubit.k, photons, amplitude)
                + qubit.a1 * matrix_element_row(qubit.n, photons, amplitude)
            )
            sums.append(float(np.sum(weights * np.abs(f) ** 2)))

        envelope = math.exp(-abs(alpha) ** 2 / 2.0)
        fidelity = envelope ** 4 * math.exp(-shift ** 2) / 4.0 * sum(sums) ** 2
        return float(fidelity)

