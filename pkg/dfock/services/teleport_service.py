"""Teleport service for protocol execution, closed-form probabilities and Bob's corrections."""
import cmath
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from dfock.config import Settings, get_settings
from dfock.models import DensityMatrix, FockVector, MultiModeState, SingleModeOperator
from dfock.schemas.fock import ProjectorSpec, Truncation
from dfock.schemas.protocol import (
    BFactors,
    BeamSplitterSpec,
    ChannelSpec,
    FiniteOutcomeRecord,
    FiniteRunReport,
    OutcomeRecord,
    PhaseChoice,
    QubitSpec,
    SimplifiedModelResult,
    SimplifiedOutcome,
)
from dfock.services.displacement_service import DisplacementService, matrix_element_row
from dfock.services.fock_service import FockService
from dfock.services.optics_service import OpticsService
from dfock.utils.exceptions import (
    InvalidBasisError,
    NumericDomainError,
    OutOfRangeError,
)

logger = logging.getLogger(__name__)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
RAIL_PHASE = np.diag([1.0, -1.0]).astype(complex)
PHASE_TOLERANCE = 1e-12


def fidelity(reference: np.ndarray, state: np.ndarray) -> float:
    """|<reference|state>|^2 for normalized vectors."""
    return float(abs(np.vdot(reference, state)) ** 2)


def normalize(vector: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vector)
    return vector / norm if norm > 0 else vector


class TeleportService:
    """Service for the hybrid teleportation protocol."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.fock_service = FockService(self.settings)
        self.displacement_service = DisplacementService(self.settings)
        self.optics_service = OpticsService(self.settings)

    # Channel and corrections

    def phase_for_basis(self, k: int, n: int) -> PhaseChoice:
        """
        Channel phase making (-e^{i phi})^{k-n} = -1.

        Odd differences use phi = 0, differences 4l+2 use pi/2 and differences 4l
        use pi/(4l). The flag reports whether the sign condition holds numerically.
        """
        if not 0 <= k < n:
            raise InvalidBasisError(k, n)
        difference = n - k
        if difference % 2 == 1:
            phi, rule = 0.0, "odd"
        elif difference % 4 == 2:
            phi, rule = math.pi / 2.0, "4l+2"
        else:
            phi, rule = math.pi / difference, "4l"
        condition = (-cmath.exp(1j * phi)) ** (k - n)
        valid = abs(condition + 1.0) < PHASE_TOLERANCE
        if not valid:
            logger.warning(f"Phase {phi} for basis ({k},{n}) misses the sign condition by {abs(condition + 1.0):.3e}")
        return PhaseChoice(phi=phi, valid=valid, rule=rule)

    def build_hybrid_channel(self, channel: ChannelSpec, truncation: Optional[Truncation] = None) -> MultiModeState:
        """(|0,-beta>|01> + |0,e^{i phi} beta>|10>) / sqrt(2) on modes 1, 3, 4."""
        truncation = truncation or Truncation(cutoff=self.settings.adaptive_cutoff(channel.require_beta()))
        first = self.displacement_service.coherent_state(channel.first_amplitude, truncation)
        second = self.displacement_service.coherent_state(channel.second_amplitude, truncation)
        amplitudes = np.zeros((truncation.cutoff, 2, 2), dtype=complex)
        amplitudes[:, 0, 1] = first.amplitudes / math.sqrt(2.0)
        amplitudes[:, 1, 0] = second.amplitudes / math.sqrt(2.0)
        return MultiModeState((1, 3, 4), amplitudes)

    def bob_correction(self, j: int, m: int, k: int, phi: float) -> SingleModeOperator:
        """H G^{-(m-k+j)} with G = Z e^{i phi/2} R_Z(phi) = diag(1, -e^{i phi}); H Z^{m-k+j} at phi = 0."""
        power = m - k + j
        gate = np.diag([1.0, (-cmath.exp(1j * phi)) ** (-power)])
        return SingleModeOperator(HADAMARD @ gate)

    def am_reference(self, qubit: QubitSpec, m: int, alpha: float) -> np.ndarray:
        """N_m (a0, A_m a1), evaluated as (a0 c_km, a1 c_nm) up to a global phase."""
        c_k = self.displacement_service.matrix_element(qubit.k, m, alpha)
        c_n = self.displacement_service.matrix_element(qubit.n, m, alpha)
        if abs(c_k) >= self.settings.SINGULAR_FACTOR_THRESHOLD:
            factor = c_n / c_k
            return normalize(np.array([qubit.a0, factor * qubit.a1]))
        return normalize(np.array([qubit.a0 * c_k, qubit.a1 * c_n]))

    # Ideal protocol

    def _cutoffs(
        self, qubit: QubitSpec, alpha: float, beta: float, truncation: Optional[Truncation], m_max: int
    ) -> Tuple[int, int]:
        if truncation is not None:
            if m_max > truncation.cutoff - 5:
                raise OutOfRangeError("m_max", m_max, f"m_max <= cutoff - 5 = {truncation.cutoff - 5}")
            return truncation.cutoff, truncation.cutoff
        first = min(self.settings.adaptive_cutoff(beta), self.settings.MAX_CUTOFF)
        second = max(self.settings.adaptive_cutoff(alpha, extra=qubit.n), m_max + 5)
        return first, second

    def ideal_state(
        self, qubit: QubitSpec, alpha: float, channel: ChannelSpec, cutoffs: Tuple[int, int]
    ) -> MultiModeState:
        """
        t -> 1 limit of the mixed state on modes (1, 2, 3, 4).

        |0,-beta> pairs with D(alpha)|qubit> on |01>, |0,e^{i phi} beta> with
        D(-e^{i phi} alpha)|qubit> on |10>.
        """
        first, second = cutoffs
        photons = np.arange(second)
        envelope = math.exp(-abs(alpha) ** 2 / 2.0)
        rotated = channel.omega * alpha

        def displaced_qubit(amplitude: complex) -> np.ndarray:
            return envelope * (
                qubit.a0 * matrix_element_row(qubit.k, photons, amplitude)
                + qubit.a1 * matrix_element_row(qubit.n, photons, amplitude)
            )

        truncation = Truncation(cutoff=first)
        p = self.displacement_service.coherent_state(channel.first_amplitude, truncation).amplitudes
        q = self.displacement_service.coherent_state(channel.second_amplitude, truncation).amplitudes

        amplitudes = np.zeros((first, second, 2, 2), dtype=complex)
        amplitudes[:, :, 0, 1] = np.multiply.outer(p, displaced_qubit(alpha)) / math.sqrt(2.0)
        amplitudes[:, :, 1, 0] = np.multiply.outer(q, displaced_qubit(rotated)) / math.sqrt(2.0)
        return MultiModeState((1, 2, 3, 4), amplitudes)

    def cat_decomposition(self, state: MultiModeState, beta: float, phi: float) -> MultiModeState:
        """
        Expand mode 1 on the (Psi_+, Psi_-) pair.

        Returns a state whose mode-1 axis has length 2 and holds the expansion
        coefficients, solved through the pair's Gram matrix.
        """
        truncation = Truncation(cutoff=state.cutoff(1))
        cats = np.array([
            self.displacement_service.cat_state(beta, phi, sign, truncation).vector.amplitudes
            for sign in (+1, -1)
        ])
        gram = cats.conj() @ cats.T
        front = np.moveaxis(state.amplitudes, state.axis(1), 0)
        projections = np.tensordot(cats.conj(), front, axes=(1, 0))
        coefficients = np.linalg.solve(gram, projections.reshape(2, -1)).reshape(projections.shape)
        return MultiModeState(state.labels, np.moveaxis(coefficients, 0, state.axis(1)))

    def branch_amplitudes(
        self, qubit: QubitSpec, alpha: float, channel: ChannelSpec, cutoffs: Tuple[int, int]
    ) -> np.ndarray:
        """Unnormalized Bob states indexed [j, m, rail] over (|01>, |10>)."""
        state = self.ideal_state(qubit, alpha, channel, cutoffs)
        expanded = self.cat_decomposition(state, channel.require_beta(), channel.phi)
        return expanded.reordered((1, 2, 3, 4)).dual_rail()

    def run_ideal(
        self,
        qubit: QubitSpec,
        alpha: float,
        channel: ChannelSpec,
        truncation: Optional[Truncation] = None,
        m_max: Optional[int] = None,
    ) -> List[OutcomeRecord]:
        """
        Execute the ideal protocol and record every (j, m) branch up to m_max.

        Handles:
        - Singular amplitude factors (branch flagged, probability kept)
        - Phases that miss the sign condition (records flagged approximate)
        - Mass beyond m_max (aggregated into a residual record)
        """
        m_max = self.settings.DEFAULT_M_MAX if m_max is None else m_max
        cutoffs = self._cutoffs(qubit, alpha, channel.require_beta(), truncation, m_max)
        condition = channel.omega ** (qubit.k - qubit.n)
        approximate = abs(condition + 1.0) > PHASE_TOLERANCE or qubit.difference % 2 == 0
        if abs(condition + 1.0) > PHASE_TOLERANCE:
            logger.warning(f"Channel phase {channel.phi} does not suit basis ({qubit.k},{qubit.n})")

        branches = self.branch_amplitudes(qubit, alpha, channel, cutoffs)
        rails = MultiModeState((1, 2, 3), branches)

        records = []
        for j in (0, 1):
            _, selected = self.fock_service.project_mode(
                rails, 1, ProjectorSpec.number(j), renormalize=False
            )
            for m in range(m_max + 1):
                probability, bob = self.fock_service.project_mode(
                    selected, 2, ProjectorSpec.number(m), renormalize=False
                )
                records.append(self._ideal_record(qubit, alpha, channel, j, m, probability, bob.amplitudes, approximate))

        residual = float(np.sum(np.abs(branches[:, m_max + 1:, :]) ** 2))
        records.append(OutcomeRecord(j=0, m=m_max + 1, probability=residual, residual=True, approximate=approximate))
        total = sum(record.probability for record in records)
        logger.info(
            f"Ideal run ({qubit.k},{qubit.n}) alpha={alpha} beta={channel.beta}: "
            f"{len(records) - 1} branches, total probability {total:.12f}"
        )
        return records

    def _ideal_record(
        self,
        qubit: QubitSpec,
        alpha: float,
        channel: ChannelSpec,
        j: int,
        m: int,
        probability: float,
        amplitudes: np.ndarray,
        approximate: bool,
    ) -> OutcomeRecord:
        singular = abs(self.displacement_service.matrix_element(qubit.k, m, alpha)) < self.settings.SINGULAR_FACTOR_THRESHOLD
        if probability < self.settings.ZERO_PROBABILITY_THRESHOLD:
            return OutcomeRecord(j=j, m=m, probability=probability, singular=singular, approximate=approximate)
        raw = normalize(amplitudes)
        corrected = self.bob_correction(j, m, qubit.k, channel.phi).matrix @ raw
        reference = self.am_reference(qubit, m, alpha)
        return OutcomeRecord(
            j=j,
            m=m,
            probability=probability,
            bob_raw=raw,
            bob_corrected=corrected,
            am_reference=reference,
            fidelity=fidelity(reference, corrected),
            singular=singular,
            approximate=approximate,
        )

    # Closed forms

    def success_probability(self, qubit: QubitSpec, m: int, alpha: float, channel: ChannelSpec) -> float:
        """
        P_m = F^2 |c_km|^2 / (|1 + e^{i phi}|^2 N_m^2) (1/N_+^2 + 1/N_-^2).

        |c_km|^2 / N_m^2 is evaluated as |a0 c_km|^2 + |a1 c_nm|^2 so the value stays
        finite where A_m is singular. Exact for odd basis differences.
        """
        denominator = abs(1.0 + cmath.exp(1j * channel.phi)) ** 2
        if denominator < PHASE_TOLERANCE:
            raise NumericDomainError(f"phi={channel.phi} makes 1 + e^(i phi) vanish")
        if qubit.difference % 2 == 0 and channel.amplitude >= 1.0:
            logger.warning(
                f"Even basis difference with beta={channel.beta} >= 1: probability is only approximate"
            )
        c_k = self.displacement_service.matrix_element(qubit.k, m, alpha)
        c_n = self.displacement_service.matrix_element(qubit.n, m, alpha)
        weight = abs(qubit.a0 * c_k) ** 2 + abs(qubit.a1 * c_n) ** 2
        cat_mass = sum(
            self.displacement_service.cat_norm_squared(channel.amplitude, channel.phi, sign) for sign in (+1, -1)
        )
        probability = math.exp(-abs(alpha) ** 2) * weight * cat_mass / denominator
        if not math.isfinite(probability):
            raise NumericDomainError(f"Success probability at m={m} is not finite")
        return probability

    def is_exact(self, qubit: QubitSpec) -> bool:
        """Closed-form probabilities are exact for odd basis differences."""
        return qubit.difference % 2 == 1

    def two_outcome_mass(self, qubit: QubitSpec, alpha: float, channel: ChannelSpec) -> float:
        """P_k + P_n."""
        return self.success_probability(qubit, qubit.k, alpha, channel) + self.success_probability(
            qubit, qubit.n, alpha, channel
        )

    def bob_density_matrix(
        self,
        qubit: QubitSpec,
        alpha: float,
        channel: ChannelSpec,
        truncation: Optional[Truncation] = None,
    ) -> DensityMatrix:
        """
        Sum of P_jm |raw_jm><raw_jm| over every branch inside the cutoff.

        The result lives on Bob's rails (3, 4); `dual_rail()` gives the 2x2 block
        over (|01>, |10>).
        """
        if (qubit.k, qubit.n) != (0, 1):
            raise InvalidBasisError(qubit.k, qubit.n)
        cutoffs = self._cutoffs(qubit, alpha, channel.require_beta(), truncation, 0)
        branches = self.branch_amplitudes(qubit, alpha, channel, cutoffs).reshape(-1, 2)
        block = branches.T @ branches.conj()
        rails = np.zeros((4, 4), dtype=complex)
        rails[np.ix_([1, 2], [1, 2])] = block / np.trace(block).real
        return DensityMatrix(labels=(3, 4), cutoffs=(2, 2), matrix=rails)

    def bob_density_matrix_closed(self, qubit: QubitSpec, alpha: complex, channel: ChannelSpec) -> np.ndarray:
        """
        Closed form for the (0,1) basis at phi = 0.

        Diagonal (1/2, 1/2); <01|rho|10> = e^{-2|alpha|^2} e^{-2 beta^2} / 2
        (|a0|^2 + (1 - 4|alpha|^2)|a1|^2 - 2 alpha^* a0^* a1 + 2 alpha a0 a1^*).
        """
        if (qubit.k, qubit.n) != (0, 1):
            raise InvalidBasisError(qubit.k, qubit.n)
        if abs(channel.phi) > PHASE_TOLERANCE:
            raise OutOfRangeError("phi", channel.phi, "phi = 0 for the (0,1) basis")
        alpha = complex(alpha)
        a0, a1 = qubit.a0, qubit.a1
        bracket = (
            abs(a0) ** 2
            + (1.0 - 4.0 * abs(alpha) ** 2) * abs(a1) ** 2
            - 2.0 * alpha.conjugate() * a0.conjugate() * a1
            + 2.0 * alpha * a0 * a1.conjugate()
        )
        off_diagonal = math.exp(-2.0 * abs(alpha) ** 2 - 2.0 * channel.require_beta() ** 2) / 2.0 * bracket
        return np.array([[0.5, off_diagonal], [np.conj(off_diagonal), 0.5]], dtype=complex)

    # Finite transmittance

    def run_finite(
        self,
        qubit: QubitSpec,
        alpha: float,
        t: float,
        truncation: Optional[Truncation] = None,
        m_max: Optional[int] = None,
    ) -> FiniteRunReport:
        """
        Push the full four-mode state through a beam splitter of transmittance t.

        beta = alpha t / r. Mode 1 is measured by parity when phi = 0 and through
        the cat expansion at amplitude t beta otherwise; Bob's branch state is the
        reduced density matrix of the rails.
        """
        spec = BeamSplitterSpec.from_transmittance(t)
        if spec.r == 0.0:
            raise OutOfRangeError("t", t, "0 < t < 1")
        m_max = self.settings.DEFAULT_M_MAX if m_max is None else m_max
        beta = spec.beta_for(alpha)
        phi = self.phase_for_basis(qubit.k, qubit.n).phi
        channel = ChannelSpec(beta=beta, phi=phi)
        first, second = self._cutoffs(qubit, alpha, beta, truncation, m_max)
        logger.debug(f"Finite run t={t}: beta={beta:.6f}, cutoffs ({first}, {second})")

        hybrid = self.build_hybrid_channel(channel, Truncation(cutoff=first))
        carried = np.zeros(second, dtype=complex)
        carried[qubit.k] = qubit.a0
        carried[qubit.n] = qubit.a1
        state = self.fock_service.tensor([hybrid, FockVector(Truncation(cutoff=second), carried)], labels=(2,))
        real = self.fock_service.apply_operator(state, self.optics_service.bs_unitary(spec, (first, second)), (1, 2))
        real = real.reordered((1, 2, 3, 4))

        ideal = self.ideal_state(qubit, alpha, channel, (first, second))
        overlap = abs(ideal.overlap(real)) ** 2 / (ideal.norm_squared * real.norm_squared)
        ideal_branches = self.branch_amplitudes(qubit, alpha, channel, (first, second))

        if abs(phi) < PHASE_TOLERANCE:
            outcomes = [
                self.fock_service.project_mode(real, 1, ProjectorSpec.parity(parity), renormalize=False)[1]
                for parity in ("even", "odd")
            ]
        else:
            expanded = self.cat_decomposition(real, spec.t * beta, phi)
            outcomes = [
                self.fock_service.project_mode(expanded, 1, ProjectorSpec.number(j), renormalize=False)[1]
                for j in (0, 1)
            ]

        records = []
        total = 0.0
        for j, selected in enumerate(outcomes):
            for m in range(second):
                probability, branch = self.fock_service.project_mode(
                    selected, 2, ProjectorSpec.number(m), renormalize=False
                )
                total += probability
                if m > m_max or probability < self.settings.ZERO_PROBABILITY_THRESHOLD:
                    continue
                rho = self.fock_service.partial_trace(branch, (3, 4)).dual_rail()
                rho = rho / np.trace(rho).real
                correction = self.bob_correction(j, m, qubit.k, phi).matrix
                corrected = correction @ rho @ correction.conj().T
                reference = self.am_reference(qubit, m, alpha)
                ideal_raw = normalize(ideal_branches[j, m])
                records.append(FiniteOutcomeRecord(
                    j=j,
                    m=m,
                    probability=probability,
                    bob_density=rho,
                    fidelity_corrected=float(np.vdot(reference, corrected @ reference).real),
                    fidelity_to_ideal=float(np.vdot(ideal_raw, rho @ ideal_raw).real),
                ))

        logger.info(f"Finite run t={t} alpha={alpha}: overlap with ideal {overlap:.9f}, total {total:.12f}")
        return FiniteRunReport(
            t=t,
            beta=beta,
            alpha=alpha,
            records=records,
            total_probability=total,
            overlap_to_ideal=overlap,
        )

    # Small-beta model

    def simplified_model(self, qubit: QubitSpec, beta: float, t: float) -> SimplifiedModelResult:
        """
        Two-term coherent expansion |0,+-beta> ~ |0> +- beta|1> pushed through the beam splitter.

        Outcome '01' (photon in mode 2) is corrected by H Z, outcome '10' by Z H Z,
        giving a0|01> + B a1|10> with B01 = 1/alpha and B10 = r/(beta t).
        """
        if (qubit.k, qubit.n) != (0, 1):
            raise InvalidBasisError(qubit.k, qubit.n)
        spec = BeamSplitterSpec.from_transmittance(t)
        if spec.r == 0.0 or beta <= 0.0:
            raise OutOfRangeError("(beta, t)", (beta, t), "beta > 0 and t < 1")
        within_limit = beta <= self.settings.SIMPLIFIED_BETA_LIMIT
        if not within_limit:
            logger.warning(f"Simplified model used at beta={beta} above {self.settings.SIMPLIFIED_BETA_LIMIT}")

        channel = np.zeros((2, 2, 2), dtype=complex)
        channel[:, 0, 1] = (1.0, -beta)
        channel[:, 1, 0] = (1.0, beta)
        hybrid = MultiModeState((1, 3, 4), channel).normalized()
        carried = FockVector(Truncation(cutoff=2), np.array([qubit.a0, qubit.a1]))
        state = self.fock_service.tensor([hybrid, carried], labels=(2,))
        mixed = self.fock_service.apply_operator(state, self.optics_service.bs_unitary(spec, (2, 2)), (1, 2))

        alpha = spec.displacement_for(beta)
        factors = BFactors(b01=1.0 / alpha, b10=spec.r / (beta * spec.t), alpha=alpha)
        corrections = {
            "01": (HADAMARD @ RAIL_PHASE, factors.b01, (0, 1)),
            "10": (RAIL_PHASE @ HADAMARD @ RAIL_PHASE, factors.b10, (1, 0)),
        }
        outcomes = []
        for label, (correction, factor, counts) in corrections.items():
            _, after_first = self.fock_service.project_mode(
                mixed, 1, ProjectorSpec.number(counts[0]), renormalize=False
            )
            probability, bob = self.fock_service.project_mode(
                after_first, 2, ProjectorSpec.number(counts[1]), renormalize=False
            )
            raw = normalize(bob.dual_rail())
            outcomes.append(SimplifiedOutcome(
                label=label,
                probability=probability,
                factor=factor,
                bob_raw=raw,
                bob_corrected=normalize(correction @ raw),
            ))

        amplitude_factor = abs(self.displacement_service.amplitude_factor(0, 1, 1, alpha))
        bridge_gap = abs(factors.b01 - amplitude_factor) / factors.b01
        return SimplifiedModelResult(
            factors=factors, outcomes=outcomes, bridge_gap=bridge_gap, within_limit=within_limit
        )

    # Channel entanglement

    def channel_entropy(self, beta: float, phi: float = 0.0) -> float:
        """Von Neumann entropy (bits) of the rails of the hybrid channel."""
        if beta == 0.0:
            # both components coincide and the rails are pure
            return 0.0
        hybrid = self.build_hybrid_channel(ChannelSpec(beta=beta, phi=phi))
        return self.fock_service.partial_trace(hybrid, (3, 4)).entropy()

    def channel_entropy_closed(self, beta: float, phi: float = 0.0) -> float:
        """Entropy from the eigenvalues (1 +- |<q|p>|)/2 with |<q|p>| = e^{-beta^2 (1 + cos phi)}."""
        overlap = math.exp(-beta ** 2 * (1.0 + math.cos(phi)))
        weights = [(1.0 + overlap) / 2.0, (1.0 - overlap) / 2.0]
        return abs(sum(w * math.log2(w) for w in weights if w > 0.0))
