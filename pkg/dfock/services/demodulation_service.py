"""Demodulation service for amplitude-modulated qubits: preparation, teleportation and recovery."""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from dfock.config import Settings, get_settings
from dfock.models import MultiModeState
from dfock.schemas.demodulation import (
    AMOutcome,
    AMQubit,
    AMTeleportReport,
    Branch,
    CombinationMode,
    DemodOutcome,
    DemodReport,
    Gammas,
    Strategy,
)
from dfock.schemas.fock import ProjectorSpec, Truncation
from dfock.schemas.protocol import BeamSplitterSpec, ChannelSpec, QubitSpec
from dfock.services.displacement_service import DisplacementService
from dfock.services.fock_service import FockService
from dfock.services.optics_service import OpticsService
from dfock.services.teleport_service import RAIL_PHASE, TeleportService, fidelity, normalize
from dfock.utils.exceptions import (
    InvalidBasisError,
    NumericDomainError,
    OutOfRangeError,
    SingularFactorError,
    StrategyMismatchError,
)

logger = logging.getLogger(__name__)

BALANCED_SPLITTER = BeamSplitterSpec(t=1.0 / math.sqrt(2.0), r=1.0 / math.sqrt(2.0))
SWAP_OUTCOMES = {"10": (1, 0), "01": (0, 1)}
SWAP_FAILURE = "failure"
PROBABILITY_SLACK = 1e-9

COMBINATION_INPUTS = {
    CombinationMode.DIRECT: ("p1", "p2", "success_k", "success_n"),
    CombinationMode.CHARLES_PREP: ("teleport", "demod", "residual"),
    CombinationMode.ALICE_PREP: ("q_k", "q_n", "total_k", "total_n"),
}


def amplitude_bracket(gamma: float, alpha: float) -> float:
    """exp(-g^2) a^2 ((1 - g^2)^2 + g^2), the first-order coherent demodulation term."""
    return math.exp(-gamma ** 2) * alpha ** 2 * ((1.0 - gamma ** 2) ** 2 + gamma ** 2)


class DemodulationService:
    """
    Service for amplitude-modulated qubits.

    Handles:
    - Preparing AM qubits and teleporting them
    - Coherent demodulation by displacing one rail and counting photons
    - Swap demodulation against a known auxiliary qubit
    - Closed-form success probabilities and their combinations
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.fock_service = FockService(self.settings)
        self.displacement_service = DisplacementService(self.settings)
        self.optics_service = OpticsService(self.settings)
        self.teleport_service = TeleportService(self.settings)

    # AM qubits

    def make_am_qubit(self, qubit: QubitSpec, branch: Branch, alpha: float) -> AMQubit:
        """Multiply a1 by 1/A_k (k-branch) or 1/A_n (n-branch)."""
        target = qubit.k if branch == Branch.K_BRANCH else qubit.n
        factor = self.displacement_service.amplitude_factor(qubit.k, qubit.n, target, alpha)
        if abs(factor) < self.settings.SINGULAR_FACTOR_THRESHOLD:
            raise SingularFactorError(qubit.k, qubit.n, target, alpha)
        return AMQubit(k=qubit.k, n=qubit.n, a0=qubit.a0, a1=qubit.a1, factor=1.0 / factor, branch=branch)

    def target_outcome(self, am: AMQubit) -> int:
        """Photon count at which Bob receives the original qubit."""
        return am.n if am.branch == Branch.N_BRANCH else am.k

    def am_probability(self, am: AMQubit, m: int, alpha: float) -> float:
        """
        Probability of photon count m when the AM qubit is teleported.

        F^2 N_AM^2 (|a0 c_km|^2 + |factor a1 c_nm|^2): P_t1, P_t2 at the target count,
        the residual probabilities elsewhere.
        """
        c_k = self.displacement_service.matrix_element(am.k, m, alpha)
        c_n = self.displacement_service.matrix_element(am.n, m, alpha)
        weight = abs(am.a0 * c_k) ** 2 + abs(am.factor * am.a1 * c_n) ** 2
        return math.exp(-abs(alpha) ** 2) * weight / am.norm_squared

    def teleport_probability(self, am: AMQubit, alpha: float) -> float:
        """P_t1 = F^2 |c_kk|^2 N_AM^2 or P_t2 = F^2 |c_kn|^2 N_AM^2."""
        if am.branch is None:
            raise StrategyMismatchError("teleport", "none", "AM qubit carries no branch")
        c_k = self.displacement_service.matrix_element(am.k, self.target_outcome(am), alpha)
        return math.exp(-abs(alpha) ** 2) * abs(c_k) ** 2 / am.norm_squared

    def residual_qubit(self, am: AMQubit, m: int, alpha: float) -> Optional[AMQubit]:
        """AM qubit Bob holds after outcome m: the stored factor times A_m."""
        try:
            factor = self.displacement_service.amplitude_factor(am.k, am.n, m, alpha)
        except SingularFactorError:
            logger.debug(f"Singular amplitude factor at m={m}, alpha={alpha}; no residual qubit")
            return None
        return am.with_factor(am.factor * factor)

    def teleport_am(
        self,
        am: AMQubit,
        alpha: float,
        channel: Optional[ChannelSpec] = None,
        m_max: Optional[int] = None,
    ) -> AMTeleportReport:
        """
        Outcome table for teleporting an AM qubit.

        Probabilities come from the general success-probability formula applied to the
        modulated qubit; the residual at each m carries factor * A_m.
        """
        m_max = self.settings.DEFAULT_M_MAX if m_max is None else m_max
        if channel is None:
            phi = self.teleport_service.phase_for_basis(am.k, am.n).phi
            channel = ChannelSpec.formula_limit(phi)
        vector = am.vector
        modulated, _ = QubitSpec.normalized(am.k, am.n, vector[0], vector[1])

        outcomes = []
        target = self.target_outcome(am)
        success = 0.0
        for m in range(m_max + 1):
            probability = self.teleport_service.success_probability(modulated, m, alpha, channel)
            residual = self.residual_qubit(am, m, alpha)
            recovered = residual is not None and residual.is_original()
            if m == target:
                success = probability
            outcomes.append(AMOutcome(m=m, probability=probability, recovered=recovered, residual=residual))

        branch = am.branch or Branch.K_BRANCH
        if am.branch is None:
            success = sum(outcome.probability for outcome in outcomes if outcome.recovered)
        logger.info(f"AM teleport ({branch.value}-branch) alpha={alpha}: success probability {success:.12f}")
        return AMTeleportReport(branch=branch, alpha=alpha, success_probability=success, outcomes=outcomes)

    # Gammas

    def solve_gammas(self, alpha: float) -> Gammas:
        """
        Displacements for the coherent demodulation steps.

        gamma1 solves K g = 1 - g^2 with K = (1 - a^2) / a^2 on [0, 1]; the root
        continuous with gamma1 -> a^2 as a -> 0 is kept.
        """
        if not 0.0 < alpha < 1.0:
            raise NumericDomainError(
                f"alpha={alpha} outside (0, 1): 1 - alpha^2 changes sign",
                details={"alpha": alpha},
            )
        slope = (1.0 - alpha ** 2) / alpha ** 2
        gamma1 = brentq(
            lambda gamma: slope * gamma - (1.0 - gamma ** 2), 0.0, 1.0, xtol=self.settings.ROOT_TOLERANCE
        )
        discarded = (-slope - math.sqrt(slope ** 2 + 4.0)) / 2.0
        logger.debug(f"gamma1 root {gamma1} kept, root {discarded} discarded at alpha={alpha}")
        return Gammas(
            gamma1=float(gamma1),
            gamma2=alpha ** 2 / (1.0 - alpha ** 2),
            gamma3=-alpha ** 2 * (1.0 - alpha ** 2) / (2.0 - alpha ** 2),
            gamma4=-(1.0 - alpha ** 2) / (2.0 - alpha ** 2),
        )

    # Coherent demodulation

    def _require_first_basis(self, am: AMQubit, strategy: Strategy) -> None:
        if (am.k, am.n) != (0, 1):
            raise InvalidBasisError(am.k, am.n)
        if am.branch is None:
            raise StrategyMismatchError(strategy.value, "none", "AM qubit carries no branch")

    def demodulation_residual(self, am: AMQubit, alpha: float) -> AMQubit:
        """AM qubit left after the teleportation outcome that misses the target count."""
        miss = am.n if am.branch == Branch.K_BRANCH else am.k
        residual = self.residual_qubit(am, miss, alpha)
        if residual is None:
            raise SingularFactorError(am.k, am.n, miss, alpha)
        return residual

    def coherent_plan(self, branch: Branch, gammas: Gammas) -> Tuple[float, int]:
        """Displacement applied to the rail and the photon count that recovers the qubit."""
        if branch == Branch.K_BRANCH:
            return -gammas.gamma1, 1
        return gammas.gamma2, 0

    def condition_residual(self, residual: AMQubit, displacement: float, success_count: int) -> float:
        """|factor c_0s(d) / c_1s(d) - 1| at the recovering count s."""
        c_0 = self.displacement_service.matrix_element(0, success_count, displacement)
        c_1 = self.displacement_service.matrix_element(1, success_count, displacement)
        return abs(residual.factor * c_0 / c_1 - 1.0)

    def coherent_closed_form(self, am: AMQubit, alpha: float, higher_order: bool = False) -> float:
        """
        Teleportation plus coherent demodulation success probability.

        k-branch: e^{-a^2} N^2 (1 + bracket(gamma1) [+ e^{-gamma3^2} a^4/2 ((1 - gamma3^2)^2 + gamma3^2)]).
        n-branch: e^{-a^2} a^2 N^2 (1 + e^{-gamma2^2} gamma2^2 / a^2 [+ e^{-gamma4^2} a^2/2 gamma4^2]).
        """
        gammas = self.solve_gammas(alpha)
        prefactor = math.exp(-alpha ** 2) / am.norm_squared
        if am.branch == Branch.K_BRANCH:
            bracket = 1.0 + amplitude_bracket(gammas.gamma1, alpha)
            if higher_order:
                g3 = gammas.gamma3
                bracket += math.exp(-g3 ** 2) * alpha ** 4 / 2.0 * ((1.0 - g3 ** 2) ** 2 + g3 ** 2)
            return prefactor * bracket

        g2 = gammas.gamma2
        bracket = 1.0 + math.exp(-g2 ** 2) * abs(g2) ** 2 / alpha ** 2
        if higher_order:
            g4 = gammas.gamma4
            bracket += math.exp(-g4 ** 2) * alpha ** 2 / 2.0 * g4 ** 2
        return prefactor * alpha ** 2 * bracket

    def _displaced_rails(
        self, residual: AMQubit, displacement: float, surrogate_t: Optional[float]
    ) -> Tuple[MultiModeState, int]:
        """Rails (3, 4) of the residual with rail 4 displaced, plus an ancilla mode for the surrogate."""
        cutoff = self.settings.adaptive_cutoff(displacement, extra=1)
        amplitudes = np.zeros((2, cutoff), dtype=complex)
        vector = residual.vector
        amplitudes[0, 1] = vector[0]
        amplitudes[1, 0] = vector[1]
        rails = MultiModeState((3, 4), amplitudes)

        if surrogate_t is None:
            operator = self.displacement_service.displacement_operator(displacement, Truncation(cutoff=cutoff))
            return self.fock_service.apply_operator(rails, operator, 4), cutoff

        # |b>|psi> -> |t b + r psi>|-r b + t psi> displaces rail 4 by -r b
        spec = BeamSplitterSpec.from_transmittance(surrogate_t)
        if spec.r == 0.0:
            raise OutOfRangeError("surrogate_t", surrogate_t, "0 < t < 1")
        ancilla_amplitude = -displacement / spec.r
        ancilla_cutoff = self.settings.adaptive_cutoff(ancilla_amplitude)
        if ancilla_cutoff > self.settings.MAX_CUTOFF:
            logger.warning(f"Surrogate ancilla |{ancilla_amplitude:.3f}| needs cutoff {ancilla_cutoff}")
            ancilla_cutoff = self.settings.MAX_CUTOFF
        ancilla = self.displacement_service.coherent_state(ancilla_amplitude, Truncation(cutoff=ancilla_cutoff))
        joined = self.fock_service.tensor([ancilla, rails], labels=(1,))
        mixed = self.fock_service.apply_operator(
            joined, self.optics_service.bs_unitary(spec, (ancilla_cutoff, cutoff)), (1, 4)
        )
        return mixed, cutoff

    def coherent_pipeline(
        self,
        residual: AMQubit,
        displacement: float,
        success_count: int,
        surrogate_t: Optional[float] = None,
        gammas: Optional[Dict[str, float]] = None,
    ) -> List[DemodOutcome]:
        """
        Displace the rail that holds a0's photon and count photons on it.

        The exact path applies D(displacement); with `surrogate_t` the displacement
        comes from a beam splitter against a coherent ancilla.
        """
        state, cutoff = self._displaced_rails(residual, displacement, surrogate_t)
        target = residual.original / np.linalg.norm(residual.original)

        outcomes = []
        for count in range(cutoff):
            probability, branch_state = self.fock_service.project_mode(
                state, 4, ProjectorSpec.number(count), renormalize=False
            )
            if count > 1 and probability < self.settings.ZERO_PROBABILITY_THRESHOLD:
                continue
            rho = self.fock_service.partial_trace(branch_state, (3,)).matrix
            recovered = count == success_count
            failure = None
            if not recovered and probability > self.settings.ZERO_PROBABILITY_THRESHOLD:
                c_0 = self.displacement_service.matrix_element(0, count, displacement)
                c_1 = self.displacement_service.matrix_element(1, count, displacement)
                if abs(c_1) > self.settings.SINGULAR_FACTOR_THRESHOLD:
                    failure = residual.with_factor(residual.factor * c_0 / c_1)
            outcomes.append(DemodOutcome(
                strategy=Strategy.COHERENT,
                outcome=count,
                recovered=recovered,
                probability=min(probability, 1.0),
                residual=failure,
                fidelity=float(np.vdot(target, rho @ target).real),
                gammas=gammas or {},
            ))
        return outcomes

    def coherent_demodulate(
        self,
        am: AMQubit,
        alpha: float,
        higher_order: bool = False,
        surrogate_t: Optional[float] = None,
    ) -> DemodReport:
        """
        Coherent demodulation of the residual AM qubit left by teleportation.

        Reports the closed form, the pipeline total and the residual of the
        recovery condition at the solved gamma.
        """
        self._require_first_basis(am, Strategy.COHERENT)
        gammas = self.solve_gammas(alpha)
        displacement, success_count = self.coherent_plan(am.branch, gammas)
        residual = self.demodulation_residual(am, alpha)
        condition = self.condition_residual(residual, displacement, success_count)
        if condition > 1e-9:
            logger.warning(f"Recovery condition residual {condition:.3e} at alpha={alpha}")

        outcomes = self.coherent_pipeline(
            residual, displacement, success_count, surrogate_t, gammas.model_dump()
        )
        demod = sum(o.probability for o in outcomes if o.recovered)
        teleport = self.teleport_probability(am, alpha)
        residual_probability = self.am_probability(am, self._missed_count(am), alpha)
        pipeline = teleport + demod * residual_probability
        closed = self.coherent_closed_form(am, alpha, higher_order)

        gap = abs(closed - pipeline)
        if gap > 2e-2:
            logger.warning(f"Coherent closed form deviates from pipeline by {gap:.3e} at alpha={alpha}")
        logger.info(
            f"Coherent demodulation ({am.branch.value}-branch) alpha={alpha}: "
            f"demod {demod:.9f}, total {pipeline:.9f}, closed form {closed:.9f}"
        )
        return DemodReport(
            strategy=Strategy.COHERENT,
            branch=am.branch,
            alpha=alpha,
            demod_probability=demod,
            total_probability=pipeline,
            closed_form=closed,
            pipeline=pipeline,
            condition_residual=condition,
            outcomes=outcomes,
        )

    def _missed_count(self, am: AMQubit) -> int:
        return am.n if am.branch == Branch.K_BRANCH else am.k

    # Swap demodulation

    def auxiliary_qubit(self, factor: complex) -> np.ndarray:
        """N' (factor |01> + |10>) with N' = (|factor|^2 + 1)^(-1/2)."""
        return np.array([factor, 1.0], dtype=complex) / math.sqrt(abs(factor) ** 2 + 1.0)

    def simulate_swap(self, residual: np.ndarray, factor: complex) -> List[DemodOutcome]:
        """
        Swap the residual qubit (a0, factor a1) against N'(factor, 1).

        Rails (3, 4) hold the residual, rails (5, 6) the auxiliary qubit. The joined
        pair is projected onto matched rails (|00>, |11>) and the auxiliary photon is
        detected behind a balanced beam splitter; outcome '01' needs a Z on Bob's rails.
        The mass outside the matched rails and the two detections is reported as a
        "failure" outcome.
        """
        residual = np.asarray(residual, dtype=complex)
        first = self.fock_service.rail_state((3, 4), residual)
        second = self.fock_service.rail_state((5, 6), self.auxiliary_qubit(factor))
        joined = self.fock_service.tensor([first, second])

        matched = np.zeros((2, 2, 2, 2))
        matched[0, 1, 0, 1] = 1.0
        matched[1, 0, 1, 0] = 1.0
        projected = MultiModeState(joined.labels, joined.amplitudes * matched)
        mixed = self.fock_service.apply_operator(
            projected, self.optics_service.bs_unitary(BALANCED_SPLITTER, (2, 2)), (5, 6)
        )

        outcomes = []
        for label, (fifth, sixth) in SWAP_OUTCOMES.items():
            _, after_fifth = self.fock_service.project_mode(
                mixed, 5, ProjectorSpec.number(fifth), renormalize=False
            )
            probability, bob = self.fock_service.project_mode(
                after_fifth, 6, ProjectorSpec.number(sixth), renormalize=False
            )
            outcomes.append(DemodOutcome(
                strategy=Strategy.SWAP,
                outcome=label,
                recovered=probability > self.settings.ZERO_PROBABILITY_THRESHOLD,
                probability=min(probability, 1.0),
                fidelity=self._swap_fidelity(bob, label, residual, factor),
            ))

        success = sum(outcome.probability for outcome in outcomes)
        failure = max(float(np.vdot(residual, residual).real) - success, 0.0)
        outcomes.append(DemodOutcome(
            strategy=Strategy.SWAP,
            outcome=SWAP_FAILURE,
            recovered=False,
            probability=min(failure, 1.0),
            fidelity=0.0,
        ))
        return outcomes

    def _swap_fidelity(self, bob: MultiModeState, label: str, residual: np.ndarray, factor: complex) -> float:
        raw = bob.dual_rail()
        if np.linalg.norm(raw) == 0.0:
            return 0.0
        corrected = RAIL_PHASE @ raw if label == "01" else raw
        target = np.array([residual[0], residual[1] / factor]) if factor != 0 else residual
        return fidelity(normalize(target), normalize(corrected))

    def swap_closed_form(self, am: AMQubit, alpha: float, higher_order: bool = False) -> float:
        """Teleportation plus swap demodulation success probability."""
        prefactor = math.exp(-alpha ** 2) / am.norm_squared
        a2 = alpha ** 2
        spread = a2 ** 2 + (1.0 - a2) ** 2
        if am.branch == Branch.K_BRANCH:
            bracket = 1.0 + a2 * (1.0 - a2) ** 2 / spread
            if higher_order:
                bracket += a2 ** 2 / 2.0 * (2.0 - a2) ** 2 / ((2.0 - a2) ** 2 + a2 ** 2)
            return prefactor * bracket
        bracket = 1.0 + a2 / spread
        if higher_order:
            bracket += a2 / 2.0 * (2.0 - a2) ** 2 / ((1.0 - a2) ** 2 + (2.0 - a2) ** 2)
        return prefactor * a2 * bracket

    def swap_demodulate(self, am: AMQubit, alpha: float, higher_order: bool = False) -> DemodReport:
        """
        Swap demodulation of the residual AM qubit.

        The auxiliary qubit carries the residual's factor, so a matched-rail projection
        followed by auxiliary detection leaves Bob with the original qubit. No residual
        remains on failure.
        """
        self._require_first_basis(am, Strategy.SWAP)
        residual = self.demodulation_residual(am, alpha)
        outcomes = self.simulate_swap(residual.vector, residual.factor)
        demod = sum(o.probability for o in outcomes if o.recovered)
        exact = abs(residual.factor) ** 2 / (residual.norm_squared * (abs(residual.factor) ** 2 + 1.0))
        if abs(demod - exact) > 1e-9:
            logger.warning(f"Swap simulation {demod:.12f} differs from {exact:.12f}")

        teleport = self.teleport_probability(am, alpha)
        pipeline = teleport + demod * self.am_probability(am, self._missed_count(am), alpha)
        closed = self.swap_closed_form(am, alpha, higher_order)
        logger.info(
            f"Swap demodulation ({am.branch.value}-branch) alpha={alpha}: "
            f"demod {demod:.9f}, failure {1.0 - demod:.9f}, total {pipeline:.9f}, closed form {closed:.9f}"
        )
        return DemodReport(
            strategy=Strategy.SWAP,
            branch=am.branch,
            alpha=alpha,
            demod_probability=demod,
            total_probability=pipeline,
            closed_form=closed,
            pipeline=pipeline,
            outcomes=outcomes,
        )

    # Higher order and combinations

    def higher_order(self, am: AMQubit, alpha: float, strategy: Strategy) -> Dict[str, float]:
        """Two-outcome and three-bit success probabilities side by side."""
        self._require_first_basis(am, strategy)
        if strategy == Strategy.COHERENT:
            base = self.coherent_closed_form(am, alpha)
            extended = self.coherent_closed_form(am, alpha, higher_order=True)
        else:
            base = self.swap_closed_form(am, alpha)
            extended = self.swap_closed_form(am, alpha, higher_order=True)
        if extended < base:
            raise NumericDomainError(f"Higher-order probability {extended} below base {base}")
        return {"base": base, "higher_order": extended}

    def combined_probability(self, mode: CombinationMode, components: Dict[str, float]) -> float:
        """
        Combine component probabilities.

        direct:       p1 success_k + p2 success_n
        charles-prep: teleport + demod residual
        alice-prep:   q_k total_k + q_n total_n
        """
        mode = CombinationMode(mode)
        values = {}
        for name in COMBINATION_INPUTS[mode]:
            if name not in components:
                raise OutOfRangeError(name, None, "required component")
            value = float(components[name])
            if not 0.0 <= value <= 1.0 + PROBABILITY_SLACK:
                raise OutOfRangeError(name, value, "0 <= p <= 1")
            values[name] = value

        if mode == CombinationMode.DIRECT:
            total = values["p1"] * values["success_k"] + values["p2"] * values["success_n"]
        elif mode == CombinationMode.CHARLES_PREP:
            total = values["teleport"] + values["demod"] * values["residual"]
        else:
            total = values["q_k"] * values["total_k"] + values["q_n"] * values["total_n"]

        if total > 1.0 + PROBABILITY_SLACK:
            raise NumericDomainError(f"Combined probability {total} exceeds 1", details=values)
        return total

    def demodulate(
        self,
        am: AMQubit,
        alpha: float,
        strategy: Strategy,
        higher_order: bool = False,
        surrogate_t: Optional[float] = None,
    ) -> DemodReport:
        """Dispatch on the demodulation strategy."""
        if strategy == Strategy.COHERENT:
            return self.coherent_demodulate(am, alpha, higher_order, surrogate_t)
        if surrogate_t is not None:
            raise StrategyMismatchError(strategy.value, am.branch.value if am.branch else "none", "surrogate_t applies to coherent only")
        return self.swap_demodulate(am, alpha, higher_order)
