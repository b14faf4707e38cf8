"""Tests for the hybrid teleportation protocol and its closed forms."""
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st
from pydantic import ValidationError

from dfock.models import DensityMatrix
from dfock.schemas.fock import Truncation
from dfock.schemas.protocol import ChannelSpec, QubitSpec
from dfock.services.teleport_service import TeleportService
from dfock.utils.exceptions import InvalidBasisError, OutOfRangeError

F2 = math.exp(-0.04)


def qubit_grid(k=0, n=1):
    """Qubits over magnitudes and relative phases."""
    qubits = []
    for magnitude in (0.0, 0.25, 0.5, 0.75, 1.0):
        for phase in (0.0, math.pi / 3, math.pi, 4.0):
            a1 = magnitude * cmath.exp(1j * phase)
            qubits.append(QubitSpec(k=k, n=n, a0=math.sqrt(1 - magnitude ** 2), a1=a1))
    return qubits


class TestPhaseChoice:
    """Channel phase per basis difference."""

    @pytest.mark.parametrize(
        "k,n,phi",
        [
            (0, 1, 0.0),
            (1, 2, 0.0),
            (0, 3, 0.0),
            (0, 2, math.pi / 2),
            (1, 7, math.pi / 2),
            (0, 4, math.pi / 4),
            (0, 8, math.pi / 8),
        ],
    )
    def test_phase_for_basis(self, teleport_service, k, n, phi):
        """Test that the chosen phase meets the sign condition."""
        choice = teleport_service.phase_for_basis(k, n)
        assert choice.phi == pytest.approx(phi)
        assert choice.valid

    def test_invalid_basis(self, teleport_service):
        """Test that k >= n is refused."""
        with pytest.raises(InvalidBasisError):
            teleport_service.phase_for_basis(2, 1)

    @pytest.mark.parametrize("j,m", [(0, 0), (1, 0), (0, 3), (1, 4)])
    def test_corrections_are_unitary(self, teleport_service, j, m):
        """Test that Bob's correction is unitary for every branch."""
        for phi in (0.0, math.pi / 2, math.pi / 4):
            assert teleport_service.bob_correction(j, m, 0, phi).is_unitary()

    def test_first_corrections(self, teleport_service):
        """Test that the (0,1) corrections are H and H Z."""
        hadamard = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        assert np.allclose(teleport_service.bob_correction(0, 0, 0, 0.0).matrix, hadamard)
        assert np.allclose(teleport_service.bob_correction(1, 0, 0, 0.0).matrix, hadamard @ np.diag([1, -1]))


class TestSuccessProbability:
    """Closed-form photon-count probabilities."""

    def test_first_basis_spot_values(self, teleport_service):
        """Test P_0 and P_1 for the (0,1) basis at alpha = 0.2."""
        channel = ChannelSpec(beta=2.0, phi=0.0)
        vacuum = QubitSpec.from_magnitude(0.0)
        photon = QubitSpec.from_magnitude(1.0)
        assert teleport_service.success_probability(vacuum, 0, 0.2, channel) == pytest.approx(0.96079, abs=1e-5)
        assert teleport_service.success_probability(photon, 1, 0.2, channel) == pytest.approx(F2 * 0.9216)
        assert teleport_service.two_outcome_mass(vacuum, 0.2, channel) == pytest.approx(0.9992, abs=1e-4)
        assert teleport_service.two_outcome_mass(photon, 0.2, channel) == pytest.approx(0.9239, abs=1e-4)

    @pytest.mark.parametrize("k,n", [(0, 1), (1, 2), (0, 3)])
    @pytest.mark.parametrize("alpha", [0.1, 0.2, 0.5])
    def test_probabilities_sum_to_one(self, teleport_service, k, n, alpha):
        """Test that the photon-count distribution is complete for odd differences."""
        channel = ChannelSpec(beta=1.0, phi=0.0)
        for qubit in qubit_grid(k, n)[::3]:
            total = sum(teleport_service.success_probability(qubit, m, alpha, channel) for m in range(60))
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_even_difference_deviation_shrinks_with_beta(self, teleport_service):
        """Test that the even-difference formula approaches completeness as beta decreases."""
        qubit = QubitSpec.from_magnitude(0.5, k=0, n=2)
        deviations = []
        for beta in (0.8, 0.5, 0.3, 0.1):
            channel = ChannelSpec(beta=beta, phi=math.pi / 2)
            total = sum(teleport_service.success_probability(qubit, m, 0.2, channel) for m in range(40))
            deviations.append(abs(total - 1.0))
        assert all(later < earlier for earlier, later in zip(deviations, deviations[1:]))
        assert deviations[-1] < 1e-3

    def test_exactness_flag(self, teleport_service):
        """Test that only odd differences are exact."""
        assert teleport_service.is_exact(QubitSpec.from_magnitude(0.5, 0, 3))
        assert not teleport_service.is_exact(QubitSpec.from_magnitude(0.5, 0, 2))

    @hypothesis_settings(max_examples=20, deadline=None)
    @given(
        magnitude=st.floats(min_value=0.0, max_value=1.0),
        phase=st.floats(min_value=-math.pi, max_value=math.pi),
        alpha=st.floats(min_value=0.05, max_value=0.8),
    )
    def test_first_basis_completeness(self, magnitude, phase, alpha):
        """The (0,1) distribution sums to one for any qubit and displacement."""
        service = TeleportService()
        qubit = QubitSpec(
            k=0, n=1, a0=math.sqrt(1 - magnitude ** 2), a1=magnitude * cmath.exp(1j * phase)
        )
        channel = ChannelSpec(beta=2.0, phi=0.0)
        total = sum(service.success_probability(qubit, m, alpha, channel) for m in range(50))
        assert total == pytest.approx(1.0, abs=1e-9)


class TestChannelSpec:
    """Channel amplitudes and the formula limit."""

    def test_zero_amplitude_is_refused(self):
        """Test that a channel state needs beta > 0."""
        with pytest.raises(ValidationError):
            ChannelSpec(beta=0.0)

    def test_formula_limit_has_no_state(self, teleport_service):
        """Test that the formula limit cannot build a channel state."""
        channel = ChannelSpec.formula_limit(math.pi / 2)
        assert channel.amplitude == 0.0
        with pytest.raises(OutOfRangeError):
            teleport_service.build_hybrid_channel(channel)

    def test_formula_limit_for_odd_difference(self, teleport_service, sample_unbalanced_qubit):
        """Test that the limit gives the same probabilities as a real channel for odd differences."""
        limit = ChannelSpec.formula_limit()
        for m in range(4):
            assert teleport_service.success_probability(
                sample_unbalanced_qubit, m, 0.2, limit
            ) == pytest.approx(teleport_service.success_probability(
                sample_unbalanced_qubit, m, 0.2, ChannelSpec(beta=2.0)
            ), abs=1e-14)


class TestIdealProtocol:
    """Pipeline execution of the t -> 1 protocol."""

    @pytest.mark.parametrize("k,n", [(0, 1), (1, 2), (0, 3)])
    @pytest.mark.parametrize("alpha", [0.1, 0.2, 0.5])
    def test_branches_are_complete(self, teleport_service, k, n, alpha):
        """Test that branch probabilities plus the residual sum to one."""
        channel = ChannelSpec(beta=1.0, phi=0.0)
        qubit = QubitSpec(k=k, n=n, a0=0.6, a1=0.8j)
        records = teleport_service.run_ideal(qubit, alpha, channel)
        assert sum(record.probability for record in records) == pytest.approx(1.0, abs=1e-9)
        assert records[-1].residual

    def test_pipeline_matches_formula(self, teleport_service, sample_unbalanced_qubit):
        """Test that summing over parity reproduces the closed-form P_m."""
        channel = ChannelSpec(beta=1.0, phi=0.0)
        records = teleport_service.run_ideal(sample_unbalanced_qubit, 0.2, channel, m_max=6)
        for m in range(7):
            pipeline = sum(r.probability for r in records if r.m == m and not r.residual)
            formula = teleport_service.success_probability(sample_unbalanced_qubit, m, 0.2, channel)
            assert pipeline == pytest.approx(formula, abs=1e-9)

    @pytest.mark.parametrize("k,n", [(0, 1), (1, 2), (0, 3)])
    def test_corrected_state_matches_reference(self, teleport_service, k, n):
        """Test that every corrected branch equals the amplitude-modulated reference."""
        channel = ChannelSpec(beta=1.0, phi=0.0)
        qubit = QubitSpec(k=k, n=n, a0=0.6, a1=0.8 * cmath.exp(0.7j))
        records = teleport_service.run_ideal(qubit, 0.2, channel, m_max=5)
        for record in records:
            if record.residual or record.fidelity is None:
                continue
            assert record.fidelity == pytest.approx(1.0, abs=1e-8)
            assert not record.approximate

    def test_vacuum_qubit_is_teleported_unchanged(self, teleport_service, sample_channel):
        """Test that a0 = 1 arrives as |01> on every branch."""
        qubit = QubitSpec.from_magnitude(0.0)
        records = teleport_service.run_ideal(qubit, 0.2, sample_channel, m_max=4)
        for record in records:
            if record.bob_corrected is not None and record.probability > 1e-12:
                assert abs(record.bob_corrected[0]) == pytest.approx(1.0, abs=1e-9)

    def test_m_max_bounded_by_cutoff(self, teleport_service, sample_qubit, sample_channel):
        """Test that m_max must leave room below the truncation."""
        with pytest.raises(OutOfRangeError):
            teleport_service.run_ideal(sample_qubit, 0.2, sample_channel, Truncation(cutoff=10), m_max=8)


class TestNoSignalling:
    """Bob's state averaged over outcomes carries no information about the qubit."""

    def test_diagonal_is_balanced(self, teleport_service):
        """Test that Bob's averaged diagonal is (1/2, 1/2) for every qubit."""
        channel = ChannelSpec(beta=0.4, phi=0.0)
        for qubit in qubit_grid():
            rho = teleport_service.bob_density_matrix(qubit, 0.2, channel).dual_rail()
            assert np.allclose(np.diag(rho).real, 0.5, atol=1e-9)

    def test_matches_closed_form(self, teleport_service, sample_qubit):
        """Test the off-diagonal against its closed form at alpha = 0.2, beta = 0.4."""
        channel = ChannelSpec(beta=0.4, phi=0.0)
        rho = teleport_service.bob_density_matrix(sample_qubit, 0.2, channel).dual_rail()
        closed = teleport_service.bob_density_matrix_closed(sample_qubit, 0.2, channel)
        assert np.allclose(rho, closed, atol=1e-8)

    def test_complex_displacement_closed_form(self, teleport_service, sample_unbalanced_qubit):
        """Test the closed form for a complex qubit."""
        channel = ChannelSpec(beta=0.3, phi=0.0)
        rho = teleport_service.bob_density_matrix(sample_unbalanced_qubit, 0.3, channel).dual_rail()
        closed = teleport_service.bob_density_matrix_closed(sample_unbalanced_qubit, 0.3, channel)
        assert np.allclose(rho, closed, atol=1e-8)

    def test_off_diagonal_vanishes_for_large_amplitudes(self, teleport_service, sample_qubit):
        """Test that the off-diagonal drops below 1e-6 at alpha = beta = 2."""
        channel = ChannelSpec(beta=2.0, phi=0.0)
        closed = teleport_service.bob_density_matrix_closed(sample_qubit, 2.0, channel)
        rho = teleport_service.bob_density_matrix(sample_qubit, 2.0, channel).dual_rail()
        assert abs(closed[0, 1]) < 1e-6
        assert abs(rho[0, 1]) < 1e-6

    def test_pipeline_returns_rail_density_matrix(self, teleport_service, sample_qubit):
        """Test that the averaged state is a unit-trace density matrix on rails (3, 4)."""
        rho = teleport_service.bob_density_matrix(sample_qubit, 0.2, ChannelSpec(beta=0.4))
        assert isinstance(rho, DensityMatrix)
        assert rho.labels == (3, 4)
        assert rho.trace == pytest.approx(1.0)
        assert rho.is_hermitian()
        assert rho.dual_rail().shape == (2, 2)

    def test_pipeline_requires_first_basis(self, teleport_service):
        """Test that the averaged state is limited to the (0,1) basis."""
        with pytest.raises(InvalidBasisError):
            teleport_service.bob_density_matrix(QubitSpec.from_magnitude(0.5, 1, 2), 0.2, ChannelSpec(beta=0.4))

    def test_closed_form_requires_first_basis(self, teleport_service):
        """Test that the closed form is limited to the (0,1) basis."""
        with pytest.raises(InvalidBasisError):
            teleport_service.bob_density_matrix_closed(
                QubitSpec.from_magnitude(0.5, 1, 2), 0.2, ChannelSpec(beta=0.4)
            )


class TestFiniteTransmittance:
    """Protocol with a real beam splitter."""

    def test_high_transmittance_fidelity(self, teleport_service, sample_qubit):
        """Test that the dominant branches keep high fidelity at t = 0.995."""
        report = teleport_service.run_finite(sample_qubit, 0.2, 0.995, m_max=3)
        assert report.total_probability == pytest.approx(1.0, abs=1e-8)
        dominant = [r for r in report.records if r.m <= 1]
        assert dominant
        for record in dominant:
            assert record.fidelity_corrected > 0.98

    def test_overlap_improves_with_transmittance(self, teleport_service, sample_qubit):
        """Test that the real state approaches the ideal state as t -> 1."""
        low = teleport_service.run_finite(sample_qubit, 0.2, 0.99, m_max=2).overlap_to_ideal
        high = teleport_service.run_finite(sample_qubit, 0.2, 0.999, m_max=2).overlap_to_ideal
        assert high > low
        assert high > 0.95

    def test_matches_small_beta_model(self, teleport_service, sample_unbalanced_qubit):
        """Test that the full run agrees with the two-term expansion for small beta."""
        t = 0.999
        beta = 0.05
        alpha = beta * math.sqrt(1 - t ** 2) / t
        report = teleport_service.run_finite(sample_unbalanced_qubit, alpha, t, m_max=2)
        model = teleport_service.simplified_model(sample_unbalanced_qubit, beta, t)
        raw = {outcome.label: outcome.bob_raw for outcome in model.outcomes}
        for record in report.records:
            key = {(0, 1): "01", (1, 0): "10"}.get((record.j, record.m))
            if key is None:
                continue
            overlap = np.vdot(raw[key], record.bob_density @ raw[key]).real
            assert overlap > 0.99

    def test_unit_transmittance_refused(self, teleport_service, sample_qubit):
        """Test that t = 1 has no finite beta."""
        with pytest.raises(OutOfRangeError):
            teleport_service.run_finite(sample_qubit, 0.2, 1.0)


class TestSimplifiedModel:
    """Two-term expansion of the coherent components."""

    def test_factors(self, teleport_service, sample_qubit):
        """Test that B01 = 1/alpha and B10 = r/(beta t)."""
        beta, t = 0.1, 0.99
        result = teleport_service.simplified_model(sample_qubit, beta, t)
        r = math.sqrt(1 - t ** 2)
        assert result.factors.alpha == pytest.approx(beta * r / t)
        assert result.factors.b01 == pytest.approx(t / (beta * r))
        assert result.factors.b10 == pytest.approx(r / (beta * t))
        assert result.within_limit

    def test_bridge_gap_is_alpha_squared(self, teleport_service, sample_qubit):
        """Test that B01 differs from |A_1| by alpha^2 relative."""
        result = teleport_service.simplified_model(sample_qubit, 0.1, 0.99)
        assert result.bridge_gap == pytest.approx(result.factors.alpha ** 2, rel=1e-9)

    def test_corrected_states_carry_factors(self, teleport_service, sample_unbalanced_qubit):
        """Test that each correction leaves a0|01> + B a1|10>."""
        result = teleport_service.simplified_model(sample_unbalanced_qubit, 0.1, 0.99)
        for outcome in result.outcomes:
            expected = np.array([sample_unbalanced_qubit.a0, outcome.factor * sample_unbalanced_qubit.a1])
            expected = expected / np.linalg.norm(expected)
            assert abs(np.vdot(expected, outcome.bob_corrected)) ** 2 == pytest.approx(1.0, abs=1e-10)
            assert outcome.probability > 0

    def test_beyond_limit_is_flagged(self, teleport_service, sample_qubit):
        """Test that beta above the model limit is reported."""
        assert not teleport_service.simplified_model(sample_qubit, 0.5, 0.99).within_limit


class TestChannelEntropy:
    """Entanglement of the hybrid channel."""

    @pytest.mark.parametrize("phi", [0.0, math.pi / 2])
    def test_matches_closed_form(self, teleport_service, phi):
        """Test the entropy against the two-eigenvalue closed form."""
        numeric = teleport_service.channel_entropy(0.8, phi)
        assert numeric == pytest.approx(teleport_service.channel_entropy_closed(0.8, phi), abs=1e-9)

    def test_grows_with_beta(self, teleport_service):
        """Test that the channel goes from product to one ebit as beta grows."""
        values = [teleport_service.channel_entropy(beta) for beta in (0.0, 0.2, 0.8, 2.0)]
        assert values[0] == pytest.approx(0.0, abs=1e-9)
        assert all(later > earlier for earlier, later in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0, abs=1e-6)
