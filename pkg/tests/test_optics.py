"""Tests for beam-splitter lifts and the displacement they induce."""
import math

import numpy as np
import pytest

from dfock.models import FockVector
from dfock.schemas.fock import Truncation
from dfock.schemas.protocol import BeamSplitterSpec
from dfock.utils.exceptions import OutOfRangeError


def two_photon_state(fock_service, cutoff, n1, n2):
    truncation = Truncation(cutoff=cutoff)
    return fock_service.tensor(
        [fock_service.number_state(n1, truncation), fock_service.number_state(n2, truncation)],
        labels=(1, 2),
    )


class TestBeamSplitterLift:
    """Block-diagonal Fock lift of a real beam splitter."""

    def test_complete_sectors_are_unitary(self, optics_service):
        """Test that every complete photon-number sector is unitary."""
        operator = optics_service.bs_unitary(BeamSplitterSpec.from_transmittance(0.8), (8, 8))
        assert operator.unitarity_error() < 1e-12

    def test_single_photon_mapping(self, optics_service, fock_service):
        """Test that |1,0> -> t|1,0> - r|0,1>."""
        spec = BeamSplitterSpec.from_transmittance(0.8)
        state = two_photon_state(fock_service, 4, 1, 0)
        result = fock_service.apply_operator(state, optics_service.bs_unitary(spec, (4, 4)), (1, 2))
        assert result.amplitudes[1, 0] == pytest.approx(spec.t)
        assert result.amplitudes[0, 1] == pytest.approx(-spec.r)

    def test_balanced_splitter_bunches_photon_pairs(self, optics_service, fock_service):
        """Test that |1,1> leaves no amplitude on |1,1> behind a 50:50 splitter."""
        spec = BeamSplitterSpec(t=1 / math.sqrt(2), r=1 / math.sqrt(2))
        state = two_photon_state(fock_service, 4, 1, 1)
        result = fock_service.apply_operator(state, optics_service.bs_unitary(spec, (4, 4)), (1, 2))
        assert abs(result.amplitudes[1, 1]) < 1e-15
        assert abs(result.amplitudes[2, 0]) ** 2 == pytest.approx(0.5)

    def test_inverse_undoes_splitter(self, optics_service, fock_service):
        """Test that the inverse lift restores the input state."""
        spec = BeamSplitterSpec.from_transmittance(0.6)
        state = two_photon_state(fock_service, 6, 1, 2)
        forward = fock_service.apply_operator(state, optics_service.bs_unitary(spec, (6, 6)), (1, 2))
        back = fock_service.apply_operator(
            forward, optics_service.bs_unitary(spec, (6, 6), inverse=True), (1, 2)
        )
        assert np.allclose(back.amplitudes, state.amplitudes, atol=1e-12)

    def test_dense_matrix_of_small_lift(self, optics_service):
        """Test that the dense form is unitary on a box holding one photon."""
        operator = optics_service.bs_unitary(BeamSplitterSpec.from_transmittance(0.7), (2, 2))
        dense = operator.to_dense()
        single = [1, 2]
        block = dense[np.ix_(single, single)]
        assert np.allclose(block.conj().T @ block, np.eye(2))

    def test_coherent_inputs_stay_coherent(self, optics_service, displacement_service, fock_service):
        """Test that |g>|d> -> |t g + r d>|-r g + t d>."""
        spec = BeamSplitterSpec.from_transmittance(0.8)
        truncation = Truncation(cutoff=30)
        gamma, delta = 0.5, 0.3j
        state = fock_service.tensor(
            [
                displacement_service.coherent_state(gamma, truncation),
                displacement_service.coherent_state(delta, truncation),
            ],
            labels=(1, 2),
        )
        mixed = fock_service.apply_operator(state, optics_service.bs_unitary(spec, (30, 30)), (1, 2))
        out_first, out_second = optics_service.coherent_outputs(gamma, delta, spec)
        expected = fock_service.tensor(
            [
                displacement_service.coherent_state(out_first, truncation),
                displacement_service.coherent_state(out_second, truncation),
            ],
            labels=(1, 2),
        )
        assert abs(expected.overlap(mixed)) ** 2 > 1 - 1e-10


class TestDisplacementByMixing:
    """Beam-splitter mixing with a strong coherent state as a displacement."""

    def test_perfect_transmission(self, optics_service, fock_service):
        """Test that the check is exact at t = 1."""
        target = fock_service.number_state(1, Truncation(cutoff=5))
        assert optics_service.htbs_displacement_check(1.0, target, 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_high_transmission(self, optics_service):
        """Test that a single photon is displaced with high fidelity near t = 1."""
        amplitudes = np.array([0.6, 0.8, 0, 0, 0], dtype=complex)
        target = FockVector(Truncation(cutoff=5), amplitudes)
        assert optics_service.htbs_displacement_check(1.0, target, 0.999) > 0.99

    def test_front_end_fidelity_grows_with_transmittance(self, optics_service, sample_qubit):
        """Test that the estimate is non-decreasing in t and above 0.99 at t = 0.999."""
        values = [optics_service.front_end_fidelity(sample_qubit, 0.2, t) for t in (0.9, 0.95, 0.99, 0.999)]
        assert all(later >= earlier for earlier, later in zip(values, values[1:]))
        assert values[-1] > 0.99
        assert optics_service.front_end_fidelity(sample_qubit, 0.2, 1.0) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("t", [0.0, 1.5])
    def test_front_end_fidelity_range(self, optics_service, sample_qubit, t):
        """Test that transmittances outside (0, 1] are refused."""
        with pytest.raises(OutOfRangeError):
            optics_service.front_end_fidelity(sample_qubit, 0.2, t)

    def test_displacement_relation(self):
        """Test that beta = alpha t / r inverts alpha = beta r / t."""
        spec = BeamSplitterSpec.from_transmittance(0.99)
        assert spec.displacement_for(spec.beta_for(0.2)) == pytest.approx(0.2)
