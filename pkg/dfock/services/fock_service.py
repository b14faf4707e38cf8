"""Fock service for construction, measurement and reduction of truncated multi-mode states."""
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from dfock.config import Settings, get_settings
from dfock.models import (
    DensityMatrix,
    FockVector,
    MAX_MODES,
    MultiModeState,
    SingleModeOperator,
    TwoModeOperator,
)
from dfock.schemas.fock import (
    OnOffOutcome,
    ParityOutcome,
    ProjectorKind,
    ProjectorSpec,
    Truncation,
)
from dfock.utils.exceptions import (
    EmptySelectionError,
    InvalidModeError,
    OutOfRangeError,
    TruncationMismatchError,
    UnsupportedArityError,
    ZeroProbabilityBranchError,
)

logger = logging.getLogger(__name__)

Operator = Union[SingleModeOperator, TwoModeOperator]


def phase_gate(cutoff: int) -> SingleModeOperator:
    """Z = diag((-1)^n)."""
    return SingleModeOperator(np.diag((-1.0) ** np.arange(cutoff)))


def identity(cutoff: int) -> SingleModeOperator:
    return SingleModeOperator(np.eye(cutoff))


def projector_weights(projector: ProjectorSpec, cutoff: int) -> np.ndarray:
    """Diagonal of the projector in the number basis."""
    photons = np.arange(cutoff)
    if projector.kind == ProjectorKind.NUMBER:
        if projector.outcome >= cutoff:
            raise OutOfRangeError("m", projector.outcome, f"0 <= m < {cutoff}")
        return (photons == projector.outcome).astype(float)
    if projector.kind == ProjectorKind.PARITY:
        even = photons % 2 == 0
        return (even if projector.outcome == ParityOutcome.EVEN else ~even).astype(float)
    vacuum = photons == 0
    return (vacuum if projector.outcome == OnOffOutcome.NOCLICK else ~vacuum).astype(float)


class FockService:
    """Service for exact linear algebra over truncated photon-number spaces."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def number_state(self, n: int, truncation: Truncation) -> FockVector:
        """Basis ket |n>."""
        if not 0 <= n < truncation.cutoff:
            raise OutOfRangeError("n", n, f"0 <= n < {truncation.cutoff}")
        amplitudes = np.zeros(truncation.cutoff, dtype=complex)
        amplitudes[n] = 1.0
        return FockVector(truncation, amplitudes)

    def tensor(
        self,
        states: Sequence[Union[FockVector, MultiModeState]],
        labels: Optional[Sequence[int]] = None,
    ) -> MultiModeState:
        """
        Outer product in declared order.

        Single-mode vectors get labels from `labels` (default 1, 2, ...), multi-mode
        states keep their own.
        """
        if not states:
            raise EmptySelectionError("tensor")
        mode_count = sum(1 if isinstance(s, FockVector) else s.mode_count for s in states)
        if mode_count > MAX_MODES:
            raise UnsupportedArityError(mode_count, MAX_MODES)

        fresh = iter(labels) if labels is not None else None
        all_labels = []
        amplitudes = np.ones((), dtype=complex)
        for state in states:
            if isinstance(state, FockVector):
                all_labels.append(next(fresh) if fresh is not None else len(all_labels) + 1)
            else:
                all_labels.extend(state.labels)
            amplitudes = np.multiply.outer(amplitudes, state.amplitudes)
        return MultiModeState(tuple(all_labels), amplitudes)

    def apply_operator(
        self,
        state: MultiModeState,
        operator: Operator,
        modes: Union[int, Sequence[int]],
    ) -> MultiModeState:
        """
        Act with a single- or two-mode operator on the designated modes.

        Handles:
        - Mode labels missing from the state
        - Cutoff mismatches between operator and target modes
        """
        modes = (modes,) if isinstance(modes, int) else tuple(modes)
        axes = [state.axis(label) for label in modes]

        if isinstance(operator, SingleModeOperator):
            if len(axes) != 1:
                raise InvalidModeError(modes[-1], state.labels)
            axis = axes[0]
            if state.amplitudes.shape[axis] != operator.cutoff:
                raise TruncationMismatchError(operator.cutoff, state.amplitudes.shape[axis])
            moved = np.tensordot(operator.matrix, state.amplitudes, axes=(1, axis))
            return MultiModeState(state.labels, np.moveaxis(moved, 0, axis))

        if len(axes) != 2:
            raise InvalidModeError(modes[-1], state.labels)
        front = np.moveaxis(state.amplitudes, axes, (0, 1))
        result = operator.act(front)
        return MultiModeState(state.labels, np.moveaxis(result, (0, 1), axes))

    def project_mode(
        self,
        state: MultiModeState,
        mode: int,
        projector: ProjectorSpec,
        renormalize: bool = True,
    ) -> Tuple[float, MultiModeState]:
        """
        Measure one mode and return (probability, post-measurement state).

        Number projections remove the measured mode unless it is the only one;
        parity and on/off projections keep it. With `renormalize=False` the
        projected, unnormalized state is returned.
        """
        axis = state.axis(mode)
        weights = projector_weights(projector, state.amplitudes.shape[axis])
        shape = [1] * state.mode_count
        shape[axis] = -1
        projected = state.amplitudes * weights.reshape(shape)
        probability = float(np.sum(np.abs(projected) ** 2))

        labels = state.labels
        if projector.removes_mode and state.mode_count > 1:
            projected = np.take(projected, projector.outcome, axis=axis)
            labels = tuple(label for label in labels if label != mode)

        if renormalize:
            if probability < self.settings.ZERO_PROBABILITY_THRESHOLD:
                raise ZeroProbabilityBranchError(probability, projector.label)
            projected = projected / np.sqrt(probability)
        return probability, MultiModeState(labels, projected)

    def partial_trace(self, state: MultiModeState, keep: Sequence[int]) -> DensityMatrix:
        """Reduced density matrix of the kept modes, in their declared order."""
        keep = tuple(keep)
        if not keep:
            raise EmptySelectionError("partial_trace")
        kept_axes = [state.axis(label) for label in keep]
        traced_axes = [axis for axis in range(state.mode_count) if axis not in kept_axes]

        cutoffs = tuple(state.amplitudes.shape[axis] for axis in kept_axes)
        kept_size = int(np.prod(cutoffs))
        matrix = np.transpose(state.amplitudes, kept_axes + traced_axes).reshape(kept_size, -1)
        rho = matrix @ matrix.conj().T
        norm = state.norm_squared
        if norm > 0.0:
            rho = rho / norm
        return DensityMatrix(keep, cutoffs, rho)

    def tail_mass(self, state: MultiModeState, mode: int, width: int = 5) -> float:
        """Squared weight carried by the top `width` basis states of one mode."""
        axis = state.axis(mode)
        cutoff = state.amplitudes.shape[axis]
        tail = np.take(state.amplitudes, range(max(0, cutoff - width), cutoff), axis=axis)
        return float(np.sum(np.abs(tail) ** 2))

    def rail_state(self, rails: Sequence[int], qubit: np.ndarray) -> MultiModeState:
        """Dual-rail embedding q0|01> + q1|10> as a two-mode state with cutoff 2 per rail."""
        amplitudes = np.zeros((2, 2), dtype=complex)
        amplitudes[0, 1] = qubit[0]
        amplitudes[1, 0] = qubit[1]
        return MultiModeState(tuple(rails), amplitudes)
