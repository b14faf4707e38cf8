"""Immutable state types over truncated photon-number spaces."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.stats import entropy

from dfock.schemas.fock import Truncation
from dfock.utils.exceptions import (
    InvalidModeError,
    TruncationMismatchError,
    UnsupportedArityError,
    ZeroVectorError,
)

MAX_MODES = 4


def freeze(values) -> np.ndarray:
    """Copy into a read-only complex array."""
    array = np.array(values, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over |0> ... |cutoff-1> of a single mode."""

    truncation: Truncation
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = freeze(self.amplitudes)
        if amplitudes.ndim != 1 or amplitudes.shape[0] != self.truncation.cutoff:
            raise TruncationMismatchError(self.truncation.cutoff, amplitudes.size)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def cutoff(self) -> int:
        return self.truncation.cutoff

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tolerance: float = 1e-12) -> bool:
        return abs(self.norm_squared - 1.0) < tolerance

    def normalized(self) -> "FockVector":
        norm_squared = self.norm_squared
        if norm_squared == 0.0:
            raise ZeroVectorError("cannot normalize the zero vector")
        return FockVector(self.truncation, self.amplitudes / np.sqrt(norm_squared))

    def tail_mass(self, width: int = 5) -> float:
        """Squared weight carried by the top `width` basis states."""
        tail = self.amplitudes[-width:]
        return float(np.sum(np.abs(tail) ** 2))

    def overlap(self, other: "FockVector") -> complex:
        """Inner product <self|other>."""
        if other.cutoff != self.cutoff:
            raise TruncationMismatchError(self.cutoff, other.cutoff)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class MultiModeState:
    """
    Complex amplitude tensor over up to four modes, one axis per mode.

    Mode labels follow the protocol numbering: 1 coherent, 2 teleported,
    3 and 4 the dual-rail pair.
    """

    labels: Tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = tuple(int(label) for label in self.labels)
        amplitudes = freeze(self.amplitudes)
        if not 1 <= len(labels) <= MAX_MODES:
            raise UnsupportedArityError(len(labels), MAX_MODES)
        if len(set(labels)) != len(labels):
            raise ValueError(f"Duplicate mode labels {labels}")
        if amplitudes.ndim != len(labels):
            raise TruncationMismatchError(len(labels), amplitudes.ndim)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_vector(cls, vector: FockVector, label: int) -> "MultiModeState":
        return cls((label,), vector.amplitudes)

    @property
    def mode_count(self) -> int:
        return len(self.labels)

    @property
    def cutoffs(self) -> Tuple[int, ...]:
        return tuple(self.amplitudes.shape)

    @property
    def norm_squared(self) -> float:
        flat = self.amplitudes.ravel()
        return float(np.vdot(flat, flat).real)

    def axis(self, label: int) -> int:
        """Tensor axis holding the mode with this label."""
        if label not in self.labels:
            raise InvalidModeError(label, self.labels)
        return self.labels.index(label)

    def cutoff(self, label: int) -> int:
        return self.amplitudes.shape[self.axis(label)]

    def normalized(self) -> "MultiModeState":
        norm_squared = self.norm_squared
        if norm_squared == 0.0:
            raise ZeroVectorError("cannot normalize the zero state")
        return MultiModeState(self.labels, self.amplitudes / np.sqrt(norm_squared))

    def reordered(self, labels: Tuple[int, ...]) -> "MultiModeState":
        """Same state with axes permuted into `labels` order."""
        axes = [self.axis(label) for label in labels]
        return MultiModeState(tuple(labels), np.transpose(self.amplitudes, axes))

    def vector(self) -> np.ndarray:
        """Amplitudes flattened in row-major mode order."""
        return self.amplitudes.ravel()

    def overlap(self, other: "MultiModeState") -> complex:
        """Inner product <self|other>; both states must share labels and cutoffs."""
        if other.labels != self.labels:
            raise InvalidModeError(other.labels[0], self.labels)
        if other.cutoffs != self.cutoffs:
            raise TruncationMismatchError(int(np.prod(self.cutoffs)), int(np.prod(other.cutoffs)))
        return complex(np.vdot(self.vector(), other.vector()))

    def dual_rail(self, rails: Tuple[int, int] = (3, 4)) -> np.ndarray:
        """
        Restrict the rail pair to its single-photon subspace.

        Returns an array whose leading axes are the remaining modes and whose last
        axis holds the (|01>, |10>) components.
        """
        first, second = (self.axis(label) for label in rails)
        moved = np.moveaxis(self.amplitudes, (first, second), (-2, -1))
        return np.stack([moved[..., 0, 1], moved[..., 1, 0]], axis=-1)


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix over the joint basis of the kept modes."""

    labels: Tuple[int, ...]
    cutoffs: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        matrix = freeze(self.matrix)
        size = int(np.prod(self.cutoffs))
        if matrix.shape != (size, size):
            raise TruncationMismatchError(size, matrix.shape[0])
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "cutoffs", tuple(self.cutoffs))
        object.__setattr__(self, "matrix", matrix)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def is_hermitian(self, tolerance: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) < tolerance)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def entropy(self) -> float:
        """Von Neumann entropy in bits."""
        weights = np.clip(self.eigenvalues(), 0.0, None)
        return float(entropy(weights, base=2))

    def expectation(self, vector: np.ndarray) -> float:
        """<v|rho|v> for a vector in the same joint basis."""
        vector = np.asarray(vector, dtype=complex)
        return float(np.vdot(vector, self.matrix @ vector).real)

    def dual_rail(self) -> np.ndarray:
        """2x2 block over (|01>, |10>) of a two-mode rail density matrix."""
        if len(self.cutoffs) != 2:
            raise UnsupportedArityError(len(self.cutoffs), 2)
        index = [1, self.cutoffs[1]]
        return self.matrix[np.ix_(index, index)]
