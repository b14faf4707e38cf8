"""Single- and two-mode operators on truncated photon-number spaces."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from dfock.models.state import freeze
from dfock.utils.exceptions import TruncationMismatchError


@dataclass(frozen=True)
class SingleModeOperator:
    """Square matrix acting on one truncated mode (or on the dual-rail qubit when cutoff is 2)."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = freeze(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise TruncationMismatchError(matrix.shape[0], matrix.shape[-1])
        object.__setattr__(self, "matrix", matrix)

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "SingleModeOperator":
        return SingleModeOperator(self.matrix.conj().T)

    def __matmul__(self, other: "SingleModeOperator") -> "SingleModeOperator":
        if other.cutoff != self.cutoff:
            raise TruncationMismatchError(self.cutoff, other.cutoff)
        return SingleModeOperator(self.matrix @ other.matrix)

    def unitarity_error(self, edge: int = 0) -> float:
        """max |U^dagger U - I| over the block that excludes the top `edge` basis states."""
        size = self.cutoff - edge
        gram = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(gram[:size, :size] - np.eye(size))))

    def is_unitary(self, tolerance: float = 1e-10, edge: int = 0) -> bool:
        return self.unitarity_error(edge) < tolerance


@dataclass(frozen=True)
class PhotonBlock:
    """Matrix of a number-conserving operator inside one total-photon-number sector."""

    total: int
    first: np.ndarray
    matrix: np.ndarray

    @property
    def second(self) -> np.ndarray:
        return self.total - self.first


@dataclass(frozen=True)
class TwoModeOperator:
    """
    Number-conserving two-mode operator stored block by block.

    Each block acts on the basis states |p, total - p> that fit inside the cutoff box.
    Blocks with total < min(cutoffs) are complete sectors.
    """

    cutoffs: Tuple[int, int]
    blocks: Tuple[PhotonBlock, ...]

    @property
    def complete_totals(self) -> range:
        return range(min(self.cutoffs))

    def act(self, tensor: np.ndarray) -> np.ndarray:
        """Apply to a tensor whose first two axes are the operator's modes."""
        if tuple(tensor.shape[:2]) != tuple(self.cutoffs):
            raise TruncationMismatchError(int(np.prod(self.cutoffs)), int(np.prod(tensor.shape[:2])))
        result = np.zeros(tensor.shape, dtype=complex)
        for block in self.blocks:
            sector = tensor[block.first, block.second]
            result[block.first, block.second] = np.tensordot(block.matrix, sector, axes=(1, 0))
        return result

    def dagger(self) -> "TwoModeOperator":
        blocks = tuple(
            PhotonBlock(block.total, block.first, block.matrix.conj().T) for block in self.blocks
        )
        return TwoModeOperator(self.cutoffs, blocks)

    def to_dense(self) -> np.ndarray:
        """Full matrix over the row-major joint basis; for small cutoffs only."""
        size = self.cutoffs[0] * self.cutoffs[1]
        dense = np.zeros((size, size), dtype=complex)
        for block in self.blocks:
            index = block.first * self.cutoffs[1] + block.second
            dense[np.ix_(index, index)] = block.matrix
        return dense

    def unitarity_error(self) -> float:
        """Largest deviation from unitarity over the complete sectors."""
        worst = 0.0
        for block in self.blocks:
            if block.total in self.complete_totals:
                gram = block.matrix.conj().T @ block.matrix
                worst = max(worst, float(np.max(np.abs(gram - np.eye(len(block.first))))))
        return worst
