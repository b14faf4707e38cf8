"""Tables and superposition states built from displaced number states."""
from dataclasses import dataclass

import numpy as np

from dfock.models.state import FockVector, freeze


@dataclass(frozen=True)
class MatrixElementTable:
    """values[l, n] = <n|D(alpha)|l> / F with F = exp(-|alpha|^2 / 2)."""

    alpha: complex
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", freeze(self.values))

    @property
    def cutoff(self) -> int:
        return self.values.shape[0]

    @property
    def envelope(self) -> float:
        return float(np.exp(-abs(self.alpha) ** 2 / 2.0))

    def orthonormality_error(self, rows: int) -> float:
        """max |F^2 sum_n c_ln^* c_kn - delta_lk| over l, k < rows."""
        block = self.values[:rows]
        gram = self.envelope ** 2 * (block.conj() @ block.T)
        return float(np.max(np.abs(gram - np.eye(rows))))


@dataclass(frozen=True)
class CatState:
    """
    Superposition of the two channel components.

    sign +1: N(|0,-beta> + e^{-i phi}|0, e^{i phi} beta>)
    sign -1: N(|0,-beta> - |0, e^{i phi} beta>)
    """

    beta: float
    phi: float
    sign: int
    normalization: float
    vector: FockVector
    partner_overlap: complex
