"""Numeric domain models."""
from dfock.models.state import FockVector, MultiModeState, DensityMatrix, MAX_MODES
from dfock.models.operator import SingleModeOperator, TwoModeOperator, PhotonBlock
from dfock.models.displaced import MatrixElementTable, CatState

__all__ = [
    "FockVector",
    "MultiModeState",
    "DensityMatrix",
    "MAX_MODES",
    "SingleModeOperator",
    "TwoModeOperator",
    "PhotonBlock",
    "MatrixElementTable",
    "CatState",
]
