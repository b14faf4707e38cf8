"""Pydantic schemas for amplitude-modulated qubits and demodulation results."""
import math
from enum import Enum
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from dfock.utils.exceptions import InvalidBasisError, ZeroVectorError


class Branch(str, Enum):
    """Which amplitude factor the AM qubit carries."""

    K_BRANCH = "k"
    N_BRANCH = "n"


class Strategy(str, Enum):
    """Demodulation strategy."""

    COHERENT = "coherent"
    SWAP = "swap"


class CombinationMode(str, Enum):
    """How component probabilities are combined."""

    DIRECT = "direct"
    CHARLES_PREP = "charles-prep"
    ALICE_PREP = "alice-prep"


class AMQubit(BaseModel):
    """Qubit a0|01> + factor*a1|10>, renormalized."""

    k: int = 0
    n: int = 1
    a0: complex
    a1: complex
    factor: complex = complex(1.0)
    branch: Optional[Branch] = None

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @field_validator("a0", "a1", "factor", mode="before")
    @classmethod
    def coerce_complex(cls, value) -> complex:
        return complex(value)

    @model_validator(mode="after")
    def check_state(self) -> "AMQubit":
        if not 0 <= self.k < self.n:
            raise InvalidBasisError(self.k, self.n)
        if self.norm_squared == 0.0:
            raise ZeroVectorError(f"factor {self.factor} annihilates the qubit")
        return self

    @property
    def norm_squared(self) -> float:
        return 1.0 + (abs(self.factor) ** 2 - 1.0) * abs(self.a1) ** 2

    @property
    def normalization(self) -> float:
        """N_AM = (1 + (|factor|^2 - 1)|a1|^2)^(-1/2)."""
        return 1.0 / math.sqrt(self.norm_squared)

    @property
    def vector(self) -> np.ndarray:
        return self.normalization * np.array([self.a0, self.factor * self.a1], dtype=complex)

    @property
    def original(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    def is_original(self, tolerance: float = 1e-12) -> bool:
        return abs(self.factor - 1.0) < tolerance or abs(self.a1) < tolerance

    def with_factor(self, factor: complex) -> "AMQubit":
        return self.model_copy(update={"factor": complex(factor)})


class AMOutcome(BaseModel):
    """Photon-count outcome of teleporting an AM qubit."""

    m: int = Field(..., ge=0)
    probability: float = Field(..., ge=0.0)
    recovered: bool
    residual: Optional[AMQubit] = None


class AMTeleportReport(BaseModel):
    """Outcome table for teleporting an AM qubit."""

    branch: Branch
    alpha: float
    success_probability: float = Field(..., description="Probability Bob ends with the original qubit")
    outcomes: List[AMOutcome]


class Gammas(BaseModel):
    """Displacement parameters of the coherent demodulation steps."""

    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float

    class Config:
        frozen = True


class DemodOutcome(BaseModel):
    """One detection outcome of a demodulation step."""

    strategy: Strategy
    outcome: Union[int, str]
    recovered: bool
    probability: float = Field(..., ge=0.0, le=1.0 + 1e-9)
    residual: Optional[AMQubit] = None
    fidelity: Optional[float] = Field(None, description="Fidelity of the heralded state with the original qubit")
    gammas: Dict[str, float] = Field(default_factory=dict)


class DemodReport(BaseModel):
    """Demodulation of one AM residual and the total success probability it yields."""

    strategy: Strategy
    branch: Branch
    alpha: float
    demod_probability: float = Field(..., description="Probability the residual is recovered")
    total_probability: float = Field(..., description="Teleportation plus demodulation success")
    closed_form: float
    pipeline: Optional[float] = None
    condition_residual: Optional[float] = None
    outcomes: List[DemodOutcome] = Field(default_factory=list)
