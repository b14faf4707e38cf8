"""Pydantic schemas for teleportation parameters and outcome records."""
import cmath
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from dfock.utils.exceptions import InvalidBasisError, OutOfRangeError, ZeroVectorError

NORMALIZATION_TOLERANCE = 1e-12


class QubitSpec(BaseModel):
    """Unknown qubit a0|k> + a1|n> carried by the teleported mode."""

    k: int = Field(0, description="Photon number of the first basis state")
    n: int = Field(1, description="Photon number of the second basis state")
    a0: complex = Field(..., description="Amplitude of |k>")
    a1: complex = Field(..., description="Amplitude of |n>")

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @field_validator("a0", "a1", mode="before")
    @classmethod
    def coerce_complex(cls, value) -> complex:
        return complex(value)

    @model_validator(mode="after")
    def check_basis_and_norm(self) -> "QubitSpec":
        if not 0 <= self.k < self.n:
            raise InvalidBasisError(self.k, self.n)
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"|a0|^2 + |a1|^2 = {norm!r}, expected 1")
        return self

    @classmethod
    def normalized(cls, k: int, n: int, a0: complex, a1: complex) -> Tuple["QubitSpec", bool]:
        """Build a qubit after rescaling the amplitudes; the flag tells whether rescaling happened."""
        a0, a1 = complex(a0), complex(a1)
        norm = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        if norm == 0.0:
            raise ZeroVectorError("both qubit amplitudes are zero")
        rescaled = abs(norm ** 2 - 1.0) > NORMALIZATION_TOLERANCE
        return cls(k=k, n=n, a0=a0 / norm, a1=a1 / norm), rescaled

    @classmethod
    def from_magnitude(cls, a1_magnitude: float, k: int = 0, n: int = 1) -> "QubitSpec":
        """Real qubit with |a1| given and a0 = sqrt(1 - |a1|^2)."""
        a1_magnitude = min(max(float(a1_magnitude), 0.0), 1.0)
        return cls(k=k, n=n, a0=math.sqrt(1.0 - a1_magnitude ** 2), a1=a1_magnitude)

    @property
    def difference(self) -> int:
        return self.n - self.k

    @property
    def dual_rail(self) -> np.ndarray:
        """Target state a0|01> + a1|10> in the (|01>, |10>) basis."""
        return np.array([self.a0, self.a1], dtype=complex)


class ChannelSpec(BaseModel):
    """
    Hybrid channel: coherent components |0,-beta> and |0,e^{i phi} beta> on mode 1.

    `beta=None` is the beta -> 0 limit of the success-probability formula, where the
    two components overlap fully. It has no channel state; see `formula_limit`.
    """

    beta: Optional[float] = Field(..., gt=0.0, description="Coherent amplitude of the channel")
    phi: float = Field(0.0, description="Channel phase")

    class Config:
        frozen = True

    @classmethod
    def formula_limit(cls, phi: float = 0.0) -> "ChannelSpec":
        return cls(beta=None, phi=phi)

    @property
    def amplitude(self) -> float:
        """beta, or 0 in the formula limit."""
        return 0.0 if self.beta is None else self.beta

    def require_beta(self) -> float:
        """beta of a channel that has a state."""
        if self.beta is None:
            raise OutOfRangeError("beta", None, "beta > 0 to build the channel state")
        return self.beta

    @property
    def first_amplitude(self) -> complex:
        """Amplitude of the component attached to |01>."""
        return complex(-self.require_beta())

    @property
    def second_amplitude(self) -> complex:
        """Amplitude of the component attached to |10>."""
        return self.require_beta() * cmath.exp(1j * self.phi)

    @property
    def omega(self) -> complex:
        """Phase factor -e^{i phi} picked up per photon by the second component."""
        return -cmath.exp(1j * self.phi)


class PhaseChoice(BaseModel):
    """Channel phase for a basis pair and whether it meets the sign condition."""

    phi: float
    valid: bool
    rule: str = Field(..., description="Which basis-difference rule produced phi")

    class Config:
        frozen = True


class BeamSplitterSpec(BaseModel):
    """Real beam splitter with transmittance t and reflectance r."""

    t: float = Field(..., gt=0.0, le=1.0, description="Amplitude transmittance")
    r: float = Field(..., ge=0.0, le=1.0, description="Amplitude reflectance")

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_normalization(self) -> "BeamSplitterSpec":
        if abs(self.t ** 2 + self.r ** 2 - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"t^2 + r^2 = {self.t ** 2 + self.r ** 2!r}, expected 1")
        return self

    @classmethod
    def from_transmittance(cls, t: float) -> "BeamSplitterSpec":
        return cls(t=t, r=math.sqrt(max(0.0, 1.0 - t * t)))

    def displacement_for(self, beta: float) -> float:
        """Displacement alpha = beta r / t imparted on the other port."""
        return beta * self.r / self.t

    def beta_for(self, alpha: float) -> float:
        """Coherent amplitude beta = alpha t / r needed for displacement alpha."""
        if self.r == 0.0:
            return math.inf
        return alpha * self.t / self.r


class BFactors(BaseModel):
    """Distortion factors of the small-beta model."""

    b01: float
    b10: float
    alpha: float

    class Config:
        frozen = True


class OutcomeRecord(BaseModel):
    """One measurement branch (parity j, photon count m) of the ideal protocol."""

    j: int = Field(..., ge=0, le=1, description="0 for the + superposition, 1 for the - one")
    m: int = Field(..., ge=0, description="Photon count on the teleported mode")
    probability: float = Field(..., ge=0.0)
    bob_raw: Optional[np.ndarray] = Field(None, description="Normalized pre-correction dual-rail state")
    bob_corrected: Optional[np.ndarray] = Field(None, description="State after the correction unitary")
    am_reference: Optional[np.ndarray] = Field(None, description="Amplitude-modulated reference state")
    fidelity: Optional[float] = None
    singular: bool = False
    residual: bool = False
    approximate: bool = False

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class FiniteOutcomeRecord(BaseModel):
    """Branch of the finite-transmittance run with Bob's conditional density matrix."""

    j: int = Field(..., ge=0, le=1)
    m: int = Field(..., ge=0)
    probability: float = Field(..., ge=0.0)
    bob_density: np.ndarray
    fidelity_corrected: float
    fidelity_to_ideal: Optional[float] = None

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class FiniteRunReport(BaseModel):
    """Outcome list of a finite-transmittance run plus its overlap with the ideal state."""

    t: float
    beta: float
    alpha: float
    records: List[FiniteOutcomeRecord]
    total_probability: float
    overlap_to_ideal: float

    class Config:
        frozen = True


class SimplifiedOutcome(BaseModel):
    """Single-photon detection outcome of the small-beta model."""

    label: str = Field(..., description="'01' photon in mode 2, '10' photon in mode 1")
    probability: float
    factor: float
    bob_raw: np.ndarray
    bob_corrected: np.ndarray

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class SimplifiedModelResult(BaseModel):
    """States and factors of the small-beta model."""

    factors: BFactors
    outcomes: List[SimplifiedOutcome]
    bridge_gap: float = Field(..., description="Relative gap between B01 and |A_1^(01)|")
    within_limit: bool

    class Config:
        frozen = True
