"""Pydantic schemas for truncation and measurement specifications."""
from enum import Enum
from typing import Union

from pydantic import BaseModel, Field, model_validator


class Truncation(BaseModel):
    """Per-mode photon-number cutoff; basis states |0> ... |cutoff-1>."""

    cutoff: int = Field(..., ge=1, description="Number of basis states kept per mode")

    class Config:
        frozen = True


class ProjectorKind(str, Enum):
    """Projector family enumeration."""

    NUMBER = "number"
    PARITY = "parity"
    ONOFF = "onoff"


class ParityOutcome(str, Enum):
    """Parity projector outcome."""

    EVEN = "even"
    ODD = "odd"


class OnOffOutcome(str, Enum):
    """On/off detector outcome."""

    CLICK = "click"
    NOCLICK = "noclick"


class ProjectorSpec(BaseModel):
    """Single-mode measurement outcome: number(m), parity(even|odd) or onoff(click|noclick)."""

    kind: ProjectorKind
    outcome: Union[int, ParityOutcome, OnOffOutcome]

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_outcome_matches_kind(self) -> "ProjectorSpec":
        expected = {
            ProjectorKind.NUMBER: int,
            ProjectorKind.PARITY: ParityOutcome,
            ProjectorKind.ONOFF: OnOffOutcome,
        }[self.kind]
        if not isinstance(self.outcome, expected):
            raise ValueError(f"{self.kind.value} projector needs a {expected.__name__} outcome")
        if self.kind == ProjectorKind.NUMBER and self.outcome < 0:
            raise ValueError("photon number must be >= 0")
        return self

    @classmethod
    def number(cls, m: int) -> "ProjectorSpec":
        return cls(kind=ProjectorKind.NUMBER, outcome=m)

    @classmethod
    def parity(cls, outcome: str) -> "ProjectorSpec":
        return cls(kind=ProjectorKind.PARITY, outcome=ParityOutcome(outcome))

    @classmethod
    def onoff(cls, outcome: str) -> "ProjectorSpec":
        return cls(kind=ProjectorKind.ONOFF, outcome=OnOffOutcome(outcome))

    @property
    def label(self) -> str:
        value = self.outcome.value if isinstance(self.outcome, Enum) else self.outcome
        return f"{self.kind.value}({value})"

    @property
    def removes_mode(self) -> bool:
        """Number projections consume the measured mode; parity and on/off keep it."""
        return self.kind == ProjectorKind.NUMBER
