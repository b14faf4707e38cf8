"""Pydantic schemas for parameter sweeps and curve data."""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator


class FigureId(str, Enum):
    """Reproducible probability figures."""

    FIG_2A = "2a"
    FIG_2B = "2b"
    FIG_2C = "2c"
    FIG_2D = "2d"
    FIG_3A = "3a"
    FIG_3B = "3b"
    FIG_3C = "3c"
    FIG_3D = "3d"
    FIG_4A = "4a"
    FIG_4B = "4b"
    FIG_5A = "5a"
    FIG_5B = "5b"


class SweepConfig(BaseModel):
    """Parameters of one sweep command."""

    command: str = Field(..., min_length=1)
    alphas: List[float] = Field(..., min_length=1, description="Displacement amplitudes")
    a1_count: int = Field(101, ge=1, description="Grid points over |a1| in [0, 1]")
    out: Optional[str] = None

    @field_validator("alphas")
    @classmethod
    def check_alphas(cls, value: List[float]) -> List[float]:
        if any(alpha <= 0.0 for alpha in value):
            raise ValueError("alpha values must be > 0")
        return value


class CurvePoint(BaseModel):
    """Point of a probability curve."""

    a1: float = Field(..., description="|a1|")
    curve: int = Field(..., ge=1, description="Curve number in the figure legend")
    value: float = Field(..., ge=0.0, le=1.0 + 1e-9)


class DemodPoint(BaseModel):
    """Point of a demodulation success curve."""

    alpha: float = Field(..., gt=0.0, lt=1.0)
    a1: float = Field(..., description="|a1|")
    value: float = Field(..., ge=0.0, le=1.0 + 1e-9)
    formula_id: str = Field(..., description="Strategy, branch and order of the closed form")
