"""Pydantic schemas for parameters and results."""
from dfock.schemas.fock import (
    Truncation,
    ProjectorKind,
    ProjectorSpec,
    ParityOutcome,
    OnOffOutcome,
)
from dfock.schemas.protocol import (
    QubitSpec,
    ChannelSpec,
    PhaseChoice,
    BeamSplitterSpec,
    BFactors,
    OutcomeRecord,
    FiniteOutcomeRecord,
    FiniteRunReport,
    SimplifiedOutcome,
    SimplifiedModelResult,
)
from dfock.schemas.demodulation import (
    Branch,
    Strategy,
    CombinationMode,
    AMQubit,
    AMOutcome,
    AMTeleportReport,
    Gammas,
    DemodOutcome,
    DemodReport,
)
from dfock.schemas.sweep import FigureId, SweepConfig, CurvePoint, DemodPoint

__all__ = [
    # Fock schemas
    "Truncation",
    "ProjectorKind",
    "ProjectorSpec",
    "ParityOutcome",
    "OnOffOutcome",
    # Protocol schemas
    "QubitSpec",
    "ChannelSpec",
    "PhaseChoice",
    "BeamSplitterSpec",
    "BFactors",
    "OutcomeRecord",
    "FiniteOutcomeRecord",
    "FiniteRunReport",
    "SimplifiedOutcome",
    "SimplifiedModelResult",
    # Demodulation schemas
    "Branch",
    "Strategy",
    "CombinationMode",
    "AMQubit",
    "AMOutcome",
    "AMTeleportReport",
    "Gammas",
    "DemodOutcome",
    "DemodReport",
    # Sweep schemas
    "FigureId",
    "SweepConfig",
    "CurvePoint",
    "DemodPoint",
]
