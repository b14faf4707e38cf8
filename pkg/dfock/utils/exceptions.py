"""Custom exceptions for the simulator with standardized error codes."""
from enum import Enum
from typing import Any, Optional


USAGE_EXIT_CODE = 2
NUMERIC_EXIT_CODE = 3


class ErrorCode(str, Enum):
    """Standardized error codes for the simulator."""

    # Truncation errors
    TRUNCATION_MISMATCH = "TRUNCATION_MISMATCH"
    TRUNCATION_INSUFFICIENT = "TRUNCATION_INSUFFICIENT"

    # State errors
    OUT_OF_RANGE = "OUT_OF_RANGE"
    UNSUPPORTED_ARITY = "UNSUPPORTED_ARITY"
    INVALID_MODE = "INVALID_MODE"
    EMPTY_SELECTION = "EMPTY_SELECTION"
    ZERO_VECTOR = "ZERO_VECTOR"
    ZERO_PROBABILITY_BRANCH = "ZERO_PROBABILITY_BRANCH"

    # Formula errors
    SINGULAR_FACTOR = "SINGULAR_FACTOR"
    UNSUPPORTED_ROW = "UNSUPPORTED_ROW"
    INVALID_BASIS = "INVALID_BASIS"
    DOMAIN_ERROR = "DOMAIN_ERROR"

    # Validation errors
    VALIDATION_ERROR = "VALIDATION_ERROR"
    STRATEGY_MISMATCH = "STRATEGY_MISMATCH"

    # Output errors
    OUTPUT_ERROR = "OUTPUT_ERROR"

    # Internal errors
    INTERNAL_ERROR = "INTERNAL_ERROR"


class DfockException(Exception):
    """Base exception for the simulator with standardized error format."""

    def __init__(
        self,
        message: str,
        exit_code: int = NUMERIC_EXIT_CODE,
        error_code: ErrorCode = ErrorCode.INTERNAL_ERROR,
        details: Optional[dict[str, Any]] = None,
    ):
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> dict:
        """Convert exception to standardized error report dict."""
        response = {
            "error": {
                "code": self.error_code.value,
                "message": self.message,
            }
        }
        if self.details:
            response["error"]["details"] = self.details
        return response


class TruncationMismatchError(DfockException):
    """Raised when states or operators with different cutoffs are combined."""

    def __init__(self, expected: int, received: int):
        super().__init__(
            message=f"Truncation mismatch: expected cutoff {expected}, received cutoff {received}",
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.TRUNCATION_MISMATCH,
            details={"expected": expected, "received": received},
        )


class TruncationInsufficientError(DfockException):
    """Raised when a cutoff leaves too much norm outside the basis."""

    def __init__(self, cutoff: int, required_cutoff: int, tail_mass: float):
        super().__init__(
            message=(
                f"Cutoff {cutoff} leaves tail mass {tail_mass:.3e}; "
                f"use a cutoff of at least {required_cutoff}"
            ),
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.TRUNCATION_INSUFFICIENT,
            details={
                "cutoff": cutoff,
                "required_cutoff": required_cutoff,
                "tail_mass": tail_mass,
            },
        )


class OutOfRangeError(DfockException):
    """Raised when a parameter lies outside its admissible range."""

    def __init__(self, name: str, value: Any, allowed: str):
        super().__init__(
            message=f"{name}={value} is out of range ({allowed})",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.OUT_OF_RANGE,
            details={"name": name, "value": str(value), "allowed": allowed},
        )


class UnsupportedArityError(DfockException):
    """Raised when a state would exceed the supported number of modes."""

    def __init__(self, mode_count: int, max_modes: int = 4):
        super().__init__(
            message=f"{mode_count} modes requested; at most {max_modes} are supported",
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.UNSUPPORTED_ARITY,
            details={"mode_count": mode_count, "max_modes": max_modes},
        )


class InvalidModeError(DfockException):
    """Raised when a mode label is not present in a state."""

    def __init__(self, mode: int, labels: tuple):
        super().__init__(
            message=f"Mode {mode} not found; state carries modes {list(labels)}",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.INVALID_MODE,
            details={"mode": mode, "labels": list(labels)},
        )


class EmptySelectionError(DfockException):
    """Raised when an operation needs a non-empty set of modes."""

    def __init__(self, operation: str):
        super().__init__(
            message=f"{operation} needs at least one mode",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.EMPTY_SELECTION,
            details={"operation": operation},
        )


class ZeroVectorError(DfockException):
    """Raised when a construction produces the zero vector."""

    def __init__(self, reason: str):
        super().__init__(
            message=f"Zero vector: {reason}",
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.ZERO_VECTOR,
            details={"reason": reason},
        )


class ZeroProbabilityBranchError(DfockException):
    """Raised when renormalizing a branch of vanishing probability."""

    def __init__(self, probability: float, outcome: str):
        super().__init__(
            message=f"Outcome {outcome} has probability {probability:.3e}; cannot renormalize",
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.ZERO_PROBABILITY_BRANCH,
            details={"probability": probability, "outcome": outcome},
        )


class SingularFactorError(DfockException):
    """Raised when an amplitude factor has a vanishing denominator."""

    def __init__(self, k: int, n: int, m: int, alpha: complex):
        super().__init__(
            message=f"Amplitude factor for basis ({k},{n}) at m={m} is singular at alpha={alpha}",
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.SINGULAR_FACTOR,
            details={"k": k, "n": n, "m": m, "alpha": str(alpha)},
        )


class UnsupportedRowError(DfockException):
    """Raised when a closed-form matrix-element row is not available."""

    def __init__(self, row: int):
        super().__init__(
            message=f"No closed form for row l={row}; rows 0 to 3 are available",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.UNSUPPORTED_ROW,
            details={"row": row},
        )


class InvalidBasisError(DfockException):
    """Raised when a qubit basis pair does not satisfy k < n."""

    def __init__(self, k: int, n: int):
        super().__init__(
            message=f"Basis pair ({k},{n}) is invalid; need 0 <= k < n",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.INVALID_BASIS,
            details={"k": k, "n": n},
        )


class NumericDomainError(DfockException):
    """Raised when a formula is evaluated outside its numeric domain."""

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=NUMERIC_EXIT_CODE,
            error_code=ErrorCode.DOMAIN_ERROR,
            details=details,
        )


class StrategyMismatchError(DfockException):
    """Raised when a demodulation strategy is combined with an unsupported branch or basis."""

    def __init__(self, strategy: str, branch: str, reason: str):
        super().__init__(
            message=f"Strategy '{strategy}' cannot process branch '{branch}': {reason}",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.STRATEGY_MISMATCH,
            details={"strategy": strategy, "branch": branch},
        )


class OutputPathError(DfockException):
    """Raised when an output file cannot be written."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Cannot write '{path}': {reason}",
            exit_code=USAGE_EXIT_CODE,
            error_code=ErrorCode.OUTPUT_ERROR,
            details={"path": path},
        )
