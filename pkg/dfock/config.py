"""Application configuration settings."""
import math
from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Simulator settings loaded from environment variables."""

    # Application
    APP_NAME: str = "dfock"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # Truncation
    DFOCK_DEFAULT_CUTOFF: Optional[int] = None
    CUTOFF_FLOOR: int = 25
    TAIL_TOLERANCE: float = 1e-12
    STATE_TAIL_TOLERANCE: float = 1e-10
    MAX_CUTOFF: int = 400

    # Numerical tolerances
    NORMALIZATION_TOLERANCE: float = 1e-12
    UNITARITY_TOLERANCE: float = 1e-10
    ZERO_PROBABILITY_THRESHOLD: float = 1e-300
    SINGULAR_FACTOR_THRESHOLD: float = 1e-14
    ROOT_TOLERANCE: float = 1e-12

    # Protocol
    DEFAULT_M_MAX: int = 12
    SIMPLIFIED_BETA_LIMIT: float = 0.3

    # Output
    CSV_SIGNIFICANT_DIGITS: int = 17

    class Config:
        env_file = ".env"
        case_sensitive = True

    @property
    def cutoff_floor(self) -> int:
        """Smallest cutoff the adaptive rule may return."""
        if self.DFOCK_DEFAULT_CUTOFF is not None:
            return self.DFOCK_DEFAULT_CUTOFF
        return self.CUTOFF_FLOOR

    def adaptive_cutoff(self, amplitude: complex = 0.0, extra: int = 0) -> int:
        """
        Cutoff keeping the tail mass of a state displaced by `amplitude` negligible.

        `extra` shifts the result for displaced number states |extra, amplitude>.
        """
        mean = abs(amplitude) ** 2
        needed = math.ceil(mean + 10.0 * math.sqrt(mean + 1.0) + 15.0)
        return max(self.cutoff_floor, needed) + extra


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
