"""Displacement service: matrix elements, displaced number states, amplitude factors and cat states."""
import cmath
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq
from scipy.special import comb, gammaln

from dfock.config import Settings, get_settings
from dfock.models import FockVector, SingleModeOperator
from dfock.models.displaced import CatState, MatrixElementTable
from dfock.schemas.fock import Truncation
from dfock.utils.exceptions import (
    NumericDomainError,
    OutOfRangeError,
    SingularFactorError,
    TruncationInsufficientError,
    UnsupportedRowError,
    ZeroVectorError,
)

logger = logging.getLogger(__name__)


def matrix_element_row(l: int, photons: np.ndarray, alpha: complex, log_scale: float = 0.0) -> np.ndarray:
    """
    c_{l n}(alpha) for every n in `photons`, times exp(log_scale).

    Sum over k of (-1)^k C(l,k) |alpha|^(n-l+2k) n!/((n-l+k)! sqrt(l! n!)),
    with the common phase e^{i arg(alpha)(n-l)}. Terms with n-l+k < 0 vanish.
    """
    photons = np.asarray(photons, dtype=int)
    magnitude = abs(alpha)
    if magnitude == 0.0:
        return np.where(photons == l, math.exp(log_scale), 0.0).astype(complex)

    log_magnitude = math.log(magnitude)
    base = gammaln(photons + 1) * 0.5 - 0.5 * gammaln(l + 1) + log_scale
    total = np.zeros(photons.shape, dtype=float)
    for k in range(l + 1):
        shifted = photons - l + k
        valid = shifted >= 0
        exponent = base + (photons - l + 2 * k) * log_magnitude - gammaln(np.maximum(shifted, 0) + 1)
        term = (-1) ** k * comb(l, k) * np.exp(np.where(valid, exponent, -np.inf))
        total += term
    phase = np.exp(1j * cmath.phase(alpha) * (photons - l))
    return total * phase


class DisplacementService:
    """Service for displaced number states and the factors derived from them."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def matrix_element(self, l: int, n: int, alpha: complex) -> complex:
        """c_{ln}(alpha) = <n|D(alpha)|l> / F."""
        if l < 0 or n < 0:
            raise OutOfRangeError("(l, n)", (l, n), "l, n >= 0")
        return complex(matrix_element_row(l, np.array([n]), complex(alpha))[0])

    def matrix_element_closed(self, l: int, m: int, alpha: complex) -> complex:
        """Explicit row formulas for l = 0..3."""
        if l not in (0, 1, 2, 3):
            raise UnsupportedRowError(l)
        alpha = complex(alpha)
        conj = alpha.conjugate()

        def power(coefficient: float, exponent: int, conj_exponent: int = 0) -> complex:
            # zero coefficients guard the negative powers at small m
            if coefficient == 0:
                return 0j
            return coefficient * alpha ** exponent * conj ** conj_exponent

        if l == 0:
            numerator = power(1, m)
        elif l == 1:
            numerator = power(m, m - 1) - power(1, m, 1)
        elif l == 2:
            numerator = (
                power(m * (m - 1), m - 2) - power(2 * m, m - 1, 1) + power(1, m, 2)
            ) / math.sqrt(2)
        else:
            numerator = (
                power(m * (m - 1) * (m - 2), m - 3)
                - power(3 * m * (m - 1), m - 2, 1)
                + power(3 * m, m - 1, 2)
                - power(1, m, 3)
            ) / math.sqrt(6)
        return numerator / math.sqrt(math.factorial(m))

    def matrix_element_table(self, alpha: complex, cutoff: int) -> MatrixElementTable:
        """Table of c_{ln}(alpha) for l, n < cutoff."""
        photons = np.arange(cutoff)
        values = np.array([matrix_element_row(l, photons, complex(alpha)) for l in range(cutoff)])
        return MatrixElementTable(complex(alpha), values)

    def displaced_number_state(self, l: int, alpha: complex, truncation: Truncation) -> FockVector:
        """
        |l, alpha> = D(alpha)|l> in the truncated basis.

        Handles:
        - l outside the basis
        - Norm left outside the cutoff above the tail tolerance
        """
        if not 0 <= l < truncation.cutoff:
            raise OutOfRangeError("l", l, f"0 <= l < {truncation.cutoff}")
        alpha = complex(alpha)
        amplitudes = matrix_element_row(l, np.arange(truncation.cutoff), alpha, -abs(alpha) ** 2 / 2.0)
        tail = max(0.0, 1.0 - float(np.sum(np.abs(amplitudes) ** 2)))
        if tail > self.settings.STATE_TAIL_TOLERANCE:
            required = self.settings.adaptive_cutoff(alpha, extra=l)
            raise TruncationInsufficientError(truncation.cutoff, max(required, truncation.cutoff + 1), tail)
        return FockVector(truncation, amplitudes)

    def coherent_state(self, alpha: complex, truncation: Truncation) -> FockVector:
        return self.displaced_number_state(0, alpha, truncation)

    def displacement_operator(self, alpha: complex, truncation: Truncation) -> SingleModeOperator:
        """D(alpha) = exp(alpha a^dagger - alpha^* a) by matrix exponential of the truncated generator."""
        cutoff = truncation.cutoff
        lowering = np.diag(np.sqrt(np.arange(1, cutoff, dtype=complex)), k=1)
        generator = complex(alpha) * lowering.conj().T - complex(alpha).conjugate() * lowering
        return SingleModeOperator(expm(generator))

    def amplitude_factor(self, k: int, n: int, m: int, alpha: complex) -> complex:
        """A_m^{(kn)}(alpha) = c_{nm}(alpha) / c_{km}(alpha)."""
        if k == n:
            return 1.0 + 0j
        denominator = self.matrix_element(k, m, alpha)
        if abs(denominator) < self.settings.SINGULAR_FACTOR_THRESHOLD:
            raise SingularFactorError(k, n, m, alpha)
        return self.matrix_element(n, m, alpha) / denominator

    def solve_unit_factor(self, k: int, n: int, m: int, bracket: Tuple[float, float]) -> float:
        """Real alpha inside `bracket` where |A_m^{(kn)}(alpha)| = 1."""
        def excess(alpha: float) -> float:
            return abs(self.matrix_element(n, m, alpha)) - abs(self.matrix_element(k, m, alpha))

        low, high = bracket
        if excess(low) * excess(high) > 0:
            raise NumericDomainError(
                f"|A_{m}^({k}{n})| - 1 does not change sign on [{low}, {high}]",
                details={"k": k, "n": n, "m": m, "bracket": [low, high]},
            )
        root = brentq(excess, low, high, xtol=self.settings.ROOT_TOLERANCE)
        logger.debug(f"Unit amplitude factor for ({k},{n}) m={m} at alpha={root}")
        return float(root)

    @staticmethod
    def coherent_overlap(a: complex, b: complex) -> complex:
        """<0,a|0,b>."""
        a, b = complex(a), complex(b)
        return cmath.exp(-abs(a) ** 2 / 2.0 - abs(b) ** 2 / 2.0 + a.conjugate() * b)

    def cat_norm_squared(self, beta: float, phi: float, sign: int) -> float:
        """Squared norm of the unnormalized superposition, i.e. 1 / N^2."""
        overlap = self.coherent_overlap(-beta, beta * cmath.exp(1j * phi))
        if sign > 0:
            return 2.0 + 2.0 * (cmath.exp(-1j * phi) * overlap).real
        return 2.0 - 2.0 * overlap.real

    def cat_normalization(self, beta: float, phi: float, sign: int) -> float:
        """N_{+phi} or N_{-phi}; at phi = 0 these are (2(1 +/- e^{-2 beta^2}))^{-1/2}."""
        norm_squared = self.cat_norm_squared(beta, phi, sign)
        if norm_squared < self.settings.ZERO_PROBABILITY_THRESHOLD:
            raise ZeroVectorError(f"superposition with sign {sign:+d} vanishes at beta={beta}, phi={phi}")
        return 1.0 / math.sqrt(norm_squared)

    def cat_overlap(self, beta: float, phi: float) -> complex:
        """<Psi_+|Psi_-> of the normalized pair."""
        overlap = self.coherent_overlap(-beta, beta * cmath.exp(1j * phi))
        plus = self.cat_normalization(beta, phi, +1)
        minus = self.cat_normalization(beta, phi, -1)
        return plus * minus * (1.0 - overlap + cmath.exp(1j * phi) * (overlap.conjugate() - 1.0))

    def cat_gram(self, beta: float, phi: float) -> np.ndarray:
        """Gram matrix of (Psi_+, Psi_-)."""
        overlap = self.cat_overlap(beta, phi)
        return np.array([[1.0, overlap], [overlap.conjugate(), 1.0]], dtype=complex)

    def cat_state(self, beta: float, phi: float, sign: int, truncation: Truncation) -> CatState:
        """
        Normalized superposition of |0,-beta> and |0, e^{i phi} beta>.

        Handles:
        - Odd superposition at beta = 0 (zero vector)
        - Cutoff too small for beta
        """
        if beta < 0:
            raise OutOfRangeError("beta", beta, "beta >= 0")
        sign = 1 if sign > 0 else -1
        normalization = self.cat_normalization(beta, phi, sign)
        first = self.coherent_state(-beta, truncation).amplitudes
        second = self.coherent_state(beta * cmath.exp(1j * phi), truncation).amplitudes
        weight = cmath.exp(-1j * phi) if sign > 0 else -1.0
        vector = FockVector(truncation, normalization * (first + weight * second))
        partner = self.cat_overlap(beta, phi) if beta > 0 else 0j
        return CatState(beta, phi, sign, normalization, vector, partner)
