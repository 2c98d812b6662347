"""The sigma rescaling, the sign-of-sine quantizer rho and its Fourier expansion.

``rho_sign`` maps F_p to {+1, -1} and ``rho_bit`` to {0, 1}. The sign is
decided by an exact integer comparison: for odd p, sin(2 pi k / p) is
positive for 1 <= k <= (p-1)/2, negative above, and zero only at k = 0,
where the convention sign(0) = +1 applies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .field import FieldElement, PrimeField, check_universe, DENSE_CAP


def sigma(x: FieldElement) -> Fraction:
    return Fraction(x.value, x.field.p)


def rho_sign(x: FieldElement) -> int:
    return 1 if x.value <= x.field.half else -1


def rho_bit(x: FieldElement) -> int:
    return (1 + rho_sign(x)) // 2


@dataclass(frozen=True, eq=False)
class RhoTable:
    field: PrimeField
    signs: np.ndarray
    bits: np.ndarray


@lru_cache(maxsize=64)
def rho_table(f: PrimeField) -> RhoTable:
    check_universe(f.p, 1, DENSE_CAP)
    signs = np.where(np.arange(f.p) <= f.half, 1, -1).astype(np.int8)
    bits = ((1 + signs) // 2).astype(np.int8)
    signs.flags.writeable = False
    bits.flags.writeable = False
    return RhoTable(f, signs, bits)


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """c(xi) with rho(x) = sum_xi c(xi) e(xi x)."""

    field: PrimeField
    coeffs: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Inverse transform, sum_xi c(xi) e(xi x) for every x."""
        return self.field.p * np.fft.ifft(self.coeffs)


def rho_fourier(f: PrimeField) -> FourierCoefficients:
    # numpy's forward transform carries e(-xi x), so fft / p is exactly
    # c(xi) = p^-1 sum_x rho(x) conj(e(xi x)).
    table = rho_table(f)
    coeffs = np.fft.fft(table.signs.astype(np.float64)) / f.p
    return FourierCoefficients(f, coeffs)


def coefficient_sum(c: FourierCoefficients) -> float:
    """sum_xi |c(xi)|; grows like log p for the rho signal."""
    return float(np.abs(c.coeffs).sum())
