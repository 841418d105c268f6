"""Clock-shift (generalized Pauli) operators for a single d-level site.

The d*d unitaries U_{r1,r2} = X^r1 Z^r2 span the site matrix algebra.
Products only ever produce phases that are exact d-th roots of unity, so
all phase bookkeeping is done with integers mod d; complex numbers appear
only when a matrix is materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np


@dataclass(frozen=True)
class WeylIndex:
    """Label (r1, r2) mod d of a clock-shift unitary."""

    r1: int
    r2: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"site dimension must be >= 2, got {self.d}")
        object.__setattr__(self, "r1", self.r1 % self.d)
        object.__setattr__(self, "r2", self.r2 % self.d)

    def combine(self, other: "WeylIndex") -> "WeylIndex":
        """Componentwise sum mod d."""
        _check_same_d(self, other)
        return WeylIndex(self.r1 + other.r1, self.r2 + other.r2, self.d)

    @property
    def is_identity(self) -> bool:
        return self.r1 == 0 and self.r2 == 0


@dataclass(frozen=True)
class PhasedWeyl:
    """A clock-shift unitary together with an exact root-of-unity prefactor.

    The represented operator is e^{2*pi*i*phase_exponent/d} * U_index.
    """

    index: WeylIndex
    phase_exponent: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase_exponent", self.phase_exponent % self.index.d)


def _check_same_d(a, b):
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} != {b.d}")


def root_of_unity(exponent: int, d: int) -> complex:
    """e^{2*pi*i*exponent/d}."""
    return np.exp(2j * np.pi * (exponent % d) / d)


def shift_matrix(d: int) -> np.ndarray:
    """Cyclic step X with X|s> = |s+1 mod d>."""
    if d < 2:
        raise ValueError(f"site dimension must be >= 2, got {d}")
    x = np.zeros((d, d), dtype=complex)
    for s in range(d):
        x[(s + 1) % d, s] = 1.0
    return x

def clock_matrix(d: int) -> np.ndarray:
    """Diagonal clock Z with Z|s> = e^{2*pi*i*s/d}|s>."""
    if d < 2:
        raise ValueError(f"site dimension must be >= 2, got {d}")
    return np.diag([root_of_unity(s, d) for s in range(d)])


def weyl_matrix(idx: WeylIndex) -> np.ndarray:
    """Materialize U_{r1,r2} = X^r1 Z^r2 as a dense complex matrix."""
    d = idx.d
    # X^r1 is the permutation s -> s+r1; Z^r2 contributes the phase on the source column.
    m = np.zeros((d, d), dtype=complex)
    for s in range(d):
        m[(s + idx.r1) % d, s] = root_of_unity(idx.r2 * s, d)
    return m


def phased_matrix(pw: PhasedWeyl) -> np.ndarray:
    return root_of_unity(pw.phase_exponent, pw.index.d) * weyl_matrix(pw.index)


def weyl_product(a: PhasedWeyl, b: PhasedWeyl) -> PhasedWeyl:
    """Exact product: U_{r1,r2} U_{t1,t2} = e^{(2*pi*i/d) t1 r2} U_{r1+t1, r2+t2}."""
    _check_same_d(a.index, b.index)
    d = a.index.d
    phase = a.phase_exponent + b.phase_exponent + b.index.r1 * a.index.r2
    return PhasedWeyl(a.index.combine(b.index), phase % d)


def commutation_phase(a: WeylIndex, b: WeylIndex) -> int:
    """Integer c mod d with U_a U_b = e^{2*pi*i*c/d} U_b U_a."""
    _check_same_d(a, b)
    return (b.r1 * a.r2 - a.r1 * b.r2) % a.d


def all_indices(d: int):
    """All d^2 Weyl labels in row-major (r1, r2) order."""
    return [WeylIndex(r1, r2, d) for r1, r2 in product(range(d), range(d))]
