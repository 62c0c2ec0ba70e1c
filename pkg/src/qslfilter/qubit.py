"""Closed-form 2x2 matrix algebra for single-qubit states.

Every matrix here is 2x2, so eigenvalues and singular values come from the
quadratic formula rather than an iterative solver. Fields may hold numpy
arrays of matching shape, in which case every operation acts elementwise and
a single object stands for a whole batch of matrices (e.g. a trajectory
sampled on a time grid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

POSITIVITY_TOL = 1e-12
TRACE_TOL = 1e-12


@dataclass(frozen=True)
class Matrix2:
    """A complex 2x2 matrix ``[[a11, a12], [a21, a22]]``."""

    a11: complex
    a12: complex
    a21: complex
    a22: complex

    def __post_init__(self):
        for name in ("a11", "a12", "a21", "a22"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"Matrix2 entry {name} is not finite")

    @classmethod
    def _unchecked(cls, a11, a12, a21, a22) -> Matrix2:
        # arithmetic on finite matrices stays finite; skip the entry scan
        m = object.__new__(cls)
        for name, val in zip(("a11", "a12", "a21", "a22"), (a11, a12, a21, a22)):
            object.__setattr__(m, name, val)
        return m

    @classmethod
    def identity(cls) -> Matrix2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def zeros(cls) -> Matrix2:
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, m) -> Matrix2:
        m = np.asarray(m, dtype=complex)
        return cls(m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1])

    def to_array(self) -> np.ndarray:
        """Stack into an ndarray of shape ``(..., 2, 2)``."""
        a11, a12, a21, a22 = np.broadcast_arrays(
            *(np.asarray(x, dtype=complex) for x in (self.a11, self.a12, self.a21, self.a22))
        )
        return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)

    def dagger(self) -> Matrix2:
        return Matrix2._unchecked(
            np.conj(self.a11), np.conj(self.a21), np.conj(self.a12), np.conj(self.a22)
        )

    def trace(self):
        return self.a11 + self.a22

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def __add__(self, other: Matrix2) -> Matrix2:
        return Matrix2._unchecked(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
        )

    def __sub__(self, other: Matrix2) -> Matrix2:
        return self + other.scale(-1.0)

    def __matmul__(self, other: Matrix2) -> Matrix2:
        return Matrix2._unchecked(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def scale(self, c) -> Matrix2:
        return Matrix2._unchecked(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    def max_abs_diff(self, other: Matrix2) -> float:
        d = self - other
        return float(
            max(np.max(np.abs(x)) for x in (d.a11, d.a12, d.a21, d.a22))
        )


SIGMA_0 = Matrix2.identity()
SIGMA_3 = Matrix2(1.0, 0.0, 0.0, -1.0)


@dataclass(frozen=True)
class QubitDensity:
    """Qubit density matrix ``[[d0, c], [conj(c), d1]]``.

    Parameters
    ----------
    d0, d1 : float or ndarray
        Populations of ``|0>`` and ``|1>``.
    c : complex or ndarray
        Coherence (upper off-diagonal entry).
    """

    d0: float
    d1: float
    c: complex

    def __post_init__(self):
        d0 = np.asarray(self.d0, dtype=float)
        d1 = np.asarray(self.d1, dtype=float)
        c = np.asarray(self.c)
        if not (np.all(np.isfinite(d0)) and np.all(np.isfinite(d1)) and np.all(np.isfinite(c))):
            raise ValueError("density entries must be finite")
        if np.any(np.abs(d0 + d1 - 1.0) > TRACE_TOL):
            raise ValueError("density must have unit trace")
        if np.any(d0 < 0.0) or np.any(d1 < 0.0):
            raise ValueError("populations must be nonnegative")
        if np.any(d0 * d1 - np.abs(c) ** 2 < -POSITIVITY_TOL):
            raise ValueError("density is not positive semidefinite")

    @classmethod
    def plus(cls) -> QubitDensity:
        """The pure state ``|+><+|``."""
        return cls(0.5, 0.5, 0.5)

    @classmethod
    def maximally_mixed(cls) -> QubitDensity:
        return cls(0.5, 0.5, 0.0)

    @classmethod
    def from_matrix(cls, m: Matrix2, atol: float = 1e-12) -> QubitDensity:
        if np.any(np.abs(m.a12 - np.conj(m.a21)) > atol):
            raise ValueError("matrix is not Hermitian")
        if np.any(np.abs(np.imag(m.a11)) > atol) or np.any(np.abs(np.imag(m.a22)) > atol):
            raise ValueError("matrix is not Hermitian")
        return cls(np.real(m.a11), np.real(m.a22), m.a12)

    def as_matrix(self) -> Matrix2:
        return Matrix2._unchecked(self.d0, self.c, np.conj(self.c), self.d1)


def purity(rho: QubitDensity):
    """tr(rho^2); lies in [1/2, 1] for a qubit."""
    return rho.d0**2 + rho.d1**2 + 2.0 * np.abs(rho.c) ** 2


def overlap(a: QubitDensity, b: QubitDensity):
    """tr(a b) for two Hermitian matrices (always real)."""
    return a.d0 * b.d0 + a.d1 * b.d1 + 2.0 * np.real(a.c * np.conj(b.c))


def relative_purity(rho_tau: QubitDensity, rho_later: QubitDensity):
    """tr(rho_tau rho_later) / tr(rho_tau^2)."""
    return overlap(rho_tau, rho_later) / purity(rho_tau)


def overlap_change(rho_tau: QubitDensity, rho_later: QubitDensity):
    """tr(rho_tau (rho_later - rho_tau)), i.e. (f - 1) tr(rho_tau^2) without cancellation."""
    return (
        rho_tau.d0 * (rho_later.d0 - rho_tau.d0)
        + rho_tau.d1 * (rho_later.d1 - rho_tau.d1)
        + 2.0 * np.real(rho_tau.c * np.conj(rho_later.c - rho_tau.c))
    )


def hermitian_eigenvalues(rho: QubitDensity):
    """Eigenvalues of a density matrix, largest first.

    For a positive semidefinite matrix these coincide with its singular values.
    """
    half_gap = np.sqrt(((rho.d0 - rho.d1) / 2.0) ** 2 + np.abs(rho.c) ** 2)
    mean = (rho.d0 + rho.d1) / 2.0
    return mean + half_gap, np.maximum(mean - half_gap, 0.0)


def singular_values(m: Matrix2):
    """Singular values of ``m``, largest first.

    With ``m^dagger m = [[p, q], [conj(q), r]]``:
    ``s1 + s2 = sqrt(||m||_F^2 + 2 |det m|)`` and
    ``s1^2 - s2^2 = sqrt((p - r)^2 + 4 |q|^2)``. Both are sums of squares, so
    nearly equal singular values keep full relative precision. Entries are
    first divided by the largest magnitude so the fourth powers cannot
    underflow or overflow.
    """
    norm = np.maximum.reduce([np.abs(m.a11), np.abs(m.a12), np.abs(m.a21), np.abs(m.a22)])
    safe = np.where(norm > 0, norm, 1.0)
    a11, a12, a21, a22 = (np.asarray(x) / safe for x in (m.a11, m.a12, m.a21, m.a22))
    p = np.abs(a11) ** 2 + np.abs(a21) ** 2
    r = np.abs(a12) ** 2 + np.abs(a22) ** 2
    q = np.conj(a11) * a12 + np.conj(a21) * a22
    total = np.sqrt(p + r + 2.0 * np.abs(a11 * a22 - a12 * a21))
    spread = np.sqrt((p - r) ** 2 + 4.0 * np.abs(q) ** 2)
    gap = np.divide(spread, total, out=np.zeros_like(total), where=total > 0)
    return norm * (total + gap) / 2.0, norm * np.maximum((total - gap) / 2.0, 0.0)
