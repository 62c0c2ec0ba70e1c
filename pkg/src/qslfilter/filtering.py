"""Local filtering F(k) = diag(sqrt(1-k), sqrt(k)) applied after dephasing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channels import DephasingChannel, dephase, evolve_derivative
from .qubit import Matrix2, QubitDensity

NORMALIZATION_TOL = 1e-15


class DegenerateFilterError(ValueError):
    """The filter annihilates the state (tr F rho F^dagger = 0)."""


@dataclass(frozen=True)
class FilterOp:
    k: float

    def __post_init__(self):
        if not 0.0 < self.k < 1.0:
            raise ValueError(f"filter parameter k must lie in (0, 1), got {self.k}")

    @property
    def matrix(self) -> Matrix2:
        return Matrix2(np.sqrt(1.0 - self.k), 0.0, 0.0, np.sqrt(self.k))


def _sandwich(m: Matrix2, f: FilterOp) -> Matrix2:
    """F m F^dagger for the diagonal filter."""
    a, b = np.sqrt(1.0 - f.k), np.sqrt(f.k)
    return Matrix2(a * a * m.a11, a * b * m.a12, a * b * m.a21, b * b * m.a22)


def success_probability(rho: QubitDensity, f: FilterOp):
    """tr(F rho F^dagger) = (1-k) d0 + k d1."""
    return (1.0 - f.k) * rho.d0 + f.k * rho.d1


def apply_filter(rho: QubitDensity, f: FilterOp) -> QubitDensity:
    """Filtered and renormalized state F rho F^dagger / tr(F rho F^dagger)."""
    p = success_probability(rho, f)
    if np.any(p <= NORMALIZATION_TOL):
        raise DegenerateFilterError(f"filter k={f.k} annihilates the state")
    out = _sandwich(rho.as_matrix(), f)
    return QubitDensity(np.real(out.a11) / p, np.real(out.a22) / p, out.a12 / p)


def filter_derivative(rho: QubitDensity, rho_dot: Matrix2, f: FilterOp) -> Matrix2:
    """d/dt of apply_filter(rho(t)) given rho and its derivative (quotient rule)."""
    p = success_probability(rho, f)
    p_dot = np.real((1.0 - f.k) * rho_dot.a11 + f.k * rho_dot.a22)
    num = _sandwich(rho.as_matrix(), f)
    num_dot = _sandwich(rho_dot, f)
    return num_dot.scale(1.0 / p) - num.scale(p_dot / p**2)


@dataclass(frozen=True)
class Trajectory:
    """A time-indexed family of qubit states together with its generator.

    Attributes
    ----------
    state : callable
        ``t -> QubitDensity`` (vectorized over array ``t``).
    generator : callable
        ``t -> Matrix2``, the time derivative of ``state``.
    switch : callable, optional
        Scalar function of ``t`` whose sign changes mark points where the
        singular values of the generator are not smooth. Used to place
        quadrature panel boundaries.
    scale : float
        Constant trace carried by the family. The states returned by
        ``state`` are normalized; the bounds are evaluated for
        ``scale * state(t)``. A value other than 1 describes an unnormalized
        (post-selected but not renormalized) family.
    """

    state: Callable
    generator: Callable
    switch: Callable | None = None
    scale: float = 1.0


def filtered_trajectory(
    channel: DephasingChannel,
    f: FilterOp,
    rho0: QubitDensity | None = None,
    normalized: bool = True,
) -> Trajectory:
    """Trajectory t -> apply_filter(evolve(channel, rho0, t), f).

    The evolution is evaluated as coherence scaling (:func:`dephase`), which
    equals the Kraus form but keeps precision when the coherence is tiny.

    ``rho0`` defaults to ``|+><+|``. With ``normalized=False`` the family is
    ``F rho_t F^dagger`` itself, whose trace is the success probability; for
    dephasing channels that probability is time independent (the
    populations are never touched), which is why it can be carried as a
    constant ``scale``.
    """
    rho0 = QubitDensity.plus() if rho0 is None else rho0

    def state(t):
        return apply_filter(dephase(channel, rho0, t), f)

    def generator(t):
        return filter_derivative(dephase(channel, rho0, t), evolve_derivative(channel, rho0, t), f)

    scale = 1.0 if normalized else float(success_probability(rho0, f))
    return Trajectory(state=state, generator=generator, switch=channel.rate, scale=scale)
