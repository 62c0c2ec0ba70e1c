"""Unital qubit dephasing channels.

Two models are provided:

* phase damping by a zero-temperature bosonic bath with an Ohmic-like
  spectral density ``J(w) = wc^(1-s) w^s exp(-w/wc)``; the coherence decays
  as ``p(t) = exp(-Gamma(t))`` with ``Gamma`` obtained by quadrature;
* dephasing by random telegraph noise (RTN) of amplitude ``alpha`` and
  correlation time ``delta``, with the analytic coherence ``Lambda(t)``.

Both are represented by a :class:`DephasingChannel`, which only needs the
coherence factor and its time derivative. Everything else (Kraus pair,
evolution) follows from those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .qubit import SIGMA_0, SIGMA_3, Matrix2, QubitDensity

#: Below this ``w / wc`` the ``(1 - cos wt) / w^2`` factor is replaced by its limit.
SMALL_FREQUENCY = 1e-8
#: Absolute bound on the neglected spectral tail.
TAIL_TOL = 1e-12
KRAUS_TOL = 1e-12


class QuadratureError(RuntimeError):
    """Raised when the spectral quadrature cannot reach its tolerance."""


@dataclass(frozen=True)
class OhmicSpec:
    """Ohmic-like bath: Ohmicity ``s`` and cutoff frequency ``omega_c``."""

    s: float
    omega_c: float = 1.0

    def __post_init__(self):
        if not (self.s > 0 and math.isfinite(self.s)):
            raise ValueError(f"Ohmicity s must be positive, got {self.s}")
        if not (self.omega_c > 0 and math.isfinite(self.omega_c)):
            raise ValueError(f"cutoff omega_c must be positive, got {self.omega_c}")

    @property
    def non_markovian(self) -> bool:
        return 2.5 <= self.s <= 5.5


@dataclass(frozen=True)
class RtnSpec:
    """Random telegraph noise with coupling ``alpha`` and correlation time ``delta``."""

    alpha: float
    delta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def non_markovian(self) -> bool:
        return self.alpha * self.delta >= 0.5


# ---------------------------------------------------------------------------
# Ohmic bath: Gamma(t) and dGamma/dt by composite Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

_GL_LOW = np.polynomial.legendre.leggauss(8)
_GL_HIGH = np.polynomial.legendre.leggauss(16)
_MAX_REFINE = 4
_MAX_NODES = 2_000_000
_CHUNK_ELEMENTS = 2_000_000


def _spectral_cutoff(s: float) -> float:
    """Upper frequency (in units of omega_c) beyond which the tail is < TAIL_TOL."""
    a = max(s - 1.0, s - 2.0, 0.0)
    w = max(10.0, 2.0 * a + 2.0)
    # both integrands are bounded by 8 u^a e^-u for u >= 1
    while 8.0 * w**a * math.exp(-w) / (1.0 - a / w) > TAIL_TOL:
        w += 1.0
    return w


def _panel_edges(width: float, cutoff: float) -> np.ndarray:
    # geometric grading towards u = 0 handles the u^(s-1) behaviour of sub-Ohmic baths
    graded = width * 2.0 ** -np.arange(40, 0, -1)
    uniform = np.arange(width, cutoff, width)
    return np.concatenate(([0.0], graded, uniform, [cutoff]))


def _nodes(edges: np.ndarray, rule) -> tuple[np.ndarray, np.ndarray]:
    x, w = rule
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return u, weights


def _weighted_sums(u: np.ndarray, w: np.ndarray, x: np.ndarray, s: float, kind: str) -> np.ndarray:
    """Quadrature sums sum_j w_j g(u_j; x) for every x.

    Node-only factors and weights are folded into one coefficient vector so
    the (x, u) table is touched as few times as possible. Each row is summed
    on its own, so a value depends only on its x.
    """
    envelope = 4.0 * np.exp(-u) * w
    half = np.outer(0.5 * x, u)
    sin_half = np.sin(half)
    out = []
    if kind in ("decay", "both"):
        # (1 - cos ux) / u^2 written as 2 sin^2(ux/2) / u^2 to avoid cancellation
        coef = envelope * u ** (s - 2.0) * 2.0
        table = sin_half * sin_half * coef
        small = u < SMALL_FREQUENCY
        if np.any(small):
            table[:, small] = np.outer(0.5 * x * x, envelope[small] * u[small] ** s)
        out.append(table.sum(axis=-1))
    if kind in ("rate", "both"):
        coef = envelope * u ** (s - 1.0) * 2.0
        table = sin_half * np.cos(half) * coef
        out.append(table.sum(axis=-1))
    return np.stack(out) if kind == "both" else out[0]


def _panel_level(x: np.ndarray) -> np.ndarray:
    """Smallest L >= 0 with panel width 2^-(L+1) <= pi / (8 x)."""
    ratio = np.maximum(4.0 * x / math.pi, 1.0)
    return np.ceil(np.log2(ratio)).astype(np.int64)


def _ohmic_integral(s: float, x: np.ndarray, kind: str, tol: float) -> np.ndarray:
    """Dimensionless integral for an array of ``x = omega_c t`` values.

    ``kind="decay"`` gives ``Gamma``; ``kind="rate"`` gives ``dGamma/dt / omega_c``;
    ``kind="both"`` returns the two stacked along a leading axis. Panels have width 2^-(L+1) <= pi / (8 x); each panel is integrated with an
    8- and a 16-point Gauss-Legendre rule and the difference is the error
    estimate. Values that miss ``tol`` are redone on halved panels. The panel
    choice and the row-wise summation depend on ``x`` alone, so a value never
    depends on which other times share the call.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("times must be finite")
    flat = x.ravel()
    out = np.empty((2, flat.size)) if kind == "both" else np.empty_like(flat)
    cutoff = _spectral_cutoff(s)
    base = _panel_level(flat)
    pending = {int(lev): np.nonzero(base == lev)[0] for lev in np.unique(base)}
    while pending:
        lev = min(pending)
        idx = pending.pop(lev)
        width = 0.5 * 2.0**-lev
        if (cutoff / width + 42) * 16 > _MAX_NODES:
            raise QuadratureError(f"panel budget exhausted (s={s}, x={flat[idx].max():.6g}, width={width:.3g})")
        edges = _panel_edges(width, cutoff)
        u_lo, w_lo = _nodes(edges, _GL_LOW)
        u_hi, w_hi = _nodes(edges, _GL_HIGH)
        step = max(1, _CHUNK_ELEMENTS // (len(u_lo) + len(u_hi)))
        failed = []
        for j in range(0, len(idx), step):
            sub = idx[j : j + step]
            xs = flat[sub]
            lo = _weighted_sums(u_lo, w_lo, xs, s, kind)
            hi = _weighted_sums(u_hi, w_hi, xs, s, kind)
            miss = np.atleast_2d(np.abs(hi - lo) - tol * np.abs(hi) - TAIL_TOL).max(axis=0)
            ok = miss <= 0
            out[..., sub[ok]] = hi[..., ok]
            if not np.all(ok):
                bad = sub[~ok]
                if np.any(lev - base[bad] >= _MAX_REFINE):
                    worst = int(np.argmax(miss))
                    raise QuadratureError(
                        f"quadrature did not converge for s={s}, x={xs[worst]:.6g}: "
                        f"error estimate exceeds tolerance by {miss[worst]:.3g}"
                    )
                failed.append(bad)
        if failed:
            pending[lev + 1] = np.concatenate([pending.get(lev + 1, np.empty(0, dtype=np.int64))] + failed)
    return out.reshape(out.shape[:-1] + x.shape)


def _as_result(values, like):
    return float(values) if np.ndim(like) == 0 else values


def gamma_ohmic(spec: OhmicSpec, t, tol: float = 1e-11):
    """Zero-temperature decoherence function Gamma(t) for an Ohmic-like bath.

    ``Gamma(t) = 4 int_0^inf J(w) (1 - cos wt) / w^2 dw``, evaluated by
    quadrature. Accepts a scalar or an array of times ``t >= 0``.

    Raises
    ------
    QuadratureError
        If the panel refinement budget is exhausted before ``tol`` is met.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    values = _ohmic_integral(spec.s, spec.omega_c * t_arr, "decay", tol)
    return _as_result(np.maximum(values, 0.0), t)


def gamma_dot_ohmic(spec: OhmicSpec, t, tol: float = 1e-11):
    """dGamma/dt = 4 int_0^inf J(w) sin(wt) / w dw, by quadrature.

    Negative values mark recoherence (information backflow).
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    values = spec.omega_c * _ohmic_integral(spec.s, spec.omega_c * t_arr, "rate", tol)
    return _as_result(values, t)


def _pd_pair(spec: OhmicSpec, t: np.ndarray, tol: float) -> np.ndarray:
    """(p, dp/dt) stacked, from one shared quadrature table."""
    gamma, rate = _ohmic_integral(spec.s, spec.omega_c * t, "both", tol)
    p = np.exp(-np.maximum(gamma, 0.0))
    return np.stack([p, -spec.omega_c * rate * p])


def _checked_times(t) -> np.ndarray:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    return t_arr


def coherence_pd(spec: OhmicSpec, t, tol: float = 1e-11):
    """Phase-damping decoherence factor p(t) = exp(-Gamma(t))."""
    return _as_result(_pd_pair(spec, _checked_times(t), tol)[0], t)


def coherence_pd_dot(spec: OhmicSpec, t, tol: float = 1e-11):
    """dp/dt = -Gamma'(t) exp(-Gamma(t))."""
    return _as_result(_pd_pair(spec, _checked_times(t), tol)[1], t)


# ---------------------------------------------------------------------------
# Random telegraph noise
# ---------------------------------------------------------------------------

#: Relative distance of 4*alpha*delta from 1 treated as the degenerate branch.
DEGENERATE_TOL = 1e-14


@dataclass(frozen=True)
class RtnBranch:
    """Which analytic form Lambda(t) takes.

    ``kind`` is ``"oscillatory"`` (4 alpha delta > 1, ``value`` is mu),
    ``"damped"`` (4 alpha delta < 1, ``value`` is nu = sqrt(1 - (4 alpha delta)^2))
    or ``"degenerate"`` (4 alpha delta = 1, ``value`` is 0).
    """

    kind: str
    value: float


def mu_rtn(spec: RtnSpec) -> RtnBranch:
    g = 4.0 * spec.alpha * spec.delta
    if abs(g - 1.0) <= DEGENERATE_TOL:
        return RtnBranch("degenerate", 0.0)
    if g > 1.0:
        return RtnBranch("oscillatory", math.sqrt(g * g - 1.0))
    return RtnBranch("damped", math.sqrt(1.0 - g * g))


def _rtn_shape(branch: RtnBranch, y: np.ndarray):
    """Return (C(y), S(y)) with Lambda = e^-y (C + S) and S the sin/mu-type part."""
    if branch.kind == "oscillatory":
        m = branch.value
        return np.cos(m * y), np.sin(m * y) / m
    if branch.kind == "damped":
        n = branch.value
        return np.cosh(n * y), np.sinh(n * y) / n
    return np.ones_like(y), y


def coherence_rtn(spec: RtnSpec, t):
    """Lambda(t) = e^(-t/2D) [cos(mu t/2D) + sin(mu t/2D)/mu].

    For 4 alpha delta < 1 the analytic continuation (cosh/sinh with
    nu = i mu) keeps the factor real; at 4 alpha delta = 1 the limit
    e^(-y) (1 + y) with y = t/2D is used.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    y = t_arr / (2.0 * spec.delta)
    c, s = _rtn_shape(mu_rtn(spec), y)
    return _as_result(np.exp(-y) * (c + s), t)


def coherence_rtn_dot(spec: RtnSpec, t):
    """Analytic dLambda/dt.

    All three branches reduce to ``-8 alpha^2 delta e^(-y) S(y)`` where S is
    ``sin(mu y)/mu``, ``sinh(nu y)/nu`` or ``y``.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    y = t_arr / (2.0 * spec.delta)
    _, s = _rtn_shape(mu_rtn(spec), y)
    return _as_result(-8.0 * spec.alpha**2 * spec.delta * np.exp(-y) * s, t)


# ---------------------------------------------------------------------------
# Channel abstraction
# ---------------------------------------------------------------------------


class _Memo:
    """Vectorized multi-output function with a per-time cache.

    ``fn`` maps a 1-D time array to an array of shape (outputs, len(t)).
    Sweeps evaluate the same channel at the same time points for every
    filter parameter, so caching by exact float value pays off.
    """

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], maxsize: int = 500_000):
        self._fn = fn
        self._cache: dict[float, tuple] = {}
        self._maxsize = maxsize

    def __call__(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        flat = t_arr.ravel().tolist()
        missing = [v for v in dict.fromkeys(flat) if v not in self._cache]
        if missing:
            if len(self._cache) + len(missing) > self._maxsize:
                self._cache.clear()
            values = np.asarray(self._fn(np.array(missing)))
            for key, val in zip(missing, values.T.tolist()):
                self._cache[key] = tuple(val)
        out = np.array([self._cache[v] for v in flat], dtype=float).T
        return out.reshape((out.shape[0],) + t_arr.shape)

    def output(self, i: int) -> Callable:
        return lambda t: _as_result(self(t)[i], t)


@dataclass(frozen=True, eq=False)
class DephasingChannel:
    """A unital dephasing channel given by its coherence factor q(t).

    ``coherence`` and ``rate`` are vectorized callables returning q(t) and
    dq/dt. ``q(0) = 1`` and ``|q| <= 1`` are expected of both.
    """

    coherence: Callable
    rate: Callable
    non_markovian: bool
    name: str = ""


def phase_damping(spec: OhmicSpec, tol: float = 1e-11) -> DephasingChannel:
    memo = _Memo(lambda t: _pd_pair(spec, t, tol))
    return DephasingChannel(
        coherence=memo.output(0),
        rate=memo.output(1),
        non_markovian=spec.non_markovian,
        name=f"phase-damping(s={spec.s:g}, omega_c={spec.omega_c:g})",
    )


def rtn_dephasing(spec: RtnSpec) -> DephasingChannel:
    return DephasingChannel(
        coherence=lambda t: coherence_rtn(spec, t),
        rate=lambda t: coherence_rtn_dot(spec, t),
        non_markovian=spec.non_markovian,
        name=f"rtn(alpha={spec.alpha:g}, delta={spec.delta:g})",
    )


def kraus_pair(channel: DephasingChannel, t) -> tuple[Matrix2, Matrix2]:
    """Kraus operators ``sqrt((1+q)/2) sigma_0`` and ``sqrt((1-q)/2) sigma_3``."""
    q = np.asarray(channel.coherence(t), dtype=float)
    if np.any(np.abs(q) > 1.0 + KRAUS_TOL):
        raise ValueError(f"coherence factor outside [-1, 1] at t={t}: {q}")
    q = np.clip(q, -1.0, 1.0)
    return SIGMA_0.scale(np.sqrt((1.0 + q) / 2.0)), SIGMA_3.scale(np.sqrt((1.0 - q) / 2.0))


def evolve(channel: DephasingChannel, rho0: QubitDensity, t) -> QubitDensity:
    """Apply the channel at time ``t`` through its Kraus representation."""
    rho = rho0.as_matrix()
    e1, e2 = kraus_pair(channel, t)
    out = e1 @ rho @ e1.dagger() + e2 @ rho @ e2.dagger()
    return QubitDensity.from_matrix(out)


def dephase(channel: DephasingChannel, rho0: QubitDensity, t) -> QubitDensity:
    """Same map as :func:`evolve`, written as coherence scaling.

    The Kraus sum forms the coherence as ``(1+q)/4 - (1-q)/4`` (for |+>),
    which loses relative precision once ``q`` is small; scaling does not.
    """
    q = np.asarray(channel.coherence(t), dtype=float)
    return QubitDensity(rho0.d0 + 0.0 * q, rho0.d1 + 0.0 * q, rho0.c * q)


def evolve_derivative(channel: DephasingChannel, rho0: QubitDensity, t) -> Matrix2:
    """Time derivative of :func:`evolve`.

    The Kraus sum equals ``(1+q)/2 rho + (1-q)/2 sigma_3 rho sigma_3``, so its
    derivative is ``(dq/dt)/2 (rho - sigma_3 rho sigma_3)``.
    """
    rho = rho0.as_matrix()
    qdot = np.asarray(channel.rate(t), dtype=float)
    return (rho - SIGMA_3 @ rho @ SIGMA_3).scale(qdot / 2.0)
