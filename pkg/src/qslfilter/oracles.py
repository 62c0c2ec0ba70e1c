"""Brute-force cross-checks that share no numerical path with the engine.

* :func:`riemann_qsl` re-evaluates the speed-limit bounds from states sampled
  on a dense grid, using finite differences, left Riemann sums and numpy's
  general SVD/eigensolver instead of the closed-form 2x2 algebra.
* :func:`reference_filtered_states` builds filtered dephased states from
  explicit 2x2 numpy matrices.
* :func:`gamma_closed_form` evaluates Gamma(t) for any Ohmicity through the
  Gamma-function identity, replacing spectral quadrature.
* :func:`rtn_monte_carlo` samples telegraph trajectories directly.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .channels import (
    DephasingChannel,
    OhmicSpec,
    RtnSpec,
    coherence_rtn,
    coherence_rtn_dot,
    evolve,
    gamma_dot_ohmic,
    gamma_ohmic,
    kraus_pair,
    phase_damping,
    rtn_dephasing,
)
from .engine import QslResult, QuadConfig, qsl_closed_form, qsl_general
from .filtering import FilterOp, filtered_trajectory
from .qubit import Matrix2, QubitDensity

MC_BLOCK = 4096


# ---------------------------------------------------------------------------
# Analytic decoherence functions
# ---------------------------------------------------------------------------


def gamma_analytic_s1(omega_c: float, t):
    """Gamma(t) for the Ohmic bath (s = 1): 2 ln(1 + omega_c^2 t^2)."""
    return 2.0 * np.log1p((omega_c * np.asarray(t, dtype=float)) ** 2)


def gamma_closed_form(spec: OhmicSpec, t):
    """Gamma(t) for any Ohmicity from
    ``int_0^inf u^(a-1) e^-u cos(xu) du = G(a) cos(a atan x) / (1 + x^2)^(a/2)``.

    With ``a = s - 1`` this gives
    ``Gamma = 4 G(s-1) [1 - cos((s-1) atan x) (1 + x^2)^(-(s-1)/2)]``, x = omega_c t.
    """
    x = spec.omega_c * np.asarray(t, dtype=float)
    if spec.s == 1.0:
        return gamma_analytic_s1(spec.omega_c, t)
    a = spec.s - 1.0
    return 4.0 * gamma_fn(a) * (1.0 - np.cos(a * np.arctan(x)) * (1.0 + x * x) ** (-a / 2.0))


def gamma_dot_closed_form(spec: OhmicSpec, t):
    """dGamma/dt = 4 omega_c G(s) sin(s atan x) / (1 + x^2)^(s/2)."""
    x = spec.omega_c * np.asarray(t, dtype=float)
    return 4.0 * spec.omega_c * gamma_fn(spec.s) * np.sin(spec.s * np.arctan(x)) * (1.0 + x * x) ** (-spec.s / 2.0)


# ---------------------------------------------------------------------------
# Dense-grid bound evaluation
# ---------------------------------------------------------------------------


def reference_filtered_states(q: np.ndarray, k: float, scale: float = 1.0) -> np.ndarray:
    """Filtered |+> states for coherence factors ``q``, as an (n, 2, 2) array.

    Built by explicit matrix products: Kraus sum, then F rho F^dagger,
    then renormalization (``scale`` multiplies the normalized result).
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    plus = np.full((2, 2), 0.5)
    s0 = np.eye(2)
    s3 = np.diag([1.0, -1.0])
    evolved = ((1 + q) / 2)[:, None, None] * (s0 @ plus @ s0) + ((1 - q) / 2)[:, None, None] * (s3 @ plus @ s3)
    filt = np.diag([math.sqrt(1 - k), math.sqrt(k)])
    out = filt @ evolved @ filt.conj().T
    tr = np.trace(out, axis1=1, axis2=2)
    return scale * out / tr[:, None, None]


def riemann_qsl(states: np.ndarray, tau: float, tau_d: float) -> QslResult:
    """QSL bounds from states sampled on a uniform grid over [tau, tau + tau_d].

    ``states`` has shape (N + 1, 2, 2). The generator is the forward
    difference on each interval; window averages are left Riemann sums.
    """
    states = np.asarray(states, dtype=complex)
    n = states.shape[0] - 1
    if n < 1000:
        raise ValueError(f"need at least 1000 intervals per window, got {n}")
    dt = tau_d / n
    rho0, rho1 = states[0], states[-1]
    purity_tau = float(np.real(np.trace(rho0 @ rho0)))
    change = float(np.real(np.trace(rho0 @ (rho1 - rho0))))
    f = 1.0 + change / purity_tau
    distance = abs(change)
    eig = np.sort(np.linalg.eigvalsh(rho0))[::-1]
    deriv = np.diff(states, axis=0) / dt
    sv = np.linalg.svd(deriv, compute_uv=False)  # descending
    ml_denom = float(np.sum(sv @ eig) * dt / tau_d)
    mt_denom = float(np.sum(np.sqrt(np.sum(sv**2, axis=1))) * dt / tau_d)
    tau_ml = distance / ml_denom if ml_denom > 0 else 0.0
    tau_mt = distance / mt_denom if mt_denom > 0 else 0.0
    return QslResult(tau, tau_d, f, purity_tau, ml_denom, mt_denom, tau_ml, tau_mt, max(tau_ml, tau_mt))


def reference_coherence(spec: OhmicSpec | RtnSpec, t):
    """Coherence factor through the closed forms (no quadrature)."""
    if isinstance(spec, OhmicSpec):
        return np.exp(-gamma_closed_form(spec, t))
    return coherence_rtn(spec, t)


def riemann_filtered_qsl(spec, k: float, tau: float, tau_d: float, n: int = 100_000, scale: float = 1.0) -> QslResult:
    """Riemann oracle applied to the filtered |+> trajectory of a model."""
    ts = np.linspace(tau, tau + tau_d, n + 1)
    return riemann_qsl(reference_filtered_states(reference_coherence(spec, ts), k, scale), tau, tau_d)


# ---------------------------------------------------------------------------
# Random telegraph noise
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of cos(phase) with its standard error.

    ``tolerance`` is the standard error the caller asked for, if any;
    ``resolved`` is False when the sample was too small to reach it.
    """

    mean: float
    std_error: float
    n_trajectories: int
    seed: int
    tolerance: float | None = None

    @property
    def resolved(self) -> bool:
        return self.tolerance is None or self.std_error <= self.tolerance


def _telegraph_block(spec: RtnSpec, t: float, size: int, seed: int, block: int) -> tuple[float, float]:
    """Sum and sum of squares of cos(phase) over one block of trajectories."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    sign0 = rng.choice([-1.0, 1.0], size=size)
    flips = rng.poisson(t / (2.0 * spec.delta), size=size)
    kmax = int(flips.max(initial=0))
    times = rng.uniform(0.0, t, size=(size, kmax))
    times[np.arange(kmax)[None, :] >= flips[:, None]] = t
    times.sort(axis=1)
    edges = np.concatenate([np.zeros((size, 1)), times, np.full((size, 1), t)], axis=1)
    durations = np.diff(edges, axis=1)
    alternating = (-1.0) ** np.arange(kmax + 1)
    integral = sign0 * (durations @ alternating)
    c = np.cos(2.0 * spec.alpha * integral)
    return float(c.sum()), float((c * c).sum())


def rtn_monte_carlo(
    spec: RtnSpec,
    t: float,
    n: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    tolerance: float | None = None,
) -> McEstimate:
    """Estimate E[cos(2 alpha int_0^t zeta)] for a telegraph signal zeta = +-1.

    ``zeta`` starts with a random sign and flips at rate 1/(2 delta). Blocks of
    trajectories draw from independent Philox streams keyed by (seed, block)
    and are reduced in block order, so the result does not depend on
    ``workers``. An estimate whose standard error exceeds ``tolerance`` is
    returned with ``resolved`` False rather than silently accepted.
    """
    if n < 2:
        raise ValueError("need at least two trajectories")
    if t < 0:
        raise ValueError("t must be nonnegative")
    sizes = [min(MC_BLOCK, n - start) for start in range(0, n, MC_BLOCK)]
    jobs = [(spec, t, size, seed, b) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _telegraph_block(*a), jobs))
    else:
        parts = [_telegraph_block(*a) for a in jobs]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / n), n_trajectories=n, seed=seed, tolerance=tolerance)


# ---------------------------------------------------------------------------
# Channel identities
# ---------------------------------------------------------------------------


def kraus_vs_factor(channel: DephasingChannel, rho0: QubitDensity, ts) -> float:
    """Max entrywise gap between the Kraus evolution and coherence scaling."""
    ts = np.asarray(ts, dtype=float)
    out = evolve(channel, rho0, ts)
    q = np.asarray(channel.coherence(ts))
    gaps = [
        np.abs(out.d0 - rho0.d0),
        np.abs(out.d1 - rho0.d1),
        np.abs(out.c - q * rho0.c),
    ]
    return float(max(np.max(g) for g in gaps))


def kraus_identity_defects(channel: DephasingChannel, ts) -> tuple[float, float]:
    """Max deviation of sum E^dag E and sum E E^dag from the identity."""
    e1, e2 = kraus_pair(channel, np.asarray(ts, dtype=float))
    ident = Matrix2.identity()
    completeness = e1.dagger() @ e1 + e2.dagger() @ e2
    unitality = e1 @ e1.dagger() + e2 @ e2.dagger()
    return completeness.max_abs_diff(ident), unitality.max_abs_diff(ident)


# ---------------------------------------------------------------------------
# Validation suite
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    expected: float
    got: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: expected {self.expected:.12g}, got {self.got:.12g}, tolerance {self.tolerance:.3g}"
        return text + (f" ({self.detail})" if self.detail else "")


@dataclass
class ValidationReport:
    level: str
    seed: int
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, expected, got, tolerance, relative=False, detail=""):
        err = abs(got - expected)
        if relative:
            err /= max(abs(expected), 1e-300)
        self.checks.append(Check(name, float(expected), float(got), tolerance, bool(err <= tolerance), detail))

    def render(self) -> str:
        lines = [c.line() for c in self.checks]
        summary = sum(c.passed for c in self.checks)
        lines.append(f"{summary}/{len(self.checks)} checks passed ({self.level}, seed={self.seed}, {self.seconds:.1f} s)")
        return "\n".join(lines)


#: (model spec, k, tau) points covering the five figure regimes
FIGURE_SPECS = {
    "fig1": OhmicSpec(0.5),
    "fig2": OhmicSpec(1.0),
    "fig3": OhmicSpec(3.5),
    "fig4": RtnSpec(0.2),
    "fig5": RtnSpec(2.0),
}

MC_POINTS = [
    (RtnSpec(2.0), 0.5),
    (RtnSpec(2.0), 1.0),
    (RtnSpec(2.0), 2.5),
    (RtnSpec(1.0), 1.0),
    (RtnSpec(0.5), 3.0),
    (RtnSpec(0.25), 2.0),
    (RtnSpec(0.2), 1.0),
    (RtnSpec(0.2), 4.0),
    (RtnSpec(0.1), 2.0),
    (RtnSpec(0.05), 5.0),
]


def run_validation(level: str = "quick", seed: int = 0) -> ValidationReport:
    """Run the oracle suite; ``quick`` shrinks grid sizes and sample counts."""
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    full = level == "full"
    n_grid = 100_000 if full else 20_000
    n_mc = 100_000 if full else 20_000
    report = ValidationReport(level, seed)
    start = time.perf_counter()
    cfg = QuadConfig()

    # spectral quadrature against the analytic s = 1 form and the general closed form
    ts = np.linspace(0.05, 20.0, 40 if full else 10)
    for wc in (0.5, 1.0, 2.0):
        spec = OhmicSpec(1.0, wc)
        got = np.asarray(gamma_ohmic(spec, ts))
        ref = gamma_analytic_s1(wc, ts)
        report.add(f"gamma_ohmic[s=1, omega_c={wc:g}]", 0.0, float(np.max(np.abs(got - ref) / ref)), 1e-8)
    for s in (0.5, 3.5):
        spec = OhmicSpec(s)
        got = np.asarray(gamma_ohmic(spec, ts))
        report.add(f"gamma_ohmic[s={s:g}] vs closed form", 0.0, float(np.max(np.abs(got - gamma_closed_form(spec, ts)) / gamma_closed_form(spec, ts))), 1e-8)
        got = np.asarray(gamma_dot_ohmic(spec, ts))
        report.add(f"gamma_dot_ohmic[s={s:g}] vs closed form", 0.0, float(np.max(np.abs(got - gamma_dot_closed_form(spec, ts)))), 1e-8)

    # analytic RTN derivative against central differences
    for spec in (RtnSpec(2.0), RtnSpec(0.2), RtnSpec(0.25)):
        tgrid = np.linspace(0.1, 10.0, 25) * spec.delta
        h = 1e-5 * spec.delta
        fd = (np.asarray(coherence_rtn(spec, tgrid + h)) - np.asarray(coherence_rtn(spec, tgrid - h))) / (2 * h)
        an = np.asarray(coherence_rtn_dot(spec, tgrid))
        dev = float(np.max(np.abs(an - fd)) / np.max(np.abs(fd)))
        report.add(f"coherence_rtn_dot[alpha*delta={spec.alpha * spec.delta:g}]", 0.0, dev, 1e-6, detail="vs central difference")

    # Kraus evolution equals coherence scaling; Kraus identities
    for name, spec in FIGURE_SPECS.items():
        channel = phase_damping(spec) if isinstance(spec, OhmicSpec) else rtn_dephasing(spec)
        tgrid = np.linspace(0.0, 11.0, 111)
        report.add(f"kraus_vs_factor[{name}]", 0.0, kraus_vs_factor(channel, QubitDensity.plus(), tgrid), 1e-12)
        comp, unit = kraus_identity_defects(channel, tgrid)
        report.add(f"kraus_completeness[{name}]", 0.0, comp, 1e-12)
        report.add(f"kraus_unitality[{name}]", 0.0, unit, 1e-12)

    # engine vs Riemann oracle, and closed forms vs engine
    taus = (0.0, 1.3, 4.7) if full else (1.3,)
    for name, spec in FIGURE_SPECS.items():
        channel = phase_damping(spec) if isinstance(spec, OhmicSpec) else rtn_dephasing(spec)
        for k in (0.3, 0.8):
            for tau in taus:
                eng = qsl_general(filtered_trajectory(channel, FilterOp(k)), tau, 1.0, cfg)
                ref = riemann_filtered_qsl(spec, k, tau, 1.0, n_grid)
                report.add(f"riemann_qsl[{name}, k={k:g}, tau={tau:g}]", ref.tau_qsl, eng.tau_qsl, 1e-4, relative=True)
                ml = qsl_closed_form(channel, k, tau, 1.0, "ml", cfg)
                report.add(f"closed_form_ml[{name}, k={k:g}, tau={tau:g}]", eng.tau_qsl, ml, 1e-6, relative=True)

    # telegraph Monte Carlo
    points = MC_POINTS if full else MC_POINTS[::3]
    for spec, t in points:
        est = rtn_monte_carlo(spec, t, n_mc, seed)
        exact = float(coherence_rtn(spec, t))
        report.add(
            f"rtn_monte_carlo[alpha*delta={spec.alpha * spec.delta:g}, t={t:g}]",
            exact,
            est.mean,
            3.0 * est.std_error,
            detail=f"n={n_mc}, 3 sigma",
        )

    report.seconds = time.perf_counter() - start
    return report
