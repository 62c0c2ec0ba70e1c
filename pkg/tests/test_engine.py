import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from qslfilter import (
    FilterOp,
    OhmicSpec,
    QuadConfig,
    QubitDensity,
    RtnSpec,
    Trajectory,
    filtered_trajectory,
    phase_damping,
    qsl_closed_form,
    qsl_closed_form_pd,
    qsl_closed_form_rtn,
    qsl_general,
    rtn_dephasing,
    sweep,
)
from qslfilter.engine import COLUMNS, SweepError, locate_kinks, window_average
from qslfilter.qubit import Matrix2

CFG = QuadConfig()
MODELS = {
    "s=0.5": phase_damping(OhmicSpec(0.5)),
    "s=1": phase_damping(OhmicSpec(1.0)),
    "s=3.5": phase_damping(OhmicSpec(3.5)),
    "rtn 0.2": rtn_dephasing(RtnSpec(0.2)),
    "rtn 2": rtn_dephasing(RtnSpec(2.0)),
}


def test_quad_config_minimum():
    with pytest.raises(ValueError):
        QuadConfig(points=32)
    with pytest.raises(ValueError):
        QuadConfig(tol=0.0)


def test_window_average_polynomial_and_kinks():
    assert window_average(lambda t: t**3, 0.0, 2.0, 64) == pytest.approx(2.0, rel=1e-14)
    kinks = locate_kinks(lambda t: np.cos(t), 0.0, 10.0, 64)
    assert kinks == pytest.approx([math.pi / 2, 3 * math.pi / 2, 5 * math.pi / 2], abs=1e-14)
    got = window_average(lambda t: np.abs(np.cos(t)), 0.0, 10.0, 64, switch=np.cos)
    assert got == pytest.approx((6.0 - math.sin(10.0)) / 10.0, rel=1e-7)


def test_window_average_refines_steep_segments():
    exact = (1 - math.exp(-40.0)) / 40.0
    coarse = window_average(lambda t: np.exp(-40 * t), 0.0, 1.0, 64, max_doublings=0)
    fine = window_average(lambda t: np.exp(-40 * t), 0.0, 1.0, 64, rtol=1e-12)
    assert abs(fine - exact) < 1e-3 * abs(coarse - exact)
    assert fine == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError):
        QuadConfig(rtol=0.0)


def test_constant_trajectory_has_zero_time():
    rho = QubitDensity(0.3, 0.7, 0.1)
    traj = Trajectory(
        state=lambda t: QubitDensity(0.3 + 0.0 * np.asarray(t), 0.7 + 0.0 * np.asarray(t), 0.1 + 0.0 * np.asarray(t)),
        generator=lambda t: Matrix2(*(0.0 * np.asarray(t, dtype=float) for _ in range(4))),
    )
    res = qsl_general(traj, 0.5, 1.0)
    assert res.f == 1.0 and res.tau_qsl == 0.0
    assert rho.d0 == 0.3


def test_invalid_window():
    traj = filtered_trajectory(MODELS["s=1"], FilterOp(0.5))
    with pytest.raises(ValueError):
        qsl_general(traj, -1.0, 1.0)
    with pytest.raises(ValueError):
        qsl_general(traj, 1.0, 0.0)


def test_markovian_point():
    res = qsl_general(filtered_trajectory(MODELS["s=1"], FilterOp(0.5)), 1.0, 1.0, CFG)
    # normalized family, c = q/2: |f-1| tr(rho^2) = 2 c_tau |dc|, ML denominator <|c'|>
    assert res.tau_ml == pytest.approx(0.25, abs=1e-9)
    assert res.tau_mt == pytest.approx(0.25 / math.sqrt(2), abs=1e-9)
    assert res.tau_qsl == res.tau_ml
    assert qsl_closed_form_pd(OhmicSpec(1.0), 0.5, 1.0, 1.0, "paper") == pytest.approx(0.125 / math.sqrt(2), abs=1e-9)
    assert qsl_closed_form_pd(OhmicSpec(1.0), 0.5, 1.0, 1.0, "ml") == pytest.approx(0.25, abs=1e-9)


def test_paper_variant_is_mt_of_unnormalized_family():
    channel = MODELS["rtn 2"]
    for k in (0.2, 0.6):
        for tau in (0.0, 0.7, 3.1):
            compat = qsl_general(filtered_trajectory(channel, FilterOp(k), normalized=False), tau, 1.0, CFG)
            assert qsl_closed_form(channel, k, tau, 1.0, "paper") == pytest.approx(compat.tau_mt, rel=1e-6)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_closed_form_agreement(name):
    channel = MODELS[name]
    for k in (0.15, 0.5, 0.9):
        for tau in (0.0, 1.3, 5.2, 9.0):
            res = qsl_general(filtered_trajectory(channel, FilterOp(k)), tau, 1.0, CFG)
            ml = qsl_closed_form(channel, k, tau, 1.0, "ml")
            paper = qsl_closed_form(channel, k, tau, 1.0, "paper")
            assert ml == pytest.approx(res.tau_qsl, rel=1e-6)
            assert paper == pytest.approx(res.tau_qsl / (2 * math.sqrt(2)), rel=1e-6)
            assert res.tau_ml / res.tau_mt == pytest.approx(math.sqrt(2), rel=1e-9)


@pytest.mark.parametrize("name", ["s=0.5", "s=1", "s=3.5", "rtn 0.2"])
def test_markovian_cancellation(name):
    channel = MODELS[name]
    for tau in (0.0, 0.4, 2.0, 6.5, 9.5):
        ts = np.linspace(tau, tau + 1.0, 2001)
        rate = np.asarray(channel.rate(ts))
        if not (np.all(rate <= 0) or np.all(rate >= 0)):
            continue
        q = abs(float(channel.coherence(tau)))
        for k in (0.1, 0.5, 0.8):
            res = qsl_general(filtered_trajectory(channel, FilterOp(k)), tau, 1.0, CFG)
            assert res.tau_qsl == pytest.approx(2 * math.sqrt(k * (1 - k)) * q, rel=1e-8)


def test_sign_change_window_needs_absolute_values():
    spec = RtnSpec(2.0)
    channel = MODELS["rtn 2"]
    tau, tau_d, k = 0.0, 1.0, 0.3
    assert locate_kinks(channel.rate, tau, tau + tau_d, 128)
    q0, q1 = float(channel.coherence(tau)), float(channel.coherence(tau + tau_d))
    naive = math.sqrt(k * (1 - k) / 2) * q0 * (q1 - q0) / ((q1 - q0) / tau_d)
    with_abs = qsl_closed_form_rtn(spec, k, tau, tau_d, "paper")
    mean_speed = window_average(lambda t: np.abs(channel.rate(t)), tau, tau + tau_d, 128, channel.rate)
    assert mean_speed > abs(q1 - q0) / tau_d * 1.01
    assert with_abs < naive * 0.99


def test_closed_form_pole_limit():
    for k in (1e-12, 1 - 1e-12):
        assert qsl_closed_form_rtn(RtnSpec(0.2), k, 1.0, 1.0, "ml") < 1e-5


@given(st.floats(0.01, 0.49), st.floats(0.0, 10.0), st.sampled_from(sorted(MODELS)))
def test_filter_symmetry(k, tau, name):
    channel = MODELS[name]
    a = qsl_general(filtered_trajectory(channel, FilterOp(k)), tau, 1.0, CFG).tau_qsl
    b = qsl_general(filtered_trajectory(channel, FilterOp(1 - k)), tau, 1.0, CFG).tau_qsl
    assert a == pytest.approx(b, rel=1e-10, abs=1e-300)


@given(st.floats(0.0, 10.0), st.sampled_from(sorted(MODELS)), st.floats(0.2, 3.0))
def test_bound_sanity(tau, name, tau_d):
    res = qsl_general(filtered_trajectory(MODELS[name], FilterOp(0.37)), tau, tau_d, CFG)
    assert 0.0 <= res.tau_qsl <= tau_d + 1e-9
    assert res.tau_ml >= res.tau_mt


def test_sweep_shape_and_order():
    rows = sweep(RtnSpec(2.0), [0.7, 0.3], [1.0, 0.0, 0.5], 1.0)
    assert [(r.k, r.tau) for r in rows] == [(0.3, 0.0), (0.3, 0.5), (0.3, 1.0), (0.7, 0.0), (0.7, 0.5), (0.7, 1.0)]
    assert COLUMNS[0] == "tau" and COLUMNS[-1] == "closed_form_dev"
    assert max(r.closed_form_dev for r in rows) <= 1e-6
    assert [r.tau_qsl for r in rows[:3]] == pytest.approx([r.tau_qsl for r in rows[3:]], rel=1e-10)


def test_sweep_variants_and_workers():
    paper = sweep(OhmicSpec(3.5), [0.4], np.linspace(0, 3, 7), 1.0, variant="paper")
    ml = sweep(OhmicSpec(3.5), [0.4], np.linspace(0, 3, 7), 1.0, variant="ml", workers=3)
    for a, b in zip(paper, ml):
        assert b.tau_qsl / a.tau_qsl == pytest.approx(2 * math.sqrt(2), rel=1e-9)
        assert a.tau_qsl_paper_variant == b.tau_qsl_paper_variant
    again = sweep(OhmicSpec(3.5), [0.4], np.linspace(0, 3, 7), 1.0, variant="ml", workers=1)
    assert again == ml


def test_sweep_errors():
    with pytest.raises(ValueError):
        sweep(RtnSpec(2.0), [], [0.0], 1.0)
    with pytest.raises(ValueError):
        sweep(RtnSpec(2.0), [0.5], [0.0], 1.0, variant="mt")
    with pytest.raises(SweepError, match="k=1.5"):
        sweep(RtnSpec(2.0), [0.5, 1.5], [0.0], 1.0)
