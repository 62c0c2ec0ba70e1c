import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from conftest import densities
from qslfilter import (
    FilterOp,
    OhmicSpec,
    QubitDensity,
    RtnSpec,
    apply_filter,
    filtered_trajectory,
    phase_damping,
    rtn_dephasing,
    success_probability,
)
from qslfilter.channels import evolve
from qslfilter.filtering import DegenerateFilterError
from qslfilter.oracles import reference_filtered_states

ks = st.floats(0.001, 0.999)
CHANNELS = [phase_damping(OhmicSpec(0.5)), phase_damping(OhmicSpec(3.5)), rtn_dephasing(RtnSpec(0.2)), rtn_dephasing(RtnSpec(2.0))]


@pytest.mark.parametrize("k", [0.0, 1.0, -0.1, 1.5])
def test_filter_parameter_range(k):
    with pytest.raises(ValueError):
        FilterOp(k)


def test_apply_filter_examples():
    rho = QubitDensity(0.3, 0.7, 0.1 - 0.2j)
    out = apply_filter(rho, FilterOp(0.5))
    assert (out.d0, out.d1) == pytest.approx((0.3, 0.7)) and out.c == pytest.approx(rho.c)
    out = apply_filter(QubitDensity.maximally_mixed(), FilterOp(0.25))
    assert (out.d0, out.d1, out.c) == pytest.approx((0.75, 0.25, 0.0))


def test_apply_filter_on_dephased_plus():
    k, p = 0.3, 0.6
    out = apply_filter(QubitDensity(0.5, 0.5, p / 2), FilterOp(k))
    # unnormalized entries (1-k)/2, k/2, sqrt(k(1-k)) p / 2 over trace 1/2
    assert out.d0 == pytest.approx((1 - k) / 2 / 0.5)
    assert out.d1 == pytest.approx(k / 2 / 0.5)
    assert out.c == pytest.approx(math.sqrt(k * (1 - k)) * p / 2 / 0.5)


def test_success_probability_examples():
    assert success_probability(QubitDensity.maximally_mixed(), FilterOp(0.9)) == 0.5
    assert success_probability(QubitDensity(1.0, 0.0, 0.0), FilterOp(0.3)) == pytest.approx(0.7)
    assert success_probability(QubitDensity.plus(), FilterOp(0.17)) == pytest.approx(0.5)


def test_degenerate_filter():
    with pytest.raises(DegenerateFilterError):
        apply_filter(QubitDensity(0.0, 1.0, 0.0), FilterOp(1e-16))


def test_filter_matrix():
    m = FilterOp(0.36).matrix
    assert (m.a11, m.a22, m.a12, m.a21) == pytest.approx((0.8, 0.6, 0.0, 0.0))


@given(densities(), ks)
def test_apply_filter_gives_valid_density(rho, k):
    if success_probability(rho, FilterOp(k)) < 1e-12:
        return
    out = apply_filter(rho, FilterOp(k))
    assert isinstance(out, QubitDensity)


@given(densities(), ks, ks)
def test_filters_commute(rho, k1, k2):
    f1, f2 = FilterOp(k1), FilterOp(k2)
    if min(success_probability(rho, f1), success_probability(rho, f2)) < 1e-6:
        return
    a = apply_filter(apply_filter(rho, f1), f2)
    b = apply_filter(apply_filter(rho, f2), f1)
    assert a.as_matrix().max_abs_diff(b.as_matrix()) <= 1e-12


@given(ks, st.floats(-1.0, 1.0))
def test_k_swap_symmetry(k, q):
    rho = QubitDensity(0.5, 0.5, q / 2)
    a = apply_filter(rho, FilterOp(k))
    b = apply_filter(rho, FilterOp(1.0 - k))
    assert a.d0 == pytest.approx(b.d1, abs=1e-12)
    assert abs(a.c) == pytest.approx(abs(b.c), abs=1e-12)


@pytest.mark.parametrize("channel", CHANNELS, ids=lambda c: c.name)
@pytest.mark.parametrize("k", [0.1, 0.5, 0.85])
def test_trajectory_matches_closed_form(channel, k):
    ts = np.linspace(0.0, 12.0, 241)
    traj = filtered_trajectory(channel, FilterOp(k))
    got = traj.state(ts)
    ref = reference_filtered_states(np.asarray(channel.coherence(ts)), k)
    assert np.max(np.abs(got.d0 - ref[:, 0, 0].real)) <= 1e-12
    assert np.max(np.abs(got.d1 - ref[:, 1, 1].real)) <= 1e-12
    assert np.max(np.abs(got.c - ref[:, 0, 1])) <= 1e-12


@pytest.mark.parametrize("k", [0.2, 0.7])
def test_trajectory_start_is_pure(k):
    rho = filtered_trajectory(CHANNELS[0], FilterOp(k)).state(0.0)
    assert (rho.d0, rho.d1, rho.c) == pytest.approx((1 - k, k, math.sqrt(k * (1 - k))))


def test_unfiltered_point_matches_evolution():
    channel = CHANNELS[3]
    ts = np.linspace(0.0, 5.0, 51)
    a = filtered_trajectory(channel, FilterOp(0.5)).state(ts)
    b = evolve(channel, QubitDensity.plus(), ts)
    assert np.max(np.abs(a.c - b.c)) <= 1e-12


def test_fully_dephased_input():
    rho = apply_filter(QubitDensity(0.5, 0.5, 0.0), FilterOp(0.3))
    assert (rho.d0, rho.d1, rho.c) == pytest.approx((0.7, 0.3, 0.0))


@pytest.mark.parametrize("channel", CHANNELS, ids=lambda c: c.name)
def test_generator_matches_finite_difference(channel):
    traj = filtered_trajectory(channel, FilterOp(0.3))
    t, h = 2.3, 1e-5
    fd = (traj.state(t + h).c - traj.state(t - h).c) / (2 * h)
    gen = traj.generator(t)
    assert gen.a12 == pytest.approx(fd, rel=1e-6, abs=1e-12)
    assert abs(gen.a11) <= 1e-15 and abs(gen.a22) <= 1e-15


def test_unnormalized_trajectory_scale():
    traj = filtered_trajectory(CHANNELS[0], FilterOp(0.3), normalized=False)
    assert traj.scale == pytest.approx(0.5)
