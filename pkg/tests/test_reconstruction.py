import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import build_state
from mhd1d.core import EquilibriumTarget, Grid, PhysParams, equilibrium_state
from mhd1d.initdata import InitFamily, make_initial, normalize
from mhd1d.reconstruction import (
    cumulative_velocity_integral,
    local_volume_factor,
    make_accumulator,
    reconstruct_volume,
    update_accumulator,
)
from mhd1d.scheme import StepControls, advance_to, compute_dt, step

UNIT = PhysParams()
TARGET = EquilibriumTarget(1.0, 1.0)


def _perturbed_initial(n):
    fam = InitFamily(kind="single_mode", amp_v=0.1, amp_u=0.1, amp_w=0.1,
                     amp_b=0.1, amp_theta=0.1, floor=0.1)
    return normalize(make_initial(fam, Grid(n)), UNIT)


# ---------------------------------------------------------------------------
# cumulative velocity integral
# ---------------------------------------------------------------------------

def test_cumulative_integral_zero_velocity():
    s = equilibrium_state(Grid(50), TARGET)
    assert np.all(cumulative_velocity_integral(s) == 0.0)


def test_cumulative_integral_against_antiderivative():
    errs = {}
    for n in (100, 200):
        xn = np.linspace(0.0, 1.0, n + 1)
        s = build_state(n, u=np.sin(np.pi * xn))
        got = cumulative_velocity_integral(s)
        xc = (np.arange(n) + 0.5) / n
        exact = (1.0 - np.cos(np.pi * xc)) / np.pi
        errs[n] = float(np.max(np.abs(got - exact)))
    assert errs[100] < 1e-4
    assert 3.2 < errs[100] / errs[200] < 4.8


def test_cumulative_integral_linear_in_velocity(rng):
    n = 64
    xn = np.linspace(0.0, 1.0, n + 1)
    u1 = np.sin(np.pi * xn)
    u2 = np.sin(2.0 * np.pi * xn)
    a, b = 0.7, -1.3
    sa = build_state(n, u=u1)
    sb = build_state(n, u=u2)
    sc = build_state(n, u=a * u1 + b * u2)
    combo = a * cumulative_velocity_integral(sa) + b * cumulative_velocity_integral(sb)
    assert np.allclose(cumulative_velocity_integral(sc), combo, rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------------------
# local volume factor
# ---------------------------------------------------------------------------

def test_volume_factor_at_initial_time_is_v0():
    s = _perturbed_initial(80)
    factor = local_volume_factor(s, s, UNIT)
    assert np.array_equal(factor, s.v)


def test_volume_factor_equilibrium_trajectory_is_one():
    s0 = equilibrium_state(Grid(60), TARGET)
    s = advance_to(s0, UNIT, StepControls(), 0.5)
    assert np.all(local_volume_factor(s, s0, UNIT) == 1.0)


def test_volume_factor_requires_unit_constants():
    s = equilibrium_state(Grid(20), TARGET)
    with pytest.raises(ValueError):
        local_volume_factor(s, s, PhysParams(mu=2.0))


def test_volume_factor_matches_dense_oracle_under_refinement():
    # quiescent initial data, analytic current fields; the oracle evaluates
    # the same exponential expression with adaptive quadrature and the exact
    # velocity antiderivative instead of the staggered sums
    a = 0.1

    def u_fn(x):
        return a * np.sin(np.pi * x)

    def v_fn(x):
        return 1.0 + a * np.sin(2.0 * np.pi * x)

    def cum_u(x):
        return a * (1.0 - np.cos(np.pi * x)) / np.pi

    double_int, err = quad(lambda x: v_fn(x) * cum_u(x), 0.0, 1.0, epsabs=1e-13)
    assert err < 1e-10

    def oracle(x):
        return np.exp(cum_u(x)) * np.exp(-double_int)

    errs = {}
    for n in (100, 200):
        xc = (np.arange(n) + 0.5) / n
        xn = np.linspace(0.0, 1.0, n + 1)
        initial = build_state(n)  # unit volume, no motion
        current = build_state(n, v=v_fn(xc), u=u_fn(xn))
        got = local_volume_factor(current, initial, UNIT)
        errs[n] = float(np.max(np.abs(got - oracle(xc))))
    assert errs[100] < 1e-4
    assert 3.2 < errs[100] / errs[200] < 4.8


def test_volume_factor_refinement_self_consistency():
    # evolve the same data on two grids with dt tied to dx^2, then compare
    # the factor on the coarse cells against the fine-cell average
    controls = StepControls()
    factors = {}
    for n in (100, 200):
        s0 = _perturbed_initial(n)
        s = s0
        dt = 2.0 / n**2
        steps = round(0.1 / dt)
        for _ in range(steps):
            s = step(s, UNIT, controls, 0.1 / steps)
        factors[n] = local_volume_factor(s, s0, UNIT)
    coarse_from_fine = 0.5 * (factors[200][0::2] + factors[200][1::2])
    assert np.max(np.abs(factors[100] - coarse_from_fine)) < 5e-4


# ---------------------------------------------------------------------------
# accumulator and reconstruction
# ---------------------------------------------------------------------------

def test_accumulator_requires_unit_constants():
    s = equilibrium_state(Grid(20), TARGET)
    with pytest.raises(ValueError):
        make_accumulator(s, PhysParams(R=2.0))


def test_accumulator_equilibrium_closed_forms():
    s0 = equilibrium_state(Grid(50), TARGET)
    acc = make_accumulator(s0, UNIT)
    controls = StepControls()
    s = s0
    dt = compute_dt(s0, UNIT, controls)
    for _ in range(200):
        s = step(s, UNIT, controls, dt)
        acc = update_accumulator(acc, s, dt)
    t = s.t
    # unit integrand: the damping exponent is exactly -t
    assert acc.log_y == pytest.approx(-t, abs=1e-12)
    # per-cell integral of exp(tau): trapezoid error only
    assert np.max(np.abs(acc.per_cell_integral - (math.exp(t) - 1.0))) < 1e-5
    v_rec = reconstruct_volume(acc, s)
    assert np.max(np.abs(v_rec - 1.0)) < 1e-5


def test_accumulator_time_mismatch_raises():
    s0 = equilibrium_state(Grid(20), TARGET)
    acc = make_accumulator(s0, UNIT)
    s = step(s0, UNIT, StepControls(), 1e-3)
    with pytest.raises(ValueError):
        update_accumulator(acc, s, 2e-3)


def test_reconstruct_stale_accumulator_raises():
    s0 = equilibrium_state(Grid(20), TARGET)
    acc = make_accumulator(s0, UNIT)
    s = step(s0, UNIT, StepControls(), 1e-3)
    with pytest.raises(ValueError):
        reconstruct_volume(acc, s)


def test_reconstruction_at_initial_time_is_exact():
    s0 = _perturbed_initial(60)
    acc = make_accumulator(s0, UNIT)
    assert np.array_equal(reconstruct_volume(acc, s0), s0.v)


def test_accumulator_monotonicity_on_perturbed_run():
    s0 = _perturbed_initial(64)
    acc = make_accumulator(s0, UNIT)
    controls = StepControls()
    s = s0
    prev_log_y = acc.log_y
    prev_integral = acc.per_cell_integral.copy()
    for _ in range(150):
        dt = compute_dt(s, UNIT, controls)
        s = step(s, UNIT, controls, dt)
        acc = update_accumulator(acc, s, dt)
        assert acc.log_y <= prev_log_y
        assert np.all(acc.per_cell_integral >= prev_integral)
        prev_log_y = acc.log_y
        prev_integral = acc.per_cell_integral.copy()
    assert acc.log_y <= 0.0


def test_reconstruction_tracks_evolved_volume():
    s0 = _perturbed_initial(100)
    acc = make_accumulator(s0, UNIT)
    controls = StepControls()
    s = s0
    worst = 0.0
    while s.t < 1.0:
        dt = min(compute_dt(s, UNIT, controls), 1.0 - s.t)
        s = step(s, UNIT, controls, dt)
        acc = update_accumulator(acc, s, dt)
        rel = float(np.max(np.abs(reconstruct_volume(acc, s) - s.v) / s.v))
        worst = max(worst, rel)
    assert worst < 5e-3
    assert np.all(reconstruct_volume(acc, s) > 0.0)
