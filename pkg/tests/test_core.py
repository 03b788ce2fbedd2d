import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import build_state, random_state
from mhd1d.core import (
    EquilibriumTarget,
    Grid,
    PhysParams,
    SimState,
    cell_integral,
    equilibrium_state,
    h1_distance,
    l2_distance,
    node_integral,
    validate_state,
)


def test_phys_params_gamma_derived():
    p = PhysParams(R=1.0, c_v=1.0)
    assert p.gamma == 2.0
    assert PhysParams(R=0.4, c_v=1.0).gamma == 1.4


@pytest.mark.parametrize("field", ["mu", "lam", "nu", "kappa_tilde", "R", "c_v"])
def test_phys_params_positivity(field):
    with pytest.raises(ValueError):
        PhysParams(**{field: 0.0})


def test_phys_params_beta_nonnegative():
    with pytest.raises(ValueError):
        PhysParams(beta=-0.5)
    assert PhysParams(beta=0.0).beta == 0.0


def test_grid_basics():
    g = Grid(100)
    assert g.dx == 0.01
    assert g.n_nodes == 101
    assert g.nodes()[0] == 0.0 and g.nodes()[-1] == 1.0
    assert np.allclose(np.diff(g.cell_centers()), g.dx)
    with pytest.raises(ValueError):
        Grid(3)


def test_equilibrium_state_constant():
    s = equilibrium_state(Grid(100), EquilibriumTarget(1.0, 1.0))
    assert s.t == 0.0
    assert np.all(s.v == 1.0) and np.all(s.theta == 1.0)
    assert np.all(s.u == 0.0) and np.all(s.w == 0.0) and np.all(s.b == 0.0)


def test_equilibrium_state_other_target():
    s = equilibrium_state(Grid(50), EquilibriumTarget(2.0, 0.5))
    assert np.all(s.v == 2.0) and np.all(s.theta == 0.5)


def test_equilibrium_target_rejects_nonpositive():
    with pytest.raises(ValueError):
        EquilibriumTarget(-1.0, 1.0)
    with pytest.raises(ValueError):
        EquilibriumTarget(1.0, 0.0)


def test_validate_equilibrium_clean():
    s = equilibrium_state(Grid(20), EquilibriumTarget())
    assert validate_state(s) == []


def test_validate_flags_negative_volume():
    s = equilibrium_state(Grid(20), EquilibriumTarget())
    s.v[3] = -0.1
    violations = validate_state(s)
    assert len(violations) == 1
    assert violations[0].field == "v" and violations[0].index == 3


def test_validate_flags_boundary_velocity():
    s = equilibrium_state(Grid(20), EquilibriumTarget())
    s.u[0] = 0.2
    violations = validate_state(s)
    assert len(violations) == 1
    assert violations[0].field == "u" and violations[0].index == 0
    assert "boundary" in violations[0].rule


def test_validate_flags_nan():
    s = equilibrium_state(Grid(20), EquilibriumTarget())
    s.theta[5] = np.nan
    assert any(v.field == "theta" and v.index == 5 for v in validate_state(s))


def test_quadrature_exactness():
    assert cell_integral(np.ones(100), 0.01) == pytest.approx(1.0, abs=1e-14)
    x = np.linspace(0.0, 1.0, 51)
    # trapezoid is exact on affine samplings
    assert node_integral(2.0 * x + 1.0, 0.02) == pytest.approx(2.0, abs=1e-14)


def test_h1_zero_at_own_target():
    s = equilibrium_state(Grid(64), EquilibriumTarget(1.0, 1.0))
    assert h1_distance(s, EquilibriumTarget(1.0, 1.0)) == 0.0
    assert l2_distance(s, EquilibriumTarget(1.0, 1.0)) == 0.0


def _single_u_mode(n, amp=0.1):
    xn = np.linspace(0.0, 1.0, n + 1)
    return build_state(n, u=amp * np.sin(np.pi * xn))


def test_h1_single_velocity_mode_against_analytic_integrals():
    # u = a*sin(pi x): the L2 and derivative integrals are a^2/2 and a^2 pi^2/2
    expected = 0.1 * math.sqrt((1.0 + math.pi**2) / 2.0)
    assert expected == pytest.approx(0.2331266, abs=1e-6)
    got = h1_distance(_single_u_mode(400), EquilibriumTarget(1.0, 1.0))
    assert got == pytest.approx(expected, abs=1e-4)


def test_l2_single_velocity_mode_against_analytic_integral():
    expected = 0.1 / math.sqrt(2.0)
    got = l2_distance(_single_u_mode(400), EquilibriumTarget(1.0, 1.0))
    assert got == pytest.approx(expected, abs=1e-4)


def test_h1_discrete_error_is_second_order():
    expected = 0.1 * math.sqrt((1.0 + math.pi**2) / 2.0)
    target = EquilibriumTarget(1.0, 1.0)
    err_coarse = abs(h1_distance(_single_u_mode(100), target) - expected)
    err_fine = abs(h1_distance(_single_u_mode(200), target) - expected)
    assert 3.0 < err_coarse / err_fine < 5.0


def test_norm_scaling_is_exactly_homogeneous(rng):
    s = random_state(rng)
    target = EquilibriumTarget(1.0, 1.0)
    doubled = SimState(
        t=s.t,
        v=1.0 + 2.0 * (s.v - 1.0),
        theta=1.0 + 2.0 * (s.theta - 1.0),
        u=2.0 * s.u,
        w=2.0 * s.w,
        b=2.0 * s.b,
    )
    assert h1_distance(doubled, target) == pytest.approx(2.0 * h1_distance(s, target), rel=1e-13)
    assert l2_distance(doubled, target) == pytest.approx(2.0 * l2_distance(s, target), rel=1e-13)


@given(seed=st.integers(0, 10_000))
def test_l2_never_exceeds_h1(seed):
    s = random_state(np.random.default_rng(seed))
    target = EquilibriumTarget(1.0, 1.0)
    assert l2_distance(s, target) <= h1_distance(s, target) + 1e-15


@given(seed=st.integers(0, 10_000))
def test_triangle_inequality_on_deviations(seed):
    rng = np.random.default_rng(seed)
    a = random_state(rng, amp=0.2)
    b = random_state(rng, amp=0.2)
    target = EquilibriumTarget(1.0, 1.0)
    combined = SimState(
        t=0.0,
        v=1.0 + (a.v - 1.0) + (b.v - 1.0),
        theta=1.0 + (a.theta - 1.0) + (b.theta - 1.0),
        u=a.u + b.u,
        w=a.w + b.w,
        b=a.b + b.b,
    )
    lhs = h1_distance(combined, target)
    rhs = h1_distance(a, target) + h1_distance(b, target)
    assert lhs <= rhs + 1e-12


def test_distance_rejects_mismatched_sizes():
    s = equilibrium_state(Grid(20), EquilibriumTarget())
    bad = SimState(t=0.0, v=s.v, theta=s.theta, u=np.zeros(5), w=s.w, b=s.b)
    with pytest.raises(ValueError):
        h1_distance(bad, EquilibriumTarget())
