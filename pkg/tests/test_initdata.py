import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mhd1d.core import Grid, PhysParams, cell_integral, validate_state
from mhd1d.initdata import InitFamily, make_initial, normalize

UNIT = PhysParams()


def test_zero_amplitudes_give_equilibrium():
    s = make_initial(InitFamily(kind="single_mode"), Grid(50))
    assert np.all(s.v == 1.0) and np.all(s.theta == 1.0)
    assert np.all(s.u == 0.0) and np.all(s.w == 0.0) and np.all(s.b == 0.0)
    assert s.t == 0.0


def test_single_mode_velocity_profile():
    fam = InitFamily(kind="single_mode", amp_u=0.1, k_u=1)
    s = make_initial(fam, Grid(100))
    assert s.u[50] == pytest.approx(0.1, abs=1e-15)  # sin(pi/2) at midpoint
    assert s.u[0] == 0.0 and s.u[-1] == 0.0


def test_single_mode_temperature_has_flat_walls():
    fam = InitFamily(kind="single_mode", amp_theta=0.2, k_theta=2)
    s = make_initial(fam, Grid(200))
    # one-sided wall gradients vanish to the profile's quadratic order
    dx = 1.0 / 200
    assert abs(s.theta[1] - s.theta[0]) < 0.2 * (np.pi * 2 * dx) ** 2
    assert abs(s.theta[-1] - s.theta[-2]) < 0.2 * (np.pi * 2 * dx) ** 2


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        InitFamily(kind="bogus")


def test_floor_violation_raises():
    with pytest.raises(ValueError, match="floor"):
        make_initial(InitFamily(kind="single_mode", amp_v=0.95, floor=0.1), Grid(50))
    with pytest.raises(ValueError, match="floor"):
        make_initial(InitFamily(kind="single_mode", amp_theta=0.95, floor=0.1), Grid(50))


def test_random_family_deterministic_per_seed():
    fam = InitFamily(kind="multi_mode_random", amp_v=0.2, amp_u=0.2, amp_w=0.2,
                     amp_b=0.2, amp_theta=0.2, seed=77)
    a = make_initial(fam, Grid(64))
    b = make_initial(fam, Grid(64))
    for name in ("v", "theta", "u", "w", "b"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    other = make_initial(
        InitFamily(kind="multi_mode_random", amp_v=0.2, amp_u=0.2, amp_w=0.2,
                   amp_b=0.2, amp_theta=0.2, seed=78),
        Grid(64),
    )
    assert not np.array_equal(a.u, other.u)


@given(seed=st.integers(0, 1000))
def test_random_family_is_valid_and_floored(seed):
    fam = InitFamily(kind="multi_mode_random", amp_v=0.3, amp_u=0.3, amp_w=0.3,
                     amp_b=0.3, amp_theta=0.3, floor=0.2, seed=seed)
    s = make_initial(fam, Grid(48))
    assert validate_state(s) == []
    assert np.min(s.v) >= 0.2 and np.min(s.theta) >= 0.2


def test_custom_tabulated(tmp_path):
    x = np.linspace(0.0, 1.0, 11)
    np.savetxt(tmp_path / "v.txt", np.column_stack([x, 1.0 + 0.5 * x * (1.0 - x)]))
    np.savetxt(tmp_path / "u.txt", np.column_stack([x, x * (1.0 - x)]))
    fam = InitFamily(
        kind="custom_tabulated",
        tables=(("v", str(tmp_path / "v.txt")), ("u", str(tmp_path / "u.txt"))),
    )
    s = make_initial(fam, Grid(40))
    assert validate_state(s) == []
    assert np.all(s.theta == 1.0)  # unspecified fields default to equilibrium
    assert s.u[0] == 0.0 and s.u[-1] == 0.0
    assert s.v[20] == pytest.approx(1.0 + 0.5 * 0.5125 * 0.4875, abs=5e-3)


def test_custom_tabulated_boundary_incompatibility(tmp_path):
    x = np.linspace(0.0, 1.0, 11)
    np.savetxt(tmp_path / "u.txt", np.column_stack([x, x + 1.0]))  # nonzero at walls
    fam = InitFamily(kind="custom_tabulated", tables=(("u", str(tmp_path / "u.txt")),))
    with pytest.raises(ValueError, match="boundary"):
        make_initial(fam, Grid(40))


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def test_normalize_rescales_constant_state():
    s = make_initial(InitFamily(kind="single_mode"), Grid(64))
    s.v[:] = 2.0
    out = normalize(s, UNIT)
    assert np.allclose(out.v, 1.0, atol=1e-14)
    assert np.allclose(out.theta, 1.0, atol=1e-14)


def test_normalize_fixes_totals():
    fam = InitFamily(kind="single_mode", amp_v=0.2, amp_u=0.3, amp_b=0.2,
                     amp_theta=0.1, floor=0.1)
    out = normalize(make_initial(fam, Grid(128)), UNIT)
    dx = 1.0 / 128
    assert cell_integral(out.v, dx) == pytest.approx(1.0, abs=1e-13)
    from mhd1d.diagnostics import snapshot_diagnostics
    from mhd1d.core import EquilibriumTarget

    rec = snapshot_diagnostics(out, UNIT, EquilibriumTarget(1.0, 1.0))
    assert rec.total_energy == pytest.approx(1.0, abs=1e-12)


def test_normalize_equilibrium_is_identity():
    s = make_initial(InitFamily(kind="single_mode"), Grid(32))
    out = normalize(s, UNIT)
    assert np.allclose(out.v, s.v, atol=1e-15)
    assert np.allclose(out.theta, s.theta, atol=1e-15)


def test_normalize_temperature_share_with_unit_velocity_mode():
    # u = sin(pi x) carries kinetic energy 1/4, so theta rescales to 3/4
    fam = InitFamily(kind="single_mode", amp_u=1.0, floor=0.1)
    out = normalize(make_initial(fam, Grid(200)), UNIT)
    assert np.allclose(out.theta, 0.75, atol=1e-12)


def test_normalize_rejects_excess_kinetic_energy():
    fam = InitFamily(kind="single_mode", amp_u=2.0, floor=0.1)  # kinetic = 1
    s = make_initial(fam, Grid(100))
    with pytest.raises(ValueError, match="energy"):
        normalize(s, UNIT)


@given(
    amp_v=st.floats(0.0, 0.4),
    amp_u=st.floats(0.0, 0.5),
    amp_theta=st.floats(0.0, 0.4),
)
def test_normalize_idempotent_and_valid(amp_v, amp_u, amp_theta):
    fam = InitFamily(kind="single_mode", amp_v=amp_v, amp_u=amp_u,
                     amp_theta=amp_theta, floor=0.05)
    once = normalize(make_initial(fam, Grid(48)), UNIT)
    twice = normalize(once, UNIT)
    assert validate_state(once) == []
    assert np.allclose(twice.v, once.v, rtol=1e-13, atol=1e-15)
    assert np.allclose(twice.theta, once.theta, rtol=1e-13, atol=1e-15)


def test_random_family_gives_up_after_resampling():
    fam = InitFamily(kind="multi_mode_random", amp_v=10.0, floor=0.5, seed=1)
    with pytest.raises(ValueError, match="resample"):
        make_initial(fam, Grid(48))
