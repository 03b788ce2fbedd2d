"""Admissible initial data: smooth, boundary-compatible, bounded away from zero.

Three families are provided.  ``single_mode`` uses one Fourier mode per
field with profiles chosen so the boundary conditions hold exactly:
sin(2*pi*k*x) for the volume (no boundary constraint, zero mean),
sin(pi*k*x) for the node fields (vanishing at both endpoints), and
cos(pi*k*x) for the temperature so its gradient vanishes at the walls.
``multi_mode_random`` draws a truncated Fourier series with 1/k^2 coefficient
decay from a seeded generator and resamples until the positivity floors
hold.  ``custom_tabulated`` interpolates two-column (x, value) text tables
onto the grid.

``normalize`` rescales to unit total volume and unit total energy
(heat-capacity-one convention): v multiplicatively to unit mean, then theta
multiplicatively so that the volume-rescaled kinetic + magnetic energy plus
the thermal content equals one.  Multiplicative scaling preserves positivity
and profile shape; it is idempotent up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Grid, PhysParams, SimState, cell_integral, node_average, node_integral

__all__ = ["InitFamily", "make_initial", "normalize"]

_FAMILIES = ("single_mode", "multi_mode_random", "custom_tabulated")
_TABLE_FIELDS = ("v", "theta", "u", "w1", "w2", "b1", "b2")


@dataclass(frozen=True)
class InitFamily:
    """Declarative description of one initial-data construction.

    Amplitudes and wavenumbers are per field; ``w`` and ``b`` get the stated
    amplitude on their first component at wavenumber k and on their second
    component at wavenumber 2k, which keeps both components in the admissible
    class while breaking the component symmetry.  ``tables`` maps field names
    (v, theta, u, w1, w2, b1, b2) to file paths for the tabulated family.
    """

    kind: str = "single_mode"
    amp_v: float = 0.0
    amp_u: float = 0.0
    amp_w: float = 0.0
    amp_b: float = 0.0
    amp_theta: float = 0.0
    k_v: int = 1
    k_u: int = 1
    k_w: int = 1
    k_b: int = 1
    k_theta: int = 1
    theta_mean: float = 1.0
    floor: float = 0.1
    seed: int = 0
    n_modes: int = 4
    tables: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in _FAMILIES:
            raise ValueError(f"unknown init family {self.kind!r}")
        if not self.floor > 0.0:
            raise ValueError("positivity floor must be > 0")
        for name, _ in self.tables:
            if name not in _TABLE_FIELDS:
                raise ValueError(f"unknown table field {name!r}")


def _check_floors(v: np.ndarray, theta: np.ndarray, floor: float) -> None:
    if float(np.min(v)) < floor:
        raise ValueError(
            f"initial volume dips to {np.min(v):.4g}, below the floor {floor}"
        )
    if float(np.min(theta)) < floor:
        raise ValueError(
            f"initial temperature dips to {np.min(theta):.4g}, below the floor {floor}"
        )


def _single_mode(fam: InitFamily, grid: Grid) -> SimState:
    xc = grid.cell_centers()
    xn = grid.nodes()
    v = 1.0 + fam.amp_v * np.sin(2.0 * np.pi * fam.k_v * xc)
    theta = fam.theta_mean + fam.amp_theta * np.cos(np.pi * fam.k_theta * xc)
    u = fam.amp_u * np.sin(np.pi * fam.k_u * xn)
    w = np.stack(
        [
            fam.amp_w * np.sin(np.pi * fam.k_w * xn),
            fam.amp_w * np.sin(2.0 * np.pi * fam.k_w * xn),
        ],
        axis=1,
    )
    b = np.stack(
        [
            fam.amp_b * np.sin(np.pi * fam.k_b * xn),
            fam.amp_b * np.sin(2.0 * np.pi * fam.k_b * xn),
        ],
        axis=1,
    )
    _pin_node_boundaries(u, w, b)
    return SimState(t=0.0, v=v, theta=theta, u=u, w=w, b=b)


def _random_series(rng, x, amp, n_modes, node_profile: bool) -> np.ndarray:
    out = np.zeros_like(x)
    for k in range(1, n_modes + 1):
        coeff = rng.uniform(-1.0, 1.0) / k**2
        if node_profile:
            out += coeff * np.sin(np.pi * k * x)
        else:
            out += coeff * np.cos(np.pi * k * x)
    return amp * out


def _multi_mode_random(fam: InitFamily, grid: Grid) -> SimState:
    rng = np.random.default_rng(fam.seed)
    xc = grid.cell_centers()
    xn = grid.nodes()
    for _ in range(100):
        # volume perturbation uses full-period sines: zero mean, no BC needed
        v = np.ones_like(xc)
        for k in range(1, fam.n_modes + 1):
            v += fam.amp_v * rng.uniform(-1.0, 1.0) / k**2 * np.sin(2.0 * np.pi * k * xc)
        theta = fam.theta_mean + _random_series(rng, xc, fam.amp_theta, fam.n_modes, False)
        u = _random_series(rng, xn, fam.amp_u, fam.n_modes, True)
        w = np.stack(
            [
                _random_series(rng, xn, fam.amp_w, fam.n_modes, True),
                _random_series(rng, xn, fam.amp_w, fam.n_modes, True),
            ],
            axis=1,
        )
        b = np.stack(
            [
                _random_series(rng, xn, fam.amp_b, fam.n_modes, True),
                _random_series(rng, xn, fam.amp_b, fam.n_modes, True),
            ],
            axis=1,
        )
        if float(np.min(v)) >= fam.floor and float(np.min(theta)) >= fam.floor:
            _pin_node_boundaries(u, w, b)
            return SimState(t=0.0, v=v, theta=theta, u=u, w=w, b=b)
    raise ValueError("could not satisfy positivity floors after 100 resamples")


def _load_table(path: str, x: np.ndarray) -> np.ndarray:
    data = np.loadtxt(Path(path))
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"table {path} must have two columns (x, value)")
    return np.interp(x, data[:, 0], data[:, 1])


def _custom_tabulated(fam: InitFamily, grid: Grid) -> SimState:
    tables = dict(fam.tables)
    xc = grid.cell_centers()
    xn = grid.nodes()
    v = _load_table(tables["v"], xc) if "v" in tables else np.ones_like(xc)
    theta = _load_table(tables["theta"], xc) if "theta" in tables else np.ones_like(xc)
    u = _load_table(tables["u"], xn) if "u" in tables else np.zeros_like(xn)
    w = np.stack(
        [
            _load_table(tables["w1"], xn) if "w1" in tables else np.zeros_like(xn),
            _load_table(tables["w2"], xn) if "w2" in tables else np.zeros_like(xn),
        ],
        axis=1,
    )
    b = np.stack(
        [
            _load_table(tables["b1"], xn) if "b1" in tables else np.zeros_like(xn),
            _load_table(tables["b2"], xn) if "b2" in tables else np.zeros_like(xn),
        ],
        axis=1,
    )
    for name, arr in (("u", u), ("w", w), ("b", b)):
        for node in (0, -1):
            if np.any(np.abs(arr[node]) > 1e-12):
                raise ValueError(
                    f"tabulated {name} is incompatible with the boundary "
                    f"conditions (nonzero at an endpoint)"
                )
    _pin_node_boundaries(u, w, b)
    return SimState(t=0.0, v=v, theta=theta, u=u, w=w, b=b)


def _pin_node_boundaries(u, w, b) -> None:
    u[0] = u[-1] = 0.0
    w[0] = w[-1] = 0.0
    b[0] = b[-1] = 0.0


def make_initial(family: InitFamily, grid: Grid) -> SimState:
    """Construct initial data in the admissible class; errors if any
    amplitude drives v or theta below the positivity floor."""
    if family.kind == "single_mode":
        state = _single_mode(family, grid)
    elif family.kind == "multi_mode_random":
        state = _multi_mode_random(family, grid)
    else:
        state = _custom_tabulated(family, grid)
    _check_floors(state.v, state.theta, family.floor)
    return state


def normalize(s: SimState, p: PhysParams) -> SimState:
    """Rescale to unit total volume and unit total energy.

    v is scaled multiplicatively to unit mean; theta is then scaled so that
    the thermal content makes the total (with kinetic + magnetic energy
    computed against the rescaled volume) exactly one.  Errors when the
    kinetic + magnetic energy already reaches one, since the temperature
    scale would not be positive.
    """
    del p  # the convention is parameter-free (unit heat capacity)
    dx = 1.0 / s.n_cells
    v = s.v / cell_integral(s.v, dx)
    vbar = node_average(v)
    bsq = s.b[:, 0] ** 2 + s.b[:, 1] ** 2
    wsq = s.w[:, 0] ** 2 + s.w[:, 1] ** 2
    kinetic = 0.5 * (
        node_integral(s.u * s.u, dx)
        + node_integral(wsq, dx)
        + node_integral(vbar * bsq, dx)
    )
    if kinetic >= 1.0:
        raise ValueError(
            f"kinetic + magnetic energy {kinetic:.6g} >= 1; "
            "no positive temperature scale can normalize this state"
        )
    theta = s.theta * ((1.0 - kinetic) / cell_integral(s.theta, dx))
    return SimState(t=s.t, v=v, theta=theta, u=s.u.copy(), w=s.w.copy(), b=s.b.copy())
