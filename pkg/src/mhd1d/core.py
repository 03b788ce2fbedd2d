"""Staggered-grid state containers, physical parameters, and discrete norms.

The mass interval (0, 1) is divided into ``n_cells`` uniform cells of width
``dx = 1 / n_cells``.  Specific volume ``v`` and temperature ``theta`` are
cell-centered; the longitudinal velocity ``u`` and the two-component
transverse velocity ``w`` and magnetic field ``b`` live on the
``n_cells + 1`` nodes, so their homogeneous Dirichlet conditions are imposed
exactly at the endpoints.  Temperature carries a zero conductive flux at the
boundary faces instead of a Dirichlet value.

Cell quantities are integrated with the midpoint rule, node quantities with
the trapezoid rule.  Discrete H1 norms difference cell quantities
cell-to-cell (interior nodes only, no boundary extrapolation) and node
quantities node-to-node.

Everything here is an immutable value object after construction and every
function is pure, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysParams",
    "Grid",
    "SimState",
    "EquilibriumTarget",
    "Violation",
    "equilibrium_state",
    "validate_state",
    "h1_distance",
    "h1_l2_distances",
    "l2_distance",
    "cell_integral",
    "node_integral",
    "node_average",
]


@dataclass(frozen=True)
class PhysParams:
    """Physical constants of the gas and field.

    ``lam`` is the transverse (shear) viscosity, spelled out because
    ``lambda`` is reserved in Python; the adiabatic index ``gamma`` is
    derived as ``1 + R / c_v``.  Heat conductivity is the power law
    ``kappa_tilde * theta**beta``.
    """

    mu: float = 1.0
    lam: float = 1.0
    nu: float = 1.0
    kappa_tilde: float = 1.0
    beta: float = 0.0
    R: float = 1.0
    c_v: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mu", "lam", "nu", "kappa_tilde", "R", "c_v"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"PhysParams.{name} must be strictly positive")
        if self.beta < 0.0:
            raise ValueError("PhysParams.beta must be nonnegative")

    @property
    def gamma(self) -> float:
        return 1.0 + self.R / self.c_v

    @property
    def is_unit(self) -> bool:
        """True when every constant except beta equals one."""
        return (
            self.mu == 1.0
            and self.lam == 1.0
            and self.nu == 1.0
            and self.kappa_tilde == 1.0
            and self.R == 1.0
            and self.c_v == 1.0
        )


@dataclass(frozen=True)
class Grid:
    """Uniform staggered grid on the fixed mass interval (0, 1)."""

    n_cells: int

    def __post_init__(self) -> None:
        if self.n_cells < 4:
            raise ValueError("Grid needs at least 4 cells")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_cells + 1)

    def cell_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class SimState:
    """Discrete unknowns at one time instant.

    Shapes: ``v`` and ``theta`` are ``(n_cells,)``; ``u`` is
    ``(n_cells + 1,)``; ``w`` and ``b`` are ``(n_cells + 1, 2)``.  Arrays are
    owned by the state and never mutated by library operations; every update
    produces a fresh state.
    """

    t: float
    v: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    w: np.ndarray
    b: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.v.size

    def copy(self) -> "SimState":
        return SimState(
            t=self.t,
            v=self.v.copy(),
            theta=self.theta.copy(),
            u=self.u.copy(),
            w=self.w.copy(),
            b=self.b.copy(),
        )


@dataclass(frozen=True)
class EquilibriumTarget:
    """Constant state the solution relaxes toward: (v_s, 0, theta_s, 0, 0)."""

    v_s: float = 1.0
    theta_s: float = 1.0

    def __post_init__(self) -> None:
        if not (self.v_s > 0.0 and self.theta_s > 0.0):
            raise ValueError("equilibrium target values must be positive")


@dataclass(frozen=True)
class Violation:
    """One broken state invariant: which field, where, and which rule."""

    field: str
    index: int | None
    rule: str

    def __str__(self) -> str:
        where = "" if self.index is None else f"[{self.index}]"
        return f"{self.field}{where}: {self.rule}"


def equilibrium_state(grid: Grid, target: EquilibriumTarget) -> SimState:
    """Constant state with zero velocities and field at t = 0."""
    n = grid.n_cells
    return SimState(
        t=0.0,
        v=np.full(n, target.v_s),
        theta=np.full(n, target.theta_s),
        u=np.zeros(n + 1),
        w=np.zeros((n + 1, 2)),
        b=np.zeros((n + 1, 2)),
    )


def validate_state(s: SimState) -> list[Violation]:
    """Report every broken invariant; an empty list means the state is valid.

    Checked: array shapes are mutually consistent, all entries are finite,
    v and theta are strictly positive, and u, w, b vanish at both boundary
    nodes.
    """
    out: list[Violation] = []
    n = s.v.size
    shape_ok = True
    for name, arr, want in (
        ("theta", s.theta, (n,)),
        ("u", s.u, (n + 1,)),
        ("w", s.w, (n + 1, 2)),
        ("b", s.b, (n + 1, 2)),
    ):
        if arr.shape != want:
            out.append(Violation(name, None, f"shape {arr.shape} != {want}"))
            shape_ok = False
    if not shape_ok:
        return out

    for name, arr in (("v", s.v), ("theta", s.theta)):
        bad = np.flatnonzero(~np.isfinite(arr))
        for i in bad:
            out.append(Violation(name, int(i), "not finite"))
        nonpos = np.flatnonzero(np.isfinite(arr) & (arr <= 0.0))
        for i in nonpos:
            out.append(Violation(name, int(i), "must be > 0"))
    for name, arr in (("u", s.u), ("w", s.w), ("b", s.b)):
        flat_bad = ~np.isfinite(arr)
        if flat_bad.any():
            idx = np.flatnonzero(flat_bad.reshape(arr.shape[0], -1).any(axis=1))
            for i in idx:
                out.append(Violation(name, int(i), "not finite"))
        for node in (0, n):
            if np.any(arr[node] != 0.0):
                out.append(Violation(name, node, "boundary value must be 0"))
    return out


# ---------------------------------------------------------------------------
# quadrature and norms
# ---------------------------------------------------------------------------

def cell_integral(values: np.ndarray, dx: float) -> float:
    """Midpoint-rule integral of a cell-centered sampling."""
    return float(np.sum(values)) * dx


def node_integral(values: np.ndarray, dx: float) -> float:
    """Trapezoid-rule integral of a node-centered sampling (1D only)."""
    return float(np.sum(values) - 0.5 * (values[0] + values[-1])) * dx


def node_average(cell_values: np.ndarray) -> np.ndarray:
    """Cell field averaged to all nodes; one-sided copies at the boundary."""
    mid = 0.5 * (cell_values[:-1] + cell_values[1:])
    return np.concatenate(([cell_values[0]], mid, [cell_values[-1]]))


def _deviation_fields(s: SimState, target: EquilibriumTarget):
    """The five deviation components, tagged by grid placement."""
    return (
        ("cell", s.v - target.v_s),
        ("node", s.u),
        ("cell", s.theta - target.theta_s),
        ("node", s.b),
        ("node", s.w),
    )


def _check_sizes(s: SimState) -> None:
    n = s.v.size
    if (
        s.theta.shape != (n,)
        or s.u.shape != (n + 1,)
        or s.w.shape != (n + 1, 2)
        or s.b.shape != (n + 1, 2)
    ):
        raise ValueError("state arrays have mismatched grid sizes")


def _sq_l2(kind: str, f: np.ndarray, dx: float) -> float:
    fsq = f * f
    if fsq.ndim == 2:
        fsq = fsq.sum(axis=1)
    if kind == "cell":
        return float(np.sum(fsq)) * dx
    return float(np.sum(fsq) - 0.5 * (fsq[0] + fsq[-1])) * dx


def _sq_l2_gradient(kind: str, f: np.ndarray, dx: float) -> float:
    d = np.diff(f, axis=0) / dx
    dsq = d * d
    if dsq.ndim == 2:
        dsq = dsq.sum(axis=1)
    # cell-to-cell differences live at interior nodes, node-to-node at cells;
    # either way each carries weight dx
    return float(np.sum(dsq)) * dx


def h1_l2_distances(s: SimState, target: EquilibriumTarget) -> tuple[float, float]:
    """Both distances to the constant target in one pass over the fields."""
    _check_sizes(s)
    dx = 1.0 / s.n_cells
    l2_sq = 0.0
    grad_sq = 0.0
    for kind, f in _deviation_fields(s, target):
        l2_sq += _sq_l2(kind, f, dx)
        grad_sq += _sq_l2_gradient(kind, f, dx)
    return math.sqrt(l2_sq + grad_sq), math.sqrt(l2_sq)


def h1_distance(s: SimState, target: EquilibriumTarget) -> float:
    """Discrete H1 distance of the state tuple to the constant target.

    Root-sum-square over the five deviation components (v - v_s, u,
    theta - theta_s, b, w) of L2 norm squared plus the L2 norm squared of
    the discrete x-derivative.
    """
    return h1_l2_distances(s, target)[0]


def l2_distance(s: SimState, target: EquilibriumTarget) -> float:
    """Like :func:`h1_distance` without the derivative terms."""
    return h1_l2_distances(s, target)[1]
