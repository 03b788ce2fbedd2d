"""Semi-implicit time stepping for the coupled volume/velocity/field/heat system.

One step advances the unknowns in a fixed substep order:

(a) volume, explicitly, in conservative cell form ``v += dt * u_x`` so that
    the total volume telescopes exactly (u vanishes at the boundary nodes);
(b) longitudinal momentum with an explicit gradient of the total pressure
    ``R*theta/v + |b|^2/2`` and backward-Euler viscous diffusion;
(c) transverse velocity with explicit magnetic tension ``b_x`` and
    backward-Euler shear diffusion, per component;
(d) transverse magnetic field in non-conservative node form
    ``vbar * b_t = w_x - b*u_x + (nu*b_x/v)_x`` with explicit coupling terms
    and backward-Euler resistive diffusion;
(e) temperature with backward-Euler conduction whose nonlinear conductivity
    ``kappa_tilde * theta**beta`` is frozen and Picard-iterated, explicit
    compression work, and explicit nonnegative viscous/resistive heating
    evaluated from end-of-substep gradients.

Every implicit stage is solved in increment form, which makes a spatially
constant state a bitwise fixed point of the step.  The diffusion matrices
are strictly diagonally dominant for any dt > 0.  Later substeps always use
the freshest available fields; in particular the gas pressure array built in
(b) is reused verbatim for the compression work in (e), so the discrete
kinetic/internal energy exchange cancels exactly in the energy budget.

A step never mutates its input state, and a single simulation is strictly
sequential; independent simulations share no mutable state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import PhysParams, SimState, validate_state
from .tridiag import solve_tridiagonal

__all__ = [
    "SchemeError",
    "NonFiniteStateError",
    "PositivityError",
    "AdvanceError",
    "PicardWarning",
    "StepControls",
    "SourceFields",
    "compute_dt",
    "step",
    "advance_to",
]


class SchemeError(Exception):
    """Base class for time-stepper failures."""


class NonFiniteStateError(SchemeError):
    """A state array contains NaN or infinity."""


class PositivityError(SchemeError):
    """v or theta lost positivity during a substep; retry with smaller dt."""

    def __init__(self, field: str, dt: float):
        self.field = field
        self.dt = dt
        super().__init__(f"{field} lost positivity at dt={dt:.3e}")


class AdvanceError(SchemeError):
    """dt-halving retries exhausted; carries the last accepted state."""

    def __init__(self, message: str, last_good: SimState):
        self.last_good = last_good
        super().__init__(message)


class PicardWarning(UserWarning):
    """Conductivity iteration hit its cap without meeting the tolerance."""


@dataclass(frozen=True)
class StepControls:
    """Knobs for dt selection and the nonlinear conduction solve."""

    cfl: float = 0.4
    max_picard: int = 5
    picard_tol: float = 1e-10
    max_retries: int = 20

    def __post_init__(self) -> None:
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.max_picard < 1:
            raise ValueError("max_picard must be >= 1")
        if not self.picard_tol > 0.0:
            raise ValueError("picard_tol must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


SourceFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class SourceFields:
    """Optional forcing callbacks ``f(x, t)`` added to each time derivative.

    Used only by manufactured-solution runs; when absent the step solves the
    homogeneous system.  ``v``/``theta`` sources are sampled at cell centers,
    ``u``/``w``/``b`` at interior nodes; ``w`` and ``b`` callbacks return
    arrays of shape ``(len(x), 2)``.
    """

    v: Optional[SourceFn] = None
    u: Optional[SourceFn] = None
    w: Optional[SourceFn] = None
    b: Optional[SourceFn] = None
    theta: Optional[SourceFn] = None

    def any(self) -> bool:
        return any(f is not None for f in (self.v, self.u, self.w, self.b, self.theta))


def compute_dt(s: SimState, p: PhysParams, controls: StepControls) -> float:
    """Magneto-acoustic step restriction for the explicit substeps.

    dt = cfl * dx * min over cells of v / sqrt(gamma*R*theta + v*|b|^2),
    with b averaged from nodes to cells.
    """
    for arr in (s.v, s.theta, s.u, s.w, s.b):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteStateError("state contains non-finite values")
    b_cell = 0.5 * (s.b[:-1] + s.b[1:])
    bsq = b_cell[:, 0] ** 2 + b_cell[:, 1] ** 2
    speed = np.sqrt(p.gamma * p.R * s.theta + s.v * bsq)
    dx = 1.0 / s.n_cells
    return controls.cfl * dx * float(np.min(s.v / speed))


# ---------------------------------------------------------------------------
# spatial operators on the staggered grid
# ---------------------------------------------------------------------------

def _total_pressure(p_gas: np.ndarray, bsq_cell: np.ndarray) -> np.ndarray:
    """Gas plus magnetic pressure at cells (seam for fault-injection tests)."""
    return p_gas + 0.5 * bsq_cell


def _node_diffusion_apply(q: np.ndarray, coeff_cells: np.ndarray, dx: float) -> np.ndarray:
    """(coeff * q_x)_x at interior nodes for a node field with Dirichlet ends."""
    c = coeff_cells[:, None] if q.ndim == 2 else coeff_cells
    flux = c * np.diff(q, axis=0) / dx
    return np.diff(flux, axis=0) / dx


def _node_implicit_increment(
    coeff_cells: np.ndarray,
    dx: float,
    dt: float,
    rhs: np.ndarray,
    mass: np.ndarray | float = 1.0,
) -> np.ndarray:
    """Solve (mass*I - dt*D) delta = rhs at interior nodes, D the operator above."""
    r = dt / (dx * dx)
    cl = coeff_cells[:-1]
    cr = coeff_cells[1:]
    diag = mass + r * (cl + cr)
    lower = -r * cl[1:]
    upper = -r * cr[:-1]
    return solve_tridiagonal(lower, diag, upper, rhs)


def _conduction_matrix_apply(theta: np.ndarray, cc: np.ndarray) -> np.ndarray:
    """A @ theta for the scaled conduction matrix with zero-flux boundaries.

    ``cc`` holds dt-scaled face conductances at the n-1 interior faces; the
    boundary faces carry no flux.  (A theta)_i = cc_i*(theta_i - theta_{i-1})
    + cc_{i+1}*(theta_i - theta_{i+1}) with cc_0 = cc_n = 0.
    """
    g = cc * np.diff(theta)
    out = np.zeros_like(theta)
    out[1:] += g
    out[:-1] -= g
    return out


def _conduction_solve(
    th_old: np.ndarray,
    vbar_int: np.ndarray,
    p: PhysParams,
    controls: StepControls,
    dt: float,
    dx: float,
    explicit: np.ndarray,
) -> tuple[np.ndarray, bool]:
    """Backward-Euler conduction with lagged, Picard-iterated conductivity.

    Returns the new temperature and whether the iteration converged (always
    True when the conductivity does not depend on theta).
    """
    scale = dt * p.kappa_tilde / (p.c_v * dx * dx)
    th_ref = th_old
    th_new = th_old
    converged = False
    for _ in range(controls.max_picard):
        face_th = 0.5 * (th_ref[:-1] + th_ref[1:])
        cc = scale * face_th**p.beta / vbar_int
        rhs = dt * explicit - _conduction_matrix_apply(th_old, cc)
        diag = np.ones_like(th_old)
        diag[1:] += cc
        diag[:-1] += cc
        delta = solve_tridiagonal(-cc, diag, -cc, rhs)
        th_new = th_old + delta
        # fixed-point residual: the frozen-coefficient temperatures must be
        # consistent with the output (trivially true when beta == 0)
        change = float(np.max(np.abs(th_new - th_ref)))
        if p.beta == 0.0 or change <= controls.picard_tol * float(np.max(np.abs(th_new))):
            converged = True
            break
        th_ref = th_new
    return th_new, converged


def step(
    s: SimState,
    p: PhysParams,
    controls: StepControls,
    dt: float,
    sources: SourceFields | None = None,
) -> SimState:
    """Advance the state by one step of size dt.

    Raises :class:`PositivityError` when v or theta leaves the positive cone
    (the caller may halve dt and retry), and :class:`TridiagonalError` on a
    linear-solver breakdown.  Picard non-convergence is reported through
    :class:`PicardWarning` and the last iterate is accepted.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    v0, th0, u0, w0, b0 = s.v, s.theta, s.u, s.w, s.b
    n = v0.size
    dx = 1.0 / n
    t_new = s.t + dt

    use_src = sources is not None and sources.any()
    if use_src:
        x_cells = (np.arange(n) + 0.5) * dx
        x_int = np.arange(1, n) * dx

    # (a) volume
    v1 = v0 + dt * (np.diff(u0) / dx)
    if use_src and sources.v is not None:
        v1 = v1 + dt * sources.v(x_cells, t_new)
    if not np.all(v1 > 0.0):
        raise PositivityError("v", dt)

    # (b) longitudinal momentum
    b_cell = 0.5 * (b0[:-1] + b0[1:])
    bsq_cell = b_cell[:, 0] ** 2 + b_cell[:, 1] ** 2
    p_gas = p.R * th0 / v1
    p_tot = _total_pressure(p_gas, bsq_cell)
    visc_coeff = p.mu / v1
    expl_u = _node_diffusion_apply(u0, visc_coeff, dx) - np.diff(p_tot) / dx
    if use_src and sources.u is not None:
        expl_u = expl_u + sources.u(x_int, t_new)
    du = _node_implicit_increment(visc_coeff, dx, dt, dt * expl_u)
    u1 = u0.copy()
    u1[1:-1] += du

    # (c) transverse velocity
    shear_coeff = p.lam / v1
    expl_w = _node_diffusion_apply(w0, shear_coeff, dx) + (b0[2:] - b0[:-2]) / (2.0 * dx)
    if use_src and sources.w is not None:
        expl_w = expl_w + sources.w(x_int, t_new)
    dw = _node_implicit_increment(shear_coeff, dx, dt, dt * expl_w)
    w1 = w0.copy()
    w1[1:-1] += dw

    # (d) transverse magnetic field
    vbar_int = 0.5 * (v1[:-1] + v1[1:])
    res_coeff = p.nu / v1
    ux_node = (u1[2:] - u1[:-2]) / (2.0 * dx)
    wx_node = (w1[2:] - w1[:-2]) / (2.0 * dx)
    expl_b = (
        _node_diffusion_apply(b0, res_coeff, dx)
        + wx_node
        - b0[1:-1] * ux_node[:, None]
    )
    if use_src and sources.b is not None:
        expl_b = expl_b + vbar_int[:, None] * sources.b(x_int, t_new)
    db = _node_implicit_increment(res_coeff, dx, dt, dt * expl_b, mass=vbar_int)
    b1 = b0.copy()
    b1[1:-1] += db

    # (e) temperature
    ux_new = np.diff(u1) / dx
    wx_new = np.diff(w1, axis=0) / dx
    bx_new = np.diff(b1, axis=0) / dx
    heating = (
        p.mu * ux_new**2
        + p.lam * (wx_new[:, 0] ** 2 + wx_new[:, 1] ** 2)
        + p.nu * (bx_new[:, 0] ** 2 + bx_new[:, 1] ** 2)
    ) / v1
    expl_th = (heating - p_gas * ux_new) / p.c_v
    if use_src and sources.theta is not None:
        expl_th = expl_th + sources.theta(x_cells, t_new)
    th1, converged = _conduction_solve(th0, vbar_int, p, controls, dt, dx, expl_th)
    if not converged and p.beta > 0.0 and controls.max_picard > 1:
        warnings.warn(
            f"conductivity iteration did not converge in {controls.max_picard} sweeps",
            PicardWarning,
            stacklevel=2,
        )
    if not np.all(th1 > 0.0):
        raise PositivityError("theta", dt)

    return SimState(t=t_new, v=v1, theta=th1, u=u1, w=w1, b=b1)


def advance_to(
    s: SimState,
    p: PhysParams,
    controls: StepControls,
    t_end: float,
    observer: Callable[[SimState, float], None] | None = None,
) -> SimState:
    """Repeat compute_dt + step until t_end, clipping the final step.

    Positivity failures trigger dt-halving retries up to
    ``controls.max_retries``; exhausting the retries raises
    :class:`AdvanceError` carrying the last accepted state.  The observer is
    invoked once per accepted step with the new state and the dt used.  The
    trajectory is a deterministic function of the inputs.
    """
    if not t_end > s.t:
        raise ValueError("t_end must exceed the current state time")
    violations = validate_state(s)
    if violations:
        raise ValueError("invalid initial state: " + "; ".join(map(str, violations)))

    state = s
    tol = 1e-12 * max(1.0, abs(t_end))
    while t_end - state.t > tol:
        dt = min(compute_dt(state, p, controls), t_end - state.t)
        for _ in range(controls.max_retries + 1):
            try:
                new_state = step(state, p, controls, dt)
                break
            except PositivityError:
                dt *= 0.5
        else:
            raise AdvanceError(
                f"positivity retries exhausted at t={state.t:.6g}", last_good=state
            )
        state = new_state
        if observer is not None:
            observer(state, dt)
    return state
