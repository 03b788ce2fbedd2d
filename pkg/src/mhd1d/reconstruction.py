"""Closed-form reconstruction of the specific volume as a solver cross-check.

The momentum balance implies an exact identity: the specific volume can be
rebuilt at any time as

    v = F * Y * (1 + integral_0^t (theta + v|b|^2/2) / (F*Y) dtau),

where F(x, t) (the local volume factor) combines the initial volume with
exponentials of velocity displacement integrals,

    F = v0 * exp{ integral_0^x (u - u0) dy }
           * exp{ -II(t) + II(0) },   II(t) = integral of v * integral_0^x u,

and ln Y(t) = - integral_0^t integral of (u^2 + v|b|^2/2 + theta).  The
derivation fixes all physical constants to one and assumes normalized data,
so these routines refuse to run otherwise.  Comparing the reconstruction
against the evolved volume field measures the accumulated discretization
error independently of the time stepper's own bookkeeping.

The accumulator carries the running time integrals; it is owned by a single
run and advanced once per accepted step (trapezoid in time against the
stored previous integrands).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysParams, SimState, cell_integral, node_average, node_integral

__all__ = [
    "ReconstructionAccumulator",
    "cumulative_velocity_integral",
    "local_volume_factor",
    "make_accumulator",
    "update_accumulator",
    "reconstruct_volume",
]

_TIME_TOL = 1e-9


def _require_unit_constants(p: PhysParams) -> None:
    if not p.is_unit:
        raise ValueError(
            "volume reconstruction is derived for unit physical constants; "
            "run in normalized mode"
        )


def cumulative_velocity_integral(s: SimState) -> np.ndarray:
    """integral_0^x u dy evaluated at cell centers.

    Trapezoid cumulative integral over the nodes, then averaged to the cell
    midpoints.  Linear in u; exactly zero for u == 0.
    """
    dx = 1.0 / s.n_cells
    at_nodes = np.concatenate(([0.0], np.cumsum(0.5 * (s.u[:-1] + s.u[1:]) * dx)))
    return 0.5 * (at_nodes[:-1] + at_nodes[1:])


def _double_integral(s: SimState, cum_u: np.ndarray) -> float:
    """integral over x of v(x) * integral_0^x u dy, midpoint quadrature."""
    return cell_integral(s.v * cum_u, 1.0 / s.n_cells)


def local_volume_factor(
    s: SimState, initial: SimState, p: PhysParams
) -> np.ndarray:
    """Per-cell local volume factor F(x, t); equals v0 at t = 0 and 1 on the
    normalized equilibrium trajectory."""
    _require_unit_constants(p)
    if s.n_cells != initial.n_cells:
        raise ValueError("state and initial state live on different grids")
    cum_u = cumulative_velocity_integral(s)
    cum_u0 = cumulative_velocity_integral(initial)
    shift = -_double_integral(s, cum_u) + _double_integral(initial, cum_u0)
    return initial.v * np.exp(cum_u - cum_u0) * np.exp(shift)


def _volume_weighted_bsq(s: SimState) -> np.ndarray:
    """v|b|^2 at cells with b averaged from the bracketing nodes."""
    b_cell = 0.5 * (s.b[:-1] + s.b[1:])
    return s.v * (b_cell[:, 0] ** 2 + b_cell[:, 1] ** 2)


def _damping_integrand(s: SimState) -> float:
    """integral of u^2 + v|b|^2/2 + theta: the decay rate of ln Y."""
    dx = 1.0 / s.n_cells
    vbar = node_average(s.v)
    bsq = s.b[:, 0] ** 2 + s.b[:, 1] ** 2
    return (
        node_integral(s.u * s.u, dx)
        + 0.5 * node_integral(vbar * bsq, dx)
        + cell_integral(s.theta, dx)
    )


@dataclass
class ReconstructionAccumulator:
    """Running time integrals for the volume reconstruction identity.

    ``log_y`` is nonpositive and non-increasing; ``per_cell_integral`` is
    nonnegative and non-decreasing (both integrands are positive for a valid
    state).  The initial-state pieces needed by the local volume factor are
    cached at construction.
    """

    t: float
    log_y: float
    per_cell_integral: np.ndarray
    initial: SimState
    params: PhysParams
    _g_prev: float
    _h_prev: np.ndarray


def make_accumulator(initial: SimState, p: PhysParams) -> ReconstructionAccumulator:
    _require_unit_constants(p)
    g0 = _damping_integrand(initial)
    # at t = 0: F = v0 and Y = 1
    h0 = (initial.theta + 0.5 * _volume_weighted_bsq(initial)) / initial.v
    return ReconstructionAccumulator(
        t=initial.t,
        log_y=0.0,
        per_cell_integral=np.zeros(initial.n_cells),
        initial=initial.copy(),
        params=p,
        _g_prev=g0,
        _h_prev=h0,
    )


def update_accumulator(
    acc: ReconstructionAccumulator, s: SimState, dt: float
) -> ReconstructionAccumulator:
    """Advance the running integrals to the accepted post-step state ``s``.

    Requires acc.t + dt == s.t (the accumulator must see every step).
    """
    if abs(acc.t + dt - s.t) > _TIME_TOL * max(1.0, abs(s.t)):
        raise ValueError(
            f"accumulator time mismatch: {acc.t} + {dt} != {s.t}"
        )
    g_new = _damping_integrand(s)
    log_y = acc.log_y - 0.5 * dt * (acc._g_prev + g_new)
    factor = local_volume_factor(s, acc.initial, acc.params)
    h_new = (s.theta + 0.5 * _volume_weighted_bsq(s)) / (factor * np.exp(log_y))
    per_cell = acc.per_cell_integral + 0.5 * dt * (acc._h_prev + h_new)
    return ReconstructionAccumulator(
        t=s.t,
        log_y=log_y,
        per_cell_integral=per_cell,
        initial=acc.initial,
        params=acc.params,
        _g_prev=g_new,
        _h_prev=h_new,
    )


def reconstruct_volume(acc: ReconstructionAccumulator, s: SimState) -> np.ndarray:
    """Per-cell reconstructed specific volume at the accumulator's time.

    Raises if the accumulator is stale relative to the state.
    """
    if abs(acc.t - s.t) > _TIME_TOL * max(1.0, abs(s.t)):
        raise ValueError(f"stale accumulator: t={acc.t} vs state t={s.t}")
    factor = local_volume_factor(s, acc.initial, acc.params)
    return factor * np.exp(acc.log_y) * (1.0 + acc.per_cell_integral)
