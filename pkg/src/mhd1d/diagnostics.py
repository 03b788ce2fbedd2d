"""Monitored scalar functionals of the discrete state.

These realize the conserved and dissipated quantities of the continuous
dynamics: total volume and total energy, the convex entropy functional

    E = integral of (u^2 + |w|^2 + v|b|^2)/2 + (v - ln v) + (theta - ln theta),

its nonnegative dissipation rate, the mean temperature and its admissible
band, and the exponential decay-rate fit of the H1 distance to equilibrium.
For the continuous (unit-constant, normalized) dynamics E(t) + integral of
the dissipation is exactly E(0); the discrete residual of that identity is
the entropy-budget check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    EquilibriumTarget,
    PhysParams,
    SimState,
    cell_integral,
    h1_l2_distances,
    node_average,
    node_integral,
)

__all__ = [
    "DiagnosticsRecord",
    "RootPair",
    "DecayFit",
    "kinetic_magnetic_energy",
    "entropy_functional",
    "dissipation_functional",
    "snapshot_diagnostics",
    "entropy_ceiling",
    "roots_of_x_minus_log",
    "fit_decay_rate",
    "check_entropy_budget",
    "asymptotic_target",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time sample of every monitored scalar."""

    t: float
    dt: float
    mass: float
    total_energy: float
    entropy: float
    dissipation: float
    theta_bar: float
    min_v: float
    max_v: float
    min_theta: float
    max_theta: float
    h1_dist: float
    l2_dist: float


@dataclass(frozen=True)
class RootPair:
    """The two roots of x - ln(x) = level, bracketing the minimum at x = 1.

    The mean temperature of a normalized run stays inside [low, 1]; the
    high root is reported for completeness but carries no bound.
    """

    level: float
    low: float
    high: float


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential rate of a positive time series.

    ``r_squared`` is None for a constant series, where the coefficient of
    determination is undefined rather than trivially perfect.
    """

    eta_hat: float
    r_squared: float | None
    n_samples: int


def kinetic_magnetic_energy(s: SimState) -> float:
    """integral of (u^2 + |w|^2 + vbar*|b|^2)/2, node quadrature throughout."""
    dx = 1.0 / s.n_cells
    vbar = node_average(s.v)
    usq = s.u * s.u
    wsq = s.w[:, 0] ** 2 + s.w[:, 1] ** 2
    bsq = s.b[:, 0] ** 2 + s.b[:, 1] ** 2
    return 0.5 * (
        node_integral(usq, dx)
        + node_integral(wsq, dx)
        + node_integral(vbar * bsq, dx)
    )


def entropy_functional(s: SimState) -> float:
    dx = 1.0 / s.n_cells
    return (
        kinetic_magnetic_energy(s)
        + cell_integral(s.v - np.log(s.v), dx)
        + cell_integral(s.theta - np.log(s.theta), dx)
    )


def dissipation_functional(s: SimState, p: PhysParams) -> float:
    """Nonnegative entropy dissipation rate with gradients on their natural
    staggered locations: velocity/field gradients at cells, the temperature
    gradient at interior faces with face-averaged v and theta."""
    n = s.n_cells
    dx = 1.0 / n
    ux = np.diff(s.u) / dx
    wx = np.diff(s.w, axis=0) / dx
    bx = np.diff(s.b, axis=0) / dx
    cells = (
        p.mu * ux**2
        + p.lam * (wx[:, 0] ** 2 + wx[:, 1] ** 2)
        + p.nu * (bx[:, 0] ** 2 + bx[:, 1] ** 2)
    ) / (s.v * s.theta)
    thx = np.diff(s.theta) / dx
    th_face = 0.5 * (s.theta[:-1] + s.theta[1:])
    v_face = 0.5 * (s.v[:-1] + s.v[1:])
    faces = p.kappa_tilde * th_face**p.beta * thx**2 / (v_face * th_face**2)
    # boundary faces carry zero conductive flux, so their integrand vanishes
    return cell_integral(cells, dx) + float(np.sum(faces)) * dx


def snapshot_diagnostics(
    s: SimState,
    p: PhysParams,
    target: EquilibriumTarget,
    dt_used: float = 0.0,
) -> DiagnosticsRecord:
    dx = 1.0 / s.n_cells
    kinetic = kinetic_magnetic_energy(s)
    theta_bar = cell_integral(s.theta, dx)
    h1_dist, l2_dist = h1_l2_distances(s, target)
    return DiagnosticsRecord(
        t=float(s.t),
        dt=float(dt_used),
        mass=cell_integral(s.v, dx),
        total_energy=p.c_v * theta_bar + kinetic,
        entropy=kinetic
        + cell_integral(s.v - np.log(s.v), dx)
        + cell_integral(s.theta - np.log(s.theta), dx),
        dissipation=dissipation_functional(s, p),
        theta_bar=theta_bar,
        min_v=float(np.min(s.v)),
        max_v=float(np.max(s.v)),
        min_theta=float(np.min(s.theta)),
        max_theta=float(np.max(s.theta)),
        h1_dist=h1_dist,
        l2_dist=l2_dist,
    )


def entropy_ceiling(initial: SimState, p: PhysParams) -> float:
    """Twice the initial entropy functional.

    For the continuous normalized dynamics the running total of entropy plus
    accumulated dissipation never exceeds this value.  The integrand is
    parameter-free in normalized units; ``p`` is accepted for interface
    symmetry with the other functionals.
    """
    del p
    return 2.0 * entropy_functional(initial)


def asymptotic_target(initial: SimState, p: PhysParams) -> EquilibriumTarget:
    """Constant state the solution relaxes toward, from the conserved totals:
    v_s is the total volume, theta_s the total energy per unit heat capacity."""
    dx = 1.0 / initial.n_cells
    v_s = cell_integral(initial.v, dx)
    theta_s = cell_integral(initial.theta, dx) + kinetic_magnetic_energy(initial) / p.c_v
    return EquilibriumTarget(v_s=v_s, theta_s=theta_s)


def _bisect_root(f, lo: float, hi: float) -> float:
    """Root of a monotone f with f(lo), f(hi) of opposite sign, bisected to
    machine resolution; returns the endpoint with the smallest |f|."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError("root not bracketed")
    best_x, best_f = (lo, abs(flo)) if abs(flo) < abs(fhi) else (hi, abs(fhi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if abs(fm) < best_f:
            best_x, best_f = mid, abs(fm)
        if fm == 0.0:
            break
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return best_x


def roots_of_x_minus_log(level: float) -> RootPair:
    """Solve x - ln(x) = level for the two positive roots.

    The function has its minimum value 1 at x = 1, so a level below 1 has no
    real roots and level == 1 gives the double root 1.  Residuals
    |x - ln(x) - level| are driven below 1e-12 for desk-scale levels.
    """
    if level < 1.0:
        raise ValueError(f"no real roots: level {level} < 1")
    if level == 1.0:
        return RootPair(level=1.0, low=1.0, high=1.0)

    def f(x: float) -> float:
        return x - math.log(x) - level

    low = _bisect_root(f, math.exp(-level), 1.0)
    hi = 2.0
    while f(hi) < 0.0:
        hi *= 2.0
    high = _bisect_root(f, 1.0, hi)
    return RootPair(level=level, low=low, high=high)


def fit_decay_rate(
    series: Iterable[tuple[float, float]],
    window: tuple[float, float],
) -> DecayFit:
    """Least-squares line through (t, ln value) inside the window.

    ``eta_hat`` is minus the slope.  Requires at least 10 samples in the
    window, all strictly positive, spanning a nonzero time interval.
    """
    t_lo, t_hi = window
    if not t_hi > t_lo:
        raise ValueError("degenerate window")
    pts = [(t, y) for t, y in series if t_lo <= t <= t_hi]
    if len(pts) < 10:
        raise ValueError(f"need >= 10 samples in window, found {len(pts)}")
    if any(y <= 0.0 for _, y in pts):
        raise ValueError("nonpositive values in window; log fit undefined")
    t = np.array([q[0] for q in pts])
    y = np.log([q[1] for q in pts])
    if np.all(y == y[0]):
        return DecayFit(eta_hat=0.0, r_squared=None, n_samples=len(pts))
    t_c = t - t.mean()
    st2 = float(np.sum(t_c * t_c))
    if st2 == 0.0:
        raise ValueError("degenerate window: zero time spread")
    slope = float(np.sum(t_c * (y - y.mean()))) / st2
    resid = y - (y.mean() + slope * t_c)
    ss_res = float(np.sum(resid * resid))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = None if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(eta_hat=-slope, r_squared=r_squared, n_samples=len(pts))


def check_entropy_budget(
    records: Sequence[DiagnosticsRecord],
    ceiling: float | None = None,
    ceiling_tol: float = 1e-6,
) -> float:
    """Max residual of the discrete entropy/dissipation balance.

    Returns max over samples of |E(t_n) + sum of V dt - E(0)| with the time
    integral of the dissipation taken by the trapezoid rule over the
    records.  Also enforces the one-sided ceiling: the running total must
    stay below ``ceiling`` (default: twice the initial entropy) plus
    ``ceiling_tol``, else a ValueError is raised.
    """
    if len(records) < 1:
        raise ValueError("no records")
    e0 = records[0].entropy
    if ceiling is None:
        ceiling = 2.0 * e0
    acc = 0.0
    max_residual = 0.0
    prev_t = records[0].t
    prev_v = records[0].dissipation
    for rec in records:
        acc += 0.5 * (prev_v + rec.dissipation) * (rec.t - prev_t)
        prev_t, prev_v = rec.t, rec.dissipation
        total = rec.entropy + acc
        max_residual = max(max_residual, abs(total - e0))
        if total > ceiling + ceiling_tol:
            raise ValueError(
                f"entropy budget exceeds its ceiling at t={rec.t:.6g}: "
                f"{total:.12g} > {ceiling:.12g} + {ceiling_tol:g}"
            )
    return max_residual
