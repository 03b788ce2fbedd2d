#!/usr/bin/env python3
"""Decay rate of the distance to equilibrium as the conductivity exponent varies.

Runs one-mode perturbations for several exponents on two grids, fits the
exponential rate on the late-time window, and prints a table.  The rate is
nearly exponent-independent because the conductivity is order one near the
equilibrium temperature; the exponent matters during the transient.
"""

import math

import numpy as np

from mhd1d import (
    EquilibriumTarget,
    Grid,
    InitFamily,
    PhysParams,
    StepControls,
    fit_decay_rate,
    make_initial,
    normalize,
    snapshot_diagnostics,
    step,
)

AMP = 0.1
T_END = 10.0
WINDOW = (2.0, 10.0)
DT = 0.05 * 0.01 / math.sqrt(2.0)  # shared by both grids


def run(beta: float, n_cells: int):
    params = PhysParams(beta=beta)
    controls = StepControls()
    family = InitFamily(kind="single_mode", amp_v=AMP, amp_u=AMP, amp_w=AMP,
                        amp_b=AMP, amp_theta=AMP, floor=0.1)
    state = normalize(make_initial(family, Grid(n_cells)), params)
    target = EquilibriumTarget(1.0, 1.0)
    series = [(0.0, snapshot_diagnostics(state, params, target).h1_dist)]
    steps = round(T_END / DT)
    dt = T_END / steps
    for k in range(steps):
        state = step(state, params, controls, dt)
        if (k + 1) % 20 == 0:
            series.append((state.t, snapshot_diagnostics(state, params, target).h1_dist))
    return fit_decay_rate(series, WINDOW)


def main() -> None:
    print(f"{'beta':>6} {'n':>5} {'rate':>8} {'r^2':>9}")
    for beta in (0.0, 0.5, 1.0, 2.0):
        for n in (100, 200):
            fit = run(beta, n)
            print(f"{beta:6.1f} {n:5d} {fit.eta_hat:8.4f} {fit.r_squared:9.6f}")


if __name__ == "__main__":
    main()
