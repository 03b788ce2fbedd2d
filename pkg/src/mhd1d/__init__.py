"""1D planar compressible MHD in Lagrangian mass coordinates.

Semi-implicit staggered-grid solver for the coupled specific-volume /
velocity / transverse-field / temperature system with power-law heat
conductivity, plus the verification machinery around it: conserved totals,
entropy budget, mean-temperature band, closed-form volume reconstruction,
decay-rate estimation, and manufactured-solution convergence.
"""

from .core import (
    EquilibriumTarget,
    Grid,
    PhysParams,
    SimState,
    Violation,
    equilibrium_state,
    h1_distance,
    l2_distance,
    validate_state,
)
from .diagnostics import (
    DecayFit,
    DiagnosticsRecord,
    RootPair,
    asymptotic_target,
    check_entropy_budget,
    entropy_ceiling,
    fit_decay_rate,
    roots_of_x_minus_log,
    snapshot_diagnostics,
)
from .initdata import InitFamily, make_initial, normalize
from .reconstruction import (
    ReconstructionAccumulator,
    cumulative_velocity_integral,
    local_volume_factor,
    make_accumulator,
    reconstruct_volume,
    update_accumulator,
)
from .scheme import (
    AdvanceError,
    PicardWarning,
    PositivityError,
    SchemeError,
    SourceFields,
    StepControls,
    advance_to,
    compute_dt,
    step,
)
from .tridiag import TridiagonalError, solve_tridiagonal, solve_tridiagonal_thomas

__version__ = "0.1.0"

__all__ = [
    "AdvanceError",
    "DecayFit",
    "DiagnosticsRecord",
    "EquilibriumTarget",
    "Grid",
    "InitFamily",
    "PhysParams",
    "PicardWarning",
    "PositivityError",
    "ReconstructionAccumulator",
    "RootPair",
    "SchemeError",
    "SimState",
    "SourceFields",
    "StepControls",
    "TridiagonalError",
    "Violation",
    "advance_to",
    "asymptotic_target",
    "check_entropy_budget",
    "compute_dt",
    "cumulative_velocity_integral",
    "entropy_ceiling",
    "equilibrium_state",
    "fit_decay_rate",
    "h1_distance",
    "l2_distance",
    "local_volume_factor",
    "make_accumulator",
    "make_initial",
    "normalize",
    "reconstruct_volume",
    "roots_of_x_minus_log",
    "snapshot_diagnostics",
    "solve_tridiagonal",
    "solve_tridiagonal_thomas",
    "step",
    "update_accumulator",
    "validate_state",
]
