"""Run orchestration: single runs, parameter sweeps, and file outputs.

A run directory contains ``diagnostics.csv`` (one row per ``diag_every``
accepted steps, including t = 0), optional staggered snapshots
``snapshots/snap_cells_<t>.csv`` / ``snap_nodes_<t>.csv``,
``reconstruction.csv`` with the volume-reconstruction cross-check (only in
normalized mode), ``summary.json``, the resolved configuration, and
optional SVG charts.  All outputs are deterministic functions of the
configuration, seed included; the environment variable ``MHD1D_OUT``
overrides ``output.directory``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, SweepConfig, config_to_text
from .core import EquilibriumTarget, SimState
from .diagnostics import (
    DiagnosticsRecord,
    asymptotic_target,
    check_entropy_budget,
    entropy_ceiling,
    fit_decay_rate,
    roots_of_x_minus_log,
    snapshot_diagnostics,
)
from .initdata import make_initial, normalize
from .mms import mms_convergence
from .reconstruction import make_accumulator, reconstruct_volume, update_accumulator
from .scheme import advance_to
from .svgplot import polyline_chart

__all__ = ["run_simulation", "run_sweep", "run_mms", "DIAG_COLUMNS"]

DIAG_COLUMNS = [
    "t",
    "dt",
    "mass",
    "total_energy",
    "entropy_E",
    "dissipation_V",
    "theta_bar",
    "min_v",
    "max_v",
    "min_theta",
    "max_theta",
    "h1_dist",
    "l2_dist",
]

_RECORD_FIELDS = [
    "t",
    "dt",
    "mass",
    "total_energy",
    "entropy",
    "dissipation",
    "theta_bar",
    "min_v",
    "max_v",
    "min_theta",
    "max_theta",
    "h1_dist",
    "l2_dist",
]


def _fmt(x: float) -> str:
    return repr(float(x))


def resolve_output_dir(cfg: RunConfig) -> Path:
    override = os.environ.get("MHD1D_OUT")
    return Path(override) if override else Path(cfg.output_directory)


def _record_row(rec: DiagnosticsRecord) -> list[str]:
    return [_fmt(getattr(rec, name)) for name in _RECORD_FIELDS]


def _write_snapshot(outdir: Path, state: SimState) -> None:
    snapdir = outdir / "snapshots"
    snapdir.mkdir(parents=True, exist_ok=True)
    tag = f"{state.t:.6f}"
    n = state.n_cells
    dx = 1.0 / n
    with open(snapdir / f"snap_cells_{tag}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "v", "theta"])
        for i in range(n):
            writer.writerow([_fmt((i + 0.5) * dx), _fmt(state.v[i]), _fmt(state.theta[i])])
    with open(snapdir / f"snap_nodes_{tag}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u", "w1", "w2", "b1", "b2"])
        for j in range(n + 1):
            writer.writerow(
                [
                    _fmt(j * dx),
                    _fmt(state.u[j]),
                    _fmt(state.w[j, 0]),
                    _fmt(state.w[j, 1]),
                    _fmt(state.b[j, 0]),
                    _fmt(state.b[j, 1]),
                ]
            )


def _decay_fit_summary(records, window) -> dict | None:
    series = [(r.t, r.h1_dist) for r in records]
    try:
        fit = fit_decay_rate(series, window)
    except ValueError:
        return None
    return {
        "rate": fit.eta_hat,
        "r_squared": fit.r_squared,
        "window": [window[0], window[1]],
        "n_samples": fit.n_samples,
    }


def run_simulation(cfg: RunConfig, decay_window: tuple[float, float] | None = None) -> Path:
    """Execute one configured run and write its output files.

    Returns the run directory.  Normalized mode requires unit physical
    constants and rescales the initial data to unit totals.
    """
    grid = cfg.grid()
    params = cfg.params()
    controls = cfg.controls()
    state0 = make_initial(cfg.family(), grid)

    if cfg.normalized_mode:
        if not params.is_unit:
            raise ConfigError(
                "normalized_mode requires all physical constants equal to one"
            )
        state0 = normalize(state0, params)
        target = EquilibriumTarget(1.0, 1.0)
    else:
        target = asymptotic_target(state0, params)

    outdir = resolve_output_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config_resolved.cfg").write_text(config_to_text(cfg))

    acc = make_accumulator(state0, params) if cfg.normalized_mode else None
    records = [snapshot_diagnostics(state0, params, target, 0.0)]
    recon_rows: list[tuple[float, float, float, float]] = []
    if acc is not None:
        recon_rows.append((state0.t, 0.0, 0.0, 0.0))
    if cfg.snapshot_every > 0:
        _write_snapshot(outdir, state0)

    step_count = 0

    def observer(state: SimState, dt: float) -> None:
        nonlocal acc, step_count
        step_count += 1
        if acc is not None:
            acc = update_accumulator(acc, state, dt)
        if cfg.diag_every > 0 and step_count % cfg.diag_every == 0:
            records.append(snapshot_diagnostics(state, params, target, dt))
            if acc is not None:
                v_rec = reconstruct_volume(acc, state)
                abs_err = np.abs(v_rec - state.v)
                recon_rows.append(
                    (
                        state.t,
                        acc.log_y,
                        float(np.max(abs_err)),
                        float(np.max(abs_err / np.abs(state.v))),
                    )
                )
        if cfg.snapshot_every > 0 and step_count % cfg.snapshot_every == 0:
            _write_snapshot(outdir, state)

    final = advance_to(state0, params, controls, cfg.t_end, observer)

    with open(outdir / "diagnostics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DIAG_COLUMNS)
        for rec in records:
            writer.writerow(_record_row(rec))

    if acc is not None:
        with open(outdir / "reconstruction.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "log_damping", "max_abs_err", "max_rel_err"])
            for row in recon_rows:
                writer.writerow([_fmt(x) for x in row])

    window = decay_window or (0.2 * cfg.t_end, cfg.t_end)
    ceiling = entropy_ceiling(state0, params)
    roots = roots_of_x_minus_log(max(1.0, ceiling))
    try:
        budget_residual = check_entropy_budget(records, ceiling=ceiling)
        budget = {
            "max_residual": budget_residual,
            "ceiling": ceiling,
            "ceiling_satisfied": True,
        }
    except ValueError as exc:
        budget = {"max_residual": None, "ceiling": ceiling, "ceiling_satisfied": False,
                  "detail": str(exc)}

    final_record = snapshot_diagnostics(final, params, target, records[-1].dt)
    summary = {
        "accepted_steps": step_count,
        "final": {name: getattr(final_record, name) for name in _RECORD_FIELDS},
        "decay_fit": _decay_fit_summary(records, window),
        "mean_temperature_band": {
            "level": roots.level,
            "lower_root": roots.low,
            "upper_root": roots.high,
        },
        "entropy_budget": budget,
        "extrema_overall": {
            "min_v": min(r.min_v for r in records),
            "max_v": max(r.max_v for r in records),
            "min_theta": min(r.min_theta for r in records),
            "max_theta": max(r.max_theta for r in records),
        },
        "mass_error_max": max(abs(r.mass - records[0].mass) for r in records),
        "reconstruction": (
            {"max_rel_err_final": recon_rows[-1][3]} if recon_rows else None
        ),
        "target": {"v_s": target.v_s, "theta_s": target.theta_s},
    }
    with open(outdir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if cfg.emit_plots:
        _emit_plots(outdir, records)
    return outdir


def _emit_plots(outdir: Path, records) -> None:
    ts = [r.t for r in records]
    positive = [(r.t, math.log(r.h1_dist)) for r in records if r.h1_dist > 0.0]
    if positive:
        polyline_chart(
            outdir / "h1_decay.svg",
            [("ln h1 distance", [p[0] for p in positive], [p[1] for p in positive])],
            title="Distance to equilibrium",
            xlabel="t",
            ylabel="ln h1",
        )
    polyline_chart(
        outdir / "positivity.svg",
        [
            ("min v", ts, [r.min_v for r in records]),
            ("min theta", ts, [r.min_theta for r in records]),
        ],
        title="Positivity floors",
        xlabel="t",
        ylabel="field minimum",
    )


def _sweep_one(base: RunConfig, axis: str, raw_value: str, outdir: Path,
               window: tuple[float, float]) -> dict:
    cfg = base.with_value(axis, raw_value)
    cfg = cfg.with_value("output.directory", str(outdir / f"value_{raw_value}"))
    try:
        run_dir = run_simulation(cfg, decay_window=window)
    except Exception as exc:  # individual failures must not abort siblings
        return {"axis_value": raw_value, "error": str(exc)}
    summary = json.loads((run_dir / "summary.json").read_text())
    fit = summary.get("decay_fit") or {}
    budget = summary.get("entropy_budget") or {}
    extrema = summary.get("extrema_overall") or {}
    return {
        "axis_value": raw_value,
        "eta_hat": fit.get("rate"),
        "r_squared": fit.get("r_squared"),
        "min_v_overall": extrema.get("min_v"),
        "min_theta_overall": extrema.get("min_theta"),
        "entropy_residual": budget.get("max_residual"),
    }


def run_sweep(sweep: SweepConfig) -> Path:
    """One run per axis value in its own subdirectory, plus ``sweep.csv``.

    Failed values are marked ``error`` in their row; siblings continue.
    Runs may execute concurrently (``sweep.workers``); each owns its
    directory and no state is shared.
    """
    outdir = resolve_output_dir(sweep.base)
    outdir.mkdir(parents=True, exist_ok=True)
    # the env override must not recurse into the per-value runs
    env_backup = os.environ.pop("MHD1D_OUT", None)
    try:
        if sweep.workers > 1:
            with ThreadPoolExecutor(max_workers=sweep.workers) as pool:
                rows = list(
                    pool.map(
                        lambda v: _sweep_one(sweep.base, sweep.axis, v, outdir, sweep.window),
                        sweep.values,
                    )
                )
        else:
            rows = [
                _sweep_one(sweep.base, sweep.axis, v, outdir, sweep.window)
                for v in sweep.values
            ]
    finally:
        if env_backup is not None:
            os.environ["MHD1D_OUT"] = env_backup

    columns = [
        "axis_value",
        "eta_hat",
        "r_squared",
        "min_v_overall",
        "min_theta_overall",
        "entropy_residual",
    ]
    with open(outdir / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            if "error" in row:
                writer.writerow([row["axis_value"]] + ["error"] * (len(columns) - 1))
            else:
                writer.writerow(
                    [row["axis_value"]]
                    + [
                        _fmt(row[c]) if isinstance(row[c], float) else str(row[c])
                        for c in columns[1:]
                    ]
                )
    return outdir


def run_mms(
    cfg: RunConfig,
    resolutions: list[int],
    t_end: float = 0.5,
    dt_factor: float = 1.0,
    dt_power: int = 2,
) -> Path:
    """Manufactured-solution refinement study; writes ``mms.csv`` and returns
    the output directory."""
    if len(resolutions) < 3:
        raise ConfigError("mms needs at least three resolutions")
    report = mms_convergence(
        cfg.params(),
        resolutions,
        t_end=t_end,
        dt_factor=dt_factor,
        dt_power=dt_power,
        controls=cfg.controls(),
    )
    outdir = resolve_output_dir(cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    fields = ("v", "u", "w", "b", "theta")
    with open(outdir / "mms.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_cells", "dt"] + [f"err_{f}" for f in fields])
        for row in report.rows:
            writer.writerow(
                [str(row.n_cells), _fmt(row.dt)] + [_fmt(row.errors[f]) for f in fields]
            )
        writer.writerow([])
        writer.writerow(["observed_order"] + [""] + [
            _fmt(report.min_order(f)) for f in fields
        ])
    return outdir
