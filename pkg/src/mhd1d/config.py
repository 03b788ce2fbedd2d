"""Flat key-path run configuration (``section.key = value`` per line).

The format is one assignment per line, ``#`` comments and blank lines
ignored, with dotted sections.  Values are typed against a single schema
table, which also drives serialization and the sweep machinery (a sweep
axis is just a key path into the same table).  Unknown keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .core import Grid, PhysParams
from .initdata import InitFamily
from .scheme import StepControls

__all__ = ["ConfigError", "RunConfig", "SweepConfig", "load_run_config",
           "parse_run_config", "load_sweep_config", "config_to_text"]


class ConfigError(Exception):
    """Malformed configuration file or value."""


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


# key -> (caster, default)
SCHEMA: dict[str, tuple[Callable[[str], object], object]] = {
    "grid.n_cells": (int, 200),
    "time.t_end": (float, 1.0),
    "time.cfl": (float, 0.4),
    "time.max_picard": (int, 5),
    "time.picard_tol": (float, 1e-10),
    "time.max_retries": (int, 20),
    "physics.mu": (float, 1.0),
    "physics.lambda": (float, 1.0),
    "physics.nu": (float, 1.0),
    "physics.kappa_tilde": (float, 1.0),
    "physics.beta": (float, 0.0),
    "physics.R": (float, 1.0),
    "physics.c_v": (float, 1.0),
    "init.family": (str, "single_mode"),
    "init.amp_v": (float, 0.0),
    "init.amp_u": (float, 0.0),
    "init.amp_w": (float, 0.0),
    "init.amp_b": (float, 0.0),
    "init.amp_theta": (float, 0.0),
    "init.k_v": (int, 1),
    "init.k_u": (int, 1),
    "init.k_w": (int, 1),
    "init.k_b": (int, 1),
    "init.k_theta": (int, 1),
    "init.theta_mean": (float, 1.0),
    "init.floor": (float, 0.1),
    "init.n_modes": (int, 4),
    "init.table_v": (str, ""),
    "init.table_theta": (str, ""),
    "init.table_u": (str, ""),
    "init.table_w1": (str, ""),
    "init.table_w2": (str, ""),
    "init.table_b1": (str, ""),
    "init.table_b2": (str, ""),
    "normalized_mode": (_parse_bool, True),
    "output.directory": (str, "out/run"),
    "output.diag_every": (int, 1),
    "output.snapshot_every": (int, 0),
    "output.emit_plots": (_parse_bool, False),
    "seed": (int, 0),
}

_SWEEP_SCHEMA: dict[str, tuple[Callable[[str], object], object]] = {
    "sweep.axis": (str, ""),
    "sweep.values": (str, ""),
    "sweep.window_lo": (float, 0.0),
    "sweep.window_hi": (float, 0.0),
    "sweep.workers": (int, 1),
}


def _parse_lines(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        raw[key.strip()] = value.strip()
    return raw


@dataclass(frozen=True)
class RunConfig:
    """One resolved run description; ``flat`` maps schema keys to typed values."""

    flat: dict

    def __getitem__(self, key: str):
        return self.flat[key]

    def with_value(self, key: str, raw: str) -> "RunConfig":
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        caster, _ = SCHEMA[key]
        try:
            value = caster(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
        new_flat = dict(self.flat)
        new_flat[key] = value
        return RunConfig(flat=new_flat)

    # --- typed builders -------------------------------------------------
    def grid(self) -> Grid:
        return Grid(n_cells=self.flat["grid.n_cells"])

    def params(self) -> PhysParams:
        f = self.flat
        return PhysParams(
            mu=f["physics.mu"],
            lam=f["physics.lambda"],
            nu=f["physics.nu"],
            kappa_tilde=f["physics.kappa_tilde"],
            beta=f["physics.beta"],
            R=f["physics.R"],
            c_v=f["physics.c_v"],
        )

    def controls(self) -> StepControls:
        f = self.flat
        return StepControls(
            cfl=f["time.cfl"],
            max_picard=f["time.max_picard"],
            picard_tol=f["time.picard_tol"],
            max_retries=f["time.max_retries"],
        )

    def family(self) -> InitFamily:
        f = self.flat
        tables = tuple(
            (name, f[f"init.table_{name}"])
            for name in ("v", "theta", "u", "w1", "w2", "b1", "b2")
            if f[f"init.table_{name}"]
        )
        return InitFamily(
            kind=f["init.family"],
            amp_v=f["init.amp_v"],
            amp_u=f["init.amp_u"],
            amp_w=f["init.amp_w"],
            amp_b=f["init.amp_b"],
            amp_theta=f["init.amp_theta"],
            k_v=f["init.k_v"],
            k_u=f["init.k_u"],
            k_w=f["init.k_w"],
            k_b=f["init.k_b"],
            k_theta=f["init.k_theta"],
            theta_mean=f["init.theta_mean"],
            floor=f["init.floor"],
            seed=f["seed"],
            n_modes=f["init.n_modes"],
            tables=tables,
        )

    @property
    def t_end(self) -> float:
        return self.flat["time.t_end"]

    @property
    def normalized_mode(self) -> bool:
        return self.flat["normalized_mode"]

    @property
    def seed(self) -> int:
        return self.flat["seed"]

    @property
    def output_directory(self) -> str:
        return self.flat["output.directory"]

    @property
    def diag_every(self) -> int:
        return self.flat["output.diag_every"]

    @property
    def snapshot_every(self) -> int:
        return self.flat["output.snapshot_every"]

    @property
    def emit_plots(self) -> bool:
        return self.flat["output.emit_plots"]


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    axis: str
    values: list[str]
    window: tuple[float, float]
    workers: int = 1


def parse_run_config(text: str, extra_schema: dict | None = None) -> RunConfig:
    raw = _parse_lines(text)
    flat: dict = {}
    schema = dict(SCHEMA)
    if extra_schema:
        schema.update(extra_schema)
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {key!r}")
    for key, (caster, default) in SCHEMA.items():
        if key in raw:
            try:
                flat[key] = caster(raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
        else:
            flat[key] = default
    return RunConfig(flat=flat)


def load_run_config(path: str | Path) -> RunConfig:
    return parse_run_config(Path(path).read_text())


def load_sweep_config(path: str | Path) -> SweepConfig:
    text = Path(path).read_text()
    raw = _parse_lines(text)
    base = parse_run_config(text, extra_schema=_SWEEP_SCHEMA)
    sweep: dict = {}
    for key, (caster, default) in _SWEEP_SCHEMA.items():
        if key in raw:
            try:
                sweep[key] = caster(raw[key])
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
        else:
            sweep[key] = default
    axis = sweep["sweep.axis"]
    if not axis:
        raise ConfigError("sweep.axis is required")
    if axis not in SCHEMA:
        raise ConfigError(f"sweep.axis names an unknown parameter {axis!r}")
    values = [v.strip() for v in sweep["sweep.values"].split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep.values must list at least one value")
    window = (sweep["sweep.window_lo"], sweep["sweep.window_hi"])
    if window == (0.0, 0.0):
        t_end = base.t_end
        window = (0.2 * t_end, t_end)
    return SweepConfig(
        base=base,
        axis=axis,
        values=values,
        window=window,
        workers=max(1, sweep["sweep.workers"]),
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_text(cfg: RunConfig) -> str:
    lines = [f"{key} = {_fmt(cfg.flat[key])}" for key in SCHEMA]
    return "\n".join(lines) + "\n"
