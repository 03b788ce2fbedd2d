import pytest

from mhd1d.config import (
    ConfigError,
    config_to_text,
    load_sweep_config,
    parse_run_config,
)

SAMPLE = """
# physics block
grid.n_cells = 100
time.t_end = 2.5
time.cfl = 0.3
physics.beta = 1.5
physics.lambda = 2.0
init.family = single_mode
init.amp_u = 0.1
normalized_mode = false
output.directory = out/demo
output.emit_plots = true
seed = 42
"""


def test_parse_and_typed_access():
    cfg = parse_run_config(SAMPLE)
    assert cfg["grid.n_cells"] == 100
    assert cfg.t_end == 2.5
    assert cfg.normalized_mode is False
    assert cfg.emit_plots is True
    assert cfg.seed == 42
    assert cfg.params().beta == 1.5
    assert cfg.params().lam == 2.0  # physics.lambda maps onto lam
    assert cfg.controls().cfl == 0.3
    assert cfg.family().amp_u == 0.1
    assert cfg.family().seed == 42
    assert cfg.grid().n_cells == 100


def test_defaults_fill_missing_keys():
    cfg = parse_run_config("grid.n_cells = 64\n")
    assert cfg.t_end == 1.0
    assert cfg["time.max_picard"] == 5
    assert cfg.normalized_mode is True


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown config key"):
        parse_run_config("grid.cells = 10\n")


def test_bad_value_names_key():
    with pytest.raises(ConfigError, match="grid.n_cells"):
        parse_run_config("grid.n_cells = many\n")
    with pytest.raises(ConfigError, match="normalized_mode"):
        parse_run_config("normalized_mode = maybe\n")


def test_malformed_line_rejected():
    with pytest.raises(ConfigError, match="key = value"):
        parse_run_config("grid.n_cells 10\n")


def test_round_trip_serialization():
    cfg = parse_run_config(SAMPLE)
    again = parse_run_config(config_to_text(cfg))
    assert again.flat == cfg.flat


def test_with_value_returns_new_config():
    cfg = parse_run_config(SAMPLE)
    other = cfg.with_value("physics.beta", "2.0")
    assert other["physics.beta"] == 2.0
    assert cfg["physics.beta"] == 1.5
    with pytest.raises(ConfigError):
        cfg.with_value("nope", "1")


def test_sweep_config(tmp_path):
    text = SAMPLE + "\nsweep.axis = physics.beta\nsweep.values = 0, 0.5, 1\n"
    path = tmp_path / "sweep.cfg"
    path.write_text(text)
    sweep = load_sweep_config(path)
    assert sweep.axis == "physics.beta"
    assert sweep.values == ["0", "0.5", "1"]
    assert sweep.window == (0.5, 2.5)  # default window is the last 80 percent
    assert sweep.workers == 1


def test_sweep_requires_valid_axis(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(SAMPLE + "\nsweep.axis = physics.zeta\nsweep.values = 1\n")
    with pytest.raises(ConfigError, match="unknown parameter"):
        load_sweep_config(path)
    path.write_text(SAMPLE + "\nsweep.values = 1\n")
    with pytest.raises(ConfigError, match="sweep.axis"):
        load_sweep_config(path)
    path.write_text(SAMPLE + "\nsweep.axis = physics.beta\n")
    with pytest.raises(ConfigError, match="sweep.values"):
        load_sweep_config(path)
