import math

import pytest

from triwave import cli
from triwave.antenna import DEFAULT_PATTERN
from triwave.config import (ConfigError, list_presets, load_config,
                            load_preset, parse_config)
from triwave.link_budget import RadioParams

MINIMAL = """
[topology]
node_count = 6
spacing_d0 = 75
theta_deg = 11.7
"""


def test_minimal_config_gets_defaults():
    scenario = parse_config(MINIMAL)
    assert scenario.topology.node_count == 6
    assert scenario.topology.theta_deg == 11.7
    assert scenario.pattern == DEFAULT_PATTERN
    assert scenario.radio == RadioParams()
    assert scenario.calibrate is False
    assert scenario.building is None
    assert scenario.gamma_deg == 5.0
    assert scenario.experiment.trials == 200_000


def test_topology_via_road_width():
    scenario = parse_config("""
[topology]
node_count = 6
spacing_d0 = 75
road_width = 10.0
""")
    assert scenario.topology.road_width == 10.0
    assert scenario.topology.theta_deg == pytest.approx(
        math.degrees(math.atan(10.0 / 37.5)))


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(MINIMAL + "\n[antena]\nfoo = 1\n")


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="radio.bandwidth: unknown key"):
        parse_config(MINIMAL + "\n[radio]\nbandwidth = 2160\n")


def test_all_errors_reported_together():
    bad = """
[topology]
node_count = 6
spacing_d0 = seventy-five

[radio]
bandwidth_mhz = wide

[traffic]
density_per_m2 = 8e-4
vehicle_count = 15

[experiment]
axis = magic
"""
    with pytest.raises(ConfigError) as excinfo:
        parse_config(bad)
    text = str(excinfo.value)
    assert "topology.spacing_d0: not a number" in text
    assert "radio.bandwidth_mhz: not a number" in text
    assert "not both" in text
    assert "experiment.axis: unknown axis" in text
    assert len(excinfo.value.errors) >= 4


def test_vehicle_count_converts_to_density():
    scenario = parse_config(MINIMAL + "\n[traffic]\nvehicle_count = 15\n")
    assert scenario.vehicles.density_per_m2 == pytest.approx(8e-4, rel=1e-12)


def test_building_material_lookup():
    scenario = parse_config(MINIMAL + """
[building]
setback_d1 = 4
material = Brick
""")
    assert scenario.building.reflection_db == pytest.approx(14.8)
    with pytest.raises(ConfigError, match="not both"):
        parse_config(MINIMAL + """
[building]
setback_d1 = 4
material = brick
reflection_db = 8
""")
    with pytest.raises(ConfigError, match="building.material"):
        parse_config(MINIMAL + "\n[building]\nsetback_d1 = 4\nmaterial = wood\n")
    with pytest.raises(ConfigError, match="needs reflection_db or material"):
        parse_config(MINIMAL + "\n[building]\nsetback_d1 = 4\n")


def test_empty_config_rejected():
    with pytest.raises(ConfigError, match="no sections found"):
        parse_config("")
    with pytest.raises(ConfigError, match="no sections found"):
        parse_config("   \n\n# just a comment\n")


def test_missing_topology_section():
    with pytest.raises(ConfigError, match=r"missing required section \[topology\]"):
        parse_config("[radio]\ntx_power_dbm = 10\n")


def test_exactly_one_shape_key():
    with pytest.raises(ConfigError, match="topology"):
        parse_config("""
[topology]
node_count = 6
spacing_d0 = 75
theta_deg = 11.7
road_width = 10
""")


def test_bool_words():
    on = parse_config(MINIMAL + "\n[radio]\ncalibrate = yes\n")
    assert on.calibrate is True
    off = parse_config(MINIMAL + "\n[radio]\ncalibrate = off\n")
    assert off.calibrate is False
    with pytest.raises(ConfigError, match="not a boolean"):
        parse_config(MINIMAL + "\n[radio]\ncalibrate = maybe\n")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.cfg")


def test_presets_list_and_load():
    assert list_presets() == ["building_worstcase", "paper_baseline"]
    base = load_preset("paper_baseline")
    assert base.calibrate is True
    assert base.topology.theta_deg == 11.7
    assert base.targets.baseline_snr_db == pytest.approx(41.1808)
    wall = load_preset("building_worstcase")
    assert wall.building is not None
    assert wall.topology.road_width == pytest.approx(10.0, abs=1e-9)
    with pytest.raises(ConfigError, match="unknown preset"):
        load_preset("no_such_preset")


def test_experiment_validation():
    with pytest.raises(ConfigError, match="experiment.steps"):
        parse_config(MINIMAL + "\n[experiment]\naxis = density\nsteps = 1\n")
    with pytest.raises(ConfigError, match="experiment.trials"):
        parse_config(MINIMAL + "\n[experiment]\ntrials = 0\n")
    with pytest.raises(ConfigError, match="experiment.engine"):
        parse_config(MINIMAL + "\n[experiment]\nengine = cuda\n")


# ---------------------------------------------------------------------------
# command line


def test_cli_check_default_preset(capsys):
    assert cli.main(["check"]) == 0
    out = capsys.readouterr().out
    assert "interference-free    : yes" in out
    assert "beam angle           : 11.7 deg" in out
    assert "minimum beam angle   : 11.3162" in out


def test_cli_check_reports_violation_without_failing(capsys):
    assert cli.main(["check", "--theta", "5"]) == 0
    out = capsys.readouterr().out
    assert "interference-free    : no" in out


def test_cli_check_mitigation_block(tmp_path, capsys):
    cfg = tmp_path / "tilted.cfg"
    cfg.write_text(MINIMAL.replace("theta_deg = 11.7",
                                   "road_width = 10.0\nheight_a = 3.5\nheight_b = 2.8"))
    assert cli.main(["check", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "cross-road tilt      : 4.00417" in out
    assert "outside the main lobe: yes" in out


def test_cli_tables(capsys):
    assert cli.main(["tables"]) == 0
    out = capsys.readouterr().out
    assert "calibrated scalars" in out
    assert "baseline snr          : 41.1808 dB" in out
    assert "capped link rate      : 14.3508" in out
    assert "near side lobe" in out
    assert "combined delta" in out
    assert "reconfigured worst" in out
    assert "limitations" in out
    assert "fitting constants" in out


def test_cli_tables_building_block(capsys):
    assert cli.main(["tables", "--preset", "building_worstcase"]) == 0
    out = capsys.readouterr().out
    assert "building double bounce" in out
    assert "wall setback          : 4 m" in out


def test_cli_mc_runs_and_notes_validity(capsys):
    code = cli.main(["mc", "--trials", "4000", "--seed", "3",
                     "--engine", "numpy"])
    assert code == 0
    out = capsys.readouterr().out
    assert "closed form" in out
    assert "monte carlo" in out
    assert "engine               : numpy" in out
    # the preset's dimension spreads sit outside the validity band
    assert "validity band" in out


def test_cli_sweep_to_file_and_determinism(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    base = ["sweep", "--axis", "density", "--steps", "3", "--trials", "4000",
            "--seed", "3", "--engine", "numpy"]
    assert cli.main(base + ["--workers", "1", "--out", str(out_a)]) == 0
    assert cli.main(base + ["--workers", "2", "--out", str(out_b)]) == 0
    data = out_a.read_bytes()
    assert data == out_b.read_bytes()
    assert b"\r" not in data
    lines = data.decode("ascii").splitlines()
    assert lines[0] == "value,closed_form,mc_estimate,mc_half_width_95"
    assert len(lines) == 4


def test_cli_sweep_building_axis_stdout(capsys):
    code = cli.main(["sweep", "--preset", "building_worstcase",
                     "--axis", "building_gamma", "--steps", "4"])
    assert code == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == ("value,unfolded_length_m,arrival_offset_deg,"
                        "interference_dbm,delta_db")
    assert len(lines) == 5


def test_cli_sweep_requires_axis(capsys):
    code = cli.main(["sweep", "--preset", "paper_baseline"])
    assert code == 1
    assert "no axis given" in capsys.readouterr().err


def test_cli_sweep_building_axis_needs_building(capsys):
    code = cli.main(["sweep", "--axis", "building_d1"])
    assert code == 1
    assert "needs a [building] section" in capsys.readouterr().err


def test_cli_bad_config_exits_nonzero(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(MINIMAL + "\n[radio]\ntx_power_dbm = loud\n")
    assert cli.main(["check", "--config", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "error:" in err
    assert "tx_power_dbm" in err

    # a config with no topology at all fails at the section check
    bare = tmp_path / "bare.cfg"
    bare.write_text("[radio]\ntx_power_dbm = 10\n")
    assert cli.main(["check", "--config", str(bare)]) == 1
    assert "missing required section" in capsys.readouterr().err


def test_cli_unknown_preset(capsys):
    assert cli.main(["check", "--preset", "bogus"]) == 1
    assert "unknown preset" in capsys.readouterr().err


def test_cli_seed_precedence(capsys, monkeypatch):
    monkeypatch.setenv("TRIWAVE_SEED", "77")
    assert cli.main(["mc", "--trials", "2000", "--engine", "numpy"]) == 0
    assert "seed 77" in capsys.readouterr().out
    assert cli.main(["mc", "--trials", "2000", "--engine", "numpy",
                     "--seed", "5"]) == 0
    assert "seed 5" in capsys.readouterr().out


def test_cli_bad_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("TRIWAVE_SEED", "lucky")
    assert cli.main(["mc", "--trials", "2000", "--engine", "numpy"]) == 1
    assert "TRIWAVE_SEED" in capsys.readouterr().err


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["--version"])
    assert excinfo.value.code == 0
