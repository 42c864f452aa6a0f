import filecmp
from pathlib import Path

import pytest

from agechemo.cli import main
from agechemo.config import build_model, build_trajectory, load_config
from agechemo.errors import ParseError, ValidationError
from conftest import bundled, small_config_text


def test_bundled_transition_config_parses():
    cfg = load_config(bundled("fig2a.cfg"))
    assert cfg.traj_kind == "transition"
    assert cfg.traj_params == {"y0": 1.0, "y_delta": 3.0, "t_delta": 10.0}
    assert cfg.gamma == 2.0 and (cfg.l1, cfg.l2) == (4.0, 8.0)
    assert cfg.z0 == (0.0, 0.5)
    assert cfg.n_modes == 6 and cfg.age_nodes == 401
    assert cfg.d_min == 0.5 and cfg.d_max == 1.5
    assert cfg.k_spec == ("quadratic-motherhood", 2.00)
    assert len(cfg.config_hash) == 64


def test_empty_config_rejected(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    with pytest.raises(ParseError):
        load_config(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ParseError):
        load_config(tmp_path / "nope.cfg")


def test_odd_mode_count_rejected(tmp_path):
    path = tmp_path / "odd.cfg"
    path.write_text(small_config_text(n_modes=5))
    with pytest.raises(ValidationError, match="n_modes"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "unknown.cfg"
    path.write_text(small_config_text() + "\n[model]\nbogus = 1\n")
    with pytest.raises((ValidationError, ParseError)):
        load_config(path)
    path2 = tmp_path / "unknown2.cfg"
    path2.write_text(small_config_text().replace("mu = constant 0.1", "mu = constant 0.1\nwhat = 2"))
    with pytest.raises(ValidationError, match=r"\[model\] what"):
        load_config(path2)


def test_trajectory_key_mismatch_rejected(tmp_path):
    path = tmp_path / "traj.cfg"
    path.write_text(small_config_text(kind_block="kind = ramp\ny4 = 0.3"))
    with pytest.raises(ValidationError, match="ramp"):
        load_config(path)


def test_table_forms(tmp_path):
    n = 11
    vals = " ".join(["0.1"] * n)
    text = small_config_text(age_nodes=n).replace("mu = constant 0.1", "mu = table %s" % vals)
    path = tmp_path / "table.cfg"
    path.write_text(text)
    cfg = load_config(path)
    params = build_model(cfg)
    assert params.mu.values[0] == 0.1


def test_table_length_mismatch(tmp_path):
    text = small_config_text(age_nodes=11).replace("mu = constant 0.1", "mu = table 0.1 0.1")
    path = tmp_path / "short.cfg"
    path.write_text(text)
    with pytest.raises(ValidationError, match="table"):
        build_model(load_config(path))


def test_dt_snaps_to_window_divisor(tmp_path):
    path = tmp_path / "snap.cfg"
    path.write_text(small_config_text(dt=0.024))
    cfg = load_config(path)
    assert abs(round(cfg.a_max / cfg.dt) * cfg.dt - cfg.a_max) < 1e-12


def test_run_determinism(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(small_config_text())
    code1 = main(["run", str(path), "--out", str(tmp_path / "o1")])
    code2 = main(["run", str(path), "--out", str(tmp_path / "o2")])
    assert code1 == 0 and code2 == 0
    for name in ("galerkin.csv", "oracle.csv", "report.txt", "galerkin_profiles.csv"):
        assert filecmp.cmp(tmp_path / "o1" / name, tmp_path / "o2" / name, shallow=False), name


def test_cli_exit_code_input_error(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.cfg")]) == 3
    assert "input error" in capsys.readouterr().err


def test_cli_exit_code_acceptance_failure(tmp_path, capsys):
    # a transition the clamped input cannot follow: the set point is missed
    path = tmp_path / "fail.cfg"
    path.write_text(
        small_config_text(
            kind_block="kind = transition\ny0 = 1.0\ny_delta = 3.0\nt_delta = 2.0",
            t_final=3.0,
            d_max=0.9,
            snapshot_times="2.0",
        )
    )
    assert main(["run", str(path)]) == 2
    out = capsys.readouterr().out
    assert "setpoint_reached" in out and "FAIL" in out


def test_cli_roots_command(capsys):
    assert main(["roots", str(bundled("fig2a.cfg"))]) == 0
    out = capsys.readouterr().out
    assert "-2.0" in out and "+4.4" in out


def test_cli_verify_command(tmp_path, capsys):
    path = tmp_path / "tiny.cfg"
    path.write_text(small_config_text())
    assert main(["verify", str(path)]) == 0
    out = capsys.readouterr().out
    assert "d_star" in out and "certificate" in out and "saturation inequality: 0 violations" in out


def test_cli_run_single_route(tmp_path, capsys):
    path = tmp_path / "tiny.cfg"
    path.write_text(small_config_text())
    assert main(["run", str(path), "--routes", "oracle", "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "oracle.csv").exists()
    assert not (tmp_path / "o" / "galerkin.csv").exists()


def test_build_trajectory_kinds(tmp_path):
    for block, kind in (
        ("kind = ramp\ny4 = 0.3\ny1 = 0.75", "ramp"),
        ("kind = periodic\ny2 = 0.79\ny3 = 0.625\nomega = 1.047", "periodic"),
        ("kind = constant\nvalue = 2.0", "constant"),
    ):
        path = tmp_path / ("k_%s.cfg" % kind)
        path.write_text(small_config_text(kind_block=block))
        traj = build_trajectory(load_config(path))
        assert traj.kind == kind
