import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from qhe.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFY, main
from qhe.observables import bose_occupation

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path, raw, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw), encoding="utf-8")
    return str(path)


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def _run(tmp_path, config, scenario, *extra, prefix="run"):
    out = str(tmp_path / prefix)
    code = main([scenario, "--config", config, "--out", out, "-q", *extra])
    return code, out


def test_rabi_swaps_occupations_at_quarter_period(tmp_path):
    code, out = _run(tmp_path, str(CONFIG_DIR / "rabi.json"), "rabi")
    assert code == EXIT_OK
    rows = _read_csv(f"{out}_trajectory.csv")
    assert len(rows) == 201
    assert float(rows[50]["t"]) == pytest.approx(math.pi / 2, abs=1e-15)
    assert float(rows[50]["n_a"]) == pytest.approx(bose_occupation(1.0), abs=1e-8)


def test_manifest_lists_existing_outputs(tmp_path):
    code, out = _run(tmp_path, str(CONFIG_DIR / "photonic_cycle.json"), "photonic-cycle")
    assert code == EXIT_OK
    manifest = json.loads(Path(f"{out}_manifest.json").read_text(encoding="utf-8"))
    assert manifest["passed"] and manifest["config"]["scenario"] == "photonic-cycle"
    for name in manifest["outputs"]:
        path = Path(name)
        assert path.is_file() and path.stat().st_size > 0
        if path.suffix == ".csv":
            assert len(path.read_text(encoding="utf-8").splitlines()) >= 2
    gp = Path(f"{out}.gp").read_text(encoding="utf-8")
    assert "'run_trajectory.csv'" in gp  # relative to the script


def test_fixed_step_runs_are_byte_identical(tmp_path):
    config = str(CONFIG_DIR / "rabi.json")
    _run(tmp_path, config, "rabi", "--fixed-step", "0.01", prefix="one")
    _run(tmp_path, config, "rabi", "--fixed-step", "0.01", prefix="two")
    for suffix in ("_trajectory.csv", ".gp"):
        one = (tmp_path / f"one{suffix}").read_text(encoding="utf-8")
        two = (tmp_path / f"two{suffix}").read_text(encoding="utf-8").replace("two", "one")
        assert one == two


def test_resonant_swap_report(tmp_path):
    code, out = _run(tmp_path, str(CONFIG_DIR / "resonant_swap.json"), "photonic-optimize")
    assert code == EXIT_OK
    (row,) = _read_csv(f"{out}_report.csv")
    assert 22.16 <= float(row["t_c"]) <= 22.36
    assert float(row["eta"]) == pytest.approx(2 / 3, abs=1e-12)


def test_counter_rotating_report(tmp_path):
    code, out = _run(tmp_path, str(CONFIG_DIR / "counter_rotating.json"), "counter-rotating")
    assert code == EXIT_OK
    (row,) = _read_csv(f"{out}_report.csv")
    assert float(row["W"]) <= 0


def test_plot_writes_png(tmp_path):
    code, out = _run(tmp_path, str(CONFIG_DIR / "rabi.json"), "rabi", "--plot")
    assert code == EXIT_OK
    assert Path(f"{out}.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_invalid_config_exits_2(tmp_path, capsys):
    config = _write(tmp_path, {"scenario": "rabi", "parameters": {"omega": -1, "T_a": 0}})
    code, out = _run(tmp_path, config, "rabi")
    assert code == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "omega" in err and "T_a" in err
    assert not list(tmp_path.glob("run*"))


def test_missing_config_exits_2(tmp_path):
    assert main(["rabi", "--out", str(tmp_path / "x"), "-q"]) == EXIT_CONFIG


def test_parse_error_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"scenario": "rabi",,}', encoding="utf-8")
    assert main(["rabi", "--config", str(path), "-q"]) == EXIT_CONFIG
    assert f"{path}:1:" in capsys.readouterr().err


def test_numerical_failure_exits_3(tmp_path, capsys):
    config = _write(tmp_path, {"scenario": "photonic-optimize",
                               "parameters": {"delta": 1e-6}})
    code, _ = _run(tmp_path, config, "photonic-optimize")
    assert code == EXIT_NUMERICAL
    assert "ResonanceMissError" in capsys.readouterr().err


def test_verify_with_corrupted_tolerance_exits_1(tmp_path):
    out = str(tmp_path / "v")
    assert main(["verify", "--tol", "1e-4", "--out", out, "-q"]) == EXIT_VERIFY
    rows = _read_csv(f"{out}_verify.csv")
    assert any(r["passed"] == "0" for r in rows)


def test_verify_passes(tmp_path):
    out = str(tmp_path / "v")
    assert main(["verify", "--out", out, "-q"]) == EXIT_OK
    manifest = json.loads(Path(f"{out}_manifest.json").read_text(encoding="utf-8"))
    assert manifest["passed"]


def test_out_of_range_tol_rejected_for_scenarios(tmp_path):
    code, _ = _run(tmp_path, str(CONFIG_DIR / "rabi.json"), "rabi", "--tol", "1e-2")
    assert code == EXIT_CONFIG


def test_csv_values_are_full_precision(tmp_path):
    _, out = _run(tmp_path, str(CONFIG_DIR / "rabi.json"), "rabi")
    data = np.loadtxt(f"{out}_trajectory.csv", delimiter=",", skiprows=1)
    assert data.shape == (201, 12)
    first = Path(f"{out}_trajectory.csv").read_text(encoding="utf-8").splitlines()[1]
    assert all(len(field.split("e")[0]) >= 18 for field in first.split(","))
