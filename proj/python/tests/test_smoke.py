import csv
import math
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import phbench

SOURCE = Path(os.environ.get("PHBENCH_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def planar2_mass(q):
    c2 = math.cos(q[1])
    return np.array([[3.0 + 2.0 * c2, 1.0 + c2], [1.0 + c2, 1.0]])


def test_names():
    assert "planar2" in phbench.builtin_model_names()
    assert {"step_arm", "cpg_leg", "jump_leg"} <= set(phbench.preset_names())


def test_model_matches_closed_form():
    m = phbench.Model.builtin("planar2")
    assert m.dof == 2
    rng = np.random.default_rng(3)
    for _ in range(5):
        q = rng.uniform(-math.pi, math.pi, 2)
        np.testing.assert_allclose(m.mass_matrix(q), planar2_mass(q), atol=1e-12)
        qd = rng.uniform(-1, 1, 2)
        Mdot = (m.mass_matrix(q + 1e-6 * qd) - m.mass_matrix(q - 1e-6 * qd)) / 2e-6
        assert abs(qd @ (Mdot - 2.0 * m.coriolis(q, qd)) @ qd) < 1e-7


def test_step_response():
    assert phbench.damping_ratio(800, 134.2, 10) == pytest.approx(134.2 / (2 * math.sqrt(8000)))
    x, xdot = phbench.step_response(800, 134.2, 10, 0.4, 5.0)
    assert x == pytest.approx(0.4, abs=1e-6) and abs(xdot) < 1e-5
    with pytest.raises(phbench.OverdampedUnsupported):
        phbench.step_response(400, 400, 1, 0.4, 0.1)


def test_run_table_and_summary():
    r = phbench.run(preset="step_gantry", duration=0.5)
    assert r["name"] == "step_gantry"
    assert r["columns"][0] == "t[s]" and r["columns"][-1] == "e_step[W]"
    assert r["data"].shape == (501, len(r["columns"]))
    t = phbench.column(r, "t")
    e = phbench.column(r, "e_step")
    # Trapezoidal mean square over [0, 0.25]; 0.25 is a grid point.
    mask = t <= 0.25 + 1e-12
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    ms = trapezoid(e[mask] ** 2, t[mask]) / 0.25
    assert r["summary"]["rms_e_step"] == pytest.approx(math.sqrt(ms), rel=1e-9)
    assert r["summary"]["window"] == (0.0, 0.25)


def test_run_errors():
    with pytest.raises(phbench.ConfigError):
        phbench.run(preset="moonwalk")
    with pytest.raises(phbench.ConfigError):
        phbench.run()
    with pytest.raises(phbench.WindowError):
        phbench.run(preset="step_gantry", duration=0.1)


def write_table(table, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(table["columns"])
        for row in table["data"]:
            w.writerow(repr(float(v)) for v in row)


def test_csv_schema_round_trip(tmp_path):
    r = phbench.run(preset="step_arm", duration=0.3)
    path = tmp_path / "arm.csv"
    write_table(r, path)
    back = phbench.read_csv(path)
    assert back["columns"] == r["columns"]
    np.testing.assert_array_equal(back["data"], r["data"])
    again = phbench.metrics(path, preset="step_arm")
    np.testing.assert_allclose(again["data"], r["data"], atol=1e-9, equal_nan=True)

    bad = tmp_path / "bad.csv"
    bad.write_text("t[s],q_0[rad],q_1[rad],qd_0[rad/s]\n0,0,0,0\n")
    with pytest.raises(phbench.SchemaError):
        phbench.read_csv(bad)


def test_cli_csv_is_readable(tmp_path):
    cli = os.environ.get("PHBENCH_CLI")
    if not cli:
        pytest.skip("PHBENCH_CLI not set")
    out = tmp_path / "gantry.csv"
    cfg = tmp_path / "g.toml"
    cfg.write_text('[scenario]\npreset = "step_gantry"\n[sim]\nduration_s = 0.3\n')
    subprocess.run([cli, "run", "--config", str(cfg), "--out", str(out)], check=True, capture_output=True)
    with open(out) as f:
        header = next(csv.reader(f))
    table = phbench.read_csv(out)
    assert table["columns"] == header
    direct = phbench.run(config=cfg)
    np.testing.assert_array_equal(table["data"], direct["data"])


def test_validate():
    checks = phbench.validate()
    assert checks and all(passed for *_, passed in checks)
    assert not all(passed for *_, passed in phbench.validate(inject_fault=True))
