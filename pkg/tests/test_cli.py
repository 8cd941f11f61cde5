import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from eqcavity.cli import main

from conftest import CONFIGS


def run(tmp_path, *args):
    res = CliRunner().invoke(main, [*map(str, args), "--out", str(tmp_path)])
    manifest = tmp_path / "manifest.json"
    return res, (json.loads(manifest.read_text()) if manifest.exists() else None)


def cfg(name):
    return CONFIGS / f"{name}.json"


def write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def n1_config(b_re=0.5, b_im=0.0):
    # sigma1 = 1 - b, sigma2 = 1 + b gives a = 1 (p = 0)
    return {"case": "n1", "geometry": {},
            "loading": {"sigma1_inf": 1 - b_re, "sigma2_inf": 1 + b_re, "tau_inf": b_im}}


def test_map_writes_contours(tmp_path):
    res, man = run(tmp_path, "map", cfg("fig6a"), "--svg")
    assert res.exit_code == 0, res.output
    assert man["status"] == "ok"
    header, data = read_csv(tmp_path / "contour_0.csv")
    assert header == ["cavity", "side", "xi", "s", "x", "y"]
    assert (tmp_path / "contour_1.csv").exists()
    assert set(data[:, 1]) == {1.0, -1.0}
    assert np.all(np.diff(data[:, 3]) >= 0)
    assert man["derived"]["loading"]["gamma"] == pytest.approx(0.0)
    assert (tmp_path / "contours.svg").read_text().startswith("<svg")
    assert set(man["files"]) == {"contour_0.csv", "contour_1.csv", "contours.svg"}


def test_map_at_gamma_one(tmp_path):
    res, man = run(tmp_path, "map", write_config(tmp_path, n1_config(1.0)))
    assert res.exit_code == 0, res.output
    assert man["derived"]["verdict"] == "degenerate"
    assert man["derived"]["geometry"]["degenerate_segments"] is True


def test_out_of_range_geometry_is_a_config_error(tmp_path):
    res, man = run(tmp_path, "map", cfg("fig4"), "--set", "geometry.k=1.5")
    assert res.exit_code == 2
    assert man["status"] == "config-error"


def test_unknown_key_is_rejected(tmp_path):
    data = n1_config()
    data["loading"]["sigma3_inf"] = 1.0
    res, _ = run(tmp_path, "map", write_config(tmp_path, data))
    assert res.exit_code == 2
    assert "sigma3_inf" in res.output


def test_numerical_failure_exit_code(tmp_path):
    data = json.loads(cfg("fig8d").read_text())
    data["geometry"]["endpoints"] = [-1, -0.5, -0.4, 0.4, 0.4 + 1e-9, 1]
    res, man = run(tmp_path, "map", write_config(tmp_path, data))
    assert res.exit_code == 3
    assert man["status"] == "numerical-error"
    assert man["error"]["name"] == "SingularPeriods"


@pytest.mark.parametrize("name, Z, verdict", [("fig3d", 4, "nonexistent"),
                                              ("fig8a", 0, "exists")])
def test_zeros_figures(tmp_path, name, Z, verdict):
    res, man = run(tmp_path, "zeros", cfg(name))
    assert res.exit_code == 0, res.output
    rep = json.loads((tmp_path / "zeros.json").read_text())
    assert rep["Z"] == Z and rep["agree"] and rep["verdict"] == verdict
    assert man["derived"]["Z"] == Z


def test_zeros_n1(tmp_path):
    res, _ = run(tmp_path, "zeros", write_config(tmp_path, n1_config(0.5)))
    assert res.exit_code == 0, res.output
    rep = json.loads((tmp_path / "zeros.json").read_text())
    assert rep["Z"] == 0 and rep["methods"]["closed-form"]["Z"] == 0


def test_stress_fig4(tmp_path):
    res, man = run(tmp_path, "stress", cfg("fig4"))
    assert res.exit_code == 0, res.output
    header, data = read_csv(tmp_path / "stress.csv")
    assert header == ["s", "sigma1", "sigma2", "tau12", "sigma_t", "sigma_n", "tau_nt"]
    assert np.allclose(data[:, 1] + data[:, 2], 3.0, atol=1e-10)
    assert np.ptp(data[:, 1]) > 0.1
    assert man["derived"]["stress"]["sigma_t_deviation"] < 1e-8


def test_stress_circle(tmp_path):
    res, _ = run(tmp_path, "stress", write_config(tmp_path, n1_config(0.0)))
    assert res.exit_code == 0, res.output
    _, data = read_csv(tmp_path / "stress.csv")
    # sigma1 = sigma2 = 1 at infinity: hoop stress 2, free boundary
    assert np.allclose(data[:, 4], 2.0, atol=1e-12)
    assert np.allclose(data[:, 5], 0.0, atol=1e-12)


def test_stress_bad_cavity(tmp_path):
    res, _ = run(tmp_path, "stress", cfg("fig4"), "--set", "stress.cavity=5")
    assert res.exit_code == 2


def test_verify_command(tmp_path):
    res, man = run(tmp_path, "verify", cfg("fig7a"))
    assert res.exit_code == 0, res.output
    rep = json.loads((tmp_path / "verify.json").read_text())
    assert rep["boundary_residual"] < 1e-9
    assert rep["omega_prime_zeros"] == 0
    assert man["derived"]["verdict"] == rep["verdict"]


def test_sweep_n2_flips_at_gamma_one(tmp_path):
    res, man = run(tmp_path, "sweep", cfg("sweep_n2_sym_inf"))
    assert res.exit_code == 0, res.output
    summary = man["derived"]["sweep"]
    assert summary["transition_at_gamma_one"]
    assert summary["Z_values"] == [0, 4]


def test_sweep_n3_finite(tmp_path):
    res, man = run(tmp_path, "sweep", cfg("sweep_n3_finite"), "--set", "sweep.gamma=[0.5, 1.5]")
    assert res.exit_code == 0, res.output
    assert man["derived"]["sweep"]["Z_values"] == [2, 8]


def test_sweep_n4_line_reports(tmp_path):
    res, man = run(tmp_path, "sweep", cfg("sweep_n4_line"), "--set", "sweep.gamma=[0.5, 1.5]",
                   "--workers", "2")
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(open(tmp_path / "sweep.csv", newline="")))
    assert rows[0][:3] == ["gamma", "value", "Z"] and len(rows) == 3
    assert man["derived"]["sweep"]["Z_values"] == [0, 8]


def test_manifest_rerun_is_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    res, _ = run(first, "zeros", cfg("fig2"))
    assert res.exit_code == 0, res.output
    res, _ = run(second, "zeros", first / "manifest.json")
    assert res.exit_code == 0, res.output
    a = json.loads((first / "manifest.json").read_text())
    b = json.loads((second / "manifest.json").read_text())
    a["config"]["output"].pop("dir"), b["config"]["output"].pop("dir")
    assert a == b
    assert (first / "zeros.json").read_bytes() == (second / "zeros.json").read_bytes()
