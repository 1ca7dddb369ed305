import json

import numpy as np
import pytest

from demsim.cli import main
from demsim.scenario import ScenarioError, bundled_scenarios, load_scenario

SMALL = {
    "label": "small",
    "spectral": {"kind": "lorentz_drude", "g0": 0.1, "gamma": 12.0},
    "bath": {"omega_max": 10.0, "n_max": 40, "temperature": 1.0, "statistics": "boson"},
    "system": {"preset": "three_level", "Omega": 1.0, "occupations": [0.5, 0.0]},
    "grid": {"t_start": 0.0, "t_end": 5.0, "n_points": 11},
    "outputs": {"occupations": True, "coherences": True, "bath_occupations": False, "kernel": False},
}


def write(path, data):
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def small(tmp_path):
    return write(tmp_path / "small.json", SMALL)


def edited(section, **values):
    data = json.loads(json.dumps(SMALL))
    data[section].update(values)
    return data


def test_every_bundled_scenario_loads():
    found = bundled_scenarios()
    assert len(found) == 27
    for name, path in found.items():
        sc = load_scenario(path)
        assert sc.grid.t_end <= 60.0, name


def test_unknown_key_is_named(tmp_path):
    data = edited("spectral")
    data["spectral"]["gama"] = 3.0
    with pytest.raises(ScenarioError, match="gama"):
        load_scenario(write(tmp_path / "bad.json", data))


@pytest.mark.parametrize("section,values,match", [
    ("spectral", {"gamma": -1.0}, "gamma"),
    ("bath", {"statistics": "anyon"}, "statistics"),
    ("system", {"occupations": [0.5]}, "expects 2"),
    ("grid", {"t_end": 0.0}, "t_end"),
])
def test_invalid_values(tmp_path, section, values, match):
    with pytest.raises(ScenarioError, match=match):
        load_scenario(write(tmp_path / "bad.json", edited(section, **values)))


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "label": "x",\n  oops\n}')
    with pytest.raises(ScenarioError, match="line 3"):
        load_scenario(path)


def test_run_outputs(small, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(small), "--out", str(out), "--quiet"]) == 0
    lines = (out / "small.csv").read_text().splitlines()
    assert lines[0] == "t,n_0,n_1,re_c_01,im_c_01,N_total"
    assert len(lines) == 12
    manifest = json.loads((out / "small.manifest.json").read_text())
    for key in ("scenario", "delta_tau", "tau_max", "counterterm", "n_modes", "conservation_residual", "warnings"):
        assert key in manifest
    assert manifest["scenario"]["spectral"]["g0"] == 0.1
    assert manifest["n_modes"] == 41
    assert manifest["counterterm"] == 0.0


def test_run_is_byte_identical(small, tmp_path):
    for d in ("a", "b"):
        assert main(["run", str(small), "--out", str(tmp_path / d), "--quiet"]) == 0
    assert (tmp_path / "a" / "small.csv").read_bytes() == (tmp_path / "b" / "small.csv").read_bytes()


def test_run_optional_outputs(tmp_path):
    data = edited("outputs", bath_occupations=True, kernel=True)
    path = write(tmp_path / "extra.json", data)
    assert main(["run", str(path), "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "extra_bath.csv").read_text().splitlines()[0].startswith("t,b_0,b_1")
    header = (tmp_path / "extra_kernel.csv").read_text().splitlines()[0]
    assert header == "t,K_re_discrete,K_im_discrete,K_re_analytic,K_im_analytic"


def test_run_past_horizon_records_warning(tmp_path):
    path = write(tmp_path / "long.json", edited("bath", n_max=5) | {"grid": {"t_end": 50.0, "n_points": 6}})
    assert main(["run", str(path), "--out", str(tmp_path), "--quiet"]) == 0
    manifest = json.loads((tmp_path / "long.manifest.json").read_text())
    assert any("tau_max" in w for w in manifest["warnings"])


def test_sweep(small, tmp_path):
    assert main(["sweep", str(small), "--axis", "g0", "--values", "0.05,0.1", "--out", str(tmp_path),
                 "--threads", "2", "--quiet"]) == 0
    for v in ("0.05", "0.1"):
        assert (tmp_path / f"small_g0={v}.csv").exists()
    summary = json.loads((tmp_path / "small_sweep_g0.json").read_text())
    assert summary["values"] == [0.05, 0.1]


def test_sweep_rejects_invalid_value(small, tmp_path):
    assert main(["sweep", str(small), "--axis", "gamma", "--values", "-1", "--out", str(tmp_path), "--quiet"]) == 1


def test_converge(small, tmp_path):
    assert main(["converge", str(small), "--nmax-list", "20,40,80", "--out", str(tmp_path), "--quiet"]) == 0
    report = json.loads((tmp_path / "small_converge_n_max.json").read_text())
    assert [d["to"] for d in report["diffs"]] == [40, 80]
    assert report["diffs"][1]["max_abs_diff"] < report["diffs"][0]["max_abs_diff"]


def test_converge_needs_two_grids(small, tmp_path):
    assert main(["converge", str(small), "--wmax-list", "10", "--out", str(tmp_path), "--quiet"]) == 1


def test_verify_passes(small, tmp_path):
    assert main(["verify", str(small), "--out", str(tmp_path), "--quiet"]) == 0
    report = json.loads((tmp_path / "small_verify.json").read_text())
    assert report["passed"]
    assert set(report["checks"]) == {"reconstruction", "unitarity", "conservation", "oracle"}


def test_verify_zero_coupling(tmp_path):
    path = write(tmp_path / "free.json", edited("spectral", g0=0.0))
    assert main(["verify", str(path), "--out", str(tmp_path), "--quiet"]) == 0


def test_verify_fault_injection(small, tmp_path):
    code = main(["verify", str(small), "--eigen-method", "householder_ql", "--eigen-tol", "1e-2",
                 "--out", str(tmp_path), "--quiet"])
    assert code == 2
    report = json.loads((tmp_path / "small_verify.json").read_text())
    assert not report["checks"]["reconstruction"]["passed"]


def test_kernel_command(small, tmp_path):
    assert main(["kernel", str(small), "--n-points", "21", "--out", str(tmp_path), "--quiet"]) == 0
    table = np.loadtxt(tmp_path / "small_kernel.csv", delimiter=",", skiprows=1)
    assert table.shape == (21, 5)
    assert table[0, 2] == 0.0 and table[0, 4] == 0.0


def test_exit_codes(tmp_path, small):
    assert main(["run", str(tmp_path / "missing.json"), "--out", str(tmp_path), "--quiet"]) == 3
    bad = write(tmp_path / "bad.json", edited("spectral", gamma=0.0))
    assert main(["run", str(bad), "--out", str(tmp_path), "--quiet"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["sweep", str(small), "--axis", "omega", "--values", "1"])
    assert exc.value.code == 1
