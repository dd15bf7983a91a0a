import csv
import json

import numpy as np
import pytest

from vortexfv.cases import StationaryVortex, initialize
from vortexfv.cli import build_mesh_from_config, main
from vortexfv.config import ConfigError, RunConfig, parse_config, read_config_file, resolve_threads
from vortexfv.timeint import UnsupportedCombination


def test_defaults():
    cfg = parse_config()
    assert cfg.cfl == 0.3 and cfg.order == 1 and cfg.scheme == "nodal_pressure"
    assert cfg == RunConfig()


def test_nodal_velocity_second_order_rejected():
    with pytest.raises(UnsupportedCombination):
        parse_config(overrides={"scheme": "nodal_velocity", "order": "2"})


@pytest.mark.parametrize("key,value", [("cfl", "0"), ("cfl", "1.5"), ("order", "3"), ("n", "x"),
                                       ("case", "sod"), ("stencil", "wide"), ("levels", "32")])
def test_bad_values_name_the_key(key, value):
    with pytest.raises(ConfigError) as exc:
        parse_config(overrides={key: value})
    assert exc.value.key == key


def test_unknown_key(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("colour = blue\n")
    with pytest.raises(ConfigError) as exc:
        parse_config(path)
    assert exc.value.key == "colour"


def test_precedence(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# comment\ncase = vortex\ncfl = 0.4  # trailing\nn = 8\ncase.w = 0.1\n")
    assert read_config_file(path)["cfl"] == "0.4"
    cfg = parse_config(path, {"cfl": "0.2", "n": None})
    assert (cfg.case, cfg.cfl, cfg.n, cfg.case_params) == ("vortex", 0.2, 8, {"w": 0.1})


def test_malformed_file(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("cfl 0.3\n")
    with pytest.raises(ConfigError):
        parse_config(path)


def test_threads(monkeypatch):
    monkeypatch.delenv("VORTEXFV_THREADS", raising=False)
    assert resolve_threads(None) == 1
    monkeypatch.setenv("VORTEXFV_THREADS", "3")
    assert resolve_threads(None) == 3 and resolve_threads(2) == 2
    monkeypatch.setenv("VORTEXFV_THREADS", "zero")
    with pytest.raises(ConfigError):
        resolve_threads(None)


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_vortex_zero_time_dump_is_initial_data(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "--case", "vortex", "--n", "8", "--t-end", "0", "--output-dir", str(out)])
    assert code == 0
    rows = read_rows(out / "fields_000000.csv")
    assert rows[0] == ["cell_id", "x_c", "y_c", "area", "u", "v", "p"]
    data = np.array(rows[1:], dtype=float)
    cfg = parse_config(overrides={"case": "vortex", "n": "8"})
    q0 = initialize(StationaryVortex(), build_mesh_from_config(cfg))
    np.testing.assert_array_equal(data[:, 4:].T, q0)
    assert read_rows(out / "nodes_000000.csv")[0] == ["node_id", "x", "y", "dual_area", "div", "curl"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["case"] == "vortex" and "version" in manifest
    summary = json.loads((out / "summary.json").read_text())
    assert summary["steps"] == 0


def test_runs_are_byte_identical(tmp_path):
    args = ["run", "--case", "oblique", "--mesh", "triquad", "--n", "8", "--seed", "4", "--t-end", "0.05",
            "--output-every", "2"]
    outs = []
    for name, threads in (("a", "1"), ("b", "2")):
        out = tmp_path / name
        assert main(["--threads", threads] + args + ["--output-dir", str(out)]) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].glob("*.csv"))
    assert "series.csv" in files and len(files) > 4
    for name in files:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_spherical_triquad_vorticity(tmp_path):
    out = tmp_path / "sph"
    assert main(["run", "--case", "spherical", "--mesh", "triquad", "--n", "32", "--t-end", "0.1",
                 "--output-dir", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["vorticity_l1"] <= 1e-12
    assert summary["max_vorticity_l1"] <= 1e-12
    assert {"totals", "divergence_l1", "wall_time"} <= set(summary)


def test_converge_table(tmp_path):
    out = tmp_path / "conv"
    assert main(["converge", "--levels", "8,16", "--t-end", "0.1", "--output-dir", str(out)]) == 0
    rows = read_rows(out / "convergence.csv")
    assert rows[0][:3] == ["level", "n_cells", "h"] and len(rows) == 3


def test_converge_needs_exact_solution(tmp_path):
    assert main(["converge", "--case", "spherical", "--output-dir", str(tmp_path)]) == 2


def test_fourier_scan(tmp_path):
    out = tmp_path / "f"
    assert main(["fourier", "--samples", "8", "--cfl", "0.49", "--output-dir", str(out)]) == 0
    rows = read_rows(out / "fourier_scan.csv")
    assert rows[0] == ["k_x", "k_y", "kernel_dim", "spectral_radius"] and len(rows) == 65
    summary = json.loads((out / "fourier_summary.json").read_text())
    assert summary["max_spectral_radius"] <= 1 + 1e-10


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--cfl", "0", "--output-dir", str(tmp_path)]) == 2
    assert main(["run", "--scheme", "nodal_velocity", "--order", "2", "--output-dir", str(tmp_path)]) == 2
    assert main(["run", "--set", "bogus=1", "--output-dir", str(tmp_path)]) == 2
    assert main(["mesh", "check", str(tmp_path / "missing.mesh")]) == 4
    bad = tmp_path / "bad.mesh"
    bad.write_text("not a mesh\n")
    assert main(["mesh", "check", str(bad)]) == 4
    # forward Euler far beyond the stability limit overflows
    code = main(["run", "--cfl", "1", "--n", "8", "--t-end", "400", "--set", "output_dir=" + str(tmp_path / "x"),
                 "--set", "scheme=nodal_pressure"])
    assert code == 3


def test_mesh_gen_and_check(tmp_path, capsys):
    path = tmp_path / "m.mesh"
    assert main(["mesh", "gen", "polygonal", "4", str(path), "--seed", "2"]) == 0
    capsys.readouterr()
    assert main(["mesh", "check", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["max_sides"] >= 5 and report["n_cells"] > 0
    assert main(["operators", "check", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["duality"] < 1e-12
    assert main(["operators", "check", "--kind", "triquad", "--n", "6"]) == 0
    ops = json.loads(capsys.readouterr().out)
    assert ops["curl_grad_relative"] < 1e-12 and ops["alpha"] < 1e-12


def test_run_from_mesh_file(tmp_path):
    path = tmp_path / "m.mesh"
    assert main(["mesh", "gen", "quad", "6", str(path)]) == 0
    out = tmp_path / "r"
    assert main(["run", "--mesh", str(path), "--t-end", "0.02", "--output-dir", str(out)]) == 0
    assert "l1_error" in json.loads((out / "summary.json").read_text())
