import csv
import json

import numpy as np
import pytest

from relamp import cli
from relamp.amplitudes import ParticleSpec, gaussian, sample_on_grid, save_grid


def run(tmp_path, command, config=None, *extra):
    args = [command, "--out", str(tmp_path / "out")]
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    return cli.main(args + list(extra))


def manifest(tmp_path):
    return json.loads((tmp_path / "out" / "manifest.json").read_text())


def test_superluminal_boost_is_a_config_error(tmp_path, capsys):
    code = run(tmp_path, "transform", {"transformations": [{"type": "boost", "beta": [0, 1.2, 0]}]})
    assert code == 2
    assert "$.transformations[0].beta" in capsys.readouterr().err


@pytest.mark.parametrize(
    "config,where",
    [
        ({"transformations": [{"type": "boost", "beta": [0, 0.2]}]}, "$.transformations[0].beta"),
        ({"transformations": [{"type": "rotation", "axis": [0, 0, 1]}]}, "$.transformations[0]"),
        ({"transformations": [{"type": "spin"}]}, "$.transformations[0].type"),
        ({"state": {"sigma_p": -1}}, "$.state.sigma_p"),
        ({"bogus": 1}, "$:"),
    ],
)
def test_schema_errors_are_located(tmp_path, capsys, config, where):
    assert run(tmp_path, "transform", config) == 2
    assert where in capsys.readouterr().err


def test_unreadable_config(tmp_path):
    assert cli.main(["causality", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_empty_transform_list_reproduces_input(tmp_path):
    assert run(tmp_path, "transform", {"transformations": []}) == 0
    with open(tmp_path / "out" / "samples.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(r["abs_psi_in"] == r["abs_psi_out"] for r in rows)


def test_transform_sequence_checks(tmp_path):
    cfg = {
        "transformations": [
            {"type": "boost", "beta": [0.3, 0, 0.1]},
            {"type": "rotation", "axis": [0, 0, 1], "angle": 0.7},
            {"type": "translation", "a": [0.5, 0.1, 0, 0.2]},
            {"type": "parity"},
            {"type": "time_reversal"},
        ]
    }
    assert run(tmp_path, "transform", cfg) == 0
    m = manifest(tmp_path)
    assert m["passed"] and {c["name"] for c in m["checks"]} == {
        "norm_preserved",
        "scalar_product_modulus",
        "four_momentum_covariance",
    }
    assert len(m["config_sha256"]) == 64 and m["tool_version"] == "0.1.0"


def test_grid_file_input(tmp_path):
    g = sample_on_grid(gaussian(ParticleSpec(1.0, 0), [0.1, 0, 0], 0.7), n=32, pmax=7.0)
    save_grid(g, tmp_path / "psi.bin")
    cfg = {"grid_file": str(tmp_path / "psi.bin"), "transformations": [{"type": "rotation", "axis": [1, 0, 0], "angle": 1.0}]}
    assert run(tmp_path, "transform", cfg, "--tol-scale", "100") == 0
    assert manifest(tmp_path)["summary"]["carrier"] == "grid"


def test_failed_check_exits_one(tmp_path, capsys):
    cfg = {"transformations": [{"type": "boost", "beta": [0.3, 0, 0]}], "tolerances": {"norm_analytic": 1e-30}}
    assert run(tmp_path, "transform", cfg, "--tol-scale", "1e-10") == 1
    assert "norm_preserved" in capsys.readouterr().err


def test_causality_defaults(tmp_path):
    assert run(tmp_path, "causality", None, "--serial") == 0
    m = manifest(tmp_path)
    assert m["summary"]["C(5,5)"] == pytest.approx(0.996958, abs=2e-4)
    assert m["serial"] and m["threads"] == 1
    with open(tmp_path / "out" / "causality.csv") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "rho,C" and len(lines) == 101
    value = lines[50].split(",")[1]
    assert float(value) == float(format(float(value), ".17g"))


def test_causality_both_paths(tmp_path):
    assert run(tmp_path, "causality", None, "--rho-max", "3", "--step", "0.5", "--both-paths") == 0
    checks = {c["name"]: c for c in manifest(tmp_path)["checks"]}
    assert checks["path_agreement"]["passed"]


def test_nw_check(tmp_path):
    assert run(tmp_path, "nw-check", {"pairs": 2}) == 0
    assert all(c["passed"] for c in manifest(tmp_path)["checks"])


def test_boost_position_and_refusal(tmp_path, capsys):
    assert run(tmp_path, "boost-position") == 0
    summary = manifest(tmp_path)["summary"]
    assert summary["relative_deviation"] <= summary["epsilon_bound"]
    wide = {"state": {"pbar": [1, 0, 0], "sigma_p": 0.8}, "probe": {"pbar": [1, 0, 0], "sigma_p": 0.8}, "beta0": [0.9, 0, 0]}
    assert run(tmp_path, "boost-position", wide) == 1
    assert "average_event_applicable" in capsys.readouterr().err
    assert run(tmp_path, "boost-position", {"beta0": [0, 1.0, 0]}) == 2


def test_dirac(tmp_path):
    assert run(tmp_path, "dirac", {"grid": {"n": 32}}) == 0
    assert (tmp_path / "out" / "dirac_components.csv").exists()
    assert run(tmp_path, "dirac", {"particle": {"m0": 1.0, "spin": 0}}) == 2


def test_config_dataclass_defaults_are_independent():
    a, b = cli.TransformConfig(), cli.TransformConfig()
    a.transformations.append({"type": "parity"})
    assert b.transformations == []
    assert np.isclose(cli.C55_REFERENCE, 0.996958)


def test_manifest_written_for_config_errors(tmp_path):
    assert run(tmp_path, "causality", {"tau": -1}) == 2
    m = manifest(tmp_path)
    assert not m["passed"] and "$.tau" in m["error"]


def test_numerical_failure_is_exit_one(tmp_path, capsys):
    # a grid box far too small for the packet: sampling refuses
    cfg = {"carrier": "grid", "grid": {"n": 16, "pmax": 1.0}}
    assert run(tmp_path, "transform", cfg) == 1
    assert "transform_execution" in capsys.readouterr().err


def test_serial_runs_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        args = ["causality", "--serial", "--rho-max", "4", "--step", "0.5", "--out", str(tmp_path / f"c{k}")]
        assert cli.main(args) == 0
        outs.append((tmp_path / f"c{k}" / "causality.csv").read_bytes())
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps({"carrier": "grid", "grid": {"n": 48}, "transformations": [{"type": "boost", "beta": [0.2, 0, 0]}]}))
    for k in range(2):
        assert cli.main(["transform", "--serial", "--config", str(cfg), "--out", str(tmp_path / f"t{k}")]) == 0
        outs.append((tmp_path / f"t{k}" / "samples.csv").read_bytes())
    assert outs[0] == outs[1] and outs[2] == outs[3]
