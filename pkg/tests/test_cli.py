import json

import numpy as np
import pytest

from su2metro.cli import main


def run(args):
    return main([str(a) for a in args])


def test_probe_writes_schema_valid_state(tmp_path, capsys):
    out = tmp_path / "state.json"
    assert run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", out]) == 0
    payload = json.loads(out.read_text())
    assert payload["two_j"] == 6 and payload["tensor"] is False
    amps = np.array([complex(re, im) for re, im in payload["amps"]])
    assert abs(np.linalg.norm(amps) - 1) < 1e-10
    report = json.loads(capsys.readouterr().out)
    assert report["conditions"]["max_residual"] < 1e-10


def test_check_roundtrip(tmp_path, capsys):
    out = tmp_path / "ghz.json"
    run(["probe", "--kind", "ghz", "--two-j", "6", "--out", out])
    capsys.readouterr()
    assert run(["check", "--state", out]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["max_residual"] == pytest.approx(5.0, abs=1e-10)


def test_group_info(capsys):
    assert run(["group-info", "--group", "a4", "--two-j", "8"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["order"] == 12
    assert payload["multiplicity"] == 1
    assert len(payload["basis"]) == 1


def test_crb_curve_values(tmp_path, capsys):
    state = tmp_path / "tetra.json"
    run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", state])
    out = tmp_path / "curve.csv"
    assert run(["crb-curve", "--state", state, "--direction", "1,1,1",
                "--tmax", "1.0", "--points", "5", "--out", out]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "t,trace_inv_qfim,min_eig,is_singular"
    first = rows[1].split(",")
    assert float(first[1]) == pytest.approx(9 / 48, abs=1e-10)
    assert (tmp_path / "curve.png").exists()


def test_crb_curve_distinguishes_ghz_from_invariant_state(tmp_path):
    tetra, ghz = tmp_path / "tetra.json", tmp_path / "ghz.json"
    run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", tetra])
    run(["probe", "--kind", "ghz", "--two-j", "6", "--out", ghz])
    vals = {}
    for name, state in (("tetra", tetra), ("ghz", ghz)):
        out = tmp_path / f"{name}.csv"
        run(["crb-curve", "--state", state, "--tmax", "0.1", "--points", "2",
             "--out", out, "--no-plot"])
        vals[name] = float(out.read_text().strip().splitlines()[1].split(",")[1])
    assert vals["tetra"] == pytest.approx(9 / 48, abs=1e-10)
    # GHZ floor: diag(6, 6, 36) gives 1/6 + 1/6 + 1/36
    assert vals["ghz"] == pytest.approx(13 / 36, abs=1e-10)
    assert abs(vals["ghz"] - 9 / 48) > 0.1


def test_tolerance_env_override(tmp_path, monkeypatch):
    state_file = tmp_path / "tetra.json"
    run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", state_file])
    out = tmp_path / "c.csv"
    run(["crb-curve", "--state", state_file, "--tmax", "0.0", "--points", "1",
         "--out", out, "--no-plot"])
    assert out.read_text().strip().splitlines()[1].endswith(",0")
    # raising the physics tolerance above the smallest eigenvalue (16)
    # makes the same point report as singular
    monkeypatch.setenv("SU2M_TOL", "100.0")
    run(["crb-curve", "--state", state_file, "--tmax", "0.0", "--points", "1",
         "--out", out, "--no-plot"])
    assert out.read_text().strip().splitlines()[1].endswith(",1")


def test_crb_curve_no_plot(tmp_path):
    state = tmp_path / "tetra.json"
    run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", state])
    out = tmp_path / "curve.csv"
    run(["crb-curve", "--state", state, "--points", "3", "--tmax", "0.5",
         "--out", out, "--no-plot"])
    assert out.exists() and not (tmp_path / "curve.png").exists()


def test_compass_scan_mod8_rows(tmp_path):
    out = tmp_path / "scan.csv"
    assert run(["compass-scan", "--nmax", "16", "--out", out, "--no-plot"]) == 0
    table = {int(r.split(",")[0]): float(r.split(",")[1])
             for r in out.read_text().strip().splitlines()[1:]}
    assert table[8] == pytest.approx(1.0, abs=1e-10)
    assert table[16] == pytest.approx(1.0, abs=1e-10)
    assert all(v < 0.999 for n, v in table.items() if n % 8)


def test_cfi_curve(tmp_path):
    state = tmp_path / "tetra.json"
    run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", state])
    out = tmp_path / "cfi.csv"
    assert run(["cfi-curve", "--state", state, "--scheme", "kl",
                "--points", "4", "--tmax", "0.4", "--out", out]) == 0
    rows = [r.split(",") for r in out.read_text().strip().splitlines()]
    assert rows[0] == ["t", "cfi_trace", "moments_trace", "qfim_trace"]
    # saturation at the small-t end
    assert float(rows[1][1]) == pytest.approx(float(rows[1][3]), rel=1e-4)


def test_su4_check(capsys):
    assert run(["su4-check", "--probe", "entangled"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["group_order_defining"] == 64
    assert payload["trivial_multiplicities"]["two_copy"] == 1
    assert payload["conditions"]["max_residual"] < 1e-12
    assert payload["circulant_defect"] < 1e-12


def test_wigner_grid_file(tmp_path):
    state = tmp_path / "tetra.json"
    run(["probe", "--kind", "tetrahedral", "--two-j", "6", "--out", state])
    out = tmp_path / "grid.csv"
    assert run(["wigner", "--state", state, "--ntheta", "19", "--nphi", "24",
                "--out", out]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "theta,phi,w"
    assert len(rows) == 1 + 19 * 24
    assert (tmp_path / "grid.png").exists()


def test_outputs_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["compass-scan", "--nmax", "12", "--out", out1, "--no-plot"])
    run(["compass-scan", "--nmax", "12", "--out", out2, "--no-plot"])
    assert out1.read_bytes() == out2.read_bytes()
    s1, s2 = tmp_path / "s1.json", tmp_path / "s2.json"
    run(["probe", "--kind", "s3-finetuned", "--two-j", "8", "--seed", "3",
         "--out", s1])
    run(["probe", "--kind", "s3-finetuned", "--two-j", "8", "--seed", "3",
         "--out", s2])
    assert s1.read_bytes() == s2.read_bytes()


def test_verify_subset_exit_code(capsys):
    assert run(["verify-all", "--only", "3"]) == 0
    text = capsys.readouterr().out
    assert "[PASS] criterion  3" in text


def test_probe_error_exit_code(capsys):
    # tetrahedral construction requires integer J
    assert run(["probe", "--kind", "tetrahedral", "--two-j", "5"]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2


def test_entangled_probe_cli(tmp_path, capsys):
    out = tmp_path / "ent.json"
    assert run(["probe", "--kind", "entangled", "--two-j", "7", "--out", out]) == 0
    payload = json.loads(out.read_text())
    assert payload["tensor"] is True
    assert len(payload["amps"]) == 64
    report = json.loads(capsys.readouterr().out)
    assert report["conditions"]["max_residual"] < 1e-10
