import csv
import io
import json

import numpy as np
import pytest

from deformqm import cli
from deformqm.metric import DeformationContext, make_grid, random_packet, wavefunction_to_csv


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_table(capsys):
    code, out, _ = run(["spectrum", "--tau", "0.5", "--a", "1", "--n-max", "3"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    y1 = [r for r in rows if r["direction"] == "y" and r["n"] == "1"][0]
    assert float(y1["E"]) == pytest.approx(3.375, rel=1e-14)
    assert out.splitlines()[0] == "direction,n,k,E,method"


def test_spectrum_with_oracle_json(capsys):
    code, out, _ = run(["spectrum", "--n-max", "2", "--oracle-nodes", "400", "--format", "json"],
                       capsys)
    data = json.loads(out)
    assert code == 0
    assert {r["method"] for r in data["rows"]} == {"closed-form", "oracle"}


def test_spectrum_rejects_large_box(capsys):
    code, _, err = run(["spectrum", "--tau", "0.5", "--a", "3"], capsys)
    assert code == 2 and "exceeds" in err


def test_tau_zero_is_validation_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--tau", "0"])
    assert exc.value.code == 2
    assert "tau must be in (0, 1)" in capsys.readouterr().err


def test_sweep_ends_at_ratio(capsys):
    code, out, _ = run(["sweep", "--steps", "20"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 20
    assert float(rows[-1]["tau_a"]) == pytest.approx(1.0)
    assert float(rows[-1]["ratio"]) == pytest.approx(0.683918, abs=1e-6)


def test_matrix_default(capsys):
    code, out, _ = run(["matrix"], capsys)
    data = json.loads(out)
    assert code == 0 and data["pass"]
    assert data["similarity_residual"] < 1e-12
    S = np.array(data["metric"])
    # same cone as [[1, 0.5], [0.5, 1]]: off-diagonal is half the (0,0) entry
    assert S[0, 1] / S[0, 0] == pytest.approx(0.5, rel=1e-12)
    assert np.min(np.linalg.eigvalsh(S)) > 0
    assert data["spectrum"] == [0.0, 2.0]
    assert data["printed_metric_residual"] == pytest.approx(3.0)


def test_matrix_complex_spectrum(capsys):
    code, _, err = run(["matrix", "--hamiltonian", "[[0, 1], [-1, 0]]"], capsys)
    assert code == 2 and "not quasi-Hermitian" in err


def test_overlap_rows(capsys):
    code, out, _ = run(["overlap", "--deltas", "0,1,100"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    assert float(rows[0]["oracle_re"]) == pytest.approx(1.0, abs=1e-12)
    assert float(rows[1]["abs_diff"]) > 0.1
    assert abs(complex(float(rows[2]["oracle_re"]), float(rows[2]["oracle_im"]))) < 0.02


def test_transform_json(capsys):
    code, out, _ = run(["transform", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["parseval_defect"] < 1e-6 and data["round_trip_error"] < 1e-6


def test_transform_reads_wavefunction(tmp_path, capsys):
    g = make_grid(DeformationContext(0.5), 256)
    phi = random_packet(g, np.random.default_rng(1))
    path = tmp_path / "psi.csv"
    with open(path, "w", newline="") as fh:
        wavefunction_to_csv(phi, fh)
    code, out, _ = run(["transform", "--input", str(path)], capsys)
    assert code == 0
    assert out.splitlines()[0] == "xi,re,im"


def test_evolve_conserves_norm(capsys):
    code, out, _ = run(["evolve", "--t-list", "0,1,5", "--depth", "20", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["norm_drift"] < 1e-10
    assert len(data["rows"]) == 3


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    assert cli.main(["sweep", "--steps", "3"]) == 0
    assert (tmp_path / "sweep.csv").read_text().startswith("tau,tau_a,ratio,E1_y")
    assert capsys.readouterr().out == ""


def test_unwritable_output_reports_path(tmp_path, capsys):
    target = tmp_path / "file"
    target.write_text("x")
    code, _, err = run(["sweep", "--steps", "2", "--output", str(target / "sub" / "o.csv")], capsys)
    assert code == 2 and str(target) in err


def test_deterministic_bytes(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"m{i}.json"
        cli.main(["matrix", "--output", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.slow
def test_verify_default_passes(capsys):
    code, out, _ = run(["verify"], capsys)
    data = json.loads(out)
    assert code == 0 and data["pass"]
    for c in data["checks"]:
        assert set(c) == {"check_name", "residual", "tolerance", "pass"}


@pytest.mark.slow
def test_verify_under_resolved_fails(capsys):
    code, out, err = run(["verify", "--tau", "0.9", "--n-nodes", "64"], capsys)
    data = json.loads(out)
    failing = [c["check_name"] for c in data["checks"] if not c["pass"]]
    assert code == 1 and failing
    for name in failing:
        assert name in err
