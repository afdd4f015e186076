"""Command-line surface: formats, exit codes, determinism."""

import json

import pytest

from slespec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---- spectrum ----

def test_spectrum_csv_anchor_rows(capsys):
    code, out, _ = run(capsys, "spectrum", "--q", "0,2", "--kappa", "2,6")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "q,kappa,gamma_minus,branch,beta"
    cells = [ln.split(",") for ln in lines[1:]]
    assert len(cells) == 4
    by_pt = {(c[0], c[1]): c for c in cells}
    assert float(by_pt[("2", "2")][4]) == pytest.approx(4.0, abs=1e-12)
    assert float(by_pt[("2", "6")][4]) == pytest.approx(3.0, abs=1e-12)
    assert by_pt[("2", "6")][3] == "Derivative"
    assert float(by_pt[("0", "2")][4]) == pytest.approx(0.0, abs=1e-12)


def test_spectrum_json_and_determinism(capsys):
    # negative grid values need the = form, else argparse reads them as flags
    args = ("spectrum", "--q=-2:3:21", "--kappa", "0,8/3,6",
            "--format", "json")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    doc = json.loads(out1)
    assert doc["schema_version"] == 1
    assert len(doc["rows"]) == 63
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_spectrum_grid_accepts_fractions(capsys):
    code, out, _ = run(capsys, "spectrum", "--q=-2", "--kappa", "8/3")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert row[0] == "-2" and row[1] == "8/3"
    assert float(row[4]) == pytest.approx(1 / 3, abs=1e-12)


def test_unknown_flag_exits_1(capsys):
    code, _, err = run(capsys, "spectrum", "--q", "1", "--kappa", "2",
                       "--nope", "1")
    assert code == 1


def test_missing_subcommand_exits_1(capsys):
    assert run(capsys)[0] == 1


# ---- curves ----

def test_curves_contains_known_anchor(capsys):
    code, out, err = run(capsys, "curves", "--m-max", "1",
                         "--gamma", "1/2,1", "--kappa", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "M,gamma,q,kappa,beta_tilde,beta"
    rows = [ln.split(",") for ln in lines[1:]]
    anchor = [r for r in rows if r[0] == "1" and r[1] == "1"]
    assert anchor and anchor[0][2] == "2" and anchor[0][3] == "2"
    assert anchor[0][4] == "4" and anchor[0][5] == "4"
    # one transition row per kappa grid point
    assert sum(1 for r in rows if r[0] == "Q") == 1


def test_curves_skips_invalid_points(capsys):
    # gamma = 1/4 is below the M=0 admissible range
    code, out, err = run(capsys, "curves", "--m-max", "0",
                         "--gamma", "1/4,1", "--kappa", "2")
    assert code == 0
    assert "skipped 1" in err


# ---- truncate ----

def test_truncate_certificate_pass(capsys):
    code, out, _ = run(capsys, "truncate", "--m", "1", "--gamma", "1/2",
                       "--order", "24")
    assert code == 0
    doc = json.loads(out)
    assert doc["band_pass"] is True
    assert doc["band_width"] == 1
    assert doc["a_minus_M_is_zero"] is True
    assert doc["kappa_used"] == doc["kappa_curve"] == "5/2"
    assert doc["q"] == "21/16"


def test_truncate_negative_control(capsys):
    # off-curve kappa must not produce a band
    code, out, _ = run(capsys, "truncate", "--m", "1", "--gamma", "1/2",
                       "--kappa", "3", "--order", "24")
    assert code == 2
    doc = json.loads(out)
    assert doc["band_pass"] is False
    assert doc["band_width"] is None


def test_truncate_invalid_curve_exits_2(capsys):
    code, _, err = run(capsys, "truncate", "--m", "0", "--gamma", "1/4")
    assert code == 2
    assert "validation failure" in err


# ---- betafit ----

def test_betafit_on_curve_slope(capsys):
    code, out, _ = run(capsys, "betafit", "--q", "2", "--kappa", "6",
                       "--order", "300", "--k-lo", "3", "--k-hi", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["beta_closed_form"] == pytest.approx(3.0, abs=1e-12)
    assert doc["relative_deviation"] < 0.05
    assert len(doc["radii"]) == len(doc["integral_means"]) == 4


def test_betafit_no_real_gamma_exits_2(capsys):
    code, _, err = run(capsys, "betafit", "--q", "10", "--kappa", "4")
    assert code == 2
    assert "validation failure" in err


def test_betafit_plus_root_rejected_at_kappa_zero(capsys):
    code, _, err = run(capsys, "betafit", "--q", "1", "--kappa", "0",
                       "--root", "plus")
    assert code == 2


# ---- mc ----

def test_mc_kappa_zero_gate(capsys, tmp_path):
    dump = tmp_path / "paths.txt"
    code, out, _ = run(capsys, "mc", "--q", "1.5", "--kappa", "0",
                       "--w", "0.4", "--samples", "4", "--t-horizon", "6",
                       "--steps", "2400", "--dump", str(dump))
    assert code == 0
    doc = json.loads(out)
    assert doc["oracle_source"] == "deterministic"
    assert doc["rel_dev"] < 1e-6
    assert doc["stderr"] == 0.0
    assert len(dump.read_text().strip().splitlines()) == 4


def test_mc_kappa_zero_gate_survives_roundoff_stderr(capsys):
    # 64 identical samples make np.std report ~1 ulp instead of 0 (naive
    # accumulation rounds k*x for non-power-of-two k); the gate must still
    # take the deterministic branch instead of a z-score in the millions
    code, out, _ = run(capsys, "mc", "--q", "2", "--kappa", "0",
                       "--w", "0.4", "--samples", "64", "--t-horizon", "8",
                       "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    assert doc["oracle_source"] == "deterministic"
    assert doc["rel_dev"] < 1e-6
    assert doc["stderr"] < 1e-12 * abs(doc["mean"])
    assert doc["z_score"] == 0.0


def test_mc_series_oracle_small_run(capsys):
    code, out, _ = run(capsys, "mc", "--q", "1", "--kappa", "6",
                       "--w", "0.4", "--samples", "400", "--t-horizon", "6",
                       "--steps", "2400", "--threads", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["oracle_source"] == "series"
    assert abs(doc["z_score"]) <= 3.0


def test_mc_rejects_bad_w(capsys):
    code, _, err = run(capsys, "mc", "--q", "1", "--kappa", "2", "--w", "1.5",
                       "--samples", "4")
    assert code == 2
    assert "validation failure" in err


# ---- output redirection ----

def test_out_file(capsys, tmp_path):
    dest = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "spectrum", "--q", "2", "--kappa", "6",
                       "--out", str(dest))
    assert code == 0
    assert out == ""
    assert dest.read_text().splitlines()[0] == "q,kappa,gamma_minus,branch,beta"
