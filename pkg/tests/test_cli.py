import json
import os

import pytest

from surfloss.cli import format_estimate, main, scale_label
from surfloss.core import LossTangentEstimate, Region


@pytest.fixture
def synth_csv(tmp_path):
    assert main(["synth", "bundled:tin", "--n", "10", "--noise", "0.05", "--seed", "3",
                 "--out", str(tmp_path)]) == 0
    return tmp_path / "measurements.csv"


def test_format_helpers():
    assert scale_label(Region.SA) == "(×10⁻³)"
    assert scale_label(Region.Si) == "(×10⁻⁷)"
    assert format_estimate(LossTangentEstimate(Region.MA, 3.3e-3, 0.4e-3, True)) == "3.3 ± 0.4"
    assert format_estimate(LossTangentEstimate(Region.SA, 1e-4, 2e-4, False, 1.2e-3)) == "<1.2"


def test_extract_bundled_table(tmp_path, capsys):
    assert main(["extract", "bundled:tin", "bundled:tin", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    rows = {line.split()[0]: line for line in out.splitlines()[1:]}
    assert "3.3 ± 0.4" in rows["MA"] and "(×10⁻³)" in rows["MA"]
    assert "1.7 ± 0.4" in rows["SA"]
    doc = json.loads((tmp_path / "results.json").read_text())
    assert set(doc) >= {"config", "estimates", "generated_by"}
    assert [e["region"] for e in doc["estimates"]] == ["MS", "SA", "MA", "Si"]
    assert doc["config"]["n_samples"] == 10000


def test_missing_file_is_io_error(tmp_path, capsys):
    rc = main(["extract", "bundled:tin", str(tmp_path / "nope.csv"), "--out", str(tmp_path)])
    assert rc == 3
    assert "nope.csv" in capsys.readouterr().err
    assert not (tmp_path / "results.json").exists()


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "m.csv"
    bad.write_text("design,material,process,resonator_id,q_lp,q_hp\nMS design,TiN,none,a,abc,1e6\n")
    assert main(["extract", "bundled:tin", str(bad), "--out", str(tmp_path)]) == 4
    assert "line 2" in capsys.readouterr().err


def test_unknown_region_column_exit(tmp_path, capsys):
    bad = tmp_path / "p.csv"
    bad.write_text("design,material,process,MS,SA,MA,XX\nMS design,TiN,none,1,1,1,1\n")
    assert main(["extract", str(bad), "bundled:tin", "--out", str(tmp_path)]) == 4


def test_validation_exit(tmp_path, capsys):
    bad = tmp_path / "p.csv"
    bad.write_text("design,material,process,MS,SA,MA,Si\nMS design,TiN,none,60,0,0,60\n")
    assert main(["extract", str(bad), "bundled:tin", "--out", str(tmp_path)]) == 5
    assert "row sum" in capsys.readouterr().err


def test_strict_mode(tmp_path, synth_csv, capsys):
    text = synth_csv.read_text().rstrip("\n") + "\nMS design,TiN,none,bad,2e5,1e5\n"
    synth_csv.write_text(text)
    assert main(["extract", "bundled:tin", str(synth_csv), "--out", str(tmp_path), "--samples", "500"]) == 0
    assert main(["extract", "bundled:tin", str(synth_csv), "--out", str(tmp_path / "s"),
                 "--samples", "500", "--strict"]) == 5
    assert "Q_HP < Q_LP" in capsys.readouterr().err


def test_extract_byte_identical(tmp_path, synth_csv):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    args = ["extract", "bundled:tin", str(synth_csv), "--seed", "11"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert main(args + ["--out", str(c), "--workers", str(max(os.cpu_count() or 1, 8))]) == 0
    ref = (a / "results.json").read_bytes()
    assert (b / "results.json").read_bytes() == ref
    assert (c / "results.json").read_bytes() == ref


def test_predict_and_svg(tmp_path, synth_csv):
    assert main(["predict", "bundled:tin", str(synth_csv), "--out", str(tmp_path),
                 "--samples", "2000", "--svg"]) == 0
    doc = json.loads((tmp_path / "predict.json").read_text())
    assert len(doc["predicted_q"]) == 4
    svg = (tmp_path / "predict.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_budget_two_sets(tmp_path, capsys):
    assert main(["budget", "bundled:tin", "bundled:tin", "bundled:tin_hf", "bundled:tin_hf",
                 "--out", str(tmp_path), "--samples", "2000", "--svg"]) == 0
    doc = json.loads((tmp_path / "budget.json").read_text())
    assert len({b["set"] for b in doc["loss_budget"]}) == 2
    assert (tmp_path / "budget.svg").exists()


def test_budget_odd_arguments(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["budget", "bundled:tin", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_bound_command(tmp_path, capsys):
    assert main(["bound", "bundled:tin_hf", "bundled:tin_hf", "--region", "SA", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("SA upper bound <") and "(×10⁻³)" in out
    doc = json.loads((tmp_path / "bound_SA.json").read_text())
    assert 0 < doc["upper_bound"] < 1.2e-2


def test_synth_noiseless(tmp_path):
    assert main(["synth", "bundled:al", "--reference", "al", "--n", "3", "--noise", "0",
                 "--q-hp", "1e7", "--out", str(tmp_path), "--name", "al.csv"]) == 0
    lines = (tmp_path / "al.csv").read_text().splitlines()
    assert len(lines) == 1 + 4 * 3


def test_synth_bad_tangents(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["synth", "bundled:tin", "--tangents", "MS=abc", "--out", str(tmp_path)])
    assert exc.value.code == 2
