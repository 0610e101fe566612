import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfloss.core import (
    REGIONS,
    DesignId,
    ExtractionConfig,
    LossTangentEstimate,
    MatrixValidationError,
    ParseError,
    ParticipationMatrix,
    Region,
    ResonatorMeasurement,
    SurflossError,
    UnknownRegionError,
    validate_matrix,
)
from surfloss.ingest import (
    Dataset,
    bundled_matrix,
    read_dataset,
    read_estimates,
    read_measurements,
    read_participation,
    write_dataset,
    write_estimates,
    write_measurements,
    write_participation,
)

# Printed participation tables, verbatim (percent)
TABLES = {
    "tin": [["0.274", "0.147", "0.017", "86.149"],
            ["0.063", "0.172", "0.058", "41.099"],
            ["0.014", "0.029", "0.084", "10.964"],
            ["0.042", "0.026", "0.006", "80.5158"]],
    "al": [["0.297", "0.156", "0.017", "87.839"],
           ["0.084", "0.193", "0.072", "46.128"],
           ["0.014", "0.041", "0.076", "15.490"],
           ["0.050", "0.033", "0.007", "79.543"]],
    "tin_hf": [["0.271", "0.147", "0.018", "85.171"],
               ["0.096", "0.120", "0.052", "54.690"],
               ["0.020", "0.047", "0.092", "14.764"],
               ["0.041", "0.025", "0.005", "80.249"]],
    "al_hf": [["0.297", "0.156", "0.017", "87.839"],
              ["0.084", "0.193", "0.072", "46.128"],
              ["0.014", "0.041", "0.076", "15.490"],
              ["0.050", "0.033", "0.007", "79.543"]],
}


def _decimals(text):
    return len(text.split(".")[1])


@pytest.mark.parametrize("name", sorted(TABLES))
def test_bundled_matrices_reprint_tables(name):
    m = bundled_matrix(name)
    assert [d.design for d in m.rows] == list(REGIONS)
    for row, printed in zip(m.values, TABLES[name]):
        got = [f"{v * 100:.{_decimals(p)}f}" for v, p in zip(row, printed)]
        assert got == printed


def test_percent_conversion(tmp_path, tin):
    p = tmp_path / "m.csv"
    write_participation(p, tin, units="percent")
    m = read_participation(p, units="percent")
    assert m.values[0, Region.Si.index] == pytest.approx(0.86149, rel=1e-15)


def test_zero_matrix(tmp_path):
    p = tmp_path / "z.csv"
    p.write_text("design,material,process,MS,SA,MA,Si\nMS design,TiN,none,0,0,0,0\n")
    m = read_participation(p)
    assert np.all(m.values == 0)


def test_unknown_region_column(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("design,material,process,MS,SA,MA,XX\nMS design,TiN,none,0,0,0,0\n")
    with pytest.raises(UnknownRegionError) as err:
        read_participation(p)
    assert err.value.column == 7


def test_missing_region_column(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("design,material,process,MS,SA,MA\nMS design,TiN,none,0,0,0\n")
    with pytest.raises(ParseError, match="Si"):
        read_participation(p)


def test_parse_error_reports_location(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("design,material,process,MS,SA,MA,Si\nMS design,TiN,none,0.1,abc,0,0\n")
    with pytest.raises(ParseError) as err:
        read_participation(p)
    assert (err.value.line, err.value.column) == (2, 5)


def test_region_columns_any_order_and_sci_notation(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("design,material,process,Si,MA,SA,MS\nSA design,TiN,none,4.1099e1,0.058,0.172,0.063\n")
    m = read_participation(p)
    assert m.values[0] == pytest.approx([0.00063, 0.00172, 0.00058, 0.41099])


def test_invalid_matrix_rejected(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("design,material,process,MS,SA,MA,Si\nMS design,TiN,none,60,0,0,60\n")
    with pytest.raises(MatrixValidationError, match="row sum exceeds 1"):
        read_participation(p)


def test_measurements(tmp_path):
    p = tmp_path / "q.csv"
    p.write_text(
        "design,material,process,resonator_id,q_lp,q_hp\n"
        "SA design,TiN,none,r07,8.0e5,2.0e6\n"
        "SA design,TiN,none,r08,0,2.0e6\n"
        "SA design,TiN,none,r09,2e6,1e6\n"
    )
    recs = read_measurements(p)
    assert len(recs) == 3
    assert recs[0] == ResonatorMeasurement(DesignId(Region.SA, "TiN", "none"), "r07", 8.0e5, 2.0e6)
    assert recs[0].valid
    assert recs[1].problem == "non-positive Q"
    assert recs[2].problem == "Q_HP < Q_LP"


def test_measurements_missing_column(tmp_path):
    p = tmp_path / "q.csv"
    p.write_text("design,material,process,resonator_id,q_lp\nSA design,TiN,none,r1,1e5\n")
    with pytest.raises(ParseError, match="q_hp"):
        read_measurements(p)


def test_measurements_extra_column(tmp_path):
    p = tmp_path / "q.csv"
    p.write_text("design,material,process,resonator_id,q_lp,q_hp,temp\nSA design,TiN,none,r1,1e5,1e6,10\n")
    with pytest.raises(ParseError, match="temp"):
        read_measurements(p)


def test_measurements_round_trip_with_infinite_q_hp(tmp_path):
    d = DesignId(Region.MA, "Al", "HF")
    recs = [ResonatorMeasurement(d, "a", 1.234567890123e5, float("inf")),
            ResonatorMeasurement(d, "b", 0.1 + 0.2, 7e6)]
    p = tmp_path / "q.csv"
    write_measurements(p, recs)
    assert read_measurements(p) == recs


def _tin_estimates():
    return [
        LossTangentEstimate(Region.MS, 4.6e-4, 2.4e-4, True),
        LossTangentEstimate(Region.SA, 2.0e-4, 3.0e-4, False, 1.2e-3),
        LossTangentEstimate(Region.MA, 3.3e-3, 0.4e-3, True),
        LossTangentEstimate(Region.Si, 2.6e-7, 0.4e-7, True),
    ]


def test_results_json_schema(tmp_path):
    p = tmp_path / "r.json"
    cfg = ExtractionConfig(rng_seed=7)
    write_estimates(p, _tin_estimates(), cfg)
    doc = json.loads(p.read_text())
    assert set(doc) == {"config", "estimates", "generated_by"}
    assert doc["config"]["rng_seed"] == 7 and doc["config"]["n_samples"] == 10_000
    for e in doc["estimates"]:
        assert set(e) == {"region", "mean", "std", "resolvable", "upper_bound"}
    ma = next(e for e in doc["estimates"] if e["region"] == "MA")
    assert (ma["mean"], ma["std"]) == (3.3e-3, 0.4e-3)
    sa = next(e for e in doc["estimates"] if e["region"] == "SA")
    assert sa["upper_bound"] == 1.2e-3 and sa["resolvable"] is False


def test_results_single_region(tmp_path):
    p = tmp_path / "r.json"
    write_estimates(p, _tin_estimates()[2:3], ExtractionConfig())
    assert len(json.loads(p.read_text())["estimates"]) == 1


def test_results_empty_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_estimates(tmp_path / "r.json", [], ExtractionConfig())


def test_results_round_trip(tmp_path):
    p = tmp_path / "r.json"
    cfg = ExtractionConfig(n_samples=3, rng_seed=2, region_scale={"MA": 0.5})
    est = _tin_estimates()
    write_estimates(p, est, cfg, diagnostics={"samples_kept": 3})
    got, got_cfg, doc = read_estimates(p)
    assert got == est and got_cfg == cfg
    assert doc["diagnostics"] == {"samples_kept": 3}


def test_dataset_envelope(tmp_path, tin):
    recs = [ResonatorMeasurement(tin.rows[0], "r1", 2e5, 1e7)]
    ds = Dataset(tin, recs, {"source": "test"})
    p = tmp_path / "d.json"
    write_dataset(p, ds)
    back = read_dataset(p)
    assert back.matrix == tin and back.measurements == recs and back.metadata == {"source": "test"}


def test_dataset_rejects_stray_measurements(tin):
    stray = ResonatorMeasurement(DesignId(Region.MS, "Nb"), "r1", 2e5, 1e7)
    with pytest.raises(SurflossError):
        Dataset(tin, [stray])


_fraction = st.floats(0.0, 0.2499, allow_nan=False, allow_subnormal=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(_fraction, min_size=4, max_size=4), min_size=1, max_size=4))
def test_fraction_round_trip_is_exact(tmp_path_factory, rows):
    designs = [DesignId(REGIONS[i], "X", "none") for i in range(len(rows))]
    m = ParticipationMatrix(designs, np.array(rows))
    assert validate_matrix(m) == []
    p = tmp_path_factory.mktemp("rt") / "m.csv"
    write_participation(p, m, units="fraction")
    back = read_participation(p, units="fraction")
    assert back == m
    assert back.values.tobytes() == m.values.tobytes()
