"""Text formats: participation-matrix CSV, measurement CSV, results JSON,
and a JSON dataset envelope carrying matrix + measurements + metadata.

Matrix CSV header::

    design,material,process,MS,SA,MA,Si

Measurements CSV header::

    design,material,process,resonator_id,q_lp,q_hp
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
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
    parse_design,
    validate_matrix,
)

__all__ = [
    "Dataset",
    "read_participation",
    "parse_participation",
    "write_participation",
    "read_measurements",
    "parse_measurements",
    "write_measurements",
    "write_estimates",
    "read_estimates",
    "results_document",
    "read_dataset",
    "write_dataset",
    "bundled_matrix",
    "BUNDLED",
]

ID_COLUMNS = ("design", "material", "process")
MATRIX_COLUMNS = ID_COLUMNS + tuple(r.value for r in REGIONS)
MEASUREMENT_COLUMNS = ID_COLUMNS + ("resonator_id", "q_lp", "q_hp")

_UNIT_FACTOR = {"percent": 100.0, "fraction": 1.0}

# dataset name -> (csv file, description)
BUNDLED = {
    "tin": ("tin.csv", "TiN devices without post-process HF etch"),
    "al": ("al.csv", "Al devices without post-process HF etch"),
    "tin_hf": ("tin_hf.csv", "TiN devices with post-process HF etch"),
    "al_hf": ("al_hf.csv", "Al devices with post-process HF etch"),
}


@dataclass
class Dataset:
    matrix: ParticipationMatrix
    measurements: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.matrix.rows)
        stray = sorted({str(m.design) for m in self.measurements if m.design not in known})
        if stray:
            raise SurflossError(f"measurements reference designs missing from matrix: {', '.join(stray)}")


def _check_units(units):
    if units not in _UNIT_FACTOR:
        raise ValueError(f"units must be 'percent' or 'fraction', got {units!r}")
    return _UNIT_FACTOR[units]


def _parse_float(text, line, column, path):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"cannot parse number {text!r}", line, column, path) from None


def _read_rows(text, required, path):
    """Yield (line_no, row dict) with strict header checking."""
    reader = csv.reader(io.StringIO(text))
    header = None
    for raw in reader:
        line = reader.line_num
        if not raw or all(not c.strip() for c in raw) or raw[0].lstrip().startswith("#"):
            continue
        if header is None:
            header = [c.strip() for c in raw]
            _check_header(header, required, path, line)
            continue
        if len(raw) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(raw)}", line, None, path)
        yield line, header, [c.strip() for c in raw]
    if header is None:
        raise ParseError("file has no header row", None, None, path)


def _check_header(header, required, path, line):
    region_names = {r.value.lower() for r in REGIONS}
    seen = set()
    for col, name in enumerate(header, start=1):
        if name in seen:
            raise ParseError(f"duplicate column {name!r}", line, col, path)
        seen.add(name)
        if name in required:
            continue
        if name.lower() in region_names:
            # region column with non-canonical case
            continue
        if required is MATRIX_COLUMNS:
            raise UnknownRegionError(f"unknown region column {name!r}", line, col, path)
        raise ParseError(f"unexpected column {name!r}", line, col, path)
    canon = {n if n in required else Region.parse(n).value for n in header}
    missing = [c for c in required if c not in canon]
    if missing:
        raise ParseError(f"missing required column(s): {', '.join(missing)}", line, None, path)


def _design_id(cells, header, line, path):
    col = header.index("design")
    try:
        design = parse_design(cells[col])
    except UnknownRegionError as exc:
        raise ParseError(str(exc), line, col + 1, path) from None
    return DesignId(design, cells[header.index("material")], cells[header.index("process")] or "none")


def parse_participation(text: str, units: str = "percent", path=None) -> ParticipationMatrix:
    factor = _check_units(units)
    rows, values = [], []
    for line, header, cells in _read_rows(text, MATRIX_COLUMNS, path):
        canon = [h if h in ID_COLUMNS else Region.parse(h).value for h in header]
        rows.append(_design_id(cells, canon, line, path))
        vec = []
        for region in REGIONS:
            col = canon.index(region.value)
            vec.append(_parse_float(cells[col], line, col + 1, path) / factor)
        values.append(vec)
    matrix = ParticipationMatrix(rows, np.array(values, dtype=float).reshape(len(rows), len(REGIONS)))
    violations = validate_matrix(matrix)
    if violations:
        raise MatrixValidationError(violations)
    return matrix


def read_participation(path, units: str = "percent") -> ParticipationMatrix:
    """Read a participation-matrix CSV, converting to fractions and validating."""
    path = Path(path)
    return parse_participation(path.read_text(encoding="utf-8"), units, path)


def write_participation(path, matrix: ParticipationMatrix, units: str = "fraction"):
    """Write ``matrix`` as CSV. Fraction units round-trip bit-exactly."""
    factor = _check_units(units)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MATRIX_COLUMNS)
    for design, row in zip(matrix.rows, matrix.values):
        w.writerow([design.label, design.material, design.process] + [repr(float(v * factor)) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def parse_measurements(text: str, path=None) -> list[ResonatorMeasurement]:
    out = []
    for line, header, cells in _read_rows(text, MEASUREMENT_COLUMNS, path):
        q = []
        for name in ("q_lp", "q_hp"):
            col = header.index(name)
            q.append(_parse_float(cells[col], line, col + 1, path))
        out.append(ResonatorMeasurement(
            _design_id(cells, header, line, path), cells[header.index("resonator_id")], q[0], q[1]
        ))
    return out


def read_measurements(path) -> list[ResonatorMeasurement]:
    """Read a measurements CSV.

    Records breaking the Q rules are returned, not dropped; check
    ``record.problem``.
    """
    path = Path(path)
    return parse_measurements(path.read_text(encoding="utf-8"), path)


def _fmt_q(v):
    return "inf" if math.isinf(v) else repr(float(v))


def write_measurements(path, measurements):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MEASUREMENT_COLUMNS)
    for m in measurements:
        w.writerow([m.design.label, m.design.material, m.design.process, m.resonator_id,
                    _fmt_q(m.q_lp), _fmt_q(m.q_hp)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _estimate_dict(e: LossTangentEstimate):
    return {
        "region": e.region.value,
        "mean": float(e.mean),
        "std": float(e.std),
        "resolvable": bool(e.resolvable),
        "upper_bound": None if e.upper_bound is None else float(e.upper_bound),
    }


def results_document(estimates, provenance: ExtractionConfig, diagnostics=None) -> dict:
    doc = {
        "config": provenance.to_dict(),
        "estimates": [_estimate_dict(e) for e in sorted(estimates, key=lambda e: e.region.index)],
        "generated_by": f"surfloss {__version__}",
    }
    if diagnostics is not None:
        doc["diagnostics"] = diagnostics
    return doc


def write_estimates(path, estimates, provenance: ExtractionConfig, diagnostics=None):
    """Write the results JSON. ``diagnostics`` adds an optional extra key."""
    estimates = list(estimates)
    if not estimates:
        raise ValueError("no estimates to write")
    doc = results_document(estimates, provenance, diagnostics)
    Path(path).write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def read_estimates(path):
    """Inverse of :func:`write_estimates`; returns ``(estimates, config, document)``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        estimates = [
            LossTangentEstimate(Region.parse(e["region"]), e["mean"], e["std"], e["resolvable"], e["upper_bound"])
            for e in doc["estimates"]
        ]
        config = ExtractionConfig.from_dict(doc["config"])
    except KeyError as exc:
        raise ParseError(f"results file missing field {exc}", path=path) from None
    return estimates, config, doc


def _design_dict(d: DesignId):
    return {"design": d.label, "material": d.material, "process": d.process}


def write_dataset(path, dataset: Dataset):
    """JSON envelope: metadata, matrix (fractions) and measurements."""
    doc = {
        "metadata": dict(dataset.metadata),
        "units": "fraction",
        "columns": [r.value for r in REGIONS],
        "matrix": [dict(_design_dict(d), values=[float(v) for v in row])
                   for d, row in zip(dataset.matrix.rows, dataset.matrix.values)],
        "measurements": [dict(_design_dict(m.design), resonator_id=m.resonator_id,
                              q_lp=_fmt_q(m.q_lp) if math.isinf(m.q_lp) else m.q_lp,
                              q_hp=_fmt_q(m.q_hp) if math.isinf(m.q_hp) else m.q_hp)
                         for m in dataset.measurements],
        "generated_by": f"surfloss {__version__}",
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_dataset(path) -> Dataset:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        factor = _check_units(doc.get("units", "fraction"))
        columns = [Region.parse(c) for c in doc.get("columns", [r.value for r in REGIONS])]
        if sorted(c.index for c in columns) != list(range(len(REGIONS))):
            raise ParseError("dataset must list each region column once", path=path)
        rows, values = [], []
        for entry in doc["matrix"]:
            rows.append(DesignId(parse_design(entry["design"]), entry.get("material", ""),
                                 entry.get("process", "none")))
            vec = np.empty(len(REGIONS))
            for c, v in zip(columns, entry["values"], strict=True):
                vec[c.index] = float(v) / factor
            values.append(vec)
        matrix = ParticipationMatrix(rows, np.array(values).reshape(len(rows), len(REGIONS)))
        measurements = [
            ResonatorMeasurement(
                DesignId(parse_design(m["design"]), m.get("material", ""), m.get("process", "none")),
                str(m["resonator_id"]), float(m["q_lp"]), float(m["q_hp"]),
            )
            for m in doc.get("measurements", [])
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed dataset: {exc}", path=path) from None
    violations = validate_matrix(matrix)
    if violations:
        raise MatrixValidationError(violations)
    return Dataset(matrix, measurements, doc.get("metadata", {}))


def bundled_matrix(name: str) -> ParticipationMatrix:
    """Participation matrix of a bundled reference device set.

    ``name`` is one of ``tin``, ``al``, ``tin_hf``, ``al_hf``.
    """
    try:
        filename, _ = BUNDLED[name]
    except KeyError:
        raise KeyError(f"unknown bundled dataset {name!r}; choose from {sorted(BUNDLED)}") from None
    text = resources.files("surfloss.data").joinpath(filename).read_text(encoding="utf-8")
    return parse_participation(text, "percent", path=filename)
