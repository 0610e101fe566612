"""Domain types shared by the whole pipeline.

Participation values are always held as fractions. Percent is only a
parse/print convention (see :mod:`surfloss.ingest`).
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "Region",
    "REGIONS",
    "DesignId",
    "ParticipationMatrix",
    "ResonatorMeasurement",
    "EnsembleStats",
    "LossTangentEstimate",
    "ResolvabilityRule",
    "ExtractionConfig",
    "validate_matrix",
    "SurflossError",
    "ParseError",
    "UnknownRegionError",
    "MatrixValidationError",
    "DomainError",
    "NonTLSLimitedError",
    "EmptyEnsembleError",
    "SolverError",
    "BoundError",
]


class SurflossError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SurflossError):
    """Malformed input file. Carries the 1-based line and column if known."""

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class UnknownRegionError(ParseError):
    pass


class MatrixValidationError(SurflossError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(SurflossError, ValueError):
    pass


class NonTLSLimitedError(DomainError):
    pass


class EmptyEnsembleError(SurflossError):
    pass


class SolverError(SurflossError):
    pass


class BoundError(SurflossError):
    pass


class Region(str, enum.Enum):
    """Dielectric region. Declaration order is the canonical column order."""

    MS = "MS"
    SA = "SA"
    MA = "MA"
    Si = "Si"

    def __str__(self):
        return self.value

    @property
    def index(self) -> int:
        return _REGION_INDEX[self]

    @classmethod
    def parse(cls, label: str) -> "Region":
        key = label.strip()
        for region in cls:
            if key.lower() == region.value.lower():
                return region
        raise UnknownRegionError(f"unknown region {label!r}")


REGIONS: tuple[Region, ...] = tuple(Region)
_REGION_INDEX = {r: i for i, r in enumerate(REGIONS)}


@dataclass(frozen=True, order=True)
class DesignId:
    """A resonator geometry within one material/process set.

    ``design`` is the region the geometry accentuates, so ``Region.SA``
    means the "SA design".
    """

    design: Region
    material: str = ""
    process: str = "none"

    def __post_init__(self):
        if not isinstance(self.design, Region):
            object.__setattr__(self, "design", parse_design(self.design))

    @property
    def label(self) -> str:
        return f"{self.design.value} design"

    def __str__(self):
        tags = " ".join(t for t in (self.material, self.process) if t and t != "none")
        return f"{self.label} [{tags}]" if tags else self.label

    def stream_key(self) -> list[int]:
        """Stable 128-bit key (as four 32-bit words) used to seed per-design RNG streams."""
        text = "\x1f".join((self.design.value, self.material, self.process))
        digest = hashlib.sha256(text.encode("utf-8")).digest()[:16]
        return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def parse_design(label) -> Region:
    """Accept ``"SA design"``, ``"SA Design"``, ``"SADesign"``, ``"SA"``."""
    if isinstance(label, Region):
        return label
    text = str(label).strip()
    low = text.lower().replace(" ", "").replace("_", "")
    if low.endswith("design"):
        low = low[: -len("design")]
    for region in REGIONS:
        if low == region.value.lower():
            return region
    raise UnknownRegionError(f"unknown design {label!r}")


class ParticipationMatrix:
    """Designs x regions table of participation fractions.

    Construction only checks shape; use :func:`validate_matrix` for the
    value rules. The array is stored read-only.
    """

    __slots__ = ("_rows", "_values")

    def __init__(self, rows: Sequence[DesignId], values):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(REGIONS):
            raise ValueError(
                f"participation values must have shape (n_designs, {len(REGIONS)}), got {values.shape}"
            )
        rows = tuple(rows)
        if len(rows) != values.shape[0]:
            raise ValueError(f"{len(rows)} design ids for {values.shape[0]} rows")
        values.setflags(write=False)
        self._rows = rows
        self._values = values

    @property
    def rows(self) -> tuple[DesignId, ...]:
        return self._rows

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def shape(self):
        return self._values.shape

    def __len__(self):
        return len(self._rows)

    def __eq__(self, other):
        if not isinstance(other, ParticipationMatrix):
            return NotImplemented
        return self._rows == other._rows and np.array_equal(self._values, other._values)

    def __hash__(self):
        return hash((self._rows, self._values.tobytes()))

    def __repr__(self):
        return f"ParticipationMatrix({len(self._rows)} designs)"

    def row(self, design: DesignId) -> np.ndarray:
        return self._values[self.index(design)]

    def row_map(self, design: DesignId) -> dict[Region, float]:
        return dict(zip(REGIONS, map(float, self.row(design))))

    def index(self, design: DesignId) -> int:
        try:
            return self._rows.index(design)
        except ValueError:
            raise KeyError(f"design {design} not in participation matrix") from None

    def accentuating_row(self, region: Region) -> DesignId:
        """The unique row whose geometry accentuates ``region``."""
        hits = [d for d in self._rows if d.design is region]
        if not hits:
            raise KeyError(f"no {region.value} design in participation matrix")
        if len(hits) > 1:
            raise KeyError(f"{len(hits)} {region.value} designs in participation matrix; ambiguous")
        return hits[0]

    def reordered(self, rows: Sequence[DesignId]) -> "ParticipationMatrix":
        return ParticipationMatrix(rows, np.array([self.row(d) for d in rows]))

    def scale_column(self, region: Region, factor: float) -> "ParticipationMatrix":
        values = self._values.copy()
        values[:, region.index] *= factor
        return ParticipationMatrix(self._rows, values)

    @classmethod
    def from_percent(cls, rows, values) -> "ParticipationMatrix":
        return cls(rows, np.asarray(values, dtype=float) / 100.0)


def validate_matrix(m: ParticipationMatrix) -> list[str]:
    """Return every rule violation in ``m``; an empty list means valid."""
    violations = []
    values = m.values
    if values.shape[0] == 0:
        violations.append("matrix has no rows")
    seen = set()
    for i, design in enumerate(m.rows):
        if design in seen:
            violations.append(f"row {i} ({design}): duplicate design id")
        seen.add(design)
        row = values[i]
        for region, v in zip(REGIONS, row):
            if not math.isfinite(v):
                violations.append(f"row {i} ({design}), column {region}: non-finite entry")
            elif v < 0:
                violations.append(f"row {i} ({design}), column {region}: negative entry")
            elif v >= 1:
                violations.append(f"row {i} ({design}), column {region}: entry not below 1")
        total = float(np.sum(row))
        if math.isfinite(total) and total > 1:
            violations.append(f"row {i} ({design}): row sum exceeds 1 ({total:.6g})")
    return violations


@dataclass(frozen=True)
class ResonatorMeasurement:
    """One resonator's low-power and high-power internal quality factors.

    ``q_hp`` may be ``inf`` when the resonator shows no power dependence.
    Bad records are kept and described by :attr:`problem`.
    """

    design: DesignId
    resonator_id: str
    q_lp: float
    q_hp: float

    @property
    def problem(self) -> str | None:
        if not (self.q_lp > 0 and self.q_hp > 0) or math.isnan(self.q_lp):
            return "non-positive Q"
        if self.q_hp < self.q_lp:
            return "Q_HP < Q_LP"
        if self.q_hp == self.q_lp:
            return "Q_HP = Q_LP"
        return None

    @property
    def valid(self) -> bool:
        return self.problem is None


@dataclass(frozen=True)
class EnsembleStats:
    design: DesignId
    mean_q_tls: float
    std_err_q_tls: float
    n_resonators: int

    def __post_init__(self):
        if not self.mean_q_tls > 0:
            raise DomainError(f"mean Q_TLS must be positive, got {self.mean_q_tls}")
        if not self.std_err_q_tls >= 0:
            raise DomainError(f"standard error must be non-negative, got {self.std_err_q_tls}")
        if self.n_resonators < 1:
            raise DomainError("ensemble needs at least one resonator")


@dataclass(frozen=True)
class LossTangentEstimate:
    region: Region
    mean: float
    std: float
    resolvable: bool
    upper_bound: float | None = None

    def __post_init__(self):
        if self.mean < 0 or self.std < 0:
            raise DomainError(f"{self.region}: mean and std must be non-negative")
        if self.resolvable and self.upper_bound is not None:
            raise DomainError(f"{self.region}: resolvable estimate cannot carry an upper bound")
        if not self.resolvable:
            if self.upper_bound is None:
                raise DomainError(f"{self.region}: unresolvable estimate needs an upper bound")
            if not self.upper_bound > 0:
                raise DomainError(f"{self.region}: upper bound must be positive")


@dataclass(frozen=True)
class ResolvabilityRule:
    """An estimate is unresolvable when ``mean - k_sigma * std < 0`` or,
    with ``std_exceeds_mean`` set, when ``std > mean``."""

    k_sigma: float = 2.0
    std_exceeds_mean: bool = True

    def to_dict(self):
        return {"k_sigma": self.k_sigma, "std_exceeds_mean": self.std_exceeds_mean}


def _default_scale():
    return {r: 1.0 for r in REGIONS}


@dataclass(frozen=True)
class ExtractionConfig:
    n_samples: int = 10_000
    rng_seed: int = 0
    participation_units: str = "percent"
    resolvability_rule: ResolvabilityRule = field(default_factory=ResolvabilityRule)
    region_scale: Mapping[Region, float] = field(default_factory=_default_scale)

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise DomainError("n_samples must be a positive integer")
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise DomainError("rng_seed must be a non-negative integer")
        if self.participation_units not in ("percent", "fraction"):
            raise DomainError(f"unknown participation units {self.participation_units!r}")
        scale = _default_scale()
        for key, value in dict(self.region_scale).items():
            region = key if isinstance(key, Region) else Region.parse(key)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"region_scale[{region}] must be positive and finite")
            scale[region] = float(value)
        object.__setattr__(self, "region_scale", MappingProxyType(scale))

    def scale_vector(self) -> np.ndarray:
        return np.array([self.region_scale[r] for r in REGIONS])

    def to_dict(self):
        return {
            "n_samples": int(self.n_samples),
            "rng_seed": int(self.rng_seed),
            "participation_units": self.participation_units,
            "resolvability_rule": self.resolvability_rule.to_dict(),
            "region_scale": {r.value: self.region_scale[r] for r in REGIONS},
        }

    @classmethod
    def from_dict(cls, d):
        rule = d.get("resolvability_rule", {})
        return cls(
            n_samples=d.get("n_samples", 10_000),
            rng_seed=d.get("rng_seed", 0),
            participation_units=d.get("participation_units", "percent"),
            resolvability_rule=ResolvabilityRule(**rule),
            region_scale=d.get("region_scale", {}),
        )
