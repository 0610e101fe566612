"""Measurements -> ensemble statistics -> extraction, in one call."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .core import ExtractionConfig, ParticipationMatrix
from .qtls import all_ensemble_stats, split_valid
from .sle import ExtractionResult, extract

__all__ = ["Extraction", "run_extraction"]


@dataclass
class Extraction:
    matrix: ParticipationMatrix
    stats: list
    flagged: list
    result: ExtractionResult
    config: ExtractionConfig

    @property
    def estimates(self):
        return self.result.estimates

    def stats_for(self, design):
        return next(s for s in self.stats if s.design == design)


def run_extraction(matrix, measurements, config=None, strict=False, workers=1,
                   keep_samples=True) -> Extraction:
    config = config or ExtractionConfig()
    known = set(matrix.rows)
    _, flagged = split_valid(m for m in measurements if m.design in known)
    if flagged and not strict:
        warnings.warn(f"{len(flagged)} flagged measurement(s) excluded", stacklevel=2)
    stats = all_ensemble_stats(measurements, matrix.rows, strict=strict)
    result = extract(matrix, stats, config, workers=workers, keep_samples=keep_samples)
    return Extraction(matrix, stats, flagged, result, config)
