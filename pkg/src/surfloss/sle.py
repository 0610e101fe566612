"""Surface-loss extraction: Monte-Carlo over measured Q_TLS uncertainty
with a non-negative linear inversion per sample.

Random draws come from one stream per design, seeded from
``(rng_seed, design key)`` and consumed in iteration order before any
solving happens. Solving is split into fixed-size chunks that may run on
a thread pool; the NNLS kernel is row-independent, so the result is
bit-identical for any worker count and any row ordering of the matrix.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    REGIONS,
    DomainError,
    EnsembleStats,
    ExtractionConfig,
    LossTangentEstimate,
    ParticipationMatrix,
    Region,
    SolverError,
)
from .nnls import DEFAULT_TOL, nnls_batch

__all__ = [
    "ExtractionResult",
    "solve_nnls",
    "draw_q_tls",
    "extract",
    "condition_number",
    "CONDITION_WARNING",
    "CHUNK_SIZE",
]

CONDITION_WARNING = 1e6
CHUNK_SIZE = 2048
_MAX_REDRAW_ROUNDS = 10_000


@dataclass
class ExtractionResult:
    estimates: dict
    samples_kept: int
    condition_diagnostic: float
    per_sample_tangents: np.ndarray | None = None
    region_scale: np.ndarray = field(default_factory=lambda: np.ones(len(REGIONS)))
    rejected_draws: int = 0
    failed_solves: int = 0

    def means(self) -> np.ndarray:
        return np.array([self.estimates[r].mean for r in REGIONS])

    def stds(self) -> np.ndarray:
        return np.array([self.estimates[r].std for r in REGIONS])

    def unscaled_samples(self) -> np.ndarray | None:
        """Per-sample tangents in solver units (region scale removed)."""
        if self.per_sample_tangents is None:
            return None
        return self.per_sample_tangents / self.region_scale

    def diagnostics(self) -> dict:
        return {
            "samples_kept": int(self.samples_kept),
            "condition_number": _json_float(self.condition_diagnostic),
            "rejected_draws": int(self.rejected_draws),
            "failed_solves": int(self.failed_solves),
        }


def _json_float(v):
    return float(v) if math.isfinite(v) else None


def condition_number(matrix: ParticipationMatrix) -> float:
    """Ratio of largest to smallest singular value (``inf`` if singular)."""
    s = np.linalg.svd(matrix.values, compute_uv=False)
    if s.size < len(REGIONS) or s[-1] == 0:
        return math.inf
    return float(s[0] / s[-1])


def _as_vector(matrix, inverse_q):
    if isinstance(inverse_q, dict):
        missing = [d for d in matrix.rows if d not in inverse_q]
        if missing:
            raise KeyError(f"no loss value for design(s): {', '.join(map(str, missing))}")
        return np.array([inverse_q[d] for d in matrix.rows], dtype=float)
    q = np.asarray(inverse_q, dtype=float)
    if q.shape != (len(matrix),):
        raise ValueError(f"expected {len(matrix)} loss values, got shape {q.shape}")
    return q


def solve_nnls(matrix: ParticipationMatrix, inverse_q, tol=DEFAULT_TOL) -> dict:
    """Non-negative loss tangents best explaining the per-design losses.

    ``inverse_q`` maps each design to its 1/Q_TLS (or is a vector in row
    order). Returns ``{Region: tangent}``.
    """
    q = _as_vector(matrix, inverse_q)
    if not np.all(np.isfinite(q)):
        raise DomainError("loss values must be finite")
    order = _canonical_order(matrix)
    X, ok = nnls_batch(matrix.values[order], q[order][None, :], tol=tol)
    if not ok[0]:
        raise SolverError("active-set NNLS did not converge")
    return dict(zip(REGIONS, map(float, X[0])))


def draw_q_tls(stat: EnsembleStats, n: int, seed: int):
    """``n`` normal draws of Q_TLS for one design, non-positive draws redrawn.

    Returns ``(samples, n_redrawn)``.
    """
    if stat.std_err_q_tls == 0:
        return np.full(n, stat.mean_q_tls), 0
    rng = np.random.default_rng([int(seed)] + stat.design.stream_key())
    q = stat.mean_q_tls + stat.std_err_q_tls * rng.standard_normal(n)
    redrawn = 0
    for _ in range(_MAX_REDRAW_ROUNDS):
        bad = np.flatnonzero(q <= 0)
        if bad.size == 0:
            return q, redrawn
        redrawn += bad.size
        q[bad] = stat.mean_q_tls + stat.std_err_q_tls * rng.standard_normal(bad.size)
    raise SolverError(f"{stat.design}: could not draw positive Q_TLS samples")


def _canonical_order(matrix):
    # row sums inside the solver depend on row order; fix it by design id
    return sorted(range(len(matrix)), key=lambda i: matrix.rows[i])


def _stats_by_design(matrix, stats):
    by_design = {}
    for s in stats:
        if s.design in by_design:
            raise DomainError(f"duplicate ensemble statistics for {s.design}")
        by_design[s.design] = s
    missing = [d for d in matrix.rows if d not in by_design]
    if missing:
        raise KeyError(f"no ensemble statistics for design(s): {', '.join(map(str, missing))}")
    return by_design


def extract(matrix: ParticipationMatrix, stats, config: ExtractionConfig | None = None,
            workers: int = 1, keep_samples: bool = True, bounds: bool = True) -> ExtractionResult:
    """Monte-Carlo surface-loss extraction.

    Parameters
    ----------
    matrix : ParticipationMatrix
    stats : iterable of EnsembleStats
        One entry per matrix row.
    config : ExtractionConfig
    workers : int
        Threads used for the solve stage. Does not change the result.
    keep_samples : bool
        Retain the per-sample tangent array (needed by ``predict_q``).
    bounds : bool
        Classify resolvability and attach upper bounds. With ``False``
        every estimate is marked resolvable and carries no bound.
    """
    from .bounds import classify_estimates

    config = config or ExtractionConfig()
    by_design = _stats_by_design(matrix, stats)
    n = int(config.n_samples)

    matrix = matrix.reordered(sorted(matrix.rows))
    rejected = 0
    columns = []
    for design in matrix.rows:
        q, r = draw_q_tls(by_design[design], n, config.rng_seed)
        columns.append(1.0 / q)
        rejected += r
    inverse_q = np.column_stack(columns)

    A = matrix.values
    chunks = [inverse_q[i:i + CHUNK_SIZE] for i in range(0, n, CHUNK_SIZE)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: nnls_batch(A, c), chunks))
    else:
        parts = [nnls_batch(A, c) for c in chunks]
    X = np.concatenate([p[0] for p in parts])
    ok = np.concatenate([p[1] for p in parts])
    failed = int(np.count_nonzero(~ok))
    if failed == n:
        raise SolverError("every Monte-Carlo sample failed to solve")
    scale = config.scale_vector()
    tangents = X[ok] * scale

    kept = tangents.shape[0]
    mean = tangents.mean(axis=0)
    std = tangents.std(axis=0, ddof=1) if kept > 1 else np.zeros(len(REGIONS))
    constant = np.all(tangents == tangents[0], axis=0)
    mean = np.where(constant, tangents[0], mean)
    std = np.where(constant, 0.0, std)

    cond = condition_number(matrix)
    if cond > CONDITION_WARNING:
        warnings.warn(f"participation matrix is near-degenerate (condition number {cond:.3g})",
                      stacklevel=2)

    raw = {r: (float(mean[r.index]), float(std[r.index])) for r in REGIONS}
    if bounds:
        estimates = classify_estimates(matrix, by_design, raw, config)
    else:
        estimates = {r: LossTangentEstimate(r, m, s, True) for r, (m, s) in raw.items()}
    return ExtractionResult(
        estimates=estimates,
        samples_kept=kept,
        condition_diagnostic=cond,
        per_sample_tangents=tangents if keep_samples else None,
        region_scale=scale,
        rejected_draws=rejected,
        failed_solves=failed,
    )
