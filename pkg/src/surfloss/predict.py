"""Forward loss model, predicted-vs-measured Q_TLS and per-design loss budgets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import REGIONS, DesignId, DomainError, Region

__all__ = ["PredictedQ", "LossBudget", "forward_loss", "predict_q", "loss_budget"]


@dataclass(frozen=True)
class PredictedQ:
    """Predicted Q_TLS for one design. ``mean_q_tls`` is ``inf`` when the
    model assigns that design no loss at all."""

    design: DesignId
    mean_q_tls: float
    std_q_tls: float

    def to_dict(self):
        return {
            "design": self.design.label,
            "material": self.design.material,
            "process": self.design.process,
            "mean_q_tls": _finite_or_none(self.mean_q_tls),
            "std_q_tls": _finite_or_none(self.std_q_tls),
        }


@dataclass(frozen=True)
class LossBudget:
    """Measured total loss next to the model's per-region decomposition.

    ``total_loss`` is the measured ``1 / mean Q_TLS``; the components come
    from the extracted tangents and need not add up to it.
    """

    design: DesignId
    total_loss: float
    per_region_loss: dict
    predicted_total: float

    @property
    def dominant_region(self) -> Region:
        return max(REGIONS, key=lambda r: self.per_region_loss[r])

    def to_dict(self):
        return {
            "design": self.design.label,
            "material": self.design.material,
            "process": self.design.process,
            "total_loss": self.total_loss,
            "predicted_total": self.predicted_total,
            "per_region_loss": {r.value: self.per_region_loss[r] for r in REGIONS},
        }


def _finite_or_none(v):
    return float(v) if math.isfinite(v) else None


def _vector(values) -> np.ndarray:
    if isinstance(values, dict):
        return np.array([float(values.get(r, 0.0)) for r in REGIONS])
    return np.asarray(values, dtype=float)


def forward_loss(p, tangents) -> float:
    """``sum_r p_r * tan_delta_r`` for one design row."""
    p = _vector(p)
    t = _vector(tangents)
    if np.any(p < 0) or np.any(t < 0):
        raise DomainError("participations and tangents must be non-negative")
    return float(_sequential_dot(t[None, :], p)[0])


def _sequential_dot(T, p):
    # region-order accumulation, shared by the scalar and per-sample paths
    out = T[:, 0] * p[0]
    for i in range(1, len(p)):
        out = out + T[:, i] * p[i]
    return out


def predict_q(matrix, result) -> list[PredictedQ]:
    """Predicted Q_TLS per design, propagated through the Monte-Carlo samples.

    Falls back to first-order propagation of the per-region mean/std when
    ``result`` kept no samples.
    """
    samples = result.unscaled_samples()
    out = []
    for design in matrix.rows:
        p = matrix.row(design)
        if samples is not None:
            loss = _sequential_dot(samples, p)
            positive = loss > 0
            if not positive.any():
                warnings.warn(f"{design}: model predicts zero loss; Q_TLS is unbounded", stacklevel=2)
                out.append(PredictedQ(design, math.inf, 0.0))
                continue
            if not positive.all():
                warnings.warn(f"{design}: {np.count_nonzero(~positive)} samples with zero loss skipped",
                              stacklevel=2)
            q = 1.0 / loss[positive]
            if np.all(q == q[0]):
                mean, std = float(q[0]), 0.0
            else:
                mean = float(q.mean())
                std = float(q.std(ddof=1)) if q.size > 1 else 0.0
        else:
            means = result.means() / result.region_scale
            stds = result.stds() / result.region_scale
            loss = forward_loss(p, means)
            if loss == 0:
                warnings.warn(f"{design}: model predicts zero loss; Q_TLS is unbounded", stacklevel=2)
                out.append(PredictedQ(design, math.inf, 0.0))
                continue
            mean = 1.0 / loss
            std = math.sqrt(float(np.sum((p * stds) ** 2))) / loss**2
        out.append(PredictedQ(design, mean, std))
    return out


def loss_budget(matrix, result, measured) -> list[LossBudget]:
    """Per-design measured loss and predicted per-region components."""
    by_design = {s.design: s for s in measured}
    missing = [d for d in matrix.rows if d not in by_design]
    if missing:
        raise KeyError(f"no measured statistics for design(s): {', '.join(map(str, missing))}")
    means = result.means() / result.region_scale
    out = []
    for design in matrix.rows:
        p = matrix.row(design)
        parts = {r: float(p[r.index] * means[r.index]) for r in REGIONS}
        out.append(LossBudget(design, 1.0 / by_design[design].mean_q_tls, parts,
                              float(math.fsum(parts.values()))))
    return out
