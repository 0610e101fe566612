"""Synthetic resonator measurements from known loss tangents.

Used as the independent oracle for round-trip checks: forward model ->
measured Q pairs -> ensemble statistics -> extraction -> compare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import REGIONS, DomainError, ParticipationMatrix, ResonatorMeasurement
from .predict import forward_loss

__all__ = ["SynthSpec", "generate", "invert_q_tls"]


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic dataset.

    ``q_hp`` is a fixed high-power Q shared by every resonator, or
    ``None``/``inf`` for no power dependence.
    """

    matrix: ParticipationMatrix
    true_tangents: dict
    n_per_design: int = 30
    relative_noise: float = 0.05
    q_hp: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_per_design < 1:
            raise DomainError("n_per_design must be at least 1")
        if not 0 <= self.relative_noise < 1:
            raise DomainError("relative_noise must be in [0, 1)")
        if self.q_hp is not None and not self.q_hp > 0:
            raise DomainError("q_hp must be positive")
        if any(self.true_tangents.get(r, 0.0) < 0 for r in REGIONS):
            raise DomainError("true tangents must be non-negative")


def invert_q_tls(q_tls: float, q_hp: float) -> float:
    """Low-power Q that yields ``q_tls`` given ``q_hp``."""
    if math.isinf(q_hp):
        return q_tls
    return 1.0 / (1.0 / q_tls + 1.0 / q_hp)


def generate(spec: SynthSpec) -> list[ResonatorMeasurement]:
    """Synthetic measurements, ``n_per_design`` per matrix row.

    Q_TLS gets mean-preserving lognormal noise whose relative standard
    deviation equals ``relative_noise``. Q_HP is noise-free.
    """
    q_hp = math.inf if spec.q_hp is None else float(spec.q_hp)
    rng = np.random.default_rng(spec.rng_seed)
    sigma = math.sqrt(math.log1p(spec.relative_noise**2))
    out = []
    for design in spec.matrix.rows:
        loss = forward_loss(spec.matrix.row(design), spec.true_tangents)
        if loss == 0:
            raise DomainError(f"{design}: zero forward loss, Q_TLS is unbounded")
        true_q = 1.0 / loss
        if sigma > 0:
            factors = np.exp(sigma * rng.standard_normal(spec.n_per_design) - 0.5 * sigma**2)
        else:
            factors = np.ones(spec.n_per_design)
        for i, f in enumerate(factors):
            q = true_q * float(f)
            out.append(ResonatorMeasurement(design, f"s{i:03d}", invert_q_tls(q, q_hp), q_hp))
    return out
