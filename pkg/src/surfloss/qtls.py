"""TLS-limited quality factor and per-design ensemble statistics."""

from __future__ import annotations

import math

import numpy as np

from .core import DomainError, EmptyEnsembleError, EnsembleStats, NonTLSLimitedError

__all__ = ["q_tls", "ensemble_stats", "all_ensemble_stats", "split_valid"]


def q_tls(q_lp: float, q_hp: float) -> float:
    """TLS-limited quality factor, ``1 / (1/q_lp - 1/q_hp)``.

    ``q_hp`` may be ``inf`` (no power dependence), giving ``q_lp`` back.
    """
    if not (q_lp > 0 and q_hp > 0) or math.isinf(q_lp):
        raise DomainError(f"quality factors must be positive and q_lp finite, got q_lp={q_lp}, q_hp={q_hp}")
    if q_hp <= q_lp:
        raise NonTLSLimitedError(f"q_hp={q_hp} <= q_lp={q_lp}: no TLS-limited loss to isolate")
    if math.isinf(q_hp):
        return float(q_lp)
    return 1.0 / (1.0 / q_lp - 1.0 / q_hp)


def split_valid(measurements):
    """Partition records into ``(valid, flagged)`` lists."""
    valid, flagged = [], []
    for m in measurements:
        (valid if m.valid else flagged).append(m)
    return valid, flagged


def ensemble_stats(measurements, design, strict: bool = False) -> EnsembleStats:
    """Mean Q_TLS and its standard error for one design.

    Flagged records are skipped unless ``strict`` is set, in which case
    any flagged record for ``design`` raises.
    """
    records = [m for m in measurements if m.design == design]
    valid, flagged = split_valid(records)
    if strict and flagged:
        bad = ", ".join(f"{m.resonator_id} ({m.problem})" for m in flagged)
        raise DomainError(f"{design}: flagged measurements in strict mode: {bad}")
    if not valid:
        raise EmptyEnsembleError(f"{design}: no valid measurements")
    # sorted so the float reduction is independent of input order
    values = np.sort([q_tls(m.q_lp, m.q_hp) for m in valid])
    n = len(values)
    mean = float(np.mean(values))
    if n == 1 or values[0] == values[-1]:
        mean = float(values[0])
        std_err = 0.0
    else:
        std_err = float(np.std(values, ddof=1) / math.sqrt(n))
    return EnsembleStats(design, mean, std_err, n)


def all_ensemble_stats(measurements, designs, strict: bool = False) -> list[EnsembleStats]:
    return [ensemble_stats(measurements, d, strict=strict) for d in designs]
