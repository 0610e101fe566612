"""Resolvability test and upper bounds for loss tangents lost in the noise.

A region's bound is the largest tangent that, added to the smallest
plausible contribution of the other regions (``mean - 2 std``, clamped at
zero), still reproduces the most pessimistic measured loss of the design
that accentuates it, ``1 / (mean_Q - std_err_Q)``.
"""

from __future__ import annotations

import math

from .core import (
    REGIONS,
    BoundError,
    DomainError,
    EnsembleStats,
    LossTangentEstimate,
    ParticipationMatrix,
    Region,
    ResolvabilityRule,
)

__all__ = ["is_resolvable", "upper_bound", "two_sigma_bound", "classify_estimates"]


def is_resolvable(mean: float, std: float, rule: ResolvabilityRule | None = None) -> bool:
    rule = rule or ResolvabilityRule()
    if mean < 0 or std < 0:
        raise DomainError("mean and std must be non-negative")
    if mean == 0:
        return False
    if mean - rule.k_sigma * std < 0:
        return False
    if rule.std_exceeds_mean and std > mean:
        return False
    return True


def _mean_std(value):
    if isinstance(value, LossTangentEstimate):
        return value.mean, value.std
    mean, std = value
    return float(mean), float(std)


def upper_bound(matrix: ParticipationMatrix, stats: EnsembleStats, estimates, target: Region,
                clamp: bool = True, region_scale=None, k_sigma: float = 2.0) -> float:
    """Upper bound on ``target``'s loss tangent.

    Parameters
    ----------
    matrix : ParticipationMatrix
        Must contain exactly one design accentuating ``target``.
    stats : EnsembleStats
        Measured statistics of that design.
    estimates : mapping
        ``Region -> LossTangentEstimate`` or ``Region -> (mean, std)`` for
        the other regions.
    clamp : bool
        Floor each other-region minimum at zero. Without it a negative
        ``mean - 2 std`` adds loss budget and loosens the bound.
    region_scale : mapping, optional
        Per-region factors already applied to ``estimates``; removed
        before use and reapplied to the result.
    """
    design = matrix.accentuating_row(target)
    if stats.design != design:
        raise DomainError(f"statistics are for {stats.design}, expected {design}")
    row = matrix.row(design)
    p_target = float(row[target.index])
    if not p_target > 0:
        raise DomainError(f"{design} has no {target} participation")
    if stats.mean_q_tls <= stats.std_err_q_tls:
        raise DomainError(f"{design}: mean Q_TLS does not exceed its standard error")

    scale = {r: 1.0 for r in REGIONS}
    if region_scale is not None:
        scale.update(region_scale)

    budget = 1.0 / (stats.mean_q_tls - stats.std_err_q_tls)
    for region in REGIONS:
        if region is target:
            continue
        mean, std = _mean_std(estimates[region])
        floor = (mean - k_sigma * std) / scale[region]
        if clamp:
            floor = max(0.0, floor)
        budget -= float(row[region.index]) * floor
    if not budget > 0:
        raise BoundError(f"{target} bound not meaningful: other regions explain the measured loss of {design}")
    return scale[target] * budget / p_target


def two_sigma_bound(mean: float, std: float, k_sigma: float = 2.0) -> float:
    return mean + k_sigma * std


def classify_estimates(matrix, stats_by_design, raw, config) -> dict:
    """Turn raw ``{Region: (mean, std)}`` into final estimates.

    Unresolvable regions get the accentuating-design bound; when that is
    unavailable or not meaningful, the Monte-Carlo ``mean + 2 std`` is
    used instead.
    """
    rule = config.resolvability_rule
    out = {}
    for region in REGIONS:
        mean, std = raw[region]
        mean = max(mean, 0.0)
        if is_resolvable(mean, std, rule):
            out[region] = LossTangentEstimate(region, mean, std, True)
            continue
        bound = None
        try:
            design = matrix.accentuating_row(region)
            bound = upper_bound(matrix, stats_by_design[design], raw, region,
                                region_scale=config.region_scale)
        except (KeyError, BoundError, DomainError):
            fallback = two_sigma_bound(mean, std)
            if fallback > 0 and math.isfinite(fallback):
                bound = fallback
        if bound is None:
            raise BoundError(f"no positive upper bound obtainable for {region}")
        out[region] = LossTangentEstimate(region, mean, std, False, bound)
    return out
