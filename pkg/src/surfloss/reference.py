"""Published loss tangents for the four bundled device sets.

Each entry is ``(mean, std)`` for resolved regions and ``(None, bound)``
for regions only reported as an upper bound.
"""

from .core import REGIONS, Region

# Per-column display multipliers of the published table.
DISPLAY_SCALE = {Region.MS: 1e-4, Region.SA: 1e-3, Region.MA: 1e-3, Region.Si: 1e-7}
DISPLAY_EXPONENT = {Region.MS: -4, Region.SA: -3, Region.MA: -3, Region.Si: -7}

PUBLISHED = {
    "tin": {
        Region.MS: (4.6e-4, 2.4e-4),
        Region.SA: (1.7e-3, 0.4e-3),
        Region.MA: (3.3e-3, 0.4e-3),
        Region.Si: (2.6e-7, 0.4e-7),
    },
    "tin_hf": {
        Region.MS: (2.7e-4, 3.0e-4),
        Region.SA: (None, 1.2e-3),
        Region.MA: (3.5e-3, 1.2e-3),
        Region.Si: (2.8e-7, 0.6e-7),
    },
    "al": {
        Region.MS: (None, 3.2e-4),
        Region.SA: (None, 2.9e-3),
        Region.MA: (29.4e-3, 2.9e-3),
        Region.Si: (2.6e-7, 0.8e-7),
    },
    "al_hf": {
        Region.MS: (None, 1.3e-4),
        Region.SA: (None, 3.5e-3),
        Region.MA: (32.7e-3, 3.6e-3),
        Region.Si: (1.3e-7, 1.7e-7),
    },
}


def reference_tangents(name: str) -> dict:
    """A single tangent per region for ``name``, usable as synthetic ground truth.

    Bounded regions take the bound value itself.
    """
    table = PUBLISHED[name]
    return {r: (table[r][0] if table[r][0] is not None else table[r][1]) for r in REGIONS}


def published_standard_errors(name: str):
    """Per-design standard errors of 1/Q_TLS whose first-order propagation
    through the matrix best reproduces the published spreads.

    Solves the variance system ``std_x**2 = (P^-1)**2 @ var_loss`` for
    ``var_loss >= 0`` over the regions reported with a spread.
    Returns ``(matrix, true_loss, loss_std_err)`` in matrix row order.
    """
    import numpy as np

    from .ingest import bundled_matrix
    from .nnls import nnls

    matrix = bundled_matrix(name)
    truth = reference_tangents(name)
    t = np.array([truth[r] for r in REGIONS])
    loss = matrix.values @ t
    inv2 = np.linalg.inv(matrix.values) ** 2
    rows = [r.index for r in REGIONS if PUBLISHED[name][r][0] is not None]
    target = np.array([PUBLISHED[name][REGIONS[i]][1] ** 2 for i in rows])
    # rescale both sides so the solver sees O(1) numbers
    var = nnls(inv2[rows] * (loss**2), target) * loss**2
    return matrix, loss, np.sqrt(var)


def published_measurements(name: str, n_per_design: int = 10, q_hp: float = 1e7):
    """Deterministic measurement set consistent with the published table.

    Each design gets ``n_per_design`` resonators whose Q_TLS values have
    exactly the model mean and a sample spread matching
    :func:`published_standard_errors`: values sit symmetrically at
    ``mean +/- c * spread`` (plus one at the mean when ``n`` is odd), the
    narrowest placement that keeps wide spreads positive. No RNG.
    """
    import math

    import numpy as np

    from .core import ResonatorMeasurement

    matrix, loss, loss_se = published_standard_errors(name)
    half = n_per_design // 2
    z = np.zeros(n_per_design)
    if half:
        c = math.sqrt((n_per_design - 1) / (2 * half))
        z[: 2 * half] = np.tile([c, -c], half)
    out = []
    for design, l, se in zip(matrix.rows, loss, loss_se):
        q = 1.0 / l
        q_se = se / l**2
        spread = q_se * math.sqrt(n_per_design)
        for i, zi in enumerate(z):
            q_tls = q + spread * zi
            if q_tls <= 0:
                raise ValueError(f"{design}: spread too wide for {n_per_design} resonators")
            q_lp = 1.0 / (1.0 / q_tls + 1.0 / q_hp)
            out.append(ResonatorMeasurement(design, f"t{i:03d}", q_lp, q_hp))
    return out
