"""Independent NNLS oracles used only by the tests."""

import itertools

import numpy as np


def objective(A, b, x):
    r = A @ x - b
    return float(r @ r)


def nnls_enumerate(A, b):
    """Exhaustive search over supports: least squares on each column subset,
    keep the best primal-feasible candidate."""
    n = A.shape[1]
    best, best_x = np.inf, np.zeros(n)
    for k in range(n + 1):
        for cols in itertools.combinations(range(n), k):
            x = np.zeros(n)
            if cols:
                sol, *_ = np.linalg.lstsq(A[:, cols], b, rcond=None)
                if np.any(sol < 0):
                    continue
                x[list(cols)] = sol
            f = objective(A, b, x)
            if f < best:
                best, best_x = f, x
    return best_x, best


def nnls_coordinate_descent(A, b, sweeps=200_000, tol=1e-15):
    """Cyclic exact coordinate minimisation with projection onto x >= 0."""
    n = A.shape[1]
    G = A.T @ A
    c = A.T @ b
    x = np.zeros(n)
    for _ in range(sweeps):
        delta = 0.0
        for j in range(n):
            if G[j, j] == 0:
                continue
            new = max(0.0, x[j] - (G[j] @ x - c[j]) / G[j, j])
            delta = max(delta, abs(new - x[j]))
            x[j] = new
        if delta <= tol * max(1.0, np.max(np.abs(x))):
            break
    return x, objective(A, b, x)


def grid_search_2d(A, b, hi, steps=2001):
    """Dense grid over [0, hi]^2, refined twice around the best point."""
    lo = np.zeros(2)
    width = np.asarray(hi, dtype=float)
    best = None
    for _ in range(3):
        g0 = np.linspace(lo[0], lo[0] + width[0], steps)
        g1 = np.linspace(lo[1], lo[1] + width[1], steps)
        X0, X1 = np.meshgrid(g0, g1, indexing="ij")
        R = A[:, 0, None, None] * X0 + A[:, 1, None, None] * X1 - b[:, None, None]
        F = np.sum(R * R, axis=0)
        i, j = np.unravel_index(np.argmin(F), F.shape)
        best = np.array([g0[i], g1[j]])
        width = width * 10 / steps
        lo = np.maximum(0.0, best - width / 2)
    return best
