"""Active-set (Lawson-Hanson) non-negative least squares.

Solves ``argmin_x ||A x - b||_2`` subject to ``x >= 0`` for many
right-hand sides against one small matrix ``A``. Rows are processed in
lockstep; every per-row quantity is formed with fixed-order elementwise
arithmetic, so a row's answer does not depend on which other rows share
its batch. That is what lets the Monte-Carlo driver chunk and parallelise
freely while staying bit-reproducible.
"""

from __future__ import annotations

import numpy as np

from .core import SolverError

__all__ = ["nnls", "nnls_batch", "kkt_violation"]

DEFAULT_TOL = 1e-12


def _rowdot(X, M):
    """``X @ M`` with a fixed summation order per output element.

    X : (k, p), M : (p, q)
    """
    out = X[:, 0, None] * M[0]
    for i in range(1, X.shape[1]):
        out = out + X[:, i, None] * M[i]
    return out


def _passive_solver(As, mask):
    """Transposed pseudo-inverse of ``As`` restricted to the passive columns."""
    sub = As * mask
    # SVD round-off leaves ~eps entries in rows of excluded columns
    return np.linalg.pinv(sub).T * mask


def nnls_batch(A, B, tol=DEFAULT_TOL, max_iter=None):
    """Solve one NNLS problem per row of ``B``.

    Parameters
    ----------
    A : array_like, shape (m, n)
    B : array_like, shape (k, m)
        One right-hand side per row.
    tol : float
        Stationarity tolerance relative to the largest component of
        ``A.T @ b`` (columns normalised).
    max_iter : int, optional
        Cap on outer iterations, default ``3 * n``.

    Returns
    -------
    X : ndarray, shape (k, n)
    converged : ndarray of bool, shape (k,)
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected matrix")
    if B.ndim != 2 or B.shape[1] != A.shape[0]:
        raise ValueError(f"right-hand sides must have shape (k, {A.shape[0]}), got {B.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise ValueError("non-finite input")
    m, n = A.shape
    k = B.shape[0]
    if max_iter is None:
        max_iter = 3 * n

    norms = np.sqrt(np.sum(A * A, axis=0))
    scale = np.where(norms > 0, norms, 1.0)
    As = A / scale
    AsT = As.T.copy()

    X = np.zeros((k, n))
    P = np.zeros((k, n), dtype=bool)
    gtol = tol * np.max(np.abs(_rowdot(B, As)), axis=1, initial=0.0)
    active = gtol > 0
    converged = ~active
    solvers = {}
    bits = 1 << np.arange(n)

    def passive_solution(idx):
        Z = np.zeros((len(idx), n))
        codes = (P[idx] * bits).sum(axis=1)
        for code in np.unique(codes):
            sel = idx[codes == code]
            if code not in solvers:
                solvers[code] = _passive_solver(As, P[sel[0]])
            Z[codes == code] = _rowdot(B[sel], solvers[code])
        return Z

    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        W = _rowdot(B[idx] - _rowdot(X[idx], AsT), As)
        cand = ~P[idx] & (W > gtol[idx, None])
        done = ~cand.any(axis=1)
        converged[idx[done]] = True
        active[idx[done]] = False
        idx, W, cand = idx[~done], W[~done], cand[~done]
        if idx.size == 0:
            break
        j = np.argmax(np.where(cand, W, -np.inf), axis=1)
        P[idx, j] = True

        inner = idx
        for _ in range(n + 1):
            if inner.size == 0:
                break
            Z = passive_solution(inner)
            Pi = P[inner]
            ok = np.all(np.where(Pi, Z > 0, True), axis=1)
            X[inner[ok]] = Z[ok]
            inner, Z, Pi = inner[~ok], Z[~ok], Pi[~ok]
            if inner.size == 0:
                break
            Xi = X[inner]
            blocking = Pi & (Z <= 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(blocking, Xi / (Xi - Z), np.inf)
            alpha = np.min(ratio, axis=1)
            Xi = Xi + alpha[:, None] * (Z - Xi)
            drop = Pi & ((Xi <= 0) | (np.arange(n) == np.argmin(ratio, axis=1)[:, None]))
            Xi[drop] = 0.0
            X[inner] = Xi
            P[inner] = Pi & ~drop
        else:
            # inner loop failed to settle: leave those rows unconverged
            active[inner] = False

    X = X / scale
    return X, converged


def nnls(A, b, tol=DEFAULT_TOL):
    """Single right-hand-side NNLS. Raises :class:`SolverError` if the
    active-set iteration does not converge."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 1:
        raise ValueError("expected vector")
    X, ok = nnls_batch(A, b[None, :], tol=tol)
    if not ok[0]:
        raise SolverError("active-set NNLS did not converge")
    return X[0]


def kkt_violation(A, b, x):
    """Largest KKT residual of a candidate NNLS solution.

    With gradient ``g = A.T (A x - b)``: components with ``x > 0`` must
    have ``g = 0`` and components with ``x = 0`` must have ``g >= 0``.
    Primal infeasibility (negative ``x``) is counted too.
    """
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    g = A.T @ (A @ x - np.asarray(b, dtype=float))
    stat = np.where(x > 0, np.abs(g), np.maximum(0.0, -g))
    return float(max(np.max(stat, initial=0.0), np.max(-x, initial=0.0)))
