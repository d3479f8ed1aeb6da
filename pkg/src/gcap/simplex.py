"""Dense two-phase simplex method with Bland's rule.

Solves  maximize c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    value: float
    status: str  # "optimal", "infeasible" or "unbounded"


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _run(T: np.ndarray, basis: list[int], allowed: int, max_iter: int) -> str:
    """Maximize the objective held in the last row as reduced costs (row stores -c)."""
    m = T.shape[0] - 1
    for _ in range(max_iter):
        obj = T[-1, :allowed]
        entering = next((j for j in range(allowed) if obj[j] < -PIVOT_TOL), None)
        if entering is None:
            return "optimal"
        col = T[:m, entering]
        best, leave = None, None
        for r in range(m):
            if col[r] > PIVOT_TOL:
                ratio = T[r, -1] / col[r]
                # Bland: smallest ratio, ties broken by smallest basic index
                if best is None or ratio < best - 1e-15 or (abs(ratio - best) <= 1e-15 and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            return "unbounded"
        _pivot(T, basis, leave, entering)
    raise LPError("simplex iteration limit reached")


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    n = len(c)
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = len(b_ub), len(b_eq)
    m = m_ub + m_eq
    # standard form: [A_ub I; A_eq 0] [x; slack] = b, rows flipped so b >= 0
    A = np.zeros((m, n + m_ub))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    n_std = A.shape[1]

    # phase 1: one artificial per row, minimize their sum
    T = np.zeros((m + 1, n_std + m + 1))
    T[:m, :n_std] = A
    T[:m, n_std : n_std + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n_std, n_std + m))
    T[-1, :] = -T[:m, :].sum(axis=0)
    T[-1, n_std : n_std + m] = 0
    status = _run(T, basis, n_std + m, max_iter)
    if status != "optimal" or T[-1, -1] < -1e-9:
        return LPResult(np.full(n, np.nan), float("nan"), "infeasible")
    # drive remaining artificials out of the basis
    for r in range(m):
        if basis[r] >= n_std:
            col = int(np.argmax(np.abs(T[r, :n_std])))
            if abs(T[r, col]) > 1e-9:
                _pivot(T, basis, r, col)
    keep = [r for r in range(m) if basis[r] < n_std]
    T2 = np.zeros((len(keep) + 1, n_std + 1))
    T2[:-1, :n_std] = T[keep, :n_std]
    T2[:-1, -1] = T[keep, -1]
    basis2 = [basis[r] for r in keep]
    # phase 2 objective row: -c expressed in the current basis
    T2[-1, :n] = -c
    for r, j in enumerate(basis2):
        if T2[-1, j] != 0:
            T2[-1] -= T2[-1, j] * T2[r]
    status = _run(T2, basis2, n_std, max_iter)
    if status != "optimal":
        return LPResult(np.full(n, np.nan), float("inf"), status)
    # recompute the basic solution from the original data to shed pivoting error
    x = np.zeros(n_std)
    B = A[:, basis2]
    x[basis2] = np.linalg.lstsq(B, b, rcond=None)[0]
    if np.any(x < -1e-9) or np.abs(A @ x - b).max() > 1e-9 * max(1.0, np.abs(b).max()):
        for r, j in enumerate(basis2):
            x[j] = T2[r, -1]
    x = np.clip(x, 0, None)
    return LPResult(x[:n], float(c @ x[:n]), "optimal")


def maximin(M: np.ndarray, d: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """max t over distributions a subject to (M a)_i >= t d_i for every row i.

    ``d`` defaults to ones, giving max_a min_i (M a)_i. Entries of d must be positive.
    """
    M = np.asarray(M, dtype=float)
    k, n = M.shape
    d = np.ones(k) if d is None else np.asarray(d, dtype=float)
    # shifting M by s*d shifts t by s and keeps t >= 0 valid
    shift = min(0.0, float((M / d[:, None]).min()))
    Ms = M - shift * d[:, None]
    scale = max(float(np.abs(Ms).max()), 1e-300)
    Ms = Ms / scale
    c = np.zeros(n + 1)
    c[-1] = 1
    A_ub = np.hstack([-Ms, d[:, None]])
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1
    res = linprog_max(c, A_ub, np.zeros(k), A_eq, np.ones(1))
    if res.status != "optimal":
        raise LPError(f"maximin LP is {res.status}")
    a = res.x[:n] / res.x[:n].sum()
    return float(np.min((Ms @ a) / d)) * scale + shift, a


def minimax(M: np.ndarray, d: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """min over distributions y of max_j sum_i y_i M_ij / sum_i y_i d_i; the dual of ``maximin``.

    Written as an LP in z = y / (y.d): min v s.t. z M <= v, z.d = 1, z >= 0.
    """
    M = np.asarray(M, dtype=float)
    k, n = M.shape
    d = np.ones(k) if d is None else np.asarray(d, dtype=float)
    shift = min(0.0, float((M / d[:, None]).min()))
    Ms = M - shift * d[:, None]
    scale = max(float(np.abs(Ms).max()), 1e-300)
    Ms = Ms / scale
    # maximize -v with v >= 0 (valid since Ms >= 0)
    c = np.zeros(k + 1)
    c[-1] = -1
    A_ub = np.hstack([Ms.T, -np.ones((n, 1))])
    A_eq = np.zeros((1, k + 1))
    A_eq[0, :k] = d
    res = linprog_max(c, A_ub, np.zeros(n), A_eq, np.ones(1))
    if res.status != "optimal":
        raise LPError(f"minimax LP is {res.status}")
    z = res.x[:k]
    return float(np.max(z @ Ms)) * scale + shift, z / z.sum()
