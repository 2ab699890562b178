"""Circulant rock-paper-scissors games and fictitious-play populations."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

RPS_ROW = (0, -1, 1)
RPS_PLUS_2_ROW = (0, -1, 1, -1, 1)


def circulant_game(first_row: Sequence[float] = RPS_PLUS_2_ROW) -> np.ndarray:
    """Utility matrix ``U[i, j] = first_row[(j - i) mod n]``; must be skew."""
    row = np.asarray(first_row, dtype=float)
    n = len(row)
    if n == 0 or row[0] != 0:
        raise ValueError("first_row must be nonempty with first_row[0] == 0")
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    u = row[idx]
    if np.any(u + u.T != 0):
        raise ValueError(f"circulant generated by {list(first_row)} is not skew-symmetric")
    return u


def check_mixed(p, n: int | None = None, tol: float = 1e-12) -> np.ndarray:
    q = np.asarray(p, dtype=float)
    if q.ndim != 1 or (n is not None and len(q) != n):
        raise ValueError(f"mixed strategy of shape {q.shape} does not match {n} actions")
    if np.any(q < 0) or abs(q.sum() - 1) > tol:
        raise ValueError("mixed strategy must be nonnegative and sum to 1")
    return q


def mixed_eval(utility: np.ndarray, p, q) -> float:
    u = np.asarray(utility, dtype=float)
    p = check_mixed(p, u.shape[0])
    q = check_mixed(q, u.shape[1])
    return float(p @ u @ q)


def fictitious_play(utility: np.ndarray, steps: int, seed: int) -> np.ndarray:
    """Population grown by fictitious self-play.

    Starts from one mixed strategy drawn from a flat Dirichlet, then appends
    ``steps`` pure best responses to the running average of the population.
    Ties go to the lowest action index. Returns shape ``(steps + 1, n)``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    u = np.asarray(utility, dtype=float)
    n = u.shape[0]
    rng = np.random.default_rng(seed)
    pop = np.zeros((steps + 1, n))
    pop[0] = rng.dirichlet(np.ones(n))
    total = pop[0].copy()
    for t in range(1, steps + 1):
        payoff = u @ (total / t)
        best = int(np.flatnonzero(payoff == payoff.max())[0])
        pop[t, best] = 1.0
        total[best] += 1.0
    return pop


def mixed_matrix(utility: np.ndarray, population: np.ndarray) -> np.ndarray:
    """``F[i, j] = p_i^T U p_j`` for every pair in the population."""
    p = np.asarray(population, dtype=float)
    f = p @ np.asarray(utility, dtype=float) @ p.T
    f = 0.5 * (f - f.T)
    np.fill_diagonal(f, 0.0)
    return f
