"""Three-card Kuhn poker under seat averaging.

A policy is 12 probabilities, three cards (J, Q, K) for each decision point:

    [0:3]   first player bets on the opening move
    [3:6]   second player calls after a bet
    [6:9]   second player bets after a check
    [9:12]  first player calls after check-then-bet

Ante and bet are one chip each. ``kuhn_eval(a, b)`` is the expected winnings of
``a`` over ``b`` when each is equally likely to act first.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

CARDS = ("J", "Q", "K")
DECISIONS = ("p1_bet", "p2_call", "p2_bet", "p1_call")
COORD_NAMES = tuple(f"{d}_{c}" for d in DECISIONS for c in CARDS)
N_COORDS = 12
DEALS = tuple((a, b) for a in range(3) for b in range(3) if a != b)

P1_BET, P2_CALL, P2_BET, P1_CALL = 0, 3, 6, 9


@dataclass(frozen=True, eq=False)
class KuhnPolicy:
    probs: np.ndarray
    alpha: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "probs", _check_policy(self.probs))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)


def _check_policy(p) -> np.ndarray:
    arr = np.asarray(p.probs if isinstance(p, KuhnPolicy) else p, dtype=float)
    if arr.shape != (N_COORDS,):
        raise ValueError(f"Kuhn policy needs {N_COORDS} probabilities, got shape {arr.shape}")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("Kuhn policy probabilities must lie in [0, 1]")
    return arr


def _p1_value(x: Sequence, y: Sequence):
    # Expected winnings of x seated first against y seated second.
    total = 0
    for a, b in DEALS:
        s = 1 if a > b else -1
        bet, call = x[P1_BET + a], y[P2_CALL + b]
        bet2, call2 = y[P2_BET + b], x[P1_CALL + a]
        after_bet = call * 2 * s + (1 - call)
        after_check = bet2 * (call2 * 2 * s - (1 - call2)) + (1 - bet2) * s
        total += bet * after_bet + (1 - bet) * after_check
    return total / 6


def kuhn_eval(a, b):
    """Seat-averaged expected payoff of ``a`` against ``b``.

    Plain Python arithmetic, so ``fractions.Fraction`` inputs give exact results.
    """
    if _is_exact(a) and _is_exact(b):
        return (_p1_value(a, b) - _p1_value(b, a)) / 2
    a, b = _check_policy(a), _check_policy(b)
    return float(_p1_value(a, b) - _p1_value(b, a)) / 2


def _is_exact(p) -> bool:
    return isinstance(p, (list, tuple)) and all(isinstance(v, (Fraction, int)) for v in p)


def kuhn_payoffs(X, Y) -> np.ndarray:
    """``kuhn_eval(X[i], Y[j])`` for all i, j, vectorised."""
    x = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_2d(np.asarray(Y, dtype=float))
    return 0.5 * (_p1_table(x, y) - _p1_table(y, x).T)


def _p1_table(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros((len(x), len(y)))
    for a, b in DEALS:
        s = 1.0 if a > b else -1.0
        bet = x[:, P1_BET + a]
        call2 = x[:, P1_CALL + a]
        call = y[:, P2_CALL + b]
        bet2 = y[:, P2_BET + b]
        # bet * (1 + call * (2s - 1))
        out += bet[:, None] + np.outer(bet, call * (2 * s - 1))
        # (1 - bet) * (s + bet2 * (call2 * (2s + 1) - 1 - s))
        out += ((1 - bet) * s)[:, None] + np.outer((1 - bet) * (call2 * (2 * s + 1) - 1 - s), bet2)
    return out / 6


def kuhn_matrix(policies) -> np.ndarray:
    p = np.asarray([_check_policy(q) for q in policies])
    f = kuhn_payoffs(p, p)
    f = 0.5 * (f - f.T)
    np.fill_diagonal(f, 0.0)
    return f


def kuhn_ne(alpha: float) -> KuhnPolicy:
    """Member of the one-parameter equilibrium family, ``0 <= alpha <= 1/3``."""
    if not 0 <= alpha <= 1 / 3 + 1e-15:
        raise ValueError(f"alpha={alpha} outside [0, 1/3]")
    third = 1 / 3
    probs = [
        alpha, 0.0, min(3 * alpha, 1.0),
        0.0, third, 1.0,
        third, 0.0, 1.0,
        0.0, alpha + third, 1.0,
    ]
    return KuhnPolicy(np.array(probs), alpha)


def pure_policies() -> np.ndarray:
    """All 4096 deterministic policies."""
    return np.array(list(itertools.product((0.0, 1.0), repeat=N_COORDS)))


def exploitability(policy) -> float:
    """Best seat-averaged payoff any deterministic policy earns against ``policy``."""
    return float(kuhn_payoffs(pure_policies(), _check_policy(policy)[None, :]).max())


def kuhn_selfplay_gradient(z) -> np.ndarray:
    """``d/dx_c kuhn_eval(x, z)`` at ``x = z`` for every coordinate.

    ``kuhn_eval`` is affine in each single coordinate of its first argument,
    so the partial derivative is exactly the difference between setting that
    coordinate to 1 and to 0.
    """
    z = _check_policy(z)
    hi = np.tile(z, (N_COORDS, 1))
    lo = hi.copy()
    np.fill_diagonal(hi, 1.0)
    np.fill_diagonal(lo, 0.0)
    return (kuhn_payoffs(hi, z[None, :]) - kuhn_payoffs(lo, z[None, :]))[:, 0]


def rational_boundary(center, tol: float = 1e-12) -> np.ndarray:
    """Mask of coordinates pinned at 0 or 1 with the self-play gradient pushing outward."""
    z = _check_policy(center)
    g = kuhn_selfplay_gradient(z)
    return ((z == 0.0) & (g < -tol)) | ((z == 1.0) & (g > tol))


def kuhn_sample_boundary(
    center,
    sigma: float = 0.05,
    count: int = 300,
    seed: int = 0,
    clamped: np.ndarray | None = None,
) -> np.ndarray:
    """Gaussian perturbations of the free coordinates of ``center``.

    Coordinates in ``clamped`` (default: :func:`rational_boundary`) are copied
    unchanged; the rest get N(0, sigma^2) noise and are clipped to [0, 1].
    Returns shape ``(count, 12)``.
    """
    z = _check_policy(center)
    mask = rational_boundary(z) if clamped is None else np.asarray(clamped, dtype=bool)
    free = np.flatnonzero(~mask)
    rng = np.random.default_rng(seed)
    out = np.tile(z, (count, 1))
    noise = rng.normal(0.0, sigma, size=(count, len(free))) if sigma > 0 else 0.0
    out[:, free] = np.clip(out[:, free] + noise, 0.0, 1.0)
    return out
