"""Colonel Blotto: N troops over K zones with per-zone payouts Z.

A zone goes to whoever commits more troops there; ties pay nobody. The match
is scored 0.5 / 0 / -0.5 by comparing total payouts.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ..errors import EnumerationLimitError

ENUMERATION_LIMIT = 10_000


@dataclass(frozen=True)
class BlottoSpec:
    troops: int
    zones: int
    payouts: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.zones < 1 or self.troops < 0:
            raise ValueError("need zones >= 1 and troops >= 0")
        pay = (1.0,) * self.zones if self.payouts is None else tuple(float(z) for z in self.payouts)
        if len(pay) != self.zones:
            raise ValueError(f"{len(pay)} payouts given for {self.zones} zones")
        if any(z <= 0 for z in pay):
            raise ValueError("payouts must be positive")
        object.__setattr__(self, "payouts", pay)

    @property
    def n_strategies(self) -> int:
        return comb(self.troops + self.zones - 1, self.zones - 1)


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first, *rest)


def blotto_enumerate(spec: BlottoSpec, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """Every allotment of ``spec.troops`` into ``spec.zones`` zones, lexicographic.

    Returns an integer array of shape ``(C(N+K-1, K-1), K)``.
    """
    count = spec.n_strategies
    if count > limit:
        raise EnumerationLimitError(
            f"{count} allotments exceed the enumeration limit of {limit}; "
            "use blotto_sample (Dirichlet sampling) instead"
        )
    return np.array(list(_compositions(spec.troops, spec.zones)), dtype=np.int64).reshape(count, spec.zones)


def _largest_remainder(fracs: np.ndarray, total: int) -> np.ndarray:
    scaled = fracs * total
    base = np.floor(scaled).astype(np.int64)
    short = total - base.sum(axis=1)
    rem = scaled - base
    # Stable sort so equal remainders go to the lowest zone index.
    order = np.argsort(-rem, axis=1, kind="stable")
    for row in range(len(base)):
        base[row, order[row, :short[row]]] += 1
    return base


def blotto_sample(spec: BlottoSpec, count: int, seed: int) -> np.ndarray:
    """``count`` allotments from a flat Dirichlet, rounded to integers summing to N."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    fracs = rng.dirichlet(np.ones(spec.zones), size=count)
    return _largest_remainder(fracs, spec.troops)


def blotto_eval(x, y, payouts) -> float:
    x, y, z = np.asarray(x), np.asarray(y), np.asarray(payouts, dtype=float)
    if not x.shape == y.shape == z.shape:
        raise ValueError(f"zone counts differ: {x.shape}, {y.shape}, payouts {z.shape}")
    margin = float(np.sum(z * np.sign(x - y)))
    return 0.5 * float(np.sign(margin))


def blotto_matrix(allotments: np.ndarray, payouts) -> np.ndarray:
    """Vectorised ``blotto_eval`` over all ordered pairs of ``allotments``."""
    a = np.asarray(allotments)
    z = np.asarray(payouts, dtype=float)
    if a.ndim != 2 or a.shape[1] != len(z):
        raise ValueError(f"allotments of shape {a.shape} do not match {len(z)} payouts")
    margin = np.zeros((len(a), len(a)))
    for k in range(a.shape[1]):
        col = a[:, k]
        margin += z[k] * np.sign(col[:, None] - col[None, :])
    return 0.5 * np.sign(margin)


def blotto_w124(x, troops: int) -> float:
    """Scalar trait totally ordering [1, 2, 4] allotments: x3 + x2 / (N - x3 + 1)."""
    if len(x) != 3:
        raise ValueError("the agglomerated trait is defined for K = 3 only")
    return x[2] + x[1] / (troops - x[2] + 1)
