"""Transitive/cyclic split of complete evaluation matrices.

For a complete round-robin the least-squares ratings are the row means of
``F``; the transitive part is ``r_i - r_j`` and the cyclic part is what remains.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .matrix import EvaluationMatrix, format_float, frobenius_norm, write_matrix_csv

PURELY_CYCLIC = math.inf
"""Sentinel returned by :func:`intransitivity` when the transitive part vanishes."""


@dataclass(frozen=True)
class Ratings:
    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(zip(self.labels, self.values))


@dataclass(frozen=True)
class HodgeParts:
    transitive: EvaluationMatrix
    cyclic: EvaluationMatrix
    ratings: Ratings


def ratings(F: EvaluationMatrix) -> Ratings:
    return Ratings(F.entries.mean(axis=1), F.labels)


def hodge_decompose(F: EvaluationMatrix) -> HodgeParts:
    if not isinstance(F, EvaluationMatrix):
        F = EvaluationMatrix(F)
    r = ratings(F)
    ft = r.values[:, None] - r.values[None, :]
    fc = F.entries - ft
    # Skew round-off in F carries into F_c, so loosen by the measured residual.
    tol = max(F.skew_tolerance, 1e-12)
    return HodgeParts(
        transitive=EvaluationMatrix(ft, F.labels, tol),
        cyclic=EvaluationMatrix(fc, F.labels, tol),
        ratings=r,
    )


def intransitivity(F: EvaluationMatrix | HodgeParts) -> float:
    """``||F_c|| / ||F_t||``; :data:`PURELY_CYCLIC` when ``F_t`` is zero."""
    parts = F if isinstance(F, HodgeParts) else hodge_decompose(F)
    nt = frobenius_norm(parts.transitive)
    nc = frobenius_norm(parts.cyclic)
    # Row means of a cyclic matrix are zero only up to round-off.
    if nt <= 1e-12 * max(nc, 1e-300):
        return PURELY_CYCLIC
    return nc / nt


def curl(F: EvaluationMatrix, loop: Sequence[int]) -> float:
    """Path sum of advantages around ``loop``, closing back to its first agent."""
    if len(loop) < 3:
        raise ValueError(f"a loop needs at least 3 agents, got {len(loop)}")
    n = F.n
    for i in loop:
        if not 0 <= i < n:
            raise IndexError(f"agent index {i} out of range for N={n}")
    idx = list(loop)
    return float(sum(F.entries[a, b] for a, b in zip(idx, idx[1:] + idx[:1])))


def write_ratings_csv(r: Ratings, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "rating"])
        for lab, v in r:
            w.writerow([lab, format_float(v)])


def write_hodge_parts(parts: HodgeParts, directory: str | Path) -> dict[str, Path]:
    d = Path(directory)
    paths = {
        "transitive": d / "transitive.csv",
        "cyclic": d / "cyclic.csv",
        "ratings": d / "ratings.csv",
    }
    write_matrix_csv(parts.transitive, paths["transitive"])
    write_matrix_csv(parts.cyclic, paths["cyclic"])
    write_ratings_csv(parts.ratings, paths["ratings"])
    return paths


__all__ = [
    "PURELY_CYCLIC",
    "HodgeParts",
    "Ratings",
    "curl",
    "hodge_decompose",
    "intransitivity",
    "ratings",
    "write_hodge_parts",
    "write_ratings_csv",
]
