"""Reading trade-offs out of disc-game embeddings.

Linear maps from agent parameters to embedding planes, the sparsest in-plane
rotation of those maps, group-averaged (coarse-grained) matrices, attribute
ordered Toeplitz profiles, and the importance / complexity report.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import PTAError
from .matrix import EvaluationMatrix, format_float, reorder
from .pta import (
    DiscEmbedding,
    EmbeddingSet,
    SchurForm,
    complexity,
    importance,
    recovery,
    relative_residual,
    rotation,
)

ANGLE_STEPS = 1800  # 0.1 degree grid over [0, 180)


@dataclass(frozen=True, eq=False)
class LinearFit:
    """Least-squares map ``coords ~ weights @ params + intercept`` per mode.

    ``weights`` has shape (modes, 2, T); ``residuals`` is the relative RMS
    error of each mode's fit, measured against the centred coordinates.
    """

    modes: tuple[int, ...]
    weights: np.ndarray
    intercepts: np.ndarray
    residuals: np.ndarray
    param_names: tuple[str, ...]
    dropped: tuple[int, ...] = ()

    def slot(self, mode: int) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise KeyError(f"mode {mode} not in fit (modes {self.modes})") from None

    def predict(self, params: np.ndarray, mode: int) -> np.ndarray:
        s = self.slot(mode)
        return np.asarray(params, dtype=float) @ self.weights[s].T + self.intercepts[s]


class RankDeficientError(PTAError, ValueError):
    """Design matrix of a linear fit does not have full column rank."""


def fit_linear_map(
    params: np.ndarray,
    embeddings: EmbeddingSet,
    modes: Sequence[int] | None = None,
    param_names: Sequence[str] | None = None,
    drop_constant: bool = False,
) -> LinearFit:
    """Ordinary least squares from ``params`` (N x T) to each mode's coordinates.

    Constant columns make the design rank deficient. With ``drop_constant`` they
    are excluded from the fit and given zero weight; otherwise they raise.
    """
    x = np.asarray(params, dtype=float)
    if x.ndim != 2 or x.shape[0] != embeddings.n_agents:
        raise ValueError(f"params of shape {x.shape} do not match {embeddings.n_agents} agents")
    n, t = x.shape
    modes = tuple(range(len(embeddings))) if modes is None else tuple(modes)
    for k in modes:
        if not 0 <= k < len(embeddings):
            raise IndexError(f"mode {k} out of range ({len(embeddings)} modes)")
    names = tuple(param_names) if param_names is not None else tuple(f"p{j}" for j in range(t))
    constant = np.flatnonzero(np.ptp(x, axis=0) == 0) if n else np.arange(t)
    keep = np.arange(t)
    if drop_constant:
        keep = np.setdiff1d(keep, constant)
    design = np.column_stack([x[:, keep], np.ones(n)])
    if n <= design.shape[1]:
        raise RankDeficientError(f"need more agents ({n}) than fitted parameters plus one ({design.shape[1]})")
    if np.linalg.matrix_rank(design) < design.shape[1]:
        hint = [names[j] for j in constant] if len(constant) and not drop_constant else []
        msg = "design matrix is rank deficient"
        if hint:
            msg += f"; remove constant columns (clamped boundary coordinates?): {hint}"
        raise RankDeficientError(msg)
    weights = np.zeros((len(modes), 2, t))
    intercepts = np.zeros((len(modes), 2))
    residuals = np.zeros(len(modes))
    for s, k in enumerate(modes):
        y = embeddings.modes[k].coords
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        weights[s][:, keep] = coef[:-1].T
        intercepts[s] = coef[-1]
        err = y - design @ coef
        scale = np.linalg.norm(y - y.mean(axis=0))
        if scale == 0:
            scale = np.linalg.norm(y)
        residuals[s] = np.linalg.norm(err) / scale if scale > 0 else 0.0
    dropped = tuple(int(j) for j in constant) if drop_constant else ()
    return LinearFit(modes, weights, intercepts, residuals, names, dropped)


def sparsest_rotation(fit: LinearFit, mode: int) -> tuple[LinearFit, float]:
    """In-plane rotation minimising the L1 norm of one mode's 2 x T weights.

    Exhaustive search over [0, 180) degrees in 0.1 degree steps; ties go to the
    smaller angle. Returns the rotated fit and the angle in radians. Apply the
    same angle with :func:`ptakit.pta.rotate_mode` to keep the embedding in step.
    """
    s = fit.slot(mode)
    w = fit.weights[s]
    thetas = np.arange(ANGLE_STEPS) * (math.pi / ANGLE_STEPS)
    c, sn = np.cos(thetas), np.sin(thetas)
    row0 = c[:, None] * w[0] - sn[:, None] * w[1]
    row1 = sn[:, None] * w[0] + c[:, None] * w[1]
    l1 = np.abs(row0).sum(axis=1) + np.abs(row1).sum(axis=1)
    best = float(l1.min())
    idx = int(np.flatnonzero(l1 <= best + 1e-12 * max(best, 1.0))[0])
    theta = float(thetas[idx])
    g = rotation(theta)
    weights = fit.weights.copy()
    intercepts = fit.intercepts.copy()
    weights[s] = g @ w
    intercepts[s] = g @ fit.intercepts[s]
    return replace(fit, weights=weights, intercepts=intercepts), theta


def trade_off_directions(fit: LinearFit, mode: int) -> np.ndarray:
    """Weight rows scaled to unit length, signed so the largest entry is positive."""
    w = fit.weights[fit.slot(mode)].copy()
    for row in w:
        norm = np.linalg.norm(row)
        if norm > 0:
            row /= norm
            if row[np.argmax(np.abs(row))] < 0:
                row *= -1
    return w


def write_fit_csv(fit: LinearFit, path: str | Path, normalized: bool = False) -> None:
    """One row per (mode, axis): weights per parameter, intercept, residual."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["mode", "axis", *fit.param_names, "intercept", "residual"])
        for s, k in enumerate(fit.modes):
            rows = trade_off_directions(fit, k) if normalized else fit.weights[s]
            for axis in range(2):
                wr.writerow([
                    k, axis, *(format_float(v) for v in rows[axis]),
                    format_float(fit.intercepts[s][axis]), format_float(fit.residuals[s]),
                ])


# --- coarse graining ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusterSummary:
    groups: tuple[str, ...]
    matrix: np.ndarray
    sizes: tuple[int, ...]


def _circular_mean_angle(coords: np.ndarray) -> float:
    m = coords.mean(axis=0)
    return math.atan2(m[1], m[0])


def coarse_grain(
    F: EvaluationMatrix,
    groups: Mapping[str, str],
    embedding: DiscEmbedding | np.ndarray | None = None,
) -> ClusterSummary:
    """Mean advantage between groups; diagonal blocks skip self-pairs.

    Groups are ordered clockwise (decreasing mean angle) when an embedding is
    given, alphabetically otherwise.
    """
    unmapped = [lab for lab in F.labels if lab not in groups]
    if unmapped:
        raise KeyError(f"agents without a group: {unmapped}")
    member = np.array([str(groups[lab]) for lab in F.labels])
    names = sorted(set(member))
    if embedding is not None:
        coords = embedding.coords if isinstance(embedding, DiscEmbedding) else np.asarray(embedding)
        ang = {g: _circular_mean_angle(coords[member == g]) for g in names}
        names.sort(key=lambda g: (-ang[g], g))
    idx = [np.flatnonzero(member == g) for g in names]
    e = F.entries
    out = np.zeros((len(names), len(names)))
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            block = e[np.ix_(ia, ib)]
            if a == b:
                m = len(ia)
                out[a, b] = block.sum() / (m * (m - 1)) if m > 1 else 0.0
            else:
                out[a, b] = block.mean()
    return ClusterSummary(tuple(names), out, tuple(len(i) for i in idx))


def write_cluster_csv(summary: ClusterSummary, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", *summary.groups])
        for g, row in zip(summary.groups, summary.matrix):
            w.writerow([g, *(format_float(v) for v in row)])


# --- attribute profiles ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AttributeProfile:
    attribute: str
    matrix: EvaluationMatrix
    samples: tuple[tuple[float, float], ...]
    toeplitz_deviation: float
    ties: tuple[tuple[str, ...], ...] = ()


def toeplitz_deviation(entries: np.ndarray) -> float:
    """RMS spread of entries about their diagonal means, relative to the RMS off-diagonal entry."""
    a = np.asarray(entries, dtype=float)
    n = len(a)
    total = np.sum(a ** 2) - np.sum(np.diag(a) ** 2)
    if n < 2 or total == 0:
        return 0.0
    spread = 0.0
    for d in range(1, n):
        for diag in (np.diagonal(a, d), np.diagonal(a, -d)):
            spread += np.sum((diag - diag.mean()) ** 2)
    return float(math.sqrt(spread / total))


def attribute_order_profile(
    F: EvaluationMatrix, values: Sequence[float], attribute: str = "attribute"
) -> AttributeProfile:
    """Sort agents by ``values`` (aligned to ``F.labels``) and sample the anti-diagonal.

    Ties in the attribute are broken by label and reported.
    """
    v = np.asarray(values, dtype=float)
    if v.shape != (F.n,):
        raise ValueError(f"{len(v)} attribute values for {F.n} agents")
    perm = sorted(range(F.n), key=lambda i: (v[i], F.labels[i]))
    G = reorder(F, perm)
    sv = v[perm]
    ties = []
    start = 0
    for i in range(1, F.n + 1):
        if i == F.n or sv[i] != sv[start]:
            if i - start > 1:
                ties.append(tuple(G.labels[start:i]))
            start = i
    n = F.n
    samples = sorted(
        (float(sv[i] - sv[n - 1 - i]), float(G.entries[i, n - 1 - i]))
        for i in range(n) if i != n - 1 - i
    )
    return AttributeProfile(attribute, G, tuple(samples), toeplitz_deviation(G.entries), tuple(ties))


def write_profile_csv(profile: AttributeProfile, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gap", "advantage"])
        for gap, adv in profile.samples:
            w.writerow([format_float(gap), format_float(adv)])


# --- report ------------------------------------------------------------------

def report(schur: SchurForm, tolerances: Sequence[float] = (0.05,)) -> dict:
    """Per-mode omega, importance, cumulative recovery and degeneracy group, plus complexity."""
    omegas = schur.omegas
    if len(omegas) == 0:
        imp, rec = np.zeros(0), np.zeros(0)
    else:
        imp, rec = importance(schur), recovery(schur)
    rows = [
        {
            "disc_game": k + 1,
            "omega": float(omegas[k]),
            "importance": float(imp[k]),
            "recovery": float(rec[k]),
            "residual": relative_residual(schur, k + 1),
            "group": schur.group_of(k),
        }
        for k in range(len(omegas))
    ]
    return {
        "n_agents": schur.n_agents,
        "frobenius_norm": schur.source_norm,
        "n_modes": len(omegas),
        "modes": rows,
        "complexity": {format(float(t), "g"): complexity(schur, t) for t in tolerances},
    }


def format_report(rep: dict, limit: int = 10) -> str:
    lines = [f"{'D.G.':>5} {'omega':>12} {'importance':>11} {'recovery':>9} {'group':>6}"]
    for row in rep["modes"][:limit]:
        lines.append(
            f"{row['disc_game']:>5} {row['omega']:>12.6g} {row['importance']:>11.4f} "
            f"{row['recovery']:>9.4f} {row['group']:>6}"
        )
    for tol, r in rep["complexity"].items():
        lines.append(f"complexity @ rel_tol {tol}: {r}")
    return "\n".join(lines)
