"""Pairwise outcome logs to win probabilities and log-odds evaluation matrices."""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DisconnectedGraphError, NumericError, ParseError
from .matrix import FITTED_TOL, EvaluationMatrix, format_float

log = logging.getLogger(__name__)

OUTCOME_HEADER = ("agent_a", "agent_b", "wins_a", "wins_b")
DEFAULT_REGULARIZATION = 0.05
DEFAULT_CLAMP = 1e-6


class OutcomeRecord(NamedTuple):
    agent_a: str
    agent_b: str
    wins_a: int
    wins_b: int


@dataclass(frozen=True)
class OutcomeLog:
    records: tuple[OutcomeRecord, ...] = ()

    @classmethod
    def from_records(cls, rows: Iterable[Sequence]) -> OutcomeLog:
        """Merge duplicate pairs; a (b, a) row folds into (a, b) with counts swapped."""
        merged: dict[tuple[str, str], list[int]] = {}
        for n, row in enumerate(rows, start=1):
            a, b, wa, wb = row
            a, b, wa, wb = str(a), str(b), int(wa), int(wb)
            if wa < 0 or wb < 0:
                raise ValueError(f"record {n}: negative win count")
            if wa == 0 and wb == 0:
                raise ValueError(f"record {n}: no games recorded for ({a}, {b})")
            if a == b:
                raise ValueError(f"record {n}: agent {a!r} paired with itself")
            if (b, a) in merged:
                merged[(b, a)][0] += wb
                merged[(b, a)][1] += wa
            else:
                counts = merged.setdefault((a, b), [0, 0])
                counts[0] += wa
                counts[1] += wb
        return cls(tuple(OutcomeRecord(a, b, wa, wb) for (a, b), (wa, wb) in merged.items()))

    @property
    def labels(self) -> tuple[str, ...]:
        """Agents in order of first appearance."""
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.agent_a)
            seen.setdefault(r.agent_b)
        return tuple(seen)

    def __len__(self) -> int:
        return len(self.records)

    def win_counts(self, labels: Sequence[str] | None = None) -> np.ndarray:
        """``W[i, j]`` = number of wins of agent i over agent j."""
        labels = self.labels if labels is None else tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        w = np.zeros((len(labels), len(labels)))
        for r in self.records:
            i, j = index[r.agent_a], index[r.agent_b]
            w[i, j] += r.wins_a
            w[j, i] += r.wins_b
        return w


def load_outcomes(path: str | Path) -> OutcomeLog:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != OUTCOME_HEADER:
            raise ParseError(f"expected header {','.join(OUTCOME_HEADER)}", line=1)
        rows = []
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, found {len(row)}", line=line)
            try:
                wa, wb = int(row[2]), int(row[3])
            except ValueError:
                raise ParseError(f"win counts must be integers: {row[2:]}", line=line) from None
            if wa < 0 or wb < 0:
                raise ParseError("negative win count", line=line)
            if wa == 0 and wb == 0:
                raise ParseError("record with no games", line=line)
            if row[0].strip() == row[1].strip():
                raise ParseError(f"agent {row[0]!r} paired with itself", line=line)
            rows.append((row[0].strip(), row[1].strip(), wa, wb))
    return OutcomeLog.from_records(rows)


def write_outcomes(log_: OutcomeLog, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OUTCOME_HEADER)
        w.writerows(log_.records)


# --- fitting -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WinProbMatrix:
    """Win probabilities with ``probs[i, j] + probs[j, i] = 1``; diagonal 0.5.

    ``observed`` marks pairs with at least one recorded game; ``strengths`` are
    the fitted centred logistic strengths.
    """

    probs: np.ndarray
    labels: tuple[str, ...]
    strengths: np.ndarray
    observed: np.ndarray
    regularization: float
    iterations: int = 0
    source: str = "model"
    meta: dict = field(default_factory=dict)

    def complement_residual(self) -> float:
        return float(np.max(np.abs(self.probs + self.probs.T - 1.0)))


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def comparison_components(counts: np.ndarray, labels: Sequence[str]) -> list[list[str]]:
    games = counts + counts.T
    n_comp, assign = connected_components(csr_matrix(games > 0), directed=False)
    return [[labels[i] for i in np.flatnonzero(assign == c)] for c in range(n_comp)]


def fit_strengths(
    counts: np.ndarray,
    regularization: float = DEFAULT_REGULARIZATION,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> tuple[np.ndarray, int]:
    """Ridge-penalised maximum likelihood for ``p_ij = sigmoid(s_i - s_j)`` by Newton's method.

    Returns the strengths (mean zero) and the number of Newton steps taken.
    Converged once the gradient max-norm is at most ``tol``.
    """
    if regularization <= 0:
        raise ValueError("regularization must be positive")
    w = np.asarray(counts, dtype=float)
    games = w + w.T
    wins = w.sum(axis=1)
    n = len(w)
    s = np.zeros(n)

    def objective(v):
        d = v[:, None] - v[None, :]
        # log sigmoid(d) = -logaddexp(0, -d)
        return float(-(w * np.logaddexp(0.0, -d)).sum() - regularization * (v @ v))

    def gradient(v):
        p = _sigmoid(v[:, None] - v[None, :])
        return wins - (games * p).sum(axis=1) - 2 * regularization * v, p

    obj = objective(s)
    for it in range(1, max_iter + 1):
        g, p = gradient(s)
        if np.max(np.abs(g)) <= tol:
            return s - s.mean(), it - 1
        c = games * p * (1 - p)
        hess = c - np.diag(c.sum(axis=1) + 2 * regularization)
        step = np.linalg.solve(hess, -g)
        t = 1.0
        while True:
            cand = s + t * step
            cand_obj = objective(cand)
            if cand_obj >= obj - 1e-12 * abs(obj) or t < 1e-10:
                break
            t *= 0.5
        s, obj = cand, cand_obj
    g, _ = gradient(s)
    if np.max(np.abs(g)) <= tol:
        return s - s.mean(), max_iter
    raise NumericError(
        f"strength fit did not converge in {max_iter} iterations (|grad|max = {np.max(np.abs(g)):.3e})"
    )


def estimate_probs(
    log_: OutcomeLog,
    regularization: float = DEFAULT_REGULARIZATION,
    observed: str = "model",
    labels: Sequence[str] | None = None,
) -> WinProbMatrix:
    """Complete win-probability matrix from a logistic strength fit.

    With ``observed="model"`` every pair comes from the fitted strengths. With
    ``observed="empirical"`` pairs that were actually played keep their
    Beta(1, 1)-smoothed win frequency ``(w_ij + 1) / (n_ij + 2)`` and only
    unplayed pairs are filled from the model, so cyclic structure in the data
    survives.

    Raises:
        DisconnectedGraphError: if the comparison graph is not connected.
        NumericError: if the Newton iteration fails to converge.
    """
    if observed not in ("model", "empirical"):
        raise ValueError("observed must be 'model' or 'empirical'")
    labels = log_.labels if labels is None else tuple(labels)
    if not labels:
        raise ValueError("outcome log is empty")
    counts = log_.win_counts(labels)
    comps = comparison_components(counts, labels)
    if len(comps) > 1:
        raise DisconnectedGraphError(comps)
    s, iters = fit_strengths(counts, regularization)
    probs = _sigmoid(s[:, None] - s[None, :])
    games = counts + counts.T
    seen = games > 0
    if observed == "empirical":
        emp = (counts + 1.0) / (games + 2.0)
        probs = np.where(seen, emp, probs)
    iu = np.triu_indices(len(labels), 1)
    upper = probs[iu]
    probs = np.full((len(labels), len(labels)), 0.5)
    probs[iu] = upper
    probs[(iu[1], iu[0])] = 1.0 - upper
    return WinProbMatrix(probs, labels, s, seen, regularization, iters, observed)


def logit(p):
    p = np.asarray(p, dtype=float)
    return np.log(p) - np.log1p(-p)


def inverse_logit(x):
    return _sigmoid(np.asarray(x, dtype=float))


def clamp_probs(P: WinProbMatrix | np.ndarray, eps: float = DEFAULT_CLAMP) -> tuple[np.ndarray, int]:
    """Clip to ``[eps, 1 - eps]``; also returns how many off-diagonal entries moved."""
    probs = P.probs if isinstance(P, WinProbMatrix) else np.asarray(P, dtype=float)
    clipped = np.clip(probs, eps, 1.0 - eps)
    off = ~np.eye(len(probs), dtype=bool)
    return clipped, int(np.count_nonzero((clipped != probs) & off))


def logit_link(P: WinProbMatrix, eps: float = DEFAULT_CLAMP) -> EvaluationMatrix:
    """``F_ij = log(p_ij / (1 - p_ij))`` after clamping; built from the upper triangle."""
    probs = P.probs if isinstance(P, WinProbMatrix) else np.asarray(P, dtype=float)
    labels = P.labels if isinstance(P, WinProbMatrix) else ()
    clipped, n_clamped = clamp_probs(probs, eps)
    if n_clamped:
        log.warning("clamped %d probabilities into [%g, %g] before the logit", n_clamped, eps, 1 - eps)
    n = len(clipped)
    iu = np.triu_indices(n, 1)
    f = np.zeros((n, n))
    f[iu] = logit(clipped[iu])
    f[(iu[1], iu[0])] = -f[iu]
    return EvaluationMatrix(f, labels, FITTED_TOL)


def write_strengths_csv(P: WinProbMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "strength"])
        for lab, v in zip(P.labels, P.strengths):
            w.writerow([lab, format_float(v)])


def write_probs_csv(P: WinProbMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *P.labels])
        for lab, row in zip(P.labels, P.probs):
            w.writerow([lab, *(format_float(v) for v in row)])


# --- attributes --------------------------------------------------------------

class AttributeTable:
    """Per-agent attributes loaded from a CSV with a ``label`` column.

    Columns whose nonempty cells all parse as numbers are numeric; empty cells
    are missing (``None``), never zero.
    """

    def __init__(self, rows: dict[str, dict[str, float | str | None]], columns: Sequence[str], numeric: set[str]):
        self.rows = rows
        self.columns = tuple(columns)
        self.numeric = frozenset(numeric)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.rows)

    def is_numeric(self, column: str) -> bool:
        return column in self.numeric

    def _require(self, column: str) -> None:
        if column not in self.columns:
            raise KeyError(f"attribute column {column!r} not found; available: {list(self.columns)}")

    def column(self, column: str, labels: Sequence[str]) -> list:
        """Values of ``column`` aligned to ``labels``; every label must be present."""
        self._require(column)
        missing = [lab for lab in labels if lab not in self.rows]
        if missing:
            raise KeyError(f"labels missing from attribute table: {missing}")
        return [self.rows[lab][column] for lab in labels]

    def numeric_column(self, column: str, labels: Sequence[str]) -> np.ndarray:
        if not self.is_numeric(column):
            self._require(column)
            raise ValueError(f"attribute column {column!r} is not numeric")
        vals = self.column(column, labels)
        gaps = [lab for lab, v in zip(labels, vals) if v is None]
        if gaps:
            raise ValueError(f"attribute {column!r} missing for {gaps}")
        return np.asarray(vals, dtype=float)


def _maybe_float(text: str) -> float | None:
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_attributes(path: str | Path) -> AttributeTable:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "label" not in reader.fieldnames:
            raise ParseError("attribute CSV needs a 'label' column", line=1)
        columns = [c for c in reader.fieldnames if c != "label"]
        raw: dict[str, dict[str, str]] = {}
        for line, row in enumerate(reader, start=2):
            lab = row["label"]
            if lab in raw:
                raise ParseError(f"duplicate label {lab!r}", line=line)
            raw[lab] = {c: (row.get(c) or "").strip() for c in columns}
    numeric = {
        c for c in columns
        if all(_maybe_float(r[c]) is not None for r in raw.values() if r[c] != "")
        and any(r[c] != "" for r in raw.values())
    }
    rows = {
        lab: {
            c: (None if v == "" else (float(v) if c in numeric else v))
            for c, v in r.items()
        }
        for lab, r in raw.items()
    }
    return AttributeTable(rows, columns, numeric)
