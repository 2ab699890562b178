"""Evaluation matrices: the skew-symmetric advantage tables every analysis consumes.

An evaluation matrix ``F`` holds ``F[i, j] = f(x_i, x_j)``, the advantage of agent
``i`` over agent ``j``. Units are whatever the evaluator emits (expected payoff,
score, log-odds); no unit metadata is carried.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np

from .errors import MatrixConstructionError, ParseError, ShapeError, SkewValidationError

EXACT_TOL = 1e-9
"""Default skew tolerance for analytically exact evaluators."""

FITTED_TOL = 1e-6
"""Default skew tolerance for fitted or ingested matrices."""


class AgentId(NamedTuple):
    index: int
    label: str


@dataclass(frozen=True)
class AgentPayload:
    """Attribute vector of one agent plus optional text metadata."""

    attributes: np.ndarray
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "attributes", np.asarray(self.attributes, dtype=float))


class SkewReport(NamedTuple):
    passed: bool
    max_residual: float
    tol: float


def _as_square(entries: Any) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"evaluation matrix must be square, got shape {arr.shape}")
    return arr


def skew_residual(entries: Any) -> float:
    """Largest ``|F[i, j] + F[j, i]|`` over all pairs."""
    arr = _as_square(entries)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr + arr.T)))


@dataclass(frozen=True, eq=False)
class EvaluationMatrix:
    """Immutable N x N skew-symmetric advantage matrix with agent labels.

    Construction validates shape, label uniqueness, an exactly zero diagonal
    and skew-symmetry within ``skew_tolerance``.
    """

    entries: np.ndarray
    labels: tuple[str, ...] = ()
    skew_tolerance: float = EXACT_TOL

    def __post_init__(self):
        arr = np.array(_as_square(self.entries), dtype=float, copy=True)
        n = arr.shape[0]
        labels = tuple(str(x) for x in self.labels) if self.labels else default_labels(n)
        if len(labels) != n:
            raise ShapeError(f"{len(labels)} labels for a {n}x{n} matrix")
        if len(set(labels)) != n:
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise ShapeError(f"duplicate agent labels: {dupes}")
        if self.skew_tolerance < 0:
            raise ValueError("skew_tolerance must be nonnegative")
        if not np.all(np.isfinite(arr)):
            raise MatrixConstructionError("evaluation matrix contains non-finite entries")
        if np.any(np.diag(arr) != 0.0):
            raise SkewValidationError("diagonal entries must be exactly zero")
        resid = skew_residual(arr)
        if resid > self.skew_tolerance:
            raise SkewValidationError(
                f"matrix is not skew-symmetric: max |F_ij + F_ji| = {resid:.3e} "
                f"exceeds tolerance {self.skew_tolerance:.3e}",
                max_residual=resid,
            )
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def agents(self) -> list[AgentId]:
        return [AgentId(i, lab) for i, lab in enumerate(self.labels)]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown agent label {label!r}") from None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __len__(self) -> int:
        return self.n

    def with_entries(self, entries: Any, skew_tolerance: float | None = None) -> EvaluationMatrix:
        """Same labels, new entries."""
        tol = self.skew_tolerance if skew_tolerance is None else skew_tolerance
        return EvaluationMatrix(entries, self.labels, tol)


def default_labels(n: int) -> tuple[str, ...]:
    width = max(1, len(str(max(n - 1, 0))))
    return tuple(f"a{i:0{width}d}" for i in range(n))


def as_matrix(F: EvaluationMatrix | Any) -> np.ndarray:
    if isinstance(F, EvaluationMatrix):
        return F.entries
    return _as_square(F)


def build_matrix(
    evaluator: Callable[[Any, Any], float],
    agents: Sequence[Any],
    labels: Sequence[str] | None = None,
    skew_tolerance: float = EXACT_TOL,
) -> EvaluationMatrix:
    """Evaluate every ordered pair of ``agents`` into an evaluation matrix.

    ``evaluator(a, b)`` must be a pure function returning the advantage of
    ``a`` over ``b``. Pairs are evaluated in row-major order.

    Raises:
        MatrixConstructionError: on an empty population, mixed attribute
            lengths, or a non-finite evaluator value (the pair is named).
        SkewValidationError: if ``F + F.T`` exceeds ``skew_tolerance``.
    """
    n = len(agents)
    if n == 0:
        raise MatrixConstructionError("cannot build a matrix from an empty population")
    payload_dims = {len(a.attributes) for a in agents if isinstance(a, AgentPayload)}
    if len(payload_dims) > 1:
        raise MatrixConstructionError(f"attribute vectors have mixed lengths {sorted(payload_dims)}")
    out = np.empty((n, n))
    for i, a in enumerate(agents):
        for j, b in enumerate(agents):
            v = float(evaluator(a, b))
            if not math.isfinite(v):
                raise MatrixConstructionError(f"evaluator returned {v} for pair ({i}, {j})", pair=(i, j))
            out[i, j] = v
    diag = np.abs(np.diag(out))
    if np.any(diag > skew_tolerance):
        i = int(np.argmax(diag))
        raise SkewValidationError(f"evaluator({i}, {i}) = {out[i, i]} is not zero", max_residual=float(diag[i]))
    np.fill_diagonal(out, 0.0)
    return EvaluationMatrix(out, tuple(labels) if labels is not None else (), skew_tolerance)


def validate_skew(F: EvaluationMatrix | Any, tol: float = EXACT_TOL) -> SkewReport:
    resid = skew_residual(as_matrix(F))
    return SkewReport(resid <= tol, resid, tol)


def frobenius_norm(F: EvaluationMatrix | Any) -> float:
    return float(np.linalg.norm(as_matrix(F)))


def _check_permutation(permutation: Sequence[int], n: int) -> np.ndarray:
    perm = np.asarray(permutation)
    if perm.shape != (n,) or not np.issubdtype(perm.dtype, np.integer):
        raise ValueError(f"permutation must be {n} integers")
    if not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError("permutation is not a bijection on 0..N-1")
    return perm


def reorder(F: EvaluationMatrix, permutation: Sequence[int]) -> EvaluationMatrix:
    """New matrix whose agent ``k`` is old agent ``permutation[k]``."""
    perm = _check_permutation(permutation, F.n)
    entries = F.entries[np.ix_(perm, perm)]
    return EvaluationMatrix(entries, tuple(F.labels[p] for p in perm), F.skew_tolerance)


def inverse_permutation(permutation: Sequence[int]) -> np.ndarray:
    perm = np.asarray(permutation)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    return inv


# --- CSV interface -----------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits: round-trips every double exactly."""
    return f"{float(x) + 0.0:.16e}"


def write_matrix_csv(F: EvaluationMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *F.labels])
        for lab, row in zip(F.labels, F.entries):
            w.writerow([lab, *(format_float(v) for v in row)])


def read_matrix_csv(path: str | Path, skew_tolerance: float = EXACT_TOL) -> EvaluationMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "label":
        raise ParseError("matrix CSV must start with a 'label,...' header", line=1)
    labels = rows[0][1:]
    n = len(labels)
    body = [r for r in rows[1:] if r]
    if len(body) != n:
        raise ParseError(f"expected {n} data rows, found {len(body)}")
    entries = np.empty((n, n))
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != n + 1:
            raise ParseError(f"expected {n + 1} fields, found {len(row)}", line=line)
        if row[0] != labels[i]:
            raise ParseError(f"row label {row[0]!r} does not match column label {labels[i]!r}", line=line)
        try:
            entries[i] = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise ParseError(str(exc), line=line) from None
    return EvaluationMatrix(entries, labels, skew_tolerance)
