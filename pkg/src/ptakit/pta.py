"""Principal trade-off analysis: real Schur form of a skew matrix as disc games.

``F = Q U Q^T`` with ``U`` block diagonal in ``omega_k * R`` blocks, ``R`` the
90 degree rotation ``[[0, 1], [-1, 0]]``. Scaling each plane of ``Q`` by
``sqrt(omega_k)`` gives one planar embedding per mode, and

    F_ij = sum_k disc(y_k(i), y_k(j)),   disc(a, b) = a_1 b_2 - a_2 b_1.

The eigenproblem is solved through the Hermitian matrix ``1j * F`` so that
conjugate eigenvector pairs stay paired into real planes.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import NumericError, SkewValidationError
from .matrix import EvaluationMatrix, default_labels, format_float, skew_residual

ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])

DEFAULT_RANK_CUTOFF = 1e-10
DEFAULT_DEGENERACY_TOL = 1e-6
DEFAULT_COMPLEXITY_TOL = 0.05


@dataclass(frozen=True, eq=False)
class SchurForm:
    """Orthonormal planes ``basis`` (N x 2m) with nonincreasing magnitudes ``omegas``."""

    basis: np.ndarray
    omegas: np.ndarray
    degeneracy_groups: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    source_norm: float

    @property
    def n_modes(self) -> int:
        return len(self.omegas)

    @property
    def n_agents(self) -> int:
        return self.basis.shape[0]

    def plane(self, k: int) -> np.ndarray:
        return self.basis[:, 2 * k:2 * k + 2]

    def block_matrix(self) -> np.ndarray:
        """The block-diagonal ``U``."""
        return np.kron(np.diag(self.omegas), ROTATION)

    def matrix(self, r: int | None = None) -> np.ndarray:
        """``Q U Q^T`` over the first ``r`` modes (all by default)."""
        r = self.n_modes if r is None else r
        q = self.basis[:, :2 * r]
        return q @ np.kron(np.diag(self.omegas[:r]), ROTATION) @ q.T

    def group_of(self, k: int) -> int:
        for g, members in enumerate(self.degeneracy_groups):
            if k in members:
                return g
        raise IndexError(f"mode {k} out of range")

    @classmethod
    def from_omegas(cls, omegas: Sequence[float], labels: Sequence[str] | None = None) -> SchurForm:
        """Canonical block-diagonal form: plane ``k`` is coordinates ``2k, 2k+1``."""
        om = np.asarray(omegas, dtype=float)
        if np.any(om < 0) or np.any(np.diff(om) > 0):
            raise ValueError("omegas must be nonnegative and nonincreasing")
        n = 2 * len(om)
        labs = tuple(labels) if labels is not None else default_labels(n)
        return cls(
            basis=np.eye(n),
            omegas=om,
            degeneracy_groups=degeneracy_groups(om),
            labels=labs,
            source_norm=float(np.sqrt(2 * np.sum(om ** 2))),
        )


@dataclass(frozen=True, eq=False)
class DiscEmbedding:
    mode_index: int
    omega: float
    coords: np.ndarray


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    modes: tuple[DiscEmbedding, ...]
    labels: tuple[str, ...]
    source_norm: float

    @property
    def n_agents(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.modes)

    def __getitem__(self, k: int) -> DiscEmbedding:
        return self.modes[k]

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes])


@dataclass(frozen=True, eq=False)
class PolarView:
    """Radius and angle per mode (rows) and agent (columns); angles in (-pi, pi]."""

    radius: np.ndarray
    angle: np.ndarray
    labels: tuple[str, ...]


def degeneracy_groups(omegas: np.ndarray, rel_tol: float = DEFAULT_DEGENERACY_TOL) -> tuple[tuple[int, ...], ...]:
    groups: list[list[int]] = []
    for k, w in enumerate(omegas):
        if groups and omegas[groups[-1][-1]] - w <= rel_tol * omegas[groups[-1][-1]]:
            groups[-1].append(k)
        else:
            groups.append([k])
    return tuple(tuple(g) for g in groups)


def _orient(plane: np.ndarray) -> np.ndarray:
    # Rotate so the first agent with a non-negligible radius sits on the +x axis.
    radii = np.hypot(plane[:, 0], plane[:, 1])
    big = np.flatnonzero(radii > 1e-8 * radii.max())
    a = big[0]
    phi = math.atan2(plane[a, 1], plane[a, 0])
    c, s = math.cos(phi), math.sin(phi)
    out = np.empty_like(plane)
    out[:, 0] = c * plane[:, 0] + s * plane[:, 1]
    out[:, 1] = -s * plane[:, 0] + c * plane[:, 1]
    out[a, 1] = 0.0
    return out


def schur_skew(
    F: EvaluationMatrix | Any,
    rank_cutoff: float = DEFAULT_RANK_CUTOFF,
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL,
) -> SchurForm:
    """Real Schur form of a skew-symmetric matrix.

    Modes with ``omega_k < rank_cutoff * omega_1`` are dropped. Each plane is
    rotated so that the lowest-index agent with nonzero projection lies on the
    nonnegative first axis, which makes the output deterministic for
    nondegenerate spectra.

    Raises:
        SkewValidationError: for a raw array that is not skew-symmetric.
        NumericError: if the Hermitian eigensolver fails.
    """
    if isinstance(F, EvaluationMatrix):
        arr, labels = F.entries, F.labels
    else:
        arr = np.asarray(F, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise SkewValidationError(f"expected a square matrix, got shape {arr.shape}")
        labels = default_labels(arr.shape[0])
        resid = skew_residual(arr)
        scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
        if resid > 1e-9 * scale:
            raise SkewValidationError(f"matrix is not skew-symmetric (residual {resid:.3e})", resid)
    n = arr.shape[0]
    a = 0.5 * (arr - arr.T)
    norm = float(np.linalg.norm(a))
    if n == 0 or norm == 0.0:
        return SchurForm(np.zeros((n, 0)), np.zeros(0), (), labels, norm)
    try:
        w, v = np.linalg.eigh(1j * a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"Hermitian eigensolver failed for N={n}, ||F||={norm:.6g}: {exc}"
        ) from exc
    if not np.all(np.isfinite(w)):
        raise NumericError(f"eigensolver returned non-finite eigenvalues for N={n}")
    # eigh sorts ascending; the positive half, largest first, are the omegas.
    order = np.argsort(-w, kind="stable")
    top = w[order[0]]
    keep = [i for i in order if w[i] > 0 and w[i] >= rank_cutoff * top]
    omegas = w[keep].astype(float)
    basis = np.empty((n, 2 * len(keep)))
    for k, i in enumerate(keep):
        vec = v[:, i]
        plane = np.sqrt(2.0) * np.column_stack([vec.imag, vec.real])
        basis[:, 2 * k:2 * k + 2] = _orient(plane)
    return SchurForm(basis, omegas, degeneracy_groups(omegas, degeneracy_tol), labels, norm)


def embed(schur: SchurForm, r: int | None = None) -> EmbeddingSet:
    """Scaled planar embeddings ``y_k(i) = sqrt(omega_k) * [q_{i,2k-1}, q_{i,2k}]``."""
    r = schur.n_modes if r is None else r
    if not 0 <= r <= schur.n_modes:
        raise ValueError(f"r={r} out of range: {schur.n_modes} modes retained")
    modes = tuple(
        DiscEmbedding(k, float(schur.omegas[k]), np.sqrt(schur.omegas[k]) * schur.plane(k))
        for k in range(r)
    )
    return EmbeddingSet(modes, schur.labels, schur.source_norm)


def disc(a: Sequence[float], b: Sequence[float]) -> float:
    return a[0] * b[1] - a[1] * b[0]


def mode_matrix(coords: np.ndarray) -> np.ndarray:
    """All pairwise ``disc(y(i), y(j))`` for one mode."""
    y = np.asarray(coords, dtype=float)
    return np.outer(y[:, 0], y[:, 1]) - np.outer(y[:, 1], y[:, 0])


def reconstruct(embeddings: EmbeddingSet, modes: Sequence[int] | None = None) -> EvaluationMatrix:
    """Sum of disc games over ``modes`` (all modes by default)."""
    n = embeddings.n_agents
    out = np.zeros((n, n))
    picked = range(len(embeddings)) if modes is None else modes
    for k in picked:
        out += mode_matrix(embeddings.modes[k].coords)
    out = 0.5 * (out - out.T)
    np.fill_diagonal(out, 0.0)
    return EvaluationMatrix(out, embeddings.labels, 1e-12)


def _omegas(spectrum: SchurForm | EmbeddingSet | Sequence[float]) -> np.ndarray:
    if isinstance(spectrum, (SchurForm, EmbeddingSet)):
        return np.asarray(spectrum.omegas, dtype=float)
    return np.asarray(spectrum, dtype=float)


def importance(schur: SchurForm | Sequence[float]) -> np.ndarray:
    """Fraction ``omega_k^2 / sum_j omega_j^2`` of ``||F||^2`` carried by each mode."""
    w2 = _omegas(schur) ** 2
    total = w2.sum()
    if total == 0:
        raise ValueError("importance is undefined for an all-zero spectrum")
    return w2 / total


def relative_residual(schur: SchurForm | Sequence[float], r: int) -> float:
    """``||F - F^(2r)|| / ||F||`` from the spectrum alone."""
    w2 = _omegas(schur) ** 2
    total = w2.sum()
    if total == 0:
        return 0.0
    return float(np.sqrt(max(w2[r:].sum(), 0.0) / total))


def recovery(schur: SchurForm | Sequence[float]) -> np.ndarray:
    """Cumulative ``||F^(2r)|| / ||F||`` for r = 1..m.

    Equivalently ``sqrt(1 - residual^2)``, the norm fraction of ``F`` recovered
    by the first ``r`` disc games.
    """
    w2 = _omegas(schur) ** 2
    total = w2.sum()
    if total == 0:
        return np.zeros(len(w2))
    return np.sqrt(np.minimum(np.cumsum(w2) / total, 1.0))


def recovery_tolerance(target: float) -> float:
    """Relative residual equivalent to a recovery target (0.95 -> 0.312)."""
    if not 0 < target <= 1:
        raise ValueError("recovery target must lie in (0, 1]")
    return math.sqrt(1.0 - target ** 2)


def complexity(schur: SchurForm | Sequence[float], rel_tol: float = DEFAULT_COMPLEXITY_TOL) -> int:
    """Smallest number of disc games whose relative Frobenius residual is <= rel_tol."""
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    w = _omegas(schur)
    for r in range(len(w) + 1):
        if relative_residual(w, r) <= rel_tol:
            return r
    return len(w)


def polar(embeddings: EmbeddingSet) -> PolarView:
    if len(embeddings) == 0:
        empty = np.zeros((0, embeddings.n_agents))
        return PolarView(empty, empty.copy(), embeddings.labels)
    xy = np.stack([m.coords for m in embeddings.modes])
    radius = np.hypot(xy[..., 0], xy[..., 1])
    angle = np.arctan2(xy[..., 1], xy[..., 0])
    angle[radius == 0] = 0.0
    angle[angle <= -np.pi] = np.pi
    return PolarView(radius, angle, embeddings.labels)


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def rotate_mode(embeddings: EmbeddingSet, k: int, angle: float) -> EmbeddingSet:
    """Rotate mode ``k``'s points counterclockwise by ``angle`` radians."""
    m = embeddings.modes[k]
    rotated = DiscEmbedding(m.mode_index, m.omega, m.coords @ rotation(angle).T)
    modes = embeddings.modes[:k] + (rotated,) + embeddings.modes[k + 1:]
    return EmbeddingSet(modes, embeddings.labels, embeddings.source_norm)


# --- file interfaces ---------------------------------------------------------

def embedding_to_dict(embeddings: EmbeddingSet, schur: SchurForm | None = None) -> dict:
    spectrum = schur if schur is not None else embeddings
    imp = importance(spectrum) if len(_omegas(spectrum)) and np.any(_omegas(spectrum)) else []
    return {
        "labels": list(embeddings.labels),
        "source_norm": embeddings.source_norm,
        "modes": [
            {
                "mode_index": m.mode_index,
                "omega": m.omega,
                "importance": float(imp[m.mode_index]) if len(imp) else 0.0,
                "coords": [[float(a), float(b)] for a, b in m.coords],
            }
            for m in embeddings.modes
        ],
    }


def write_embedding_json(embeddings: EmbeddingSet, path: str | Path, schur: SchurForm | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(embedding_to_dict(embeddings, schur), fh, indent=1)
        fh.write("\n")


def read_embedding_json(path: str | Path) -> EmbeddingSet:
    with open(path) as fh:
        data = json.load(fh)
    labels = tuple(data["labels"])
    modes = []
    for m in data["modes"]:
        coords = np.asarray(m["coords"], dtype=float).reshape(len(labels), 2)
        modes.append(DiscEmbedding(int(m["mode_index"]), float(m["omega"]), coords))
    return EmbeddingSet(tuple(modes), labels, float(data.get("source_norm", 0.0)))


def write_polar_csv(view: PolarView, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "mode", "radius", "angle"])
        for k in range(view.radius.shape[0]):
            for i, lab in enumerate(view.labels):
                w.writerow([lab, k, format_float(view.radius[k, i]), format_float(view.angle[k, i])])
