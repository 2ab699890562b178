"""Principal trade-off analysis of skew-symmetric evaluation matrices."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    DisconnectedGraphError,
    EnumerationLimitError,
    MatrixConstructionError,
    NumericError,
    ParseError,
    PTAError,
    ShapeError,
    SkewValidationError,
)
from .hodge import HodgeParts, Ratings, curl, hodge_decompose, intransitivity, ratings
from .matrix import EvaluationMatrix, build_matrix, read_matrix_csv, validate_skew, write_matrix_csv
from .pta import (
    DiscEmbedding,
    EmbeddingSet,
    SchurForm,
    complexity,
    disc,
    embed,
    importance,
    polar,
    reconstruct,
    recovery,
    relative_residual,
    rotate_mode,
    schur_skew,
)

__all__ = [
    "DisconnectedGraphError",
    "DiscEmbedding",
    "EmbeddingSet",
    "EnumerationLimitError",
    "EvaluationMatrix",
    "HodgeParts",
    "MatrixConstructionError",
    "NumericError",
    "PTAError",
    "ParseError",
    "Ratings",
    "SchurForm",
    "ShapeError",
    "SkewValidationError",
    "__version__",
    "build_matrix",
    "complexity",
    "curl",
    "disc",
    "embed",
    "hodge_decompose",
    "importance",
    "intransitivity",
    "polar",
    "ratings",
    "read_matrix_csv",
    "reconstruct",
    "recovery",
    "relative_residual",
    "rotate_mode",
    "schur_skew",
    "validate_skew",
    "write_matrix_csv",
]
