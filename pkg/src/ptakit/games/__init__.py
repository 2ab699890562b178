"""Exact, seedable generators for Blotto, circulant RPS, Kuhn poker and one-trait games."""

from .blotto import (
    ENUMERATION_LIMIT,
    BlottoSpec,
    blotto_enumerate,
    blotto_eval,
    blotto_matrix,
    blotto_sample,
    blotto_w124,
)
from .kuhn import (
    COORD_NAMES as KUHN_COORD_NAMES,
    KuhnPolicy,
    exploitability,
    kuhn_eval,
    kuhn_matrix,
    kuhn_ne,
    kuhn_payoffs,
    kuhn_sample_boundary,
    kuhn_selfplay_gradient,
    rational_boundary,
)
from .one_trait import (
    OneTraitGameSpec,
    lattice_sine_coefficients,
    sine_coefficients,
    sine_embedding,
    sine_game_eval,
    sine_game_matrix,
    step_game_matrix,
    step_game_sine_series,
    step_game_traits,
)
from .rps import RPS_PLUS_2_ROW, RPS_ROW, circulant_game, fictitious_play, mixed_eval, mixed_matrix

__all__ = [
    "ENUMERATION_LIMIT",
    "KUHN_COORD_NAMES",
    "RPS_PLUS_2_ROW",
    "RPS_ROW",
    "BlottoSpec",
    "KuhnPolicy",
    "OneTraitGameSpec",
    "blotto_enumerate",
    "blotto_eval",
    "blotto_matrix",
    "blotto_sample",
    "blotto_w124",
    "circulant_game",
    "exploitability",
    "fictitious_play",
    "kuhn_eval",
    "kuhn_matrix",
    "kuhn_ne",
    "kuhn_payoffs",
    "kuhn_sample_boundary",
    "kuhn_selfplay_gradient",
    "lattice_sine_coefficients",
    "mixed_eval",
    "mixed_matrix",
    "rational_boundary",
    "sine_coefficients",
    "sine_embedding",
    "sine_game_eval",
    "sine_game_matrix",
    "step_game_matrix",
    "step_game_sine_series",
    "step_game_traits",
]
