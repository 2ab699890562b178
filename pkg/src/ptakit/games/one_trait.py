"""Translation-invariant games of a single real trait.

``f(x, y) = sum_k A_k sin(2 pi w_k (x - y))``. Each term is a disc game on the
circle of radius ``sqrt(|A_k|)``, so the embedding is explicit.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import NumericError
from ..matrix import EvaluationMatrix


@dataclass(frozen=True)
class OneTraitGameSpec:
    terms: tuple[tuple[float, float], ...]
    period: float | None = None
    domain: tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        terms = tuple((float(a), float(w)) for a, w in self.terms)
        if any(w <= 0 for _, w in terms):
            raise ValueError("frequencies must be positive")
        if self.period is not None and self.period <= 0:
            raise ValueError("period must be positive")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def sine_series(cls, amplitudes: Sequence[float], period: float, **kw) -> OneTraitGameSpec:
        """Terms ``A_k sin(2 pi k (x - y) / P)`` for k = 1, 2, ...; zero amplitudes are skipped."""
        terms = tuple((a, (k + 1) / period) for k, a in enumerate(amplitudes) if a != 0)
        return cls(terms, period, **kw)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for a, _ in self.terms])

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([w for _, w in self.terms])

    def truncated(self, r: int) -> OneTraitGameSpec:
        """The ``r`` terms of largest ``|A_k|`` (stable on ties)."""
        order = sorted(range(len(self.terms)), key=lambda k: -abs(self.terms[k][0]))[:r]
        return OneTraitGameSpec(tuple(self.terms[k] for k in sorted(order)), self.period, self.domain)

    def _check(self, *xs: float) -> None:
        lo, hi = self.domain
        for x in xs:
            if not lo <= x <= hi:
                raise ValueError(f"trait {x} outside domain [{lo}, {hi}]")


def sine_game_eval(spec: OneTraitGameSpec, x: float, y: float) -> float:
    spec._check(x, y)
    return float(sum(a * math.sin(2 * math.pi * w * (x - y)) for a, w in spec.terms))


def sine_embedding(spec: OneTraitGameSpec, x: float) -> np.ndarray:
    """Per-term points ``sqrt|A| [cos(phi), sin(phi)]``, ``phi = -2 pi sgn(A) w x``; shape (terms, 2).

    Summing ``disc`` over terms reproduces :func:`sine_game_eval`.
    """
    spec._check(x)
    out = np.empty((len(spec.terms), 2))
    for k, (a, w) in enumerate(spec.terms):
        phase = -2 * math.pi * math.copysign(1.0, a) * w * x
        out[k] = math.sqrt(abs(a)) * np.array([math.cos(phase), math.sin(phase)])
    return out


def sine_game_matrix(spec: OneTraitGameSpec, traits: Sequence[float]) -> np.ndarray:
    t = np.asarray(traits, dtype=float)
    d = t[:, None] - t[None, :]
    out = np.zeros_like(d)
    for a, w in spec.terms:
        out += a * np.sin(2 * np.pi * w * d)
    out = 0.5 * (out - out.T)
    np.fill_diagonal(out, 0.0)
    return out


def step_game_matrix(n: int) -> EvaluationMatrix:
    """+1 above the diagonal, -1 below: agents sorted so that lower index wins."""
    if n < 2:
        raise ValueError("n must be >= 2")
    i = np.arange(n)
    return EvaluationMatrix(np.sign(i[None, :] - i[:, None]).astype(float))


def step_game_traits(n: int) -> np.ndarray:
    """Traits reproducing :func:`step_game_matrix` as ``sign(x_i - x_j)``."""
    return -np.arange(n, dtype=float)


def sine_coefficients(
    h: Callable[[float], float], period: float, k_max: int, epsabs: float = 1e-10
) -> np.ndarray:
    """``A_k = (4/P) * integral_0^{P/2} h(x) sin(2 pi k x / P) dx`` by adaptive quadrature."""
    out = np.zeros(k_max)
    for k in range(1, k_max + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(
                    lambda x: h(x) * math.sin(2 * math.pi * k * x / period),
                    0.0, period / 2, epsabs=epsabs, epsrel=0.0, limit=500,
                )
            except integrate.IntegrationWarning as exc:
                raise NumericError(f"sine coefficient k={k} did not converge: {exc}") from None
        out[k - 1] = 4.0 / period * val
    return out


def lattice_sine_coefficients(
    h: Callable[[float], float], period: float, k_max: int, n_points: int
) -> np.ndarray:
    """Sine coefficients of ``h`` sampled on an ``n_points`` lattice over one period.

    This is the analogue of :func:`sine_coefficients` for a function known only
    at lattice sites ``d * P / n_points``; with ``k_max < n_points / 2`` the
    resulting sine sum reproduces ``h`` exactly at those sites.
    """
    if k_max >= n_points / 2:
        raise ValueError("k_max must be below the lattice Nyquist index n_points / 2")
    d = np.arange(n_points)
    t = d * period / n_points
    t = np.where(t > period / 2, t - period, t)
    hv = np.array([h(v) for v in t], dtype=float)
    hv[0] = 0.0
    if n_points % 2 == 0:
        hv[n_points // 2] = 0.0
    ks = np.arange(1, k_max + 1)
    return 2.0 / n_points * np.sin(2 * np.pi * np.outer(ks, d) / n_points) @ hv


def step_game_sine_series(n: int, r: int | None = None) -> OneTraitGameSpec:
    """Lattice sine series of the n-agent step game (period 2n, odd harmonics only).

    With ``r`` given, only the first ``r`` nonzero terms are kept.
    """
    k_max = n - 1
    coeffs = lattice_sine_coefficients(lambda v: float(np.sign(v)), 2.0 * n, k_max, 2 * n)
    coeffs[1::2] = 0.0
    spec = OneTraitGameSpec.sine_series(coeffs, 2.0 * n)
    if r is not None:
        spec = OneTraitGameSpec(spec.terms[:r], spec.period, spec.domain)
    return spec
