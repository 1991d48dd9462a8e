"""Discrete-derivative coefficient tables for the five schemes.

Tables are unscaled: the solver applies the tau^(-alpha) factor, so one
table serves every step size. Coefficients are recomputed per call; at
desk scale a table costs well under a millisecond.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .special import FracOrder, Regime, gamma


class Scheme(enum.Enum):
    BE = "be"
    BDF2 = "bdf2"
    L1_SUB = "l1sub"
    L1_WAVE = "l1wave"
    PCDG = "pcdg"
    EE = "ee"
    FCN = "fcn"


@dataclass(frozen=True)
class WeightTable:
    """Scheme-tagged coefficient sequence of length n_max + 1."""

    scheme: Scheme
    alpha: FracOrder
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1


def _check_n(n_max: int) -> None:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")


def _gl_coeffs(a: float, n_max: int) -> np.ndarray:
    # power-series coefficients of (1 - xi)^a via the stable ratio recurrence
    w = np.empty(n_max + 1)
    w[0] = 1.0
    for j in range(1, n_max + 1):
        w[j] = w[j - 1] * (j - 1.0 - a) / j
    return w


def be_weights(alpha: FracOrder, n_max: int) -> WeightTable:
    """Backward-difference weights: coefficients of (1 - xi)^alpha."""
    _check_n(n_max)
    return WeightTable(Scheme.BE, alpha, _gl_coeffs(alpha.alpha, n_max))


def bdf2_weights(alpha: FracOrder, n_max: int) -> WeightTable:
    """Coefficients of (3/2 - 2*xi + xi^2/2)^alpha.

    The polynomial factors as (3/2)(1 - xi)(1 - xi/3), so the table is
    the convolution of the backward-difference weights with their
    3^(-j)-scaled copy, times (3/2)^alpha. Exact cancellation-free at
    desk scale; an FFT path is not needed below n_max ~ 1e5.
    """
    _check_n(n_max)
    a = alpha.alpha
    g = _gl_coeffs(a, n_max)
    scaled = g * 3.0 ** (-np.arange(n_max + 1))
    w = 1.5 ** a * np.convolve(g, scaled)[: n_max + 1]
    return WeightTable(Scheme.BDF2, alpha, w)


def l1_sub_weights(alpha: FracOrder, n_max: int) -> WeightTable:
    """Piecewise-linear quadrature weights b_j for orders below one:

    b_j = ((j+1)^(1-alpha) - j^(1-alpha)) / Gamma(2-alpha), positive and
    strictly decreasing.
    """
    _check_n(n_max)
    if alpha.regime is not Regime.SUB:
        raise DomainError(f"l1_sub_weights requires order in (0,1), got {alpha.alpha}")
    a = alpha.alpha
    j = np.arange(n_max + 1, dtype=float)
    w = ((j + 1.0) ** (1.0 - a) - j ** (1.0 - a)) / gamma(2.0 - a)
    return WeightTable(Scheme.L1_SUB, alpha, w)


def l1_wave_weights(alpha: FracOrder, n_max: int) -> WeightTable:
    """Weights a_j = (j+1)^(2-alpha) - j^(2-alpha) for orders in (1,2).

    Stored without the 1/Gamma(3-alpha) factor; the solver applies it
    together with the step-size scaling.
    """
    _check_n(n_max)
    if alpha.regime is not Regime.WAVE:
        raise DomainError(f"l1_wave_weights requires order in (1,2), got {alpha.alpha}")
    a = alpha.alpha
    j = np.arange(n_max + 1, dtype=float)
    w = (j + 1.0) ** (2.0 - a) - j ** (2.0 - a)
    return WeightTable(Scheme.L1_WAVE, alpha, w)


def pcdg_weights(alpha: FracOrder, n_max: int) -> WeightTable:
    """Piecewise-constant Galerkin weights: beta_0 = b_0, beta_j = b_j - b_{j-1}.

    Convolving a zero-started sequence with this table reproduces the
    piecewise-linear form built from b_j exactly (telescoping).
    """
    _check_n(n_max)
    if alpha.regime is not Regime.SUB:
        raise DomainError(f"pcdg_weights requires order in (0,1), got {alpha.alpha}")
    b = l1_sub_weights(alpha, n_max).coeffs
    w = np.empty_like(b)
    w[0] = b[0]
    w[1:] = b[1:] - b[:-1]
    return WeightTable(Scheme.PCDG, alpha, w)
