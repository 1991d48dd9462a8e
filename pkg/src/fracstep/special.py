"""Scalar special functions backing the weight tables and symbols.

Evaluation domains are deliberately restricted to what the time stepping
toolkit needs: Gamma on the positive axis, principal-branch complex powers,
the polylogarithm of negative index on the unit circle, a Mittag-Leffler
evaluator on the closed negative half-line, and closed-form fractional
derivatives of power functions.

All functions here are pure and hold no global state.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

from .errors import DomainError

TWO_PI = 2.0 * math.pi

#: grids and single evaluations must keep this far from theta = 0, 2*pi
THETA_MARGIN = 1e-8


class Regime(enum.Enum):
    """Qualitative regime of a fractional time order."""

    SUB = "sub"  # order in (0, 1): one initial condition
    WAVE = "wave"  # order in (1, 2): two initial conditions


@dataclass(frozen=True)
class FracOrder:
    """Fractional time order, restricted to (0, 1) or (1, 2)."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 2.0) or a == 1.0:
            raise DomainError(f"fractional order must lie in (0,1) or (1,2), got {a}")
        object.__setattr__(self, "alpha", a)

    @property
    def regime(self) -> Regime:
        return Regime.SUB if self.alpha < 1.0 else Regime.WAVE

    @property
    def ceil(self) -> int:
        """Smallest integer above the order (1 or 2)."""
        return 1 if self.alpha < 1.0 else 2


def gamma(x: float) -> float:
    """Gamma function for real x > 0."""
    if x <= 0.0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def frac_power(z: complex, a: float) -> complex:
    """Principal branch of z**a, with arg z taken in (-pi, pi].

    Continuous on the complex plane cut along the negative real axis;
    a negative real z is treated as carrying argument +pi.
    """
    z = complex(z)
    if z == 0:
        if a > 0:
            return 0j
        raise DomainError("0 cannot be raised to a non-positive fractional power")
    if z.imag == 0.0:
        # collapse -0.0 imaginary parts so the negative axis gets arg = +pi
        z = complex(z.real, 0.0)
    return cmath.exp(a * cmath.log(z))


def polylog_circle(p: float, theta: float) -> complex:
    """Li_p(e^{-i*theta}) for negative index p and theta in (0, 2*pi).

    Uses the Hurwitz-sum expansion of the polylogarithm on the unit
    circle,

        Li_p(e^{-i*theta}) = Gamma(1-p) * (2*pi)^(p-1)
            * [e^{-i*pi*(p-1)/2} * zeta(1-p, 1 - theta/2pi)
               + e^{+i*pi*(p-1)/2} * zeta(1-p, theta/2pi)],

    where zeta(s, q) is the Hurwitz zeta function; both sums converge
    absolutely because 1-p > 1.
    """
    if p >= 0.0:
        raise DomainError(f"polylog index must be negative, got {p}")
    if not (THETA_MARGIN <= theta <= TWO_PI - THETA_MARGIN):
        raise DomainError(
            f"theta must lie in ({THETA_MARGIN}, 2*pi - {THETA_MARGIN}), got {theta}"
        )
    s = 1.0 - p
    q = theta / TWO_PI
    za = float(_hurwitz_zeta(s, q))  # sum over (k + theta/2pi)^(p-1)
    zb = float(_hurwitz_zeta(s, 1.0 - q))  # sum over (k + 1 - theta/2pi)^(p-1)
    phase = cmath.exp(1j * math.pi * (p - 1.0) / 2.0)
    pref = math.gamma(s) * (TWO_PI) ** (p - 1.0)
    return pref * (phase * za + phase.conjugate() * zb)


def polylog_series(p: float, z: complex, tol: float = 1e-14) -> complex:
    """Li_p(z) by direct summation of z^j / j^p, valid for |z| < 1.

    Independent of the circle expansion; used as an oracle and for
    symbol queries strictly inside the unit disk.
    """
    z = complex(z)
    r = abs(z)
    if r >= 1.0:
        raise DomainError(f"direct polylog series requires |z| < 1, got |z| = {r}")
    if r == 0.0:
        return 0j
    # j^(-p) * r^j < tol once j log r < log(tol) - |p| log j; solve crudely
    n = 64
    while n * math.log(r) - p * math.log(n) > math.log(tol) and n < 2_000_000:
        n *= 2
    j = np.arange(1, n + 1, dtype=float)
    terms = (z ** j) * j ** (-p)
    return complex(np.sum(terms))


def _ml_series(a: float, b: float, x: float) -> float:
    # terms peak around exp(|x|^(1/a)); summation is compensated, so the
    # remaining error is the rounding floor max_term * eps
    total = []
    k = 0
    log_r = math.log(abs(x))
    peak_index = abs(x) ** (1.0 / a) / a
    while True:
        lg = k * log_r - math.lgamma(a * k + b)
        term = math.exp(lg) if lg > -750.0 else 0.0
        if x < 0.0 and k % 2 == 1:
            term = -term
        total.append(term)
        if k > 4 and abs(term) < 1e-18 and k > peak_index:
            break
        k += 1
        if k > 100_000:
            break
    return math.fsum(total)


def _ml_asymptotic(a: float, b: float, x: float) -> float:
    # -sum_{k>=1} x^(-k) / Gamma(b - a*k), summed to the optimal index
    # k* ~ |x|^(1/a)/a. Term sizes oscillate through the near-poles of
    # Gamma, so truncation follows the envelope, not the first increase.
    k_end = min(1200, int(abs(x) ** (1.0 / a) / a) + 6)
    total = []
    r = -x
    log_r = math.log(r)
    for k in range(1, k_end + 1):
        arg = b - a * k
        if arg <= 0.0 and abs(arg - round(arg)) < 1e-12 * max(1.0, abs(arg)):
            continue  # Gamma pole: the coefficient vanishes exactly
        lg = -k * log_r - math.lgamma(arg)
        if lg < -750.0:
            break
        # sign of Gamma on the negative axis via the reflection formula
        sign = 1.0 if arg > 0.0 else math.copysign(1.0, math.sin(math.pi * arg))
        total.append(-math.exp(lg) * sign * (-1.0) ** k)
    return math.fsum(total)


def ml_e(a: float, b: float, x: float) -> float:
    """Mittag-Leffler E_{a,b}(x) for a in (0,2), b > 0, x <= 0.

    Restricted-domain evaluator. The power series (compensated
    summation) and the algebraic expansion in 1/x have complementary
    error floors around exp(|x|^(1/a)) * eps and exp(-|x|^(1/a)); the
    branch with the smaller estimate is used, which keeps the absolute
    error near 1e-7 or below on [-50, 0] for every admissible a.
    """
    if not (0.0 < a < 2.0):
        raise DomainError(f"ml_e requires a in (0,2), got {a}")
    if b <= 0.0:
        raise DomainError(f"ml_e requires b > 0, got {b}")
    if x > 0.0:
        raise DomainError(f"ml_e is restricted to x <= 0, got {x}")
    if x == 0.0:
        return 1.0 / math.gamma(b)
    peak = (-x) ** (1.0 / a)
    if peak > 45.0:
        return _ml_asymptotic(a, b, x)
    est_series = math.exp(peak) * 3e-16
    # for orders above one the expansion also drops exponentially small
    # oscillatory terms of size exp(peak * cos(pi/a))
    est_asym = math.exp(-peak)
    if a > 1.0:
        est_asym += math.exp(peak * math.cos(math.pi / a))
    if est_series <= est_asym:
        return _ml_series(a, b, x)
    return _ml_asymptotic(a, b, x)


def caputo_power(alpha: FracOrder, g: float, t: float) -> float:
    """Fractional derivative of order alpha of t^g, for g >= ceil(alpha).

    The restriction on g guarantees the power function has zero initial
    data of every order the regime requires, so the value is

        Gamma(g+1) / Gamma(g+1-alpha) * t^(g-alpha).
    """
    if g < alpha.ceil:
        raise DomainError(
            f"exponent g must satisfy g >= {alpha.ceil} for order {alpha.alpha}, got {g}"
        )
    if t <= 0.0:
        raise DomainError(f"caputo_power requires t > 0, got {t}")
    a = alpha.alpha
    return math.gamma(g + 1.0) / math.gamma(g + 1.0 - a) * t ** (g - a)
