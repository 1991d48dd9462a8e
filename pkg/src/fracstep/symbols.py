"""Characteristic symbols on the unit circle and step-size bounds.

Each scheme's symbol delta(xi) is the generating-function multiplier of
its discrete derivative: the scheme reads (tau^(-alpha) delta(xi) - A)
u(xi) = f(xi). The location of the curve {tau^(-alpha) delta(e^(i*theta))}
relative to the sector of half-angle alpha*pi/2 decides regularity, and
its closest approach to the spectrum decides the explicit step-size
bounds.

Convention: the two piecewise schemes are analyzed with xi = e^(-i*theta)
and everything else with xi = e^(+i*theta); each CurveSample records
which one produced it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .special import (
    THETA_MARGIN,
    TWO_PI,
    FracOrder,
    Regime,
    frac_power,
    gamma,
    polylog_circle,
    polylog_series,
)
from .weights import Scheme

#: xi-convention per scheme: exponent sign of e^(sign * i * theta)
XI_SIGN = {
    Scheme.BE: +1,
    Scheme.BDF2: +1,
    Scheme.EE: +1,
    Scheme.FCN: +1,
    Scheme.L1_SUB: -1,
    Scheme.L1_WAVE: -1,
}


@dataclass(frozen=True)
class CurveSample:
    theta: float
    value: complex
    modulus: float
    argument: float
    xi_sign: int  # +1 for xi = e^(i*theta), -1 for xi = e^(-i*theta)


@dataclass(frozen=True)
class SectorSpec:
    """Open sector of half-angle ``angle`` around the positive real axis."""

    angle: float

    def __post_init__(self) -> None:
        if not (0.0 < self.angle <= math.pi):
            raise DomainError(f"sector angle must lie in (0, pi], got {self.angle}")


@dataclass(frozen=True)
class StabilityBound:
    """Maximal admissible tau^alpha * r(A) for an explicit-type scheme."""

    scheme: Scheme
    alpha: FracOrder
    phi: float
    bound: float
    theta_phi: float | None = None


def _polylog(p: float, xi: complex) -> complex:
    """Li_p(xi), dispatching between the circle expansion and the disk series."""
    r = abs(xi)
    if abs(r - 1.0) < 1e-12:
        theta = (-cmath.phase(xi)) % TWO_PI
        return polylog_circle(p, theta)
    return polylog_series(p, xi)


def _check_not_excluded(xi: complex, exclude_minus_one: bool) -> None:
    if abs(xi - 1.0) < 1e-14:
        raise SingularityError("symbol is singular at xi = 1")
    if exclude_minus_one and abs(xi + 1.0) < 1e-14:
        raise SingularityError("symbol is singular at xi = -1")


def delta(scheme: Scheme, alpha: FracOrder, xi: complex) -> complex:
    """Characteristic symbol of ``scheme`` at xi, full alpha power included.

    tau^(-alpha) * delta(xi) is the quantity compared against the
    spectrum of A. xi = 1 is always excluded; xi = -1 additionally for
    the wave-regime piecewise scheme, whose formula is singular there.
    """
    xi = complex(xi)
    a = alpha.alpha
    _check_not_excluded(xi, exclude_minus_one=(scheme is Scheme.L1_WAVE))
    if scheme is Scheme.BE:
        return frac_power(1.0 - xi, a)
    if scheme is Scheme.BDF2:
        return frac_power(1.5 - 2.0 * xi + 0.5 * xi * xi, a)
    if scheme is Scheme.EE:
        return frac_power(1.0 - xi, a) / xi
    if scheme is Scheme.FCN:
        return frac_power(1.0 - xi, a) / (1.0 - a / 2.0 + a / 2.0 * xi)
    if scheme is Scheme.L1_SUB:
        if alpha.regime is not Regime.SUB:
            raise DomainError("sub-regime symbol needs an order in (0,1)")
        return (1.0 - xi) ** 2 / (xi * gamma(2.0 - a)) * _polylog(a - 1.0, xi)
    if scheme is Scheme.L1_WAVE:
        if alpha.regime is not Regime.WAVE:
            raise DomainError("wave-regime symbol needs an order in (1,2)")
        num = 2.0 * (1.0 - xi) ** 3
        return num / (xi * (1.0 + xi) * gamma(3.0 - a)) * _polylog(a - 2.0, xi)
    raise DomainError(f"no symbol for scheme {scheme}")


def shifted_kernel_symbol(alpha: FracOrder, xi: complex) -> complex:
    """Symbol xi^(1-alpha) * (1-xi)^alpha of the shifted backward kernel.

    Kept for comparison only: unlike the symbols above, this curve exits
    the sector of half-angle alpha*pi/2, so no solver is built on it.
    """
    xi = complex(xi)
    _check_not_excluded(xi, exclude_minus_one=False)
    return frac_power(xi, 1.0 - alpha.alpha) * frac_power(1.0 - xi, alpha.alpha)


def xi_from_theta(scheme: Scheme, theta: float) -> complex:
    return cmath.exp(1j * XI_SIGN[scheme] * theta)


def sector_margin(
    scheme: Scheme, alpha: FracOrder, theta_grid
) -> list[tuple[float, float]]:
    """Margins alpha*pi/2 - |arg delta(xi)| over a theta grid.

    A positive margin certifies that the symbol value lies inside the
    sector of half-angle alpha*pi/2; explicit-scheme curves produce
    negative margins by design.
    """
    half = alpha.alpha * math.pi / 2.0
    out = []
    for theta in theta_grid:
        val = delta(scheme, alpha, xi_from_theta(scheme, theta))
        out.append((float(theta), half - abs(cmath.phase(val))))
    return out


def d_factor(alpha: FracOrder, xi: complex) -> complex:
    """Bounded factor d(xi) with (1-xi)(1+xi) delta'(xi) = d(xi) delta(xi).

    Closed form in terms of ratios of polylogarithms at shifted indices;
    the two regimes use different expressions. Singular at xi = +/-1.
    """
    xi = complex(xi)
    _check_not_excluded(xi, exclude_minus_one=True)
    a = alpha.alpha
    if alpha.regime is Regime.SUB:
        li_lo = _polylog(a - 1.0, xi)
        li_hi = _polylog(a - 2.0, xi)
        return (1.0 + xi) * (-2.0 + (1.0 - xi) / xi * (li_hi - li_lo) / li_lo)
    li_lo = _polylog(a - 2.0, xi)
    li_hi = _polylog(a - 3.0, xi)
    return (1.0 + xi) * (-3.0 + (1.0 - xi) / xi * (li_hi - li_lo) / li_lo) + (xi - 1.0)


def ee_stability_bound(alpha: FracOrder, phi: float) -> StabilityBound:
    """Step-size bound for the explicit scheme: the scheme is stable when

        tau^alpha * r(A) <= 2^alpha * sin((phi - alpha*pi/2)/(2 - alpha))^alpha

    for operators whose numerical range avoids the sector of half-angle
    phi. The safety margin below the bound is the caller's choice.
    """
    a = alpha.alpha
    half = a * math.pi / 2.0
    if not (half < phi <= math.pi):
        raise DomainError(f"phi must lie in (alpha*pi/2, pi], got {phi}")
    bound = 2.0 ** a * math.sin((phi - half) / (2.0 - a)) ** a
    return StabilityBound(Scheme.EE, alpha, phi, bound)


def cn_rho(alpha: FracOrder, theta: float) -> float:
    """Modulus of 1 - alpha/2 + (alpha/2) e^(i*theta)."""
    a = alpha.alpha
    return math.sqrt(
        (1.0 - a / 2.0) ** 2 + a * a / 4.0 + a * (1.0 - a / 2.0) * math.cos(theta)
    )


def cn_psi(alpha: FracOrder, theta: float) -> float:
    """Continuous argument of 1 - alpha/2 + (alpha/2) e^(i*theta).

    Tracked so that psi(0+) = 0; for orders above one the point winds
    around the origin, so the branch is lifted by 2*pi past theta = pi.
    """
    a = alpha.alpha
    re = 1.0 - a / 2.0 + a / 2.0 * math.cos(theta)
    im = a / 2.0 * math.sin(theta)
    psi = math.atan2(im, re)
    if a > 1.0 and theta > math.pi and psi < 0.0:
        psi += TWO_PI
    return psi


def cn_theta_phi(alpha: FracOrder, phi: float) -> float:
    """Unique root in (0, pi) of psi(theta) - (alpha/2) theta = phi - alpha*pi/2.

    Exists for wave-regime orders because the left side increases from 0
    to pi - alpha*pi/2; found by bisection to 1e-12.
    """
    a = alpha.alpha
    if alpha.regime is not Regime.WAVE:
        raise DomainError("the root equation applies to orders in (1,2) only")
    half = a * math.pi / 2.0
    if not (half < phi < math.pi):
        raise DomainError(f"phi must lie in (alpha*pi/2, pi), got {phi}")
    target = phi - half

    def h(theta: float) -> float:
        return cn_psi(alpha, theta) - a / 2.0 * theta - target

    lo, hi = 1e-14, math.pi - 1e-14
    flo, fhi = h(lo), h(hi)
    if flo > 0.0 or fhi < 0.0:
        raise DomainError(f"root not bracketed for phi = {phi}")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if h(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cn_stability_bound(alpha: FracOrder, phi: float) -> StabilityBound:
    """Wave-regime step-size bound for the averaged implicit scheme:

        tau^alpha * r(A) <= 2^alpha * sin(theta_phi/2)^alpha / rho(theta_phi).
    """
    a = alpha.alpha
    theta = cn_theta_phi(alpha, phi)
    bound = 2.0 ** a * math.sin(theta / 2.0) ** a / cn_rho(alpha, theta)
    return StabilityBound(Scheme.FCN, alpha, phi, bound, theta_phi=theta)


def curve_theta_grid(n_points: int) -> np.ndarray:
    """Half-offset uniform grid on (0, 2*pi), nudged off theta = pi."""
    if n_points < 8:
        raise DomainError(f"need at least 8 points, got {n_points}")
    h = TWO_PI / n_points
    grid = (np.arange(n_points) + 0.5) * h
    near_pi = np.abs(grid - math.pi) < 1e-6
    grid[near_pi] = math.pi + 1e-6
    return grid


def curve_sample(
    scheme: Scheme, alpha: FracOrder, tau: float, n_points: int
) -> list[CurveSample]:
    """Sample tau^(-alpha) delta(e^(+/- i*theta)) on a uniform theta grid.

    The grid is offset by half a spacing so the singular endpoints are
    never hit.
    """
    if tau <= 0.0:
        raise DomainError(f"tau must be positive, got {tau}")
    scale = tau ** (-alpha.alpha)
    sign = XI_SIGN[scheme]
    out = []
    for theta in curve_theta_grid(n_points):
        val = scale * delta(scheme, alpha, xi_from_theta(scheme, theta))
        out.append(
            CurveSample(
                theta=float(theta),
                value=val,
                modulus=abs(val),
                argument=cmath.phase(val),
                xi_sign=sign,
            )
        )
    return out
