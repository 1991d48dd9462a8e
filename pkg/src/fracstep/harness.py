"""Experiments that confront the solvers with the theory.

Four experiment families: regularity-ratio sweeps over a step-size
ladder (the desk-scale expression of step-size-independent bounds),
convergence-order studies on manufactured power solutions, decay studies
for the homogeneous problem with nonzero initial data, and scalar
stability probes for the explicit-type schemes.

Sweep cells are independent; set FRACSTEP_THREADS to evaluate them
concurrently (0 or 1 means sequential). Report assembly is deterministic
either way.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StabilityError
from .operators import OperatorHandle, scalar_operator
from .solvers import (
    SolveInput,
    SolveResult,
    TimeGrid,
    counting_lp_norm,
    lp_scaled_norm,
    solve,
    solve_be_inhomogeneous,
    solve_ee,
    solve_fcn,
)
from .special import FracOrder, Regime, caputo_power
from .symbols import cn_stability_bound, ee_stability_bound
from .weights import Scheme

#: step-size conditions are enforced with this safety factor in sweeps
SAFETY_FACTOR = 0.95

# 64-bit linear congruential generator, fixed here so random forcings are
# bit-reproducible across machines and languages:
#   state <- (state * LCG_MULTIPLIER + LCG_INCREMENT) mod 2^64,
#   value = (state >> 11) / 2^52 - 1  in [-1, 1).
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


def lcg_uniform(seed: int, count: int) -> np.ndarray:
    out = np.empty(count)
    state = seed & _MASK64
    for i in range(count):
        state = (state * LCG_MULTIPLIER + LCG_INCREMENT) & _MASK64
        out[i] = (state >> 11) / 2.0**52 - 1.0
    return out


def _map_cells(fn, items):
    raw = os.environ.get("FRACSTEP_THREADS", "0")
    try:
        workers = int(raw)
    except ValueError:
        workers = 0
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# manufactured solutions


@dataclass(frozen=True)
class ManufacturedProblem:
    """Exact solution t^exponent * direction of the evolution problem.

    The exponent must be at least the number of initial conditions the
    order requires, so the prescribed solution has zero initial data.
    """

    alpha: FracOrder
    exponent: float
    direction: np.ndarray
    operator: OperatorHandle
    horizon: float

    def __post_init__(self) -> None:
        if self.exponent < self.alpha.ceil:
            raise DomainError(
                f"exponent must be >= {self.alpha.ceil} for order {self.alpha.alpha}"
            )
        if self.horizon <= 0.0:
            raise DomainError("horizon must be positive")
        d = np.asarray(self.direction, dtype=complex)
        if d.shape != (self.operator.dim,):
            raise DomainError(f"direction must have shape ({self.operator.dim},)")
        object.__setattr__(self, "direction", d)


def manufactured_forcing(prob: ManufacturedProblem, grid: TimeGrid) -> np.ndarray:
    """Forcing whose exact solution is t^g * direction:

    f(t) = (fractional derivative of t^g) * direction - t^g * A direction,
    sampled at the grid times; the value at t = 0 is the zero limit.
    """
    if not math.isclose(grid.tau * grid.n_steps, prob.horizon, rel_tol=1e-9):
        raise DomainError(
            f"grid horizon {grid.tau * grid.n_steps} does not match problem horizon {prob.horizon}"
        )
    g = prob.exponent
    adir = prob.operator.apply(prob.direction)
    f = np.zeros((grid.n_steps + 1, prob.operator.dim), dtype=complex)
    for n in range(1, grid.n_steps + 1):
        t = grid.t(n)
        f[n] = caputo_power(prob.alpha, g, t) * prob.direction - t**g * adir
    return f


def manufactured_states(prob: ManufacturedProblem, grid: TimeGrid) -> np.ndarray:
    """Exact trajectory t_n^g * direction, rows 0..N."""
    t = grid.times()
    return (t**prob.exponent)[:, None] * prob.direction[None, :]


# ---------------------------------------------------------------------------
# convergence studies


@dataclass(frozen=True)
class ConvergenceTable:
    rows: list  # (tau, error) pairs, tau descending
    observed_orders: list  # log(e_i/e_{i+1}) / log(tau_i/tau_{i+1})


def convergence_study(
    scheme: Scheme, prob: ManufacturedProblem, tau_list, p: float
) -> ConvergenceTable:
    """Error ladder in the scaled norm of A(u^n - u(t_n)) at fixed horizon.

    Each step size must divide the horizon; the observed orders come from
    consecutive error ratios.
    """
    taus = [float(t) for t in tau_list]
    if len(taus) < 3 or any(b >= a for a, b in zip(taus, taus[1:])):
        raise DomainError("tau_list must be strictly decreasing with >= 3 entries")
    adir = prob.operator.apply(prob.direction)

    def cell(tau: float):
        steps = prob.horizon / tau
        n = round(steps)
        if not math.isclose(steps, n, rel_tol=1e-9) or n < 1:
            raise DomainError(f"horizon {prob.horizon} is not a multiple of tau {tau}")
        grid = TimeGrid(tau, n)
        inp = SolveInput(
            scheme, prob.alpha, prob.operator, grid, manufactured_forcing(prob, grid)
        )
        res = solve(inp)
        t = grid.times()[1:]
        exact_au = (t**prob.exponent)[:, None] * adir[None, :]
        return tau, lp_scaled_norm(res.au - exact_au, tau, p)

    rows = _map_cells(cell, taus)
    orders = [
        math.log(e0 / e1) / math.log(t0 / t1)
        for (t0, e0), (t1, e1) in zip(rows, rows[1:])
    ]
    return ConvergenceTable(rows=rows, observed_orders=orders)


# ---------------------------------------------------------------------------
# regularity sweeps


@dataclass(frozen=True)
class RegularityReport:
    scheme: Scheme
    alpha: FracOrder
    p: float
    rows: list  # (tau, n_steps, ratio), tau descending
    uniformity: float


#: forcing range each scheme's estimate is measured against
_FORCING_RANGE = {
    Scheme.BE: (1, None),
    Scheme.L1_SUB: (1, None),
    Scheme.BDF2: (2, None),
    Scheme.EE: (0, -1),
    Scheme.FCN: (0, None),
    Scheme.L1_WAVE: (0, None),
}


def build_forcing(
    family: str, n_steps: int, dim: int, seed: int = 0
) -> np.ndarray:
    """Forcing families for sweeps: constant, alternating sign per step,
    or seeded uniform values in [-1, 1) from the documented generator."""
    if family == "constant":
        return np.ones((n_steps + 1, dim), dtype=complex)
    if family == "alternating":
        signs = (-1.0) ** np.arange(n_steps + 1)
        return np.repeat(signs[:, None], dim, axis=1).astype(complex)
    if family == "random":
        vals = lcg_uniform(seed, (n_steps + 1) * dim)
        return vals.reshape(n_steps + 1, dim).astype(complex)
    raise DomainError(f"unknown forcing family {family!r}")


def _check_sweep_preconditions(
    scheme: Scheme, alpha: FracOrder, operator: OperatorHandle, taus
) -> None:
    half = alpha.alpha * math.pi / 2.0
    phi = operator.sector_phi
    if phi is not None and phi <= half:
        raise StabilityError(
            f"operator sector angle {phi:.6g} does not exceed alpha*pi/2 = {half:.6g}"
        )
    needs_bound = scheme is Scheme.EE or (
        scheme is Scheme.FCN and alpha.regime is Regime.WAVE
    )
    if not needs_bound:
        return
    if phi is None:
        raise StabilityError("explicit-type sweep needs an operator with a known sector angle")
    radius = operator.cached_radius
    if scheme is Scheme.EE:
        bound = ee_stability_bound(alpha, min(phi, math.pi)).bound
    else:
        bound = cn_stability_bound(alpha, min(phi, math.pi - 1e-9)).bound
    for tau in taus:
        if tau ** alpha.alpha * radius > SAFETY_FACTOR * bound:
            raise StabilityError(
                f"tau = {tau} violates the step-size bound: "
                f"tau^alpha * r(A) = {tau ** alpha.alpha * radius:.6g} "
                f"> {SAFETY_FACTOR} * {bound:.6g}"
            )


def regularity_sweep(
    scheme: Scheme,
    alpha: FracOrder,
    p: float,
    operator: OperatorHandle,
    forcing_family: str,
    tau_list,
    horizon: float = 1.0,
    seed: int = 0,
) -> RegularityReport:
    """Ratio ladder for the regularity estimate over a list of step sizes.

    ratio(tau) = (||dbar||_p + ||A u||_p) / ||f||_p in counting norms,
    with the forcing norm taken over the steps the scheme consumes. The
    uniformity statistic max/min over the ladder detects step-size
    dependence of the constant.
    """
    taus = sorted((float(t) for t in tau_list), reverse=True)
    _check_sweep_preconditions(scheme, alpha, operator, taus)
    lo, hi = _FORCING_RANGE[scheme]

    def cell(tau: float):
        steps = horizon / tau
        n = round(steps)
        if not math.isclose(steps, n, rel_tol=1e-9) or n < 1:
            raise DomainError(f"horizon {horizon} is not a multiple of tau {tau}")
        grid = TimeGrid(tau, n)
        f = build_forcing(forcing_family, n, operator.dim, seed)
        fnorm = counting_lp_norm(f[lo:hi], p)
        if fnorm == 0.0:
            raise DomainError("forcing vanishes on the steps the scheme consumes")
        res = solve(SolveInput(scheme, alpha, operator, grid, f))
        ratio = (counting_lp_norm(res.dbar, p) + counting_lp_norm(res.au, p)) / fnorm
        return tau, n, ratio

    rows = _map_cells(cell, taus)
    ratios = [r for (_, _, r) in rows]
    return RegularityReport(
        scheme=scheme,
        alpha=alpha,
        p=p,
        rows=rows,
        uniformity=max(ratios) / min(ratios),
    )


# ---------------------------------------------------------------------------
# decay studies


@dataclass(frozen=True)
class DecayFit:
    """Least-squares slope of log ||A u^n|| against log t_n, plus the
    observed constant sup_n ||u^n|| / ||v||."""

    slope: float
    bound_constant: float


def decay_study(
    alpha: FracOrder, operator: OperatorHandle, v: np.ndarray, grid: TimeGrid
) -> DecayFit:
    """Fit the decay exponent of the homogeneous problem started at v.

    The fit window [N/4, N] skips the initial layer before the
    trajectory enters its asymptotic decay regime.
    """
    if alpha.regime is not Regime.SUB:
        raise DomainError("decay study applies to orders in (0,1)")
    v = np.asarray(v, dtype=complex)
    vnorm = float(np.linalg.norm(v))
    if vnorm == 0.0:
        raise DomainError("initial value must be nonzero")
    inp = SolveInput(
        Scheme.BE,
        alpha,
        operator,
        grid,
        np.zeros((grid.n_steps + 1, operator.dim), dtype=complex),
        initial_v=v,
    )
    res = solve_be_inhomogeneous(inp)
    au_norms = np.linalg.norm(res.au, axis=1)
    start = max(1, math.ceil(grid.n_steps / 4))
    window = au_norms[start - 1 :]
    if np.any(window < 1e-280):
        raise DomainError("trajectory underflowed; decay fit is degenerate")
    t = grid.times()[start:]
    slope = float(np.polyfit(np.log(t), np.log(window), 1)[0])
    sup_u = float(np.max(np.linalg.norm(res.u, axis=1)))
    return DecayFit(slope=slope, bound_constant=sup_u / vnorm)


# ---------------------------------------------------------------------------
# stability probes


@dataclass(frozen=True)
class StabilityVerdict:
    scheme: Scheme
    alpha: FracOrder
    lam: complex
    tau: float
    classification: str  # "Bounded" or "BlowUp"
    max_norm: float


def stability_probe(
    scheme: Scheme,
    alpha: FracOrder,
    lam: complex,
    tau: float,
    n_steps: int = 2048,
) -> StabilityVerdict:
    """Classify a scalar run of an explicit-type scheme as Bounded/BlowUp.

    Drives the recurrence with a unit impulse at step 0 and reads the
    solver's blow-up flag.
    """
    if scheme not in (Scheme.EE, Scheme.FCN):
        raise DomainError("stability probes cover the explicit-type schemes only")
    lam = complex(lam)
    half = alpha.alpha * math.pi / 2.0
    if lam.real >= 0.0 and abs(np.angle(lam)) < half:
        raise DomainError(
            "probe eigenvalue must have negative real part or avoid the "
            f"sector of half-angle {half:.6g}"
        )
    op = scalar_operator(lam)
    grid = TimeGrid(tau, n_steps)
    f = np.zeros((n_steps + 1, 1), dtype=complex)
    f[0, 0] = 1.0
    inp = SolveInput(scheme, alpha, op, grid, f)
    res = solve_ee(inp) if scheme is Scheme.EE else solve_fcn(inp)
    max_norm = float(np.max(np.linalg.norm(res.u, axis=1)))
    return StabilityVerdict(
        scheme=scheme,
        alpha=alpha,
        lam=lam,
        tau=tau,
        classification="BlowUp" if res.blew_up else "Bounded",
        max_norm=max_norm,
    )
