"""Time steppers for the fractional evolution model and discrete norms.

Every solver follows the same pattern: one factorization of the
n-independent step matrix, then a forward sweep whose history term is a
naive convolution (O(N^2 * dim), fine at desk scale). The discrete
derivative sequence is accumulated alongside, and the defining equation
is re-checked against A applied to the stored trajectory so that every
result carries its own residual.

Explicit-type schemes never raise on instability: growth beyond
1e8 times the data scale sets a blow-up flag and truncates the sweep
(continuing would only overflow).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .operators import OperatorHandle
from .special import FracOrder, Regime, gamma
from .weights import (
    Scheme,
    bdf2_weights,
    be_weights,
    l1_sub_weights,
    l1_wave_weights,
)

BLOW_UP_FACTOR = 1e8


@dataclass(frozen=True)
class TimeGrid:
    tau: float
    n_steps: int

    def __post_init__(self) -> None:
        if self.tau <= 0.0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        if self.n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")

    def t(self, n: int) -> float:
        return n * self.tau

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.tau


@dataclass(frozen=True)
class SolveInput:
    scheme: Scheme
    alpha: FracOrder
    operator: OperatorHandle
    grid: TimeGrid
    forcing: np.ndarray  # shape (n_steps + 1, dim)
    initial_v: np.ndarray | None = None
    initial_w: np.ndarray | None = None

    def __post_init__(self) -> None:
        f = np.asarray(self.forcing, dtype=complex)
        expected = (self.grid.n_steps + 1, self.operator.dim)
        if f.shape != expected:
            raise DomainError(f"forcing must have shape {expected}, got {f.shape}")
        object.__setattr__(self, "forcing", f)
        if self.initial_w is not None and self.alpha.regime is not Regime.WAVE:
            raise DomainError("a first-derivative initial value needs an order in (1,2)")
        for name in ("initial_v", "initial_w"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=complex)
                if v.shape != (self.operator.dim,):
                    raise DomainError(f"{name} must have shape ({self.operator.dim},)")
                object.__setattr__(self, name, v)


@dataclass
class SolveResult:
    """Trajectory u^0..u^N plus per-step diagnostics.

    ``dbar`` and ``au`` hold the discrete derivative and A u for steps
    1..N (row n-1 belongs to step n). ``residual_max`` is the largest
    norm of the scheme equation's residual, re-evaluated from the stored
    trajectory. On blow-up the sweep stops early: rows past
    ``stopped_at`` are zero and ``blew_up`` is set.
    """

    u: np.ndarray
    dbar: np.ndarray
    au: np.ndarray
    residual_max: float
    blew_up: bool = False
    stopped_at: int | None = None

    @property
    def n_steps(self) -> int:
        return len(self.u) - 1


def _require_zero_initial(inp: SolveInput) -> None:
    for name in ("initial_v", "initial_w"):
        v = getattr(inp, name)
        if v is not None and np.any(v != 0):
            raise DomainError(f"this scheme takes zero initial data; got nonzero {name}")


def _alloc(n: int, dim: int):
    u = np.zeros((n + 1, dim), dtype=complex)
    dbar = np.zeros((n, dim), dtype=complex)
    au = np.zeros((n, dim), dtype=complex)
    return u, dbar, au


def solve_be(inp: SolveInput) -> SolveResult:
    """Implicit stepping with the backward-difference quadrature.

    Step n solves (b_0 tau^(-a) I - A) u^n = f^n - tau^(-a) sum_{j>=1}
    b_j u^(n-j); the forcing value at step 0 is ignored.
    """
    _require_zero_initial(inp)
    return _solve_conv_implicit(inp, be_weights(inp.alpha, inp.grid.n_steps).coeffs, start=1)


def solve_bdf2(inp: SolveInput) -> SolveResult:
    """Implicit stepping with the second-order backward-difference
    quadrature and zero starting values u^0 = u^1 = 0; steps run from 2
    and the forcing values at steps 0 and 1 are ignored."""
    _require_zero_initial(inp)
    return _solve_conv_implicit(inp, bdf2_weights(inp.alpha, inp.grid.n_steps).coeffs, start=2)


def _solve_conv_implicit(inp: SolveInput, w: np.ndarray, start: int) -> SolveResult:
    grid, op = inp.grid, inp.operator
    n_steps, dim = grid.n_steps, op.dim
    rt = grid.tau ** (-inp.alpha.alpha)
    f = inp.forcing.copy()
    f[:start] = 0.0
    u, dbar, au = _alloc(n_steps, dim)
    solve = op.shifted_solver(w[0] * rt)
    residual = 0.0
    for n in range(start, n_steps + 1):
        hist = rt * (w[1 : n + 1] @ u[n - 1 :: -1])
        u[n] = solve(f[n] - hist)
        dbar[n - 1] = rt * w[0] * u[n] + hist
        au[n - 1] = op.apply(u[n])
        residual = max(residual, _norm(dbar[n - 1] - au[n - 1] - f[n]))
    return SolveResult(u, dbar, au, residual)


def solve_l1(inp: SolveInput) -> SolveResult:
    """Piecewise-interpolation stepping; the regime picks the variant.

    Orders below one use the piecewise-linear quadrature with step
    matrix b_0 tau^(-a) I - A. Orders in (1,2) difference the trajectory
    and average A and f over adjacent steps, with step matrix
    (a_0 tau^(-a) / Gamma(3-a)) I - A/2; this variant consumes the
    forcing value at step 0.
    """
    _require_zero_initial(inp)
    if inp.alpha.regime is Regime.SUB:
        return _solve_l1_sub(inp)
    return _solve_l1_wave(inp)


def _solve_l1_sub(inp: SolveInput) -> SolveResult:
    grid, op = inp.grid, inp.operator
    n_steps, dim = grid.n_steps, op.dim
    rt = grid.tau ** (-inp.alpha.alpha)
    b = l1_sub_weights(inp.alpha, n_steps).coeffs
    db = np.empty_like(b)
    db[0] = 0.0
    db[1:] = b[1:] - b[:-1]
    f = inp.forcing
    u, dbar, au = _alloc(n_steps, dim)
    solve = op.shifted_solver(b[0] * rt)
    residual = 0.0
    for n in range(1, n_steps + 1):
        # sum_{j=1}^{n-1} (b_j - b_{j-1}) u^{n-j}; the b_{n-1} u^0 term is zero
        hist = rt * (db[1:n] @ u[n - 1 : 0 : -1]) if n > 1 else np.zeros(dim, complex)
        u[n] = solve(f[n] - hist)
        dbar[n - 1] = rt * b[0] * u[n] + hist
        au[n - 1] = op.apply(u[n])
        residual = max(residual, _norm(dbar[n - 1] - au[n - 1] - f[n]))
    return SolveResult(u, dbar, au, residual)


def _solve_l1_wave(inp: SolveInput) -> SolveResult:
    grid, op = inp.grid, inp.operator
    n_steps, dim = grid.n_steps, op.dim
    a = inp.alpha.alpha
    gamma_scale = grid.tau ** (-a) / gamma(3.0 - a)
    w = l1_wave_weights(inp.alpha, n_steps).coeffs
    # e[k] = a_{k-1} - a_k multiplies the k-steps-back difference
    e = np.empty_like(w)
    e[0] = 0.0
    e[1:] = w[:-1] - w[1:]
    f = inp.forcing
    u, dbar, au = _alloc(n_steps, dim)
    du = np.zeros((n_steps + 1, dim), dtype=complex)  # du[j] = u^j - u^{j-1}
    solve = op.shifted_solver(gamma_scale * w[0], s=0.5)
    residual = 0.0
    for n in range(1, n_steps + 1):
        hist = e[n - 1 : 0 : -1] @ du[1:n] if n > 1 else np.zeros(dim, complex)
        au_prev = op.apply(u[n - 1])
        favg = 0.5 * (f[n] + f[n - 1])
        rhs = favg + 0.5 * au_prev + gamma_scale * (w[0] * u[n - 1] + hist)
        u[n] = solve(rhs)
        du[n] = u[n] - u[n - 1]
        dbar[n - 1] = gamma_scale * (w[0] * du[n] - hist)
        au[n - 1] = op.apply(u[n])
        residual = max(
            residual, _norm(dbar[n - 1] - 0.5 * (au[n - 1] + au_prev) - favg)
        )
    return SolveResult(u, dbar, au, residual)


def solve_ee(inp: SolveInput) -> SolveResult:
    """Explicit stepping: the backward-difference derivative at step n is
    matched to A u^(n-1) + f^(n-1), so no linear solve is needed.

    The step-size condition is the caller's responsibility; runaway
    growth sets the blow-up flag and truncates the sweep.
    """
    _require_zero_initial(inp)
    grid, op = inp.grid, inp.operator
    n_steps, dim = grid.n_steps, op.dim
    a = inp.alpha.alpha
    rt = grid.tau ** (-a)
    w = be_weights(inp.alpha, n_steps).coeffs
    f = inp.forcing
    scale = float(np.max(np.abs(f[:n_steps]))) if n_steps > 0 else 0.0
    limit = BLOW_UP_FACTOR * max(scale, 1e-300)
    u, dbar, au = _alloc(n_steps, dim)
    residual = 0.0
    blew_up = False
    stopped_at = None
    for n in range(1, n_steps + 1):
        hist = w[1 : n + 1] @ u[n - 1 :: -1]
        drive = op.apply(u[n - 1]) + f[n - 1]
        u[n] = (drive / rt - hist) / w[0]
        dbar[n - 1] = rt * (w[0] * u[n] + hist)
        au[n - 1] = op.apply(u[n])
        residual = max(residual, _norm(dbar[n - 1] - drive))
        if _norm(u[n]) > limit:
            blew_up = True
            stopped_at = n
            break
    return SolveResult(u, dbar, au, residual, blew_up, stopped_at)


def solve_fcn(inp: SolveInput) -> SolveResult:
    """Weighted-average implicit stepping: the backward-difference
    derivative at step n is matched to (1-a/2) A u^n + (a/2) A u^(n-1)
    plus the same average of f; consumes the forcing value at step 0.

    Unconditionally stable for orders below one; for orders in (1,2) the
    caller owns the step-size condition and blow-up is flagged.
    """
    _require_zero_initial(inp)
    grid, op = inp.grid, inp.operator
    n_steps, dim = grid.n_steps, op.dim
    a = inp.alpha.alpha
    rt = grid.tau ** (-a)
    w = be_weights(inp.alpha, n_steps).coeffs
    f = inp.forcing
    scale = float(np.max(np.abs(f)))
    limit = BLOW_UP_FACTOR * max(scale, 1e-300)
    u, dbar, au = _alloc(n_steps, dim)
    solve = op.shifted_solver(w[0] * rt, s=1.0 - a / 2.0)
    residual = 0.0
    blew_up = False
    stopped_at = None
    for n in range(1, n_steps + 1):
        hist = rt * (w[1 : n + 1] @ u[n - 1 :: -1])
        au_prev = op.apply(u[n - 1])
        favg = (1.0 - a / 2.0) * f[n] + a / 2.0 * f[n - 1]
        u[n] = solve(favg + a / 2.0 * au_prev - hist)
        dbar[n - 1] = rt * w[0] * u[n] + hist
        au[n - 1] = op.apply(u[n])
        residual = max(
            residual,
            _norm(dbar[n - 1] - (1.0 - a / 2.0) * au[n - 1] - a / 2.0 * au_prev - favg),
        )
        if _norm(u[n]) > limit:
            blew_up = True
            stopped_at = n
            break
    return SolveResult(u, dbar, au, residual, blew_up, stopped_at)


def solve_be_inhomogeneous(inp: SolveInput) -> SolveResult:
    """Backward-difference stepping with nonzero initial data.

    The discrete derivative acts on the shifted sequence u^n - v (orders
    below one) or u^n - v - t_n w (orders in (1,2)); equivalently the
    shifted sequence solves the zero-data scheme with forcing
    f^n + A v + t_n A w, which is how the sweep is run. ``dbar`` holds
    the derivative of the shifted sequence.
    """
    grid, op = inp.grid, inp.operator
    n_steps = grid.n_steps
    v = inp.initial_v if inp.initial_v is not None else np.zeros(op.dim, complex)
    w = inp.initial_w if inp.initial_w is not None else np.zeros(op.dim, complex)
    av = op.apply(v)
    aw = op.apply(w)
    times = grid.times()
    shifted_forcing = inp.forcing + av[None, :] + times[:, None] * aw[None, :]
    shifted_inp = SolveInput(
        Scheme.BE, inp.alpha, op, grid, shifted_forcing
    )
    res = solve_be(shifted_inp)
    drift = v[None, :] + times[:, None] * w[None, :]
    u = res.u + drift
    au = res.au + av[None, :] + times[1:, None] * aw[None, :]
    residual = 0.0
    for n in range(1, n_steps + 1):
        residual = max(residual, _norm(res.dbar[n - 1] - au[n - 1] - inp.forcing[n]))
    return SolveResult(u, res.dbar, au, residual)


_DISPATCH = {
    Scheme.BE: solve_be,
    Scheme.BDF2: solve_bdf2,
    Scheme.L1_SUB: solve_l1,
    Scheme.L1_WAVE: solve_l1,
    Scheme.EE: solve_ee,
    Scheme.FCN: solve_fcn,
}


def solve(inp: SolveInput) -> SolveResult:
    """Route to the scheme named in the input."""
    if inp.scheme not in _DISPATCH:
        raise DomainError(f"no solver for scheme {inp.scheme}")
    if inp.scheme is Scheme.L1_SUB and inp.alpha.regime is not Regime.SUB:
        raise DomainError("l1sub needs an order in (0,1)")
    if inp.scheme is Scheme.L1_WAVE and inp.alpha.regime is not Regime.WAVE:
        raise DomainError("l1wave needs an order in (1,2)")
    if inp.scheme is Scheme.BE and (
        inp.initial_v is not None or inp.initial_w is not None
    ):
        return solve_be_inhomogeneous(inp)
    return _DISPATCH[inp.scheme](inp)


# ---------------------------------------------------------------------------
# discrete norms


def _norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def _step_norms(seq) -> np.ndarray:
    arr = np.asarray(seq)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] == 0:
        raise DomainError("norm of an empty sequence")
    return np.linalg.norm(arr, axis=1)


def lp_scaled_norm(seq, tau: float, p: float) -> float:
    """(tau * sum ||u^n||^p)^(1/p); p = inf gives the max."""
    norms = _step_norms(seq)
    if p == math.inf:
        return float(np.max(norms))
    if p < 1.0:
        raise DomainError(f"p must be >= 1, got {p}")
    return float((tau * np.sum(norms**p)) ** (1.0 / p))


def weak_lp_norm(seq, tau: float, p: float) -> float:
    """sup over levels of level * (tau * #{n: ||u^n|| > level})^(1/p).

    Computed exactly: sort the step norms descending and maximize the
    k-th largest value against (k * tau)^(1/p).
    """
    if not (1.0 <= p < math.inf):
        raise DomainError(f"p must lie in [1, inf), got {p}")
    norms = np.sort(_step_norms(seq))[::-1]
    k = np.arange(1, len(norms) + 1, dtype=float)
    return float(np.max(norms * (k * tau) ** (1.0 / p)))


def counting_lp_norm(seq, p: float) -> float:
    """Plain sequence p-norm of the step norms, without the tau factor."""
    norms = _step_norms(seq)
    if p == math.inf:
        return float(np.max(norms))
    if p < 1.0:
        raise DomainError(f"p must be >= 1, got {p}")
    return float(np.sum(norms**p) ** (1.0 / p))
