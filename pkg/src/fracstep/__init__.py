"""Time-stepping toolkit for fractional evolution equations.

Implements five discretizations of the evolution model with a fractional
time derivative of order in (0,1) or (1,2): convolution quadratures
generated by the backward difference of first and second order, the
piecewise-interpolation scheme in both regimes, an explicit scheme and a
weighted-average implicit scheme. Alongside the steppers: coefficient
tables, characteristic symbols with sector diagnostics, step-size
bounds, finite-dimensional example operators, and an experiment harness
for regularity ratios, convergence orders, decay rates and stability
probes.
"""

from .errors import DomainError, FracstepError, SingularityError, StabilityError
from .harness import (
    ConvergenceTable,
    DecayFit,
    ManufacturedProblem,
    RegularityReport,
    StabilityVerdict,
    build_forcing,
    convergence_study,
    decay_study,
    lcg_uniform,
    manufactured_forcing,
    manufactured_states,
    regularity_sweep,
    stability_probe,
)
from .operators import (
    DenseOperator,
    OperatorHandle,
    SpectralDiagonalOperator,
    TridiagonalOperator,
    complex_scaled,
    dirichlet_laplacian_1d,
    dirichlet_laplacian_2d,
    fractional_laplacian_half,
    numerical_radius,
    resolvent_norm_scan,
    scalar_operator,
)
from .solvers import (
    SolveInput,
    SolveResult,
    TimeGrid,
    counting_lp_norm,
    lp_scaled_norm,
    solve,
    solve_bdf2,
    solve_be,
    solve_be_inhomogeneous,
    solve_ee,
    solve_fcn,
    solve_l1,
    weak_lp_norm,
)
from .special import (
    FracOrder,
    Regime,
    caputo_power,
    frac_power,
    gamma,
    ml_e,
    polylog_circle,
    polylog_series,
)
from .symbols import (
    CurveSample,
    SectorSpec,
    StabilityBound,
    cn_psi,
    cn_rho,
    cn_stability_bound,
    cn_theta_phi,
    curve_sample,
    d_factor,
    delta,
    ee_stability_bound,
    sector_margin,
    shifted_kernel_symbol,
)
from .weights import (
    Scheme,
    WeightTable,
    bdf2_weights,
    be_weights,
    l1_sub_weights,
    l1_wave_weights,
    pcdg_weights,
)

__version__ = "0.1.0"
