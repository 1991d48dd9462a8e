import cmath
import math

import numpy as np
import pytest

from fracstep import (
    DomainError,
    FracOrder,
    Scheme,
    SingularityError,
    bdf2_weights,
    be_weights,
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
from fracstep.symbols import curve_theta_grid, xi_from_theta

A05 = FracOrder(0.5)
A15 = FracOrder(1.5)


class TestDelta:
    def test_backward_difference_principal_branch(self):
        got = delta(Scheme.BE, A05, 1j)
        want = 2.0**0.25 * cmath.exp(-1j * math.pi / 8.0)
        assert abs(got - want) < 1e-14

    def test_bdf2_at_minus_one(self):
        # the pre-power polynomial evaluates to 4 there
        for alpha in (0.3, 0.5, 1.5):
            got = delta(Scheme.BDF2, FracOrder(alpha), -1.0)
            assert abs(got - 4.0**alpha) < 1e-13

    def test_sub_symbol_small_angle_asymptotic(self):
        # near xi = 1 the symbol behaves like (i*theta)^alpha
        theta = 0.01
        got = delta(Scheme.L1_SUB, A05, cmath.exp(-1j * theta))
        want = (1j * theta) ** 0.5
        assert abs(got - want) / abs(want) < 0.01

    def test_weight_consistency_inside_disk(self):
        xi = 0.9 * cmath.exp(1j * math.pi / 3.0)
        for alpha in (0.3, 0.5, 1.5):
            a = FracOrder(alpha)
            for scheme, table in ((Scheme.BE, be_weights), (Scheme.BDF2, bdf2_weights)):
                w = table(a, 400).coeffs
                total = np.polyval(w[::-1], xi)
                assert abs(total - delta(scheme, a, xi)) < 1e-8

    def test_explicit_symbol_phase(self):
        # arg delta = -alpha*pi/2 - (1 - alpha/2)*theta on the upper arc
        for theta in (0.3, 1.0, 2.0):
            got = delta(Scheme.EE, A05, cmath.exp(1j * theta))
            want_arg = -0.5 * math.pi / 2.0 - 0.75 * theta
            assert abs(cmath.phase(got) - want_arg) < 1e-13

    def test_singular_points(self):
        with pytest.raises(SingularityError):
            delta(Scheme.BE, A05, 1.0)
        with pytest.raises(SingularityError):
            delta(Scheme.L1_WAVE, A15, -1.0)
        # -1 is fine for every other scheme
        delta(Scheme.L1_SUB, A05, -1.0)
        delta(Scheme.FCN, A05, -1.0)

    def test_regime_mismatch(self):
        with pytest.raises(DomainError):
            delta(Scheme.L1_SUB, A15, 1j)
        with pytest.raises(DomainError):
            delta(Scheme.L1_WAVE, A05, 1j)


class TestSectorMargin:
    def test_backward_difference_at_pi(self):
        (_, margin), = sector_margin(Scheme.BE, A05, [math.pi])
        assert abs(margin - math.pi / 4.0) < 1e-14

    def test_sub_symbol_inside_sector(self):
        grid = np.linspace(1e-4, 2.0 * math.pi - 1e-4, 100)
        for _, margin in sector_margin(Scheme.L1_SUB, A05, grid):
            assert margin > 0.0

    def test_sub_symbol_phase_range(self):
        # phases fall in [0, alpha*pi/2) on the upper arc, mirrored below
        for alpha in (0.1, 0.5, 0.9):
            a = FracOrder(alpha)
            half = alpha * math.pi / 2.0
            grid = np.linspace(1e-4, 2.0 * math.pi - 1e-4, 1000)
            for theta in grid:
                ph = cmath.phase(delta(Scheme.L1_SUB, a, cmath.exp(-1j * theta)))
                if theta <= math.pi:
                    assert 0.0 <= ph < half
                else:
                    assert -half < ph <= 0.0

    def test_wave_symbol_inside_sector(self):
        grid = np.linspace(1e-3, 2.0 * math.pi - 1e-3, 400)
        grid = grid[np.abs(grid - math.pi) > 1e-3]
        for _, margin in sector_margin(Scheme.L1_WAVE, A15, grid):
            assert margin > 0.0

    def test_explicit_curve_exits_sector(self):
        (_, margin), = sector_margin(Scheme.EE, A05, [math.pi / 2.0])
        want = 0.25 * math.pi - abs(-0.25 * math.pi - 0.75 * math.pi / 2.0)
        assert margin < 0.0
        assert abs(margin - want) < 1e-13


class TestDFactor:
    def test_small_angle_limit(self):
        # the polylog ratio term approaches 2 - alpha at xi -> 1
        xi = cmath.exp(-1j * 1e-4)
        dval = d_factor(A05, xi)
        # strip the outer factors: d = (1+xi)(-2 + ratio)
        ratio = dval / (1.0 + xi) + 2.0
        assert abs(ratio - 1.5) < 1e-2

    def test_conjugate_symmetry(self):
        a = FracOrder(0.7)
        xi = cmath.exp(-1j * math.pi / 3.0)
        assert abs(d_factor(a, xi.conjugate()) - d_factor(a, xi).conjugate()) < 1e-12

    @pytest.mark.parametrize("alpha", [0.5, 1.5])
    def test_sup_stable_under_refinement(self, alpha):
        a = FracOrder(alpha)
        sups = []
        for n in (1000, 4000):
            grid = curve_theta_grid(n)
            sups.append(max(abs(d_factor(a, cmath.exp(-1j * t))) for t in grid))
        assert math.isfinite(sups[0]) and math.isfinite(sups[1])
        assert abs(sups[1] - sups[0]) / sups[0] < 0.05

    @pytest.mark.parametrize(
        "alpha,scheme", [(0.5, Scheme.L1_SUB), (1.5, Scheme.L1_WAVE)]
    )
    def test_derivative_identity(self, alpha, scheme):
        # (1-xi)(1+xi) delta'(xi) = d(xi) delta(xi), checked by central
        # differences strictly inside the disk
        a = FracOrder(alpha)
        h = 1e-6
        for theta in (0.5, 1.5, 2.5, 4.0, 5.5):
            xi = 0.97 * cmath.exp(-1j * theta)
            dp = (delta(scheme, a, xi + h) - delta(scheme, a, xi - h)) / (2.0 * h)
            lhs = (1.0 - xi) * (1.0 + xi) * dp
            rhs = d_factor(a, xi) * delta(scheme, a, xi)
            assert abs(lhs - rhs) < 1e-6 * abs(rhs)

    def test_singularities(self):
        with pytest.raises(SingularityError):
            d_factor(A05, 1.0)
        with pytest.raises(SingularityError):
            d_factor(A05, -1.0)


class TestExplicitBound:
    def test_classical_limit(self):
        b = ee_stability_bound(FracOrder(1.0 - 1e-12), math.pi)
        assert abs(b.bound - 2.0) < 1e-9

    def test_half_order_values(self):
        assert abs(ee_stability_bound(A05, math.pi).bound - math.sqrt(2.0)) < 1e-14
        want = 2.0**0.5 * math.sin(math.pi / 3.0) ** 0.5
        assert abs(ee_stability_bound(A05, 0.75 * math.pi).bound - want) < 1e-14

    def test_domain(self):
        with pytest.raises(DomainError):
            ee_stability_bound(A05, 0.2)  # below alpha*pi/2
        with pytest.raises(DomainError):
            ee_stability_bound(A05, 3.2)  # beyond pi


class TestAveragedSchemeFunctions:
    def test_limits_at_zero_angle(self):
        for alpha in (0.5, 1.5):
            a = FracOrder(alpha)
            assert abs(cn_psi(a, 1e-12)) < 1e-11
            assert abs(cn_rho(a, 1e-12) - 1.0) < 1e-12

    def test_quarter_turn_near_order_one(self):
        a = FracOrder(1.0 - 1e-12)
        assert abs(cn_psi(a, math.pi / 2.0) - math.pi / 4.0) < 1e-11

    def test_rho_at_pi(self):
        assert abs(cn_rho(A15, math.pi) - 0.5) < 1e-14

    def test_psi_continuity_and_monotonicity(self):
        # (alpha/2) theta - psi(theta) increases below order one and
        # decreases above, over the full circle
        grid = np.linspace(1e-6, 2.0 * math.pi - 1e-6, 1000)
        for alpha, sign in ((0.3, 1.0), (0.5, 1.0), (1.5, -1.0), (1.9, -1.0)):
            a = FracOrder(alpha)
            vals = np.array([alpha / 2.0 * t - cn_psi(a, t) for t in grid])
            assert np.all(sign * np.diff(vals) >= -1e-12)

    def test_root_residual_and_monotonicity(self):
        a = A15
        phis = [0.8 * math.pi, 0.85 * math.pi, 0.9 * math.pi]
        roots = [cn_theta_phi(a, phi) for phi in phis]
        for phi, theta in zip(phis, roots):
            resid = cn_psi(a, theta) - 0.75 * theta - (phi - 0.75 * math.pi)
            assert abs(resid) < 1e-10
        assert roots[0] < roots[1] < roots[2]

    def test_root_boundary(self):
        # the left side of the root equation is cubic at zero, so the root
        # shrinks like the cube root of the angle gap
        t6 = cn_theta_phi(A15, 0.75 * math.pi + 1e-6)
        t9 = cn_theta_phi(A15, 0.75 * math.pi + 1e-9)
        assert t6 < 0.05
        assert t9 < 0.005
        assert t9 < t6 / 8.0

    def test_root_domain(self):
        with pytest.raises(DomainError):
            cn_theta_phi(A05, 0.9 * math.pi)  # sub regime has no restriction
        with pytest.raises(DomainError):
            cn_theta_phi(A15, 0.5 * math.pi)  # below alpha*pi/2

    def test_bound_limit_and_monotonicity(self):
        near_pi = cn_stability_bound(A15, math.pi - 1e-9).bound
        assert abs(near_pi - 2.0**1.5 / 0.5) < 1e-5
        b1 = cn_stability_bound(A15, 0.8 * math.pi).bound
        b2 = cn_stability_bound(A15, 0.9 * math.pi).bound
        assert 0.0 < b1 < b2


class TestCurveSample:
    def test_grid_avoids_singular_points(self):
        grid = curve_theta_grid(17)
        assert np.all(grid > 0.0) and np.all(grid < 2.0 * math.pi)
        assert np.all(np.abs(grid - math.pi) >= 1e-6 - 1e-15)
        with pytest.raises(DomainError):
            curve_theta_grid(7)

    def test_backward_difference_peak_modulus(self):
        samples = curve_sample(Scheme.BE, A05, 1.0, 4095)
        peak = max(s.modulus for s in samples)
        assert abs(peak - 2.0**0.5) < 1e-10

    def test_tau_scaling(self):
        s1 = curve_sample(Scheme.BE, A05, 1.0, 64)
        s2 = curve_sample(Scheme.BE, A05, 0.25, 64)
        for a, b in zip(s1, s2):
            assert abs(b.value - a.value * 0.25**-0.5) < 1e-12 * abs(b.value)

    def test_explicit_modulus_monotone(self):
        samples = curve_sample(Scheme.EE, A05, 1.0, 512)
        upper = [s.modulus for s in samples if s.theta < math.pi]
        assert all(b > a for a, b in zip(upper, upper[1:]))

    def test_averaged_scheme_stays_in_sector(self):
        samples = curve_sample(Scheme.FCN, A05, 1.0, 512)
        for s in samples:
            assert abs(s.argument) < 0.25 * math.pi

    def test_convention_recorded(self):
        assert curve_sample(Scheme.BE, A05, 1.0, 16)[0].xi_sign == +1
        assert curve_sample(Scheme.L1_SUB, A05, 1.0, 16)[0].xi_sign == -1
        assert xi_from_theta(Scheme.L1_SUB, 0.5) == cmath.exp(-0.5j)


def test_bdf2_prepower_polynomial_has_positive_real_part():
    for theta in curve_theta_grid(512):
        xi = cmath.exp(1j * theta)
        q = 1.5 - 2.0 * xi + 0.5 * xi * xi
        assert q.real > 0.0


def test_shifted_kernel_exits_sector():
    # the shifted backward kernel leaves the admissible sector, which is
    # why no solver is generated from it
    a = A05
    margins = []
    for theta in curve_theta_grid(512):
        val = shifted_kernel_symbol(a, cmath.exp(1j * theta))
        margins.append(0.25 * math.pi - abs(cmath.phase(val)))
    assert min(margins) < -0.5
