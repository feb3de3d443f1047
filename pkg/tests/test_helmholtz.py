import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from sumrules import SumRuleError
from sumrules.core import completed_series
from sumrules.helmholtz import (
    DensityProfile,
    helmholtz_Z1,
    length_map,
    schrodinger_Z1_const_potential,
    transform,
)

shapes = st.tuples(st.floats(-1.8, 1.8), st.floats(0.1, 10.0), st.floats(0.2, 1.0))


def _density(form, alpha, beta, ell):
    return getattr(DensityProfile, form)(alpha, beta, ell)


def alpha_beta_schrodinger(alpha, beta, L):
    """The hbar = M = 1 form sqrt(2 beta) L / alpha coth(alpha L / sqrt(2 beta)) - 2 beta / alpha^2."""
    q = alpha * L / math.sqrt(2 * beta)
    return math.sqrt(2 * beta) * L / alpha / math.tanh(q) - 2 * beta / alpha**2


class TestDensity:
    def test_positivity(self):
        with pytest.raises(SumRuleError):
            DensityProfile.inverse_square(2.5, 1.0, 1.0)
        with pytest.raises(SumRuleError):
            DensityProfile.constant(-1.0)
        with pytest.raises(SumRuleError):
            DensityProfile.custom(lambda u: u, 1.0)

    def test_unknown(self):
        with pytest.raises(ValueError):
            DensityProfile("wavy")

    def test_custom_derivatives(self):
        d = DensityProfile.custom(lambda u: 2.0 / (1 + 0.8 * u) ** 4)
        ref = DensityProfile.borg(0.8, 2.0)
        u = np.linspace(-0.5, 0.5, 11)
        assert d.dsigma(u) == pytest.approx(ref.dsigma(u), rel=1e-9)
        assert d.d2sigma(u) == pytest.approx(ref.d2sigma(u), rel=1e-6)


class TestTransform:
    @given(st.sampled_from(["borg", "inverse_square"]), shapes)
    def test_map_metric(self, form, shape):
        alpha, beta, ell = shape
        alpha = alpha / ell  # keep |alpha| ell / 2 < 1
        d = _density(form, alpha, beta, ell)
        tp = transform(d)
        u = np.linspace(-0.45 * ell, 0.45 * ell, 41)
        h = 1e-5 * ell
        xp = (tp.x_of_u(u + h) - tp.x_of_u(u - h)) / (2 * h)
        assert np.max(np.abs(xp**2 / d.sigma(u) - 0.5)) < 1e-7

    @given(st.sampled_from(["borg", "inverse_square"]), shapes)
    def test_amplitude_equation(self, form, shape):
        alpha, beta, ell = shape
        alpha = alpha / ell
        d = _density(form, alpha, beta, ell)
        tp = transform(d)
        u = np.linspace(-0.45 * ell, 0.45 * ell, 41)
        h = 1e-5 * ell
        rp = (tp.R_of_u(u + h) - tp.R_of_u(u - h)) / (2 * h)
        assert np.max(np.abs(d.dsigma(u) / d.sigma(u) + 4 * rp / tp.R_of_u(u))) < 1e-6 * (1 + abs(alpha))

    @given(st.floats(-1.9, 1.9), st.floats(0.1, 10.0))
    def test_borg_is_free(self, alpha, beta):
        tp = transform(DensityProfile.borg(alpha, beta))
        x = np.linspace(-tp.L / 2, tp.L / 2, 1000)
        u = np.array([tp.u_of_x(xi) for xi in x[::50]])
        assert np.max(np.abs(tp.V_of_u(np.linspace(-0.5, 0.5, 1000)))) < 1e-10 * (1 + alpha**2 / beta)
        assert np.max(np.abs(tp.V_of_u(u))) < 1e-10 * (1 + alpha**2 / beta)

    @given(st.floats(-1.9, 1.9), st.floats(0.1, 10.0))
    def test_inverse_square_constant_potential(self, alpha, beta):
        tp = transform(DensityProfile.inverse_square(alpha, beta))
        u = np.linspace(-0.5, 0.5, 101)
        assert tp.V_of_u(u) == pytest.approx(np.full(101, alpha**2 / (4 * beta)), rel=1e-12, abs=1e-15)
        # x(u) = c1 + sqrt(beta) ln(1 + alpha u) / (sqrt 2 alpha), pinned so x(-1/2) = -L/2
        if abs(alpha) > 1e-3:
            shape = math.sqrt(beta) * np.log1p(alpha * u) / (math.sqrt(2) * alpha)
            assert np.ptp(tp.x_of_u(u) - shape) < 1e-12 * (1 + tp.L)

    def test_constant(self):
        tp = transform(DensityProfile.constant(3.0, 2.0))
        assert tp.L == pytest.approx(math.sqrt(1.5) * 2.0)
        assert tp.x_of_u(1.0) == pytest.approx(tp.L / 2)
        assert tp.x_of_u(-1.0) == pytest.approx(-tp.L / 2)
        assert np.all(tp.V_of_u(np.linspace(-1, 1, 9)) == 0.0)

    @given(st.sampled_from(["borg", "inverse_square"]), shapes, st.floats(-0.5, 0.5))
    def test_round_trip(self, form, shape, frac):
        alpha, beta, ell = shape
        alpha = alpha / ell
        tp = transform(_density(form, alpha, beta, ell))
        u = frac * ell
        assert tp.u_of_x(tp.x_of_u(u)) == pytest.approx(u, abs=1e-10 * ell)
        assert tp.x_of_u(-ell / 2) == pytest.approx(-tp.L / 2, abs=1e-12 * (1 + tp.L))

    def test_monotone(self):
        tp = transform(DensityProfile.custom(lambda u: 1.5 + np.sin(6 * u)))
        x = tp.x_of_u(np.linspace(-0.5, 0.5, 200))
        assert np.all(np.diff(x) > 0)

    def test_custom_matches_closed(self):
        closed = transform(DensityProfile.inverse_square(0.9, 2.0))
        custom = transform(DensityProfile.custom(lambda u: 2.0 / (1 + 0.9 * u) ** 2))
        u = np.linspace(-0.5, 0.5, 7)
        assert custom.L == pytest.approx(closed.L, rel=1e-12)
        assert custom.x_of_u(u) == pytest.approx(closed.x_of_u(u), abs=1e-12)
        assert custom.V_of_u(u) == pytest.approx(closed.V_of_u(u), rel=1e-5)


class TestLength:
    def test_inverse_square(self):
        a, b, ell = 1.2, 3.0, 1.3
        assert length_map(DensityProfile.inverse_square(a, b, ell)) == pytest.approx(
            math.sqrt(2 * b) / a * math.atanh(a * ell / 2), rel=1e-14)

    def test_constant(self):
        assert length_map(DensityProfile.constant(8.0), ell=0.5) == pytest.approx(1.0)

    @given(st.floats(1e-4, 1e-2), st.floats(0.5, 4.0), st.floats(0.3, 1.5))
    def test_small_alpha(self, a, b, ell):
        L = length_map(DensityProfile.inverse_square(a, b, ell))
        lead = math.sqrt(b / 2) * ell
        assert L == pytest.approx(lead * (1 + (a * ell) ** 2 / 12), rel=1e-8)

    def test_quadrature(self):
        d = DensityProfile.borg(0.7, 1.4, 0.9)
        quad = integrate.quad(lambda u: math.sqrt(float(d.sigma(u)) / 2), -0.45, 0.45, epsrel=1e-14)[0]
        assert length_map(d) == pytest.approx(quad, rel=1e-13)


class TestSumRules:
    def test_inverse_square_closed(self):
        a, b, ell = 1.0, 1.0, 1.0
        z = helmholtz_Z1(DensityProfile.inverse_square(a, b, ell))
        assert z == pytest.approx(4 * math.atanh(0.5) - 2, rel=1e-14)
        assert z == pytest.approx(0.1972246, abs=5e-8)
        quad = integrate.quad(lambda u: (0.25 - u * u) / (1 + u) ** 2, -0.5, 0.5, epsrel=1e-14)[0]
        assert z == pytest.approx(quad, rel=1e-12)

    @given(st.floats(-1.8, 1.8), st.floats(0.1, 10.0), st.floats(0.2, 2.0))
    def test_inverse_square_formula(self, alpha, beta, ell):
        alpha = alpha / ell
        if abs(alpha) < 1e-3:
            return
        z = helmholtz_Z1(DensityProfile.inverse_square(alpha, beta, ell))
        direct = 4 * beta * math.atanh(alpha * ell / 2) / (alpha**3 * ell) - 2 * beta / alpha**2
        assert z == pytest.approx(direct, rel=1e-9)

    def test_constant(self):
        assert helmholtz_Z1(DensityProfile.constant(2.0), ell=3.0) == pytest.approx(3.0)

    def test_custom(self):
        d = DensityProfile.custom(lambda u: 1.5 + np.sin(6 * u))
        z = helmholtz_Z1(d)
        ref = integrate.quad(lambda u: (0.25 - u * u) * (1.5 + math.sin(6 * u)), -0.5, 0.5, epsrel=1e-14)[0]
        assert z == pytest.approx(ref, rel=1e-12)

    def test_schrodinger_limits(self):
        assert schrodinger_Z1_const_potential(1.0, 0.0) == pytest.approx(1 / 3, rel=1e-15)
        assert schrodinger_Z1_const_potential(1.0, 1e-12) == pytest.approx(1 / 3, rel=1e-11)
        with pytest.raises(SumRuleError):
            schrodinger_Z1_const_potential(1.0, -np.pi**2 / 2)

    @pytest.mark.parametrize("L, V0", [(1.0, 1.0), (2.0, -1.0), (0.5, 30.0), (1.0, 0.4)])
    def test_schrodinger_series(self, L, V0):
        val, bound = completed_series(lambda n: 1 / (np.pi**2 * n * n / (2 * L * L) + V0), 1, 1.0,
                                      leading=1 / (2 * L * L), direct=1_000_000)
        assert schrodinger_Z1_const_potential(L, V0) == pytest.approx(val, abs=bound + 1e-14)

    @given(st.floats(-0.9, 0.9), st.floats(0.1, 10.0), st.floats(0.2, 3.0))
    def test_equivalence(self, t, beta, ell):
        alpha = 2 * t / ell  # |alpha| ell / 2 <= 0.9
        d = DensityProfile.inverse_square(alpha, beta, ell)
        lhs = helmholtz_Z1(d)
        rhs = schrodinger_Z1_const_potential(length_map(d), alpha**2 / (4 * beta))
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    @given(st.floats(0.05, 1.9), st.floats(0.1, 10.0))
    def test_alpha_beta_schrodinger_form(self, alpha, beta):
        L = length_map(DensityProfile.inverse_square(alpha, beta))
        assert schrodinger_Z1_const_potential(L, alpha**2 / (4 * beta)) == pytest.approx(
            alpha_beta_schrodinger(alpha, beta, L), rel=1e-8)
