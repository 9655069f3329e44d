#!/usr/bin/env python3
"""
Tests for the problems module.
"""

import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from scipy.special import gamma as G

from fracbcfd.problems import Monomials, PROBLEMS, get_problem

DELTA = 1e-4


def _closed_form_ex1(x, t, alpha, gamma):
    def w(z):
        return (384 * z ** 5 / G(6 - alpha) - 3840 * z ** 6 / G(7 - alpha) + 17280 * z ** 7 / G(8 - alpha)
                - 40320 * z ** 8 / G(9 - alpha) + 40320 * z ** 9 / G(10 - alpha))
    return gamma * t * math.exp(t) * w(x) - (1.0 - gamma) * t * math.exp(t) * w(2.0 - x)


def _closed_form_ex2(x, t, alpha, gamma):
    def w(z):
        return (40 * z ** (3 - alpha) / G(4 - alpha) - 120 * z ** (4 - alpha) / G(5 - alpha)
                + 120 * z ** (5 - alpha) / G(6 - alpha) + 8 * z ** 3 / G(4 - alpha)
                - 24 * z ** 4 / G(5 - alpha) + 24 * z ** 5 / G(6 - alpha))
    return gamma * t * math.exp(-t) * w(x) - (1.0 - gamma) * t * math.exp(-t) * w(2.0 - x)


class TestMonomials:
    """Test the polynomial profile helper."""

    def test_roundoff_coefficients_are_zeroed(self):
        """Test that tiny composed coefficients become exact zeros."""
        mono = Monomials.from_polynomial(Polynomial([1.0, 1e-17, 2.0]))

        np.testing.assert_array_equal(mono.coeffs, [1.0, 0.0, 2.0])

    def test_mirrored(self):
        """Test that the mirror in r = L - s is the same function."""
        mono = Monomials.from_polynomial(Polynomial([0.0, 0.0, 4.0, -4.0, 1.0]))
        mirror = mono.mirrored(2.0)
        s = np.linspace(0.0, 2.0, 11)

        np.testing.assert_allclose(mirror.value(2.0 - s), mono.value(s), atol=1e-13)

    def test_flux_profile_of_constant(self):
        """Test the derivative of order alpha-1 of a constant."""
        s = np.array([0.25, 1.0, 3.0])

        np.testing.assert_allclose(Monomials(np.array([1.0])).flux_profile(s, 1.5), s ** -0.5 / G(0.5))

    def test_flux_profile_slope_matches_difference(self):
        """Test that the slope is the derivative of the flux profile."""
        mono = Monomials(np.array([0.0, 0.0, 1.0, 3.0]))
        s = np.array([0.3, 0.8, 1.5])
        fd = (mono.flux_profile(s + DELTA, 1.4) - mono.flux_profile(s - DELTA, 1.4)) / (2 * DELTA)

        np.testing.assert_allclose(mono.flux_profile_slope(s, 1.4), fd, rtol=1e-7)

    def test_vanishing_profile_has_finite_end_flux(self):
        """Test that a profile vanishing at the endpoint has zero flux there."""
        mono = Monomials(np.array([0.0, 0.0, 1.0]))

        assert mono.flux_profile(np.array([0.0]), 1.7)[0] == 0.0


class TestClosedForms:
    """Test the registered exact fluxes against independent closed forms."""

    @pytest.mark.parametrize("alpha", [1.2, 1.8])
    @pytest.mark.parametrize("gamma", [0.0, 0.5, 0.8])
    def test_ex1_flux(self, alpha, gamma):
        """Test the flux of the smooth problem."""
        problem = get_problem("ex1", alpha, gamma).spec
        x = np.linspace(0.0, 2.0, 21)

        np.testing.assert_allclose(problem.exact_p(x, 0.7), _closed_form_ex1(x, 0.7, alpha, gamma),
                                   rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("alpha", [1.5, 1.9])
    @pytest.mark.parametrize("gamma", [0.3, 0.5])
    def test_ex2_flux(self, alpha, gamma):
        """Test the flux of the weakly singular problem."""
        problem = get_problem("ex2", alpha, gamma).spec
        x = np.linspace(0.0, 2.0, 21)

        np.testing.assert_allclose(problem.exact_p(x, 0.4), _closed_form_ex2(x, 0.4, alpha, gamma),
                                   rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("name", ["ex1", "ex2", "ex4"])
    def test_antisymmetry(self, name):
        """Test that swapping gamma and reflecting x negates the flux."""
        x = np.linspace(0.0, 2.0, 17)
        p = get_problem(name, 1.6, 0.3).spec.exact_p(x, 0.9)
        p_swapped = get_problem(name, 1.6, 0.7).spec.exact_p(2.0 - x, 0.9)

        np.testing.assert_allclose(p + p_swapped, 0.0, atol=1e-10 * np.max(np.abs(p)))

    def test_boundary_data_is_exact_flux(self):
        """Test that phi and varphi are the end values of the exact flux."""
        problem = get_problem("ex2", 1.5, 0.4).spec

        assert problem.phi(0.6) == pytest.approx(float(problem.exact_p(0.0, 0.6)))
        assert problem.varphi(0.6) == pytest.approx(float(problem.exact_p(2.0, 0.6)))


class TestSourceConsistency:
    """Test that f = u_t - p_x holds for every registered problem."""

    @pytest.mark.parametrize("name,alpha,gamma", [
        ("ex1", 1.8, 0.5),
        ("ex1", 1.3, 0.2),
        ("ex2", 1.5, 0.5),
        ("ex2", 1.7, 0.9),
        ("ex3", 1.4, 0.5),
        ("ex4", 1.8, 0.5),
        ("ex4", 1.2, 0.0),
    ])
    def test_pde_residual(self, name, alpha, gamma):
        """Test the PDE residual by central differences."""
        problem = get_problem(name, alpha, gamma).spec
        lo, hi = (0.05, 0.95) if name == "ex3" else (0.1, 1.9)
        x = np.linspace(lo, hi, 25)
        t = 0.6
        u_t = (problem.exact_u(x, t + DELTA) - problem.exact_u(x, t - DELTA)) / (2 * DELTA)
        p_x = (problem.exact_p(x + DELTA, t) - problem.exact_p(x - DELTA, t)) / (2 * DELTA)
        f = problem.f(x, t)

        assert np.max(np.abs(u_t - p_x - f)) <= 1e-5 * max(1.0, np.max(np.abs(f)))

    def test_initial_condition(self):
        """Test that u0 is the exact solution at t = 0."""
        problem = get_problem("ex3", 1.4, 0.5).spec
        x = np.linspace(0.0, 1.0, 9)

        np.testing.assert_allclose(problem.u0(x), problem.exact_u(x, 0.0))


class TestRegistry:
    """Test problem lookup."""

    def test_names(self):
        """Test the registered names."""
        assert sorted(PROBLEMS) == ["ex1", "ex2", "ex3", "ex4"]

    def test_case_insensitive(self):
        """Test case-insensitive lookup."""
        problem = get_problem("EX2", 1.5, 0.5)

        assert problem.name == "ex2"
        assert (problem.a, problem.b, problem.T) == (0.0, 2.0, 1.0)

    def test_unknown_name(self):
        """Test that an unknown name is refused."""
        with pytest.raises(ValueError):
            get_problem("ex9", 1.5, 0.5)

    def test_ex3_requires_symmetric_weight(self):
        """Test that ex3 refuses gamma other than 1/2."""
        assert get_problem("ex3", 1.4, 0.5).b == 1.0
        with pytest.raises(ValueError):
            get_problem("ex3", 1.4, 0.3)

    def test_invalid_alpha(self):
        """Test that alpha outside (1, 2) is refused."""
        with pytest.raises(ValueError):
            get_problem("ex1", 2.0, 0.5)


if __name__ == "__main__":
    pytest.main([__file__])
