#!/usr/bin/env python3
"""
Tests for the dense module.
"""

import numpy as np
import pytest

from fracbcfd.dense import (
    DenseScheme,
    ProblemSpec,
    apply_flux_divergence,
    assemble_stiffness,
    cn_system_matrices,
    dense_lu_solve,
    diffusion_vectors,
    recover_flux,
    sample_coefficient,
    source_vector,
)
from fracbcfd.errors import CoefficientError, SingularSystemError
from fracbcfd.grid import build_graded, build_perturbed, build_uniform
from fracbcfd.problems import get_problem
from fracbcfd.quadrature import build_left_coefficients, build_right_coefficients


def _tables(grid, alpha):
    return build_left_coefficients(grid, alpha), build_right_coefficients(grid, alpha)


def _zero(x, t=0.0):
    return np.zeros_like(np.asarray(x, dtype=np.float64))


def _spec(**overrides):
    fields = dict(
        alpha=1.5,
        gamma=0.5,
        KL=lambda x, t: 1.0 + x,
        KR=lambda x, t: 2.0 - x,
        f=_zero,
        phi=lambda t: 0.0,
        varphi=lambda t: 0.0,
        u0=_zero,
    )
    fields.update(overrides)
    return ProblemSpec(**fields)


class TestProblemSpec:
    """Test validation of model data."""

    def test_rejects_bad_gamma(self):
        """Test that gamma outside [0, 1] is refused."""
        with pytest.raises(ValueError):
            _spec(gamma=1.5)

    def test_rejects_bad_alpha(self):
        """Test that alpha outside (1, 2) is refused."""
        with pytest.raises(ValueError):
            _spec(alpha=2.0)

    def test_has_exact(self):
        """Test the exact-solution flag."""
        assert not _spec().has_exact
        assert get_problem("ex2", 1.5, 0.5).spec.has_exact


class TestCoefficients:
    """Test sampling of the diffusion coefficients."""

    def test_negative_coefficient_rejected(self):
        """Test that a negative K raises CoefficientError."""
        grid = build_uniform(0.0, 1.0, 8)

        with pytest.raises(CoefficientError):
            sample_coefficient(lambda x, t: x - 0.5, grid, 0.0, "KL")

    def test_non_finite_coefficient_rejected(self):
        """Test that a NaN K raises CoefficientError."""
        grid = build_uniform(0.0, 1.0, 8)

        with pytest.raises(CoefficientError):
            sample_coefficient(lambda x, t: np.full_like(x, np.nan), grid, 0.0, "KR")

    def test_scalar_coefficient_is_broadcast(self):
        """Test that a constant callable is sampled at every edge."""
        grid = build_uniform(0.0, 1.0, 8)

        np.testing.assert_array_equal(sample_coefficient(lambda x, t: 2.0, grid, 0.0, "KL"), np.full(9, 2.0))

    def test_diffusion_vectors_vanish_at_boundary(self):
        """Test that the boundary edges do not enter the scalings."""
        grid = build_perturbed(0.0, 1.0, 10, 0.5, seed=3)
        dv = diffusion_vectors(grid, _spec(), 0.0)

        assert dv.dplusL[-1] == 0.0
        assert dv.dminusL[0] == 0.0
        assert dv.dplusR[-1] == 0.0
        assert dv.dminusR[0] == 0.0
        expected = (1.0 + grid.edges[1]) / (grid.stag_widths[1] * grid.widths[0])
        assert dv.dplusL[0] == pytest.approx(expected)


class TestStiffness:
    """Test the dense stiffness matrix."""

    @pytest.mark.parametrize("M", [5, 16, 32])
    @pytest.mark.parametrize("gamma", [0.0, 0.3, 1.0])
    def test_columns_match_flux_divergence(self, M, gamma):
        """Test that column j of A is the flux divergence of the j-th unit vector."""
        grid = build_perturbed(0.0, 2.0, M, 0.5, seed=M)
        problem = get_problem("ex2", 1.6, 0.5).spec
        problem = _spec(alpha=1.6, gamma=gamma, KL=problem.KL, KR=problem.KR, b=2.0)
        cL, cR = _tables(grid, 1.6)
        A = assemble_stiffness(grid, cL, cR, problem, 0.7).A

        for j in range(M):
            e = np.zeros(M)
            e[j] = 1.0
            np.testing.assert_allclose(A[:, j], apply_flux_divergence(grid, cL, cR, problem, e, 0.7),
                                       rtol=1e-12, atol=1e-10)

    def test_linear_in_gamma(self):
        """Test A(gamma) = gamma * A(1) + (1 - gamma) * A(0)."""
        grid = build_graded(0.0, 2.0, 20, 0.5, 1.5)
        cL, cR = _tables(grid, 1.4)

        def stiffness(gamma):
            return assemble_stiffness(grid, cL, cR, _spec(alpha=1.4, gamma=gamma, b=2.0), 0.3).A

        np.testing.assert_allclose(stiffness(0.3), 0.3 * stiffness(1.0) + 0.7 * stiffness(0.0),
                                   rtol=1e-12, atol=1e-10)

    def test_zero_coefficient_gives_zero_matrix(self):
        """Test that K = 0 is admitted and gives A = 0."""
        grid = build_uniform(0.0, 2.0, 12)
        problem = get_problem("ex1", 1.8, 0.5).spec
        cL, cR = _tables(grid, 1.8)

        A = assemble_stiffness(grid, cL, cR, problem, 0.0).A
        assert np.all(A == 0.0)

    def test_scheme_reuses_tables(self):
        """Test that DenseScheme matches assemble_stiffness at several times."""
        grid = build_graded(0.0, 2.0, 16, 0.5, 1.5)
        problem = get_problem("ex2", 1.5, 0.4).spec
        cL, cR = _tables(grid, 1.5)
        scheme = DenseScheme(grid, cL, cR)

        for t in (0.25, 1.0):
            np.testing.assert_array_equal(scheme.stiffness(problem, t).A,
                                          assemble_stiffness(grid, cL, cR, problem, t).A)

    def test_scheme_rejects_mismatched_tables(self):
        """Test that tables from another grid are refused."""
        grid = build_uniform(0.0, 1.0, 8)
        cL, _ = _tables(grid, 1.5)
        _, cR = _tables(build_uniform(0.0, 1.0, 9), 1.5)

        with pytest.raises(ValueError):
            DenseScheme(grid, cL, cR)


class TestDirectSolve:
    """Test the Crank-Nicolson matrices and LU solve."""

    def test_cn_matrices(self):
        """Test the two Crank-Nicolson matrices."""
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        lhs, rhs = cn_system_matrices(A, 2.0 * A, 0.5)

        np.testing.assert_allclose(lhs, np.eye(2) - 0.25 * A)
        np.testing.assert_allclose(rhs, np.eye(2) + 0.5 * A)

    def test_cn_matrices_shape_mismatch(self):
        """Test that matrices of different order are refused."""
        with pytest.raises(ValueError):
            cn_system_matrices(np.eye(3), np.eye(4), 0.1)

    def test_lu_solve(self):
        """Test a well-conditioned solve."""
        rng = np.random.Generator(np.random.PCG64(0))
        lhs = np.eye(6) + 0.1 * rng.standard_normal((6, 6))
        x = rng.standard_normal(6)

        np.testing.assert_allclose(dense_lu_solve(lhs, lhs @ x), x, rtol=1e-12)

    def test_singular_system(self):
        """Test that a singular matrix raises SingularSystemError."""
        with pytest.raises(SingularSystemError):
            dense_lu_solve(np.ones((3, 3)), np.ones(3))


class TestFluxAndSource:
    """Test flux recovery and the source vector."""

    def test_source_vector_boundary_corrections(self):
        """Test the boundary flux terms of F."""
        grid = build_perturbed(0.0, 1.0, 10, 0.5, seed=2)
        problem = _spec(f=lambda x, t: np.full_like(x, t), phi=lambda t: 1.0, varphi=lambda t: 2.0)
        F = source_vector(grid, problem, 0.5, 0.1)

        np.testing.assert_allclose(F[1:-1], 0.45)
        assert F[0] == pytest.approx(0.45 - 1.0 / grid.widths[0])
        assert F[-1] == pytest.approx(0.45 + 2.0 / grid.widths[-1])

    def test_recover_flux_ends_are_boundary_data(self):
        """Test that the end fluxes are the imposed values."""
        grid = build_uniform(0.0, 1.0, 8)
        problem = _spec(phi=lambda t: -3.0, varphi=lambda t: 4.0)
        cL, cR = _tables(grid, 1.5)
        p = recover_flux(grid, cL, cR, problem, np.ones(8), 0.0)

        assert p.shape == (9,)
        assert p[0] == -3.0
        assert p[-1] == 4.0

    def test_recovered_flux_converges(self):
        """Test that the flux of the exact cell values approaches the exact flux."""
        problem = get_problem("ex1", 1.5, 0.5).spec
        errors = []
        for M in (64, 128):
            grid = build_uniform(0.0, 2.0, M)
            cL, cR = _tables(grid, 1.5)
            u = problem.exact_u(np.asarray(grid.centers), 1.0)
            p = recover_flux(grid, cL, cR, problem, u, 1.0)
            errors.append(np.max(np.abs(p[1:-1] - problem.exact_p(np.asarray(grid.edges[1:-1]), 1.0))))

        scale = np.max(np.abs(problem.exact_p(np.linspace(0.0, 2.0, 101), 1.0)))
        assert errors[1] < errors[0] / 2.0
        assert errors[1] < 1e-2 * scale


if __name__ == "__main__":
    pytest.main([__file__])
