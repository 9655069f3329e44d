#!/usr/bin/env python3
"""
Tests for the fastop module.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from fracbcfd.dense import assemble_stiffness, recover_flux
from fracbcfd.errors import SoeError
from fracbcfd.fastop import (
    apply_B,
    fast_flux,
    fast_g_left,
    fast_g_right,
    precompute,
    segment_weights,
)
from fracbcfd.grid import build_graded, build_perturbed, build_uniform
from fracbcfd.problems import get_problem
from fracbcfd.quadrature import build_left_coefficients, build_right_coefficients, eval_g_left, eval_g_right
from fracbcfd.soe import build_soe, soe_for_grid

EPS = 1e-10


def _setup(grid, alpha):
    soe = soe_for_grid(grid, alpha, EPS)
    return soe, precompute(grid, alpha, soe)


class TestSegmentWeights:
    """Test the exact exponential weights of a linear segment."""

    @pytest.mark.parametrize("y", [0.0, 1e-6, 0.3, 0.49999, 0.5, 0.7, 3.0, 40.0])
    def test_against_quadrature(self, y):
        """Test both weights against adaptive quadrature."""
        far, near = segment_weights(np.array([y]))
        far_ref, _ = quad(lambda s: s * np.exp(-y * s), 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)
        near_ref, _ = quad(lambda s: (1.0 - s) * np.exp(-y * s), 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)

        assert far[0] == pytest.approx(far_ref, rel=1e-12, abs=1e-16)
        assert near[0] == pytest.approx(near_ref, rel=1e-12, abs=1e-16)

    def test_keeps_shape(self):
        """Test that a 2D argument gives 2D weights."""
        far, near = segment_weights(np.ones((4, 3)))

        assert far.shape == (4, 3)
        assert near.shape == (4, 3)


class TestFastIntegrals:
    """Test the fast integrals against the dense tables."""

    @pytest.mark.parametrize("alpha", [1.3, 1.7])
    @pytest.mark.parametrize("kind", ["uniform", "perturbed", "graded"])
    def test_matches_direct(self, alpha, kind):
        """Test that fast g agrees with q @ u within the kernel tolerance."""
        if kind == "uniform":
            grid = build_uniform(0.0, 2.0, 64)
        elif kind == "perturbed":
            grid = build_perturbed(0.0, 2.0, 64, 0.6, seed=8)
        else:
            grid = build_graded(0.0, 2.0, 64, 0.5, 2.0)
        _, op = _setup(grid, alpha)
        rng = np.random.Generator(np.random.PCG64(1))
        u = rng.standard_normal(grid.M)
        bound = 10.0 * grid.length * EPS * np.max(np.abs(u))

        gl = eval_g_left(build_left_coefficients(grid, alpha), u)
        gr = eval_g_right(build_right_coefficients(grid, alpha), u)
        assert np.max(np.abs(fast_g_left(op, u) - gl)) <= bound
        assert np.max(np.abs(fast_g_right(op, u) - gr)) <= bound

    def test_apply_matches_dense_matrix(self):
        """Test that apply_B agrees with the assembled matrix."""
        alpha = 1.6
        grid = build_perturbed(0.0, 2.0, 48, 0.5, seed=4)
        problem = get_problem("ex2", alpha, 0.3).spec
        _, op = _setup(grid, alpha)
        cL = build_left_coefficients(grid, alpha)
        cR = build_right_coefficients(grid, alpha)
        A = assemble_stiffness(grid, cL, cR, problem, 0.8).A
        v = np.random.Generator(np.random.PCG64(2)).standard_normal(grid.M)

        dense = A @ v
        fast = apply_B(op.at_time(problem, 0.8), problem, 0.8, v)
        assert np.max(np.abs(fast - dense)) <= 1e-6 * np.max(np.abs(dense))
        np.testing.assert_allclose(apply_B(op, problem, 0.8, v), fast, rtol=0, atol=1e-12 * np.max(np.abs(fast)))

    def test_apply_is_linear(self):
        """Test that apply_B is linear to roundoff."""
        grid = build_perturbed(0.0, 2.0, 32, 0.5, seed=9)
        problem = get_problem("ex4", 1.7, 0.4).spec
        _, op = _setup(grid, 1.7)
        op = op.at_time(problem, 0.6)
        rng = np.random.Generator(np.random.PCG64(3))
        u, v = rng.standard_normal(grid.M), rng.standard_normal(grid.M)

        lhs = apply_B(op, problem, 0.6, 2.0 * u - 3.0 * v)
        rhs = 2.0 * apply_B(op, problem, 0.6, u) - 3.0 * apply_B(op, problem, 0.6, v)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))

    def test_flux_matches_dense_recovery(self):
        """Test that the fast flux agrees with the dense recovery."""
        alpha = 1.5
        grid = build_graded(0.0, 2.0, 40, 0.5, 1.5)
        problem = get_problem("ex1", alpha, 0.5).spec
        _, op = _setup(grid, alpha)
        u = problem.exact_u(np.asarray(grid.centers), 1.0)
        dense = recover_flux(grid, build_left_coefficients(grid, alpha), build_right_coefficients(grid, alpha),
                             problem, u, 1.0)

        fast = fast_flux(op, problem, u, 1.0)
        assert fast[0] == dense[0]
        assert fast[-1] == dense[-1]
        assert np.max(np.abs(fast - dense)) <= 1e-6 * np.max(np.abs(dense))

    def test_one_sided_weight(self):
        """Test gamma = 1 and gamma = 0 against the dense matrix."""
        alpha = 1.4
        grid = build_uniform(0.0, 2.0, 32)
        _, op = _setup(grid, alpha)
        cL = build_left_coefficients(grid, alpha)
        cR = build_right_coefficients(grid, alpha)
        v = np.linspace(-1.0, 1.0, grid.M) ** 2
        for gamma in (0.0, 1.0):
            problem = get_problem("ex4", alpha, gamma).spec
            dense = assemble_stiffness(grid, cL, cR, problem, 0.5).A @ v
            fast = apply_B(op, problem, 0.5, v)
            assert np.max(np.abs(fast - dense)) <= 1e-6 * np.max(np.abs(dense))


class TestPrecompute:
    """Test operator construction."""

    def test_at_time_shares_tables(self):
        """Test that at_time reuses the precomputed arrays."""
        grid = build_uniform(0.0, 2.0, 16)
        problem = get_problem("ex2", 1.5, 0.5).spec
        _, op = _setup(grid, 1.5)
        op_t = op.at_time(problem, 0.5)

        assert op_t.rhoL is op.rhoL
        assert op_t.decay is op.decay
        assert op_t.t == 0.5
        assert op.t is None
        assert op_t.vectors is not None

    def test_decay_views(self):
        """Test the left and right decay views of the shared table."""
        grid = build_perturbed(0.0, 1.0, 20, 0.5, seed=6)
        soe, op = _setup(grid, 1.5)

        assert op.decay.shape == (grid.M + 1, soe.n_exp)
        np.testing.assert_allclose(op.decay[3], np.exp(-soe.lambdas * grid.stag_widths[3]))
        np.testing.assert_array_equal(op.decayL, op.decay[:-1])
        np.testing.assert_array_equal(op.decayR, op.decay[1:])

    def test_tables_are_read_only(self):
        """Test that the precomputed tables cannot be written."""
        grid = build_uniform(0.0, 1.0, 16)
        _, op = _setup(grid, 1.5)

        for table in (op.muL, op.nuL, op.muR, op.nuR, op.rhoL, op.sigmaL, op.rhoR, op.sigmaR, op.decay):
            assert not table.flags.writeable
        with pytest.raises(ValueError):
            op.rhoL[0, 0] = 0.0

    def test_storage_is_linear(self):
        """Test that the operator storage is below 64 bytes per cell and exponential."""
        grid = build_uniform(0.0, 1.0, 256)
        soe, op = _setup(grid, 1.5)

        assert op.table_nbytes() < 64 * grid.M * soe.n_exp

    def test_uncovered_range(self):
        """Test that an soe built for coarser spacing is refused."""
        grid = build_uniform(0.0, 1.0, 64)
        soe = build_soe(1.5, 1e-8, 0.1, 1.0)

        with pytest.raises(SoeError):
            precompute(grid, 1.5, soe)

    def test_alpha_mismatch(self):
        """Test that an soe for another order is refused."""
        grid = build_uniform(0.0, 1.0, 16)
        soe = soe_for_grid(grid, 1.5, 1e-8)

        with pytest.raises(ValueError):
            precompute(grid, 1.6, soe)

    def test_vector_length_checked(self):
        """Test that a vector of the wrong length is refused."""
        grid = build_uniform(0.0, 1.0, 16)
        _, op = _setup(grid, 1.5)

        with pytest.raises(ValueError):
            fast_g_left(op, np.ones(15))


if __name__ == "__main__":
    pytest.main([__file__])
