#
# march - Crank-Nicolson time marching with dense or matrix-free solves.
#

from dataclasses import dataclass, field
import logging
import time
from typing import Optional

import numpy as np

from ..dense import (
    DenseScheme,
    ProblemSpec,
    cn_system_matrices,
    dense_lu_solve,
    recover_flux,
    source_vector,
)
from ..fastop import apply_B, fast_flux, precompute
from ..grid import StaggeredGrid
from ..quadrature import build_left_coefficients, build_right_coefficients
from ..soe import SoeApproximation, soe_for_grid
from .bicgstab import bicgstab

logger = logging.getLogger(__name__)

DENSE_GE = "dense-ge"
DENSE_BICGSTAB = "dense-bicgstab"
FAST_BICGSTAB = "fast-bicgstab"
METHODS = (DENSE_GE, DENSE_BICGSTAB, FAST_BICGSTAB)


def normalize_method(name: str) -> str:
    """Map a method name such as 'dense-GE' or 'fast_bicgstab' to its canonical form."""
    key = name.strip().lower().replace("_", "-")
    if key not in METHODS:
        raise ValueError(f"Unknown method {name!r}, expected one of {', '.join(METHODS)}")
    return key


@dataclass
class SolveConfig:
    """
    Time stepping and solver settings.

    Attributes:
        method: One of dense-ge, dense-bicgstab, fast-bicgstab
        N: Number of time steps, tau = T / N
        rel_tol: BiCGSTAB relative residual tolerance
        max_iters: BiCGSTAB iteration cap per level, M when None
        soe_eps: Kernel tolerance for the fast method
    """
    method: str = FAST_BICGSTAB
    N: int = 64
    rel_tol: float = 1e-10
    max_iters: Optional[int] = None
    soe_eps: float = 1e-10

    def __post_init__(self):
        self.method = normalize_method(self.method)
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"number of time steps N must be a positive integer, got {self.N}")
        self.N = int(self.N)
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if not self.soe_eps > 0.0:
            raise ValueError(f"soe_eps must be positive, got {self.soe_eps}")

    def iteration_cap(self, M: int) -> int:
        return self.max_iters if self.max_iters is not None else M


@dataclass
class MarchResult:
    """
    Final state and cost accounting of one march.

    Attributes:
        u_final: Cell values at t = T
        p_final: Edge fluxes at t = T
        iterations: BiCGSTAB iterations per time level, zeros for dense-ge
        wall_time: Seconds for setup plus marching
        nonconverged: True if any level's solve did not converge
        applies: Stiffness operator applications to a vector
        method: Canonical method name
        n_exp: Exponentials in the kernel sum, 0 for dense methods
    """
    u_final: np.ndarray
    p_final: np.ndarray
    iterations: np.ndarray = field(repr=False)
    wall_time: float
    nonconverged: bool = False
    applies: int = 0
    method: str = FAST_BICGSTAB
    n_exp: int = 0

    @property
    def avg_iters(self) -> float:
        if self.iterations.size == 0:
            return 0.0
        return float(np.mean(self.iterations))

    @property
    def levels(self) -> int:
        return int(self.iterations.size)


class _Counter:
    """Wrap an operator and count its applications."""

    def __init__(self, fn):
        self.fn = fn
        self.count = 0

    def __call__(self, v):
        self.count += 1
        return self.fn(v)


def _initial_state(grid: StaggeredGrid, problem: ProblemSpec) -> np.ndarray:
    u0 = np.asarray(problem.u0(np.asarray(grid.centers)), dtype=np.float64)
    return np.array(np.broadcast_to(u0, (grid.M,)))


def cn_march(
    grid: StaggeredGrid,
    problem: ProblemSpec,
    config: SolveConfig,
    soe: Optional[SoeApproximation] = None,
) -> MarchResult:
    """
    March u from t = 0 to T with the Crank-Nicolson scheme.

    Each level solves (I - tau/2 B^n) u^n = (I + tau/2 B^{n-1}) u^{n-1} + tau F^{n-1/2},
    where B is the dense matrix or the fast operator depending on the method.

    Args:
        grid: The mesh
        problem: Model data, its domain must match the grid
        config: Method and tolerances
        soe: Kernel sum for the fast method, built from the grid when None

    Returns:
        MarchResult: Final u and p with per-level iteration counts

    Raises:
        ValueError: If grid and problem domains differ
        SingularSystemError: If a dense-ge level is singular
        CoefficientError: If K is negative or non-finite
    """
    if not (np.isclose(grid.a, problem.a) and np.isclose(grid.b, problem.b)):
        raise ValueError(f"grid domain [{grid.a}, {grid.b}] differs from problem domain [{problem.a}, {problem.b}]")
    start = time.perf_counter()
    M = grid.M
    N = config.N
    tau = problem.T / N
    cap = config.iteration_cap(M)
    u = _initial_state(grid, problem)
    iterations = np.zeros(N, dtype=np.int64)
    nonconverged = False
    n_exp = 0
    logger.info("marching %s: M=%d N=%d alpha=%g gamma=%g", config.method, M, N, problem.alpha, problem.gamma)

    if config.method == FAST_BICGSTAB:
        if soe is None:
            soe = soe_for_grid(grid, problem.alpha, config.soe_eps)
        n_exp = soe.n_exp
        base = precompute(grid, problem.alpha, soe)
        op_prev = base.at_time(problem, 0.0)
        rhs_applies = 0
        for n in range(1, N + 1):
            t_prev = (n - 1) * tau
            t_n = n * tau
            op_n = base.at_time(problem, t_n)
            rhs = u + 0.5 * tau * apply_B(op_prev, problem, t_prev, u) + tau * source_vector(grid, problem, t_n, tau)
            rhs_applies += 1
            counter = _Counter(lambda v, op=op_n, t=t_n: v - 0.5 * tau * apply_B(op, problem, t, v))
            res = bicgstab(counter, rhs, x0=u, rel_tol=config.rel_tol, max_iters=cap)
            iterations[n - 1] = res.iters
            rhs_applies += counter.count
            if not res.converged:
                nonconverged = True
                logger.warning("level %d (t=%.6g): bicgstab stopped after %d iterations, residual %.3e",
                               n, t_n, res.iters, res.resid_norm)
            logger.debug("level %d: %d iterations", n, res.iters)
            u = res.x
            op_prev = op_n
        applies = rhs_applies
        p = fast_flux(base, problem, u, problem.T)
    else:
        coeffsL = build_left_coefficients(grid, problem.alpha)
        coeffsR = build_right_coefficients(grid, problem.alpha)
        scheme = DenseScheme(grid, coeffsL, coeffsR)
        A_prev = scheme.stiffness(problem, 0.0).A
        applies = 0
        for n in range(1, N + 1):
            t_n = n * tau
            A_n = scheme.stiffness(problem, t_n).A
            F = source_vector(grid, problem, t_n, tau)
            if config.method == DENSE_GE:
                lhs, rhs_mat = cn_system_matrices(A_n, A_prev, tau)
                u = dense_lu_solve(lhs, rhs_mat @ u + tau * F)
                applies += 1
            else:
                rhs = u + 0.5 * tau * (A_prev @ u) + tau * F
                counter = _Counter(lambda v, A=A_n: v - 0.5 * tau * (A @ v))
                res = bicgstab(counter, rhs, x0=u, rel_tol=config.rel_tol, max_iters=cap)
                iterations[n - 1] = res.iters
                applies += 1 + counter.count
                if not res.converged:
                    nonconverged = True
                    logger.warning("level %d (t=%.6g): bicgstab stopped after %d iterations, residual %.3e",
                                   n, t_n, res.iters, res.resid_norm)
                u = res.x
            A_prev = A_n
        p = recover_flux(grid, coeffsL, coeffsR, problem, u, problem.T)

    wall = time.perf_counter() - start
    result = MarchResult(
        u_final=u,
        p_final=p,
        iterations=iterations,
        wall_time=wall,
        nonconverged=nonconverged,
        applies=applies,
        method=config.method,
        n_exp=n_exp,
    )
    logger.info("%s finished in %.3fs, average %.2f iterations per level", config.method, wall, result.avg_iters)
    return result
