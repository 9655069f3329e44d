#
# stiffness - Dense assembly and direct solves for the Crank-Nicolson
# block-centered fractional scheme.
#

from dataclasses import dataclass
import logging
import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from ..errors import CoefficientError, SingularSystemError
from ..grid import StaggeredGrid
from ..quadrature import DirectCoefficients, eval_g_left, eval_g_right
from .problemspec import ProblemSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiffusionVectors:
    """
    Edge coefficients K_{i+1/2} scaled by 1/(h_{i+1/2} h_i) at one time level.

    ``dplus*`` couple cell i to its right edge and vanish in the last cell;
    ``dminus*`` couple cell i to its left edge and vanish in the first cell.
    """
    dplusL: np.ndarray
    dminusL: np.ndarray
    dplusR: np.ndarray
    dminusR: np.ndarray


def sample_coefficient(K, grid: StaggeredGrid, t: float, name: str) -> np.ndarray:
    """
    Evaluate a diffusion coefficient at every cell edge.

    Raises:
        CoefficientError: If any value is negative or non-finite
    """
    values = np.broadcast_to(np.asarray(K(np.asarray(grid.edges), t), dtype=np.float64), (grid.M + 1,))
    bad = ~np.isfinite(values) | (values < 0.0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise CoefficientError(f"{name}({grid.edges[i]:g}, {t:g}) = {values[i]!r} is not a non-negative number")
    return np.array(values)


def diffusion_vectors(grid: StaggeredGrid, problem: ProblemSpec, t: float) -> DiffusionVectors:
    """
    Build the four diagonal scalings for time t.

    Args:
        grid: The mesh
        problem: Supplies K^L and K^R
        t: Time level

    Returns:
        DiffusionVectors: Length-M vectors, zero at the boundary positions
    """
    stag = np.asarray(grid.stag_widths)
    h = np.asarray(grid.widths)
    vectors = []
    for K, name in ((problem.KL, "KL"), (problem.KR, "KR")):
        kvals = sample_coefficient(K, grid, t, name)
        dplus = np.zeros(grid.M)
        dminus = np.zeros(grid.M)
        dplus[:-1] = kvals[1:-1] / (stag[1:-1] * h[:-1])
        dminus[1:] = kvals[1:-1] / (stag[1:-1] * h[1:])
        vectors += [dplus, dminus]
    return DiffusionVectors(dplusL=vectors[0], dminusL=vectors[1], dplusR=vectors[2], dminusR=vectors[3])


@dataclass(frozen=True, eq=False)
class DenseStiffness:
    """An assembled stiffness matrix and the scalings it was built from."""
    A: np.ndarray
    dplusL: np.ndarray
    dminusL: np.ndarray
    dplusR: np.ndarray
    dminusR: np.ndarray
    t: float


class DenseScheme:
    """
    Direct path of the scheme: explicit M x M stiffness matrices.

    The row differences of the quadrature tables do not depend on time and
    are computed once; each time level only rescales them.
    """

    def __init__(self, grid: StaggeredGrid, coeffsL: DirectCoefficients, coeffsR: DirectCoefficients):
        if coeffsL.M != grid.M or coeffsR.M != grid.M:
            raise ValueError(f"coefficient tables of order {coeffsL.M}/{coeffsR.M} do not match M={grid.M}")
        if coeffsL.alpha != coeffsR.alpha:
            raise ValueError(f"left alpha {coeffsL.alpha} differs from right alpha {coeffsR.alpha}")
        self.grid = grid
        self.coeffsL = coeffsL
        self.coeffsR = coeffsR
        self.dqL = np.diff(coeffsL.q, axis=0)
        self.dqR = np.diff(coeffsR.q, axis=0)
        logger.debug("dense scheme ready, M=%d alpha=%g", grid.M, coeffsL.alpha)

    @property
    def M(self) -> int:
        return self.grid.M

    def stiffness(self, problem: ProblemSpec, t: float) -> DenseStiffness:
        """
        Assemble A at time t.

        Args:
            problem: Supplies gamma, K^L and K^R
            t: Time level

        Returns:
            DenseStiffness: The matrix and its scaling vectors
        """
        dv = diffusion_vectors(self.grid, problem, t)
        gam = problem.gamma
        A = np.zeros((self.M, self.M))
        if gam != 0.0:
            A[:-1] += gam * dv.dplusL[:-1, None] * self.dqL
            A[1:] -= gam * dv.dminusL[1:, None] * self.dqL
        if gam != 1.0:
            A[:-1] += (1.0 - gam) * dv.dplusR[:-1, None] * self.dqR
            A[1:] -= (1.0 - gam) * dv.dminusR[1:, None] * self.dqR
        return DenseStiffness(
            A=A,
            dplusL=dv.dplusL,
            dminusL=dv.dminusL,
            dplusR=dv.dplusR,
            dminusR=dv.dminusR,
            t=t,
        )


def assemble_stiffness(
    grid: StaggeredGrid,
    coeffsL: DirectCoefficients,
    coeffsR: DirectCoefficients,
    problem: ProblemSpec,
    t_n: float,
) -> DenseStiffness:
    """
    Assemble the dense stiffness matrix A^n at time t_n.

    Args:
        grid: The mesh
        coeffsL: Left quadrature tables for this grid
        coeffsR: Right quadrature tables for this grid
        problem: Supplies gamma and the diffusion coefficients
        t_n: Time level

    Returns:
        DenseStiffness: A^n with its diagonal scalings

    Raises:
        CoefficientError: If K is negative or non-finite at an edge
    """
    return DenseScheme(grid, coeffsL, coeffsR).stiffness(problem, t_n)


def cn_system_matrices(A_n: np.ndarray, A_nm1: np.ndarray, tau: float):
    """
    Crank-Nicolson matrices (I - tau/2 A^n, I + tau/2 A^{n-1}).

    Raises:
        ValueError: If the matrices are not square of equal order
    """
    A_n = np.asarray(A_n)
    A_nm1 = np.asarray(A_nm1)
    if A_n.ndim != 2 or A_n.shape[0] != A_n.shape[1] or A_n.shape != A_nm1.shape:
        raise ValueError(f"need square matrices of equal order, got {A_n.shape} and {A_nm1.shape}")
    eye = np.eye(A_n.shape[0])
    return eye - 0.5 * tau * A_n, eye + 0.5 * tau * A_nm1


def dense_lu_solve(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve lhs x = rhs by LU with partial pivoting.

    Raises:
        SingularSystemError: If a pivot vanishes to working precision
    """
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if lhs.ndim != 2 or lhs.shape[0] != lhs.shape[1] or rhs.shape != (lhs.shape[0],):
        raise ValueError(f"shape mismatch: lhs {lhs.shape}, rhs {rhs.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(lhs)
    pivots = np.abs(np.diag(lu))
    scale = max(float(np.max(np.abs(lhs))), np.finfo(float).tiny)
    tol = lhs.shape[0] * np.finfo(float).eps * scale
    if not np.all(np.isfinite(pivots)) or np.min(pivots) <= tol:
        k = int(np.argmin(pivots))
        raise SingularSystemError(f"pivot {k} is {pivots[k]:.3e}, system is singular to working precision")
    return lu_solve((lu, piv), rhs)


def interior_flux(
    grid: StaggeredGrid,
    gL: np.ndarray,
    gR: np.ndarray,
    problem: ProblemSpec,
    t: float,
) -> np.ndarray:
    """Flux at the M-1 interior edges from left/right integral values at the centers."""
    stag = np.asarray(grid.stag_widths[1:-1])
    kl = sample_coefficient(problem.KL, grid, t, "KL")[1:-1]
    kr = sample_coefficient(problem.KR, grid, t, "KR")[1:-1]
    gam = problem.gamma
    return (gam * kl * np.diff(gL) + (1.0 - gam) * kr * np.diff(gR)) / stag


def recover_flux(
    grid: StaggeredGrid,
    coeffsL: DirectCoefficients,
    coeffsR: DirectCoefficients,
    problem: ProblemSpec,
    u,
    t_n: float,
) -> np.ndarray:
    """
    Flux at all M+1 edges for cell values u at time t_n.

    The two end values are the imposed boundary fluxes phi(t_n), varphi(t_n).
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (grid.M,):
        raise ValueError(f"u has shape {u.shape}, expected ({grid.M},)")
    p = np.empty(grid.M + 1)
    p[1:-1] = interior_flux(grid, eval_g_left(coeffsL, u), eval_g_right(coeffsR, u), problem, t_n)
    p[0] = problem.phi(t_n)
    p[-1] = problem.varphi(t_n)
    return p


def apply_flux_divergence(
    grid: StaggeredGrid,
    coeffsL: DirectCoefficients,
    coeffsR: DirectCoefficients,
    problem: ProblemSpec,
    u,
    t: float,
) -> np.ndarray:
    """Divided difference of the flux with zero boundary flux, i.e. A(t) u without a matrix."""
    u = np.asarray(u, dtype=np.float64)
    p = np.zeros(grid.M + 1)
    p[1:-1] = interior_flux(grid, eval_g_left(coeffsL, u), eval_g_right(coeffsR, u), problem, t)
    return np.diff(p) / np.asarray(grid.widths)


def source_vector(grid: StaggeredGrid, problem: ProblemSpec, t_n: float, tau: float) -> np.ndarray:
    """
    Right-hand side F^{n-1/2}: source at the half step with boundary flux corrections.

    Args:
        grid: The mesh
        problem: Supplies f, phi and varphi
        t_n: New time level
        tau: Time step

    Returns:
        np.ndarray: Length-M vector
    """
    t_nm1 = t_n - tau
    F = np.array(np.broadcast_to(problem.f(np.asarray(grid.centers), t_n - 0.5 * tau), (grid.M,)), dtype=np.float64)
    F[0] -= (problem.phi(t_n) + problem.phi(t_nm1)) / (2.0 * grid.widths[0])
    F[-1] += (problem.varphi(t_n) + problem.varphi(t_nm1)) / (2.0 * grid.widths[-1])
    return F
