#
# fracquad - Exact quadrature of Riemann-Liouville integrals of the
# piecewise linear interpolant of cell-centered data.
#

from dataclasses import dataclass
import logging

import numpy as np
from scipy.special import gamma as gamma_fn

from ..grid import StaggeredGrid

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"


def check_alpha(alpha: float) -> float:
    """Validate a fractional order in the open interval (1, 2)."""
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"fractional order alpha must lie in (1, 2), got {alpha}")
    return alpha


@dataclass(frozen=True)
class InterpolantBoundaryWeights:
    """
    Linear extrapolation of the cell values to the domain endpoints.

    The interpolant takes v(a) = left[0]*u_0 + left[1]*u_1 and
    v(b) = right[0]*u_{M-1} + right[1]*u_{M-2}.
    """
    left: tuple
    right: tuple


def boundary_weights(grid: StaggeredGrid) -> InterpolantBoundaryWeights:
    h = grid.widths
    h1, h2 = h[0], h[1]
    hm, hm1 = h[-1], h[-2]
    left = ((2.0 * h1 + h2) / (h1 + h2), -h1 / (h1 + h2))
    right = ((2.0 * hm + hm1) / (hm1 + hm), -hm / (hm1 + hm))
    return InterpolantBoundaryWeights(left=left, right=right)


@dataclass(frozen=True, eq=False)
class DirectCoefficients:
    """
    Dense quadrature tables for one side of the fractional integral.

    Row i of ``q`` holds the weights with g_i = sum_j q[i, j] * u_j, where g is
    the integral of order 2 - alpha from the matching endpoint to x_i.

    Attributes:
        alpha: Fractional order in (1, 2)
        side: "left" or "right"
        q: M x M coefficient table
        omega: M x M auxiliary table of scaled interval integrals
        weights: Endpoint extrapolation weights used by the first/last row
    """
    alpha: float
    side: str
    q: np.ndarray
    omega: np.ndarray
    weights: InterpolantBoundaryWeights

    @property
    def M(self) -> int:
        return self.q.shape[0]


def _endpoint_integral(dist: np.ndarray, alpha: float) -> np.ndarray:
    return dist ** (2.0 - alpha) / gamma_fn(3.0 - alpha)


def _select_rows(M: int, rows) -> np.ndarray:
    if rows is None:
        return np.arange(M)
    rows = np.atleast_1d(np.asarray(rows, dtype=np.intp))
    if rows.size and (rows.min() < 0 or rows.max() >= M):
        raise ValueError(f"row index out of range for M={M}")
    return rows


def left_coefficient_rows(grid: StaggeredGrid, alpha: float, rows=None):
    """
    Rows of q^L and omega^L for the left-sided integral from a to x_i.

    Args:
        grid: The mesh
        alpha: Fractional order in (1, 2)
        rows: Row indices to build, all rows when None

    Returns:
        Tuple[np.ndarray, np.ndarray]: (q, omega), each len(rows) x M
    """
    alpha = check_alpha(alpha)
    M = grid.M
    rows = _select_rows(M, rows)
    x = np.asarray(grid.centers)
    xr = x[rows]
    stag = np.asarray(grid.stag_widths)
    wts = boundary_weights(grid)

    # Antiderivative of the order 2-alpha kernel at a and every center.
    nodes = np.concatenate(([grid.a], x))
    second = np.maximum(xr[:, None] - nodes[None, :], 0.0) ** (3.0 - alpha) / gamma_fn(4.0 - alpha)
    omega = (second[:, 1:] - second[:, :-1]) / stag[None, :M]
    del second

    q = np.empty((rows.size, M))
    q[:, :-1] = omega[:, 1:] - omega[:, :-1]
    q[:, -1] = -omega[:, -1]
    end = _endpoint_integral(xr - grid.a, alpha) + omega[:, 0]
    q[:, 0] += wts.left[0] * end
    q[:, 1] += wts.left[1] * end
    return q, omega


def right_coefficient_rows(grid: StaggeredGrid, alpha: float, rows=None):
    """
    Rows of q^R and omega^R for the right-sided integral from x_i to b.

    Args:
        grid: The mesh
        alpha: Fractional order in (1, 2)
        rows: Row indices to build, all rows when None

    Returns:
        Tuple[np.ndarray, np.ndarray]: (q, omega), each len(rows) x M
    """
    alpha = check_alpha(alpha)
    M = grid.M
    rows = _select_rows(M, rows)
    x = np.asarray(grid.centers)
    xr = x[rows]
    stag = np.asarray(grid.stag_widths)
    wts = boundary_weights(grid)

    nodes = np.concatenate((x, [grid.b]))
    second = np.maximum(nodes[None, :] - xr[:, None], 0.0) ** (3.0 - alpha) / gamma_fn(4.0 - alpha)
    omega = (second[:, 1:] - second[:, :-1]) / stag[None, 1:]
    del second

    q = np.empty((rows.size, M))
    q[:, 0] = omega[:, 0]
    q[:, 1:] = omega[:, 1:] - omega[:, :-1]
    end = _endpoint_integral(grid.b - xr, alpha) - omega[:, -1]
    q[:, -1] += wts.right[0] * end
    q[:, -2] += wts.right[1] * end
    return q, omega


def build_left_coefficients(grid: StaggeredGrid, alpha: float) -> DirectCoefficients:
    """
    Build the full left tables.

    Args:
        grid: The mesh
        alpha: Fractional order in (1, 2)

    Returns:
        DirectCoefficients: Left tables, lower triangular apart from entry (0, 1)

    Raises:
        ValueError: If alpha is outside (1, 2)
    """
    q, omega = left_coefficient_rows(grid, alpha)
    logger.debug("built left quadrature tables, M=%d alpha=%g", grid.M, alpha)
    return DirectCoefficients(alpha=float(alpha), side=LEFT, q=q, omega=omega, weights=boundary_weights(grid))


def build_right_coefficients(grid: StaggeredGrid, alpha: float) -> DirectCoefficients:
    """
    Build the full right tables.

    Args:
        grid: The mesh
        alpha: Fractional order in (1, 2)

    Returns:
        DirectCoefficients: Right tables, upper triangular apart from entry (M-1, M-2)

    Raises:
        ValueError: If alpha is outside (1, 2)
    """
    q, omega = right_coefficient_rows(grid, alpha)
    logger.debug("built right quadrature tables, M=%d alpha=%g", grid.M, alpha)
    return DirectCoefficients(alpha=float(alpha), side=RIGHT, q=q, omega=omega, weights=boundary_weights(grid))


def _eval_g(coeffs: DirectCoefficients, u, side: str) -> np.ndarray:
    if coeffs.side != side:
        raise ValueError(f"expected {side} coefficients, got {coeffs.side}")
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (coeffs.M,):
        raise ValueError(f"u has shape {u.shape}, expected ({coeffs.M},)")
    return coeffs.q @ u


def eval_g_left(coeffs: DirectCoefficients, u) -> np.ndarray:
    """Left fractional integral of the interpolant of u at every center."""
    return _eval_g(coeffs, u, LEFT)


def eval_g_right(coeffs: DirectCoefficients, u) -> np.ndarray:
    """Right fractional integral of the interpolant of u at every center."""
    return _eval_g(coeffs, u, RIGHT)


def riemann_liouville_monomial(m: int, order: float, s):
    """
    Fractional integral of s**m of the given order, evaluated at distance s.

    A negative order gives the Riemann-Liouville derivative of order -order,
    valid while m + 1 + order is not a non-positive integer.

    Args:
        m: Non-negative monomial degree
        order: Integration order
        s: Distance from the endpoint, scalar or array

    Returns:
        Gamma(m+1)/Gamma(m+1+order) * s**(m+order)
    """
    s = np.asarray(s, dtype=np.float64)
    return gamma_fn(m + 1.0) / gamma_fn(m + 1.0 + order) * s ** (m + order)
