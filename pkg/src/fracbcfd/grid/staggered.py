#
# staggered - Nonuniform block-centered meshes on [a, b].
#

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from ..errors import GridError

logger = logging.getLogger(__name__)

# Cells narrower than this fraction of b - a are treated as collapsed.
MIN_RELATIVE_WIDTH = 1e-14

GRID_KINDS = ("uniform", "perturbed", "graded")


def readonly_array(arr: np.ndarray) -> np.ndarray:
    """Mark an array read-only in place and return it."""
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StaggeredGrid:
    """
    A block-centered mesh: primal cells with centers, plus the staggered
    cells between neighbouring centers.

    Attributes:
        a: Left endpoint of the domain
        b: Right endpoint of the domain
        M: Number of primal cells
        edges: M+1 cell edges x_{1/2} ... x_{M+1/2}
        centers: M cell midpoints
        widths: M primal widths h_i
        stag_widths: M+1 staggered widths, half cells at both ends

    Note:
        Arrays are flagged read-only; construct through ``from_edges`` or one
        of the ``build_*`` functions so the invariants are checked.
    """
    a: float
    b: float
    M: int
    edges: np.ndarray = field(repr=False)
    centers: np.ndarray = field(repr=False)
    widths: np.ndarray = field(repr=False)
    stag_widths: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, edges) -> "StaggeredGrid":
        """
        Build and validate a grid from an edge array.

        Args:
            edges: Strictly increasing sequence of M+1 edges, M >= 3

        Returns:
            StaggeredGrid: The validated grid

        Raises:
            GridError: If the edges are not a valid mesh
        """
        edges = np.array(edges, dtype=np.float64)
        if edges.ndim != 1:
            raise GridError(f"edges must be one-dimensional, got shape {edges.shape}")
        M = edges.size - 1
        if M < 3:
            raise GridError(f"grid needs at least 3 cells, got M={M}")
        if not np.all(np.isfinite(edges)):
            raise GridError("grid edges must be finite")
        a = float(edges[0])
        b = float(edges[-1])
        if not a < b:
            raise GridError(f"degenerate domain [{a}, {b}]")
        widths = np.diff(edges)
        if np.any(widths <= MIN_RELATIVE_WIDTH * (b - a)):
            i = int(np.argmin(widths))
            raise GridError(f"cell {i} has width {widths[i]:.3e}, edges must be strictly increasing")
        centers = 0.5 * (edges[:-1] + edges[1:])
        stag = np.empty(M + 1)
        stag[0] = 0.5 * widths[0]
        stag[1:M] = 0.5 * (widths[:-1] + widths[1:])
        stag[M] = 0.5 * widths[-1]
        return cls(
            a=a,
            b=b,
            M=M,
            edges=readonly_array(edges),
            centers=readonly_array(centers),
            widths=readonly_array(widths),
            stag_widths=readonly_array(stag),
        )

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def min_interior_stag(self) -> float:
        """Smallest distance between neighbouring cell centers."""
        return float(np.min(self.stag_widths[1:self.M]))

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        """Check whether the edges mirror about the domain midpoint."""
        mirrored = (self.a + self.b) - self.edges[::-1]
        return bool(np.allclose(self.edges, mirrored, rtol=0.0, atol=rtol * self.length))


def _check_domain(a: float, b: float, M: int) -> None:
    if not a < b:
        raise GridError(f"degenerate domain: a={a} must be less than b={b}")
    if int(M) != M or M < 3:
        raise GridError(f"M must be an integer >= 3, got {M}")


def build_uniform(a: float, b: float, M: int) -> StaggeredGrid:
    """
    Build an equally spaced grid with h = (b - a) / M.

    Args:
        a: Left endpoint
        b: Right endpoint
        M: Number of cells

    Returns:
        StaggeredGrid: The uniform grid
    """
    _check_domain(a, b, M)
    M = int(M)
    h = (b - a) / M
    edges = a + h * np.arange(M + 1, dtype=np.float64)
    edges[-1] = b
    return StaggeredGrid.from_edges(edges)


def build_perturbed(a: float, b: float, M: int, xi: float, seed: int) -> StaggeredGrid:
    """
    Build a uniform grid with each interior edge moved by h*xi*(lambda_i - 1/2).

    The lambda_i are drawn uniformly on [0, 1) from numpy's PCG64 generator
    seeded with ``seed``, one draw per interior edge in order, so a given
    (a, b, M, xi, seed) always yields the same grid.

    Args:
        a: Left endpoint
        b: Right endpoint
        M: Number of cells
        xi: Perturbation strength in [0, 1]
        seed: Generator seed

    Returns:
        StaggeredGrid: The perturbed grid

    Raises:
        GridError: If xi is outside [0, 1] or the draw collapses a cell
    """
    _check_domain(a, b, M)
    if not 0.0 <= xi <= 1.0:
        raise GridError(f"perturbation xi must lie in [0, 1], got {xi}")
    M = int(M)
    h = (b - a) / M
    rng = np.random.Generator(np.random.PCG64(seed))
    lam = rng.random(M - 1)
    edges = a + h * np.arange(M + 1, dtype=np.float64)
    edges[1:M] += h * xi * (lam - 0.5)
    edges[-1] = b
    return StaggeredGrid.from_edges(edges)


def build_graded(a: float, b: float, M: int, gamma: float, kappa: float) -> StaggeredGrid:
    """
    Build a two-piece power-law grid clustered toward both endpoints.

    Edges 0..m with m = floor(gamma*M) follow a + gamma*(b-a)*(i/m)**kappa,
    the rest follow b - (1-gamma)*(b-a)*((M-i)/(M-m))**kappa.

    Args:
        a: Left endpoint
        b: Right endpoint
        M: Number of cells
        gamma: Split fraction in [0, 1]
        kappa: Grading exponent, kappa >= 1

    Returns:
        StaggeredGrid: The graded grid

    Note:
        With kappa = 1 the grid is uniform when gamma*M is an integer.
    """
    _check_domain(a, b, M)
    if kappa < 1.0:
        raise GridError(f"grading exponent kappa must be >= 1, got {kappa}")
    if not 0.0 <= gamma <= 1.0:
        raise GridError(f"split fraction gamma must lie in [0, 1], got {gamma}")
    M = int(M)
    m = math.floor(gamma * M)
    L = b - a
    i = np.arange(M + 1, dtype=np.float64)
    edges = np.empty(M + 1)
    if m > 0:
        edges[:m + 1] = a + gamma * L * (i[:m + 1] / m) ** kappa
    else:
        edges[0] = a
    if m < M:
        edges[m + 1:] = b - (1.0 - gamma) * L * ((M - i[m + 1:]) / (M - m)) ** kappa
    edges[0] = a
    edges[-1] = b
    return StaggeredGrid.from_edges(edges)


def build_grid(
    kind: str,
    a: float,
    b: float,
    M: int,
    xi: float = 0.0,
    seed: int = 0,
    gamma: float = 0.5,
    kappa: float = 1.0,
) -> StaggeredGrid:
    """
    Build a grid by family name.

    Args:
        kind: One of "uniform", "perturbed", "graded"
        a: Left endpoint
        b: Right endpoint
        M: Number of cells
        xi: Perturbation strength (perturbed only)
        seed: Generator seed (perturbed only)
        gamma: Split fraction (graded only)
        kappa: Grading exponent (graded only)

    Returns:
        StaggeredGrid: The requested grid

    Raises:
        ValueError: If kind is unknown
    """
    kind = kind.lower()
    logger.debug("building %s grid on [%g, %g] with M=%d", kind, a, b, M)
    if kind == "uniform":
        return build_uniform(a, b, M)
    if kind == "perturbed":
        return build_perturbed(a, b, M, xi, seed)
    if kind == "graded":
        return build_graded(a, b, M, gamma, kappa)
    raise ValueError(f"Unknown grid kind {kind!r}, expected one of {', '.join(GRID_KINDS)}")
