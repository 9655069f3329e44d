#
# soe - Sum-of-exponentials approximation of the power kernel x**(1 - alpha).
#

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainccinv, roots_jacobi, roots_legendre

from ..errors import SoeError
from ..grid import StaggeredGrid
from ..quadrature import check_alpha

logger = logging.getLogger(__name__)

MAX_NODES = 4096
SAMPLE_POINTS = 10000
FIRST_ORDER = 4
ORDER_STEP = 2
# Rows of the sample evaluated per block.
_CHUNK = 1024


@dataclass(frozen=True, eq=False)
class SoeApproximation:
    """
    Exponential sum sum_s thetas[s] * exp(-lambdas[s] * x) for x**(1 - alpha) on [dx_cut, X].

    Attributes:
        alpha: Fractional order in (1, 2)
        eps: Absolute tolerance on [dx_cut, X]
        dx_cut: Lower end of the guaranteed range
        X: Upper end of the guaranteed range
        lambdas: Positive nodes, ascending
        thetas: Positive weights
        gauss_order: Gauss points per panel used in the construction
        max_error: Sampled maximum error on the range
    """
    alpha: float
    eps: float
    dx_cut: float
    X: float
    lambdas: np.ndarray = field(repr=False)
    thetas: np.ndarray = field(repr=False)
    gauss_order: int = 0
    max_error: float = float("nan")

    @property
    def n_exp(self) -> int:
        return int(self.lambdas.size)

    def covers(self, lo: float, hi: float) -> bool:
        """True if [lo, hi] lies inside the guaranteed range."""
        return self.dx_cut <= lo and hi <= self.X


def _sum_exponentials(lambdas: np.ndarray, thetas: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape)
    flat = x.reshape(-1)
    res = out.reshape(-1)
    for start in range(0, flat.size, _CHUNK):
        block = flat[start:start + _CHUNK]
        res[start:start + _CHUNK] = np.exp(-np.multiply.outer(block, lambdas)) @ thetas
    return out


def _sample(dx_cut: float, X: float, n_samples: int) -> np.ndarray:
    return np.geomspace(dx_cut, X, n_samples)


def _max_error(lambdas, thetas, alpha, xs) -> float:
    approx = _sum_exponentials(lambdas, thetas, xs)
    return float(np.max(np.abs(xs ** (1.0 - alpha) - approx)))


def _cutoff(beta: float, eps: float, dx_cut: float, t0: float) -> float:
    target = 0.25 * eps * dx_cut ** beta
    if target >= 1.0:
        return 2.0 * t0
    return max(gammainccinv(beta, target) / dx_cut, 2.0 * t0)


def _raw_nodes(beta: float, t0: float, n_panels: int, order: int):
    gb = gamma_fn(beta)
    s, w = roots_jacobi(order, 0.0, beta - 1.0)
    lambdas = [0.5 * t0 * (1.0 + s)]
    thetas = [(0.5 * t0) ** beta * w / gb]

    s, w = roots_legendre(order)
    for k in range(n_panels):
        lo = t0 * 2.0 ** k
        half = 0.5 * lo
        t = lo + half * (1.0 + s)
        lambdas.append(t)
        thetas.append(half * w * t ** (beta - 1.0) / gb)
    lambdas = np.concatenate(lambdas)
    thetas = np.concatenate(thetas)
    order_idx = np.argsort(lambdas, kind="stable")
    return lambdas[order_idx], thetas[order_idx]


def _truncate(lambdas, thetas, dx_cut: float, budget: float):
    reach = thetas * np.exp(-lambdas * dx_cut)
    order_idx = np.argsort(reach, kind="stable")
    dropped = np.cumsum(reach[order_idx])
    n_drop = int(np.searchsorted(dropped, budget, side="right"))
    keep = np.sort(order_idx[n_drop:])
    return lambdas[keep], thetas[keep]


def build_soe(alpha: float, eps: float, dx_cut: float, X: float) -> SoeApproximation:
    """
    Build an exponential sum for x**(1 - alpha) with absolute error eps on [dx_cut, X].

    The kernel is written as a Laplace integral

        x**(-beta) = 1/Gamma(beta) * int_0^inf exp(-x t) t**(beta - 1) dt,  beta = alpha - 1,

    truncated at a point T beyond which the tail is below eps/4 on the whole
    range, then discretised panel by panel: Gauss-Jacobi on [0, 1/X] for the
    t**(beta - 1) singularity and Gauss-Legendre on dyadic panels above it.
    The per-panel order is raised until a sampled check passes. A final pass
    drops the weakest exponentials while the dropped mass stays below eps/10.

    Args:
        alpha: Fractional order in (1, 2)
        eps: Absolute tolerance, positive
        dx_cut: Lower end of the range, positive
        X: Upper end of the range, greater than dx_cut

    Returns:
        SoeApproximation: Positive nodes and weights passing a 10,000 point check

    Raises:
        ValueError: If the arguments are out of range
        SoeError: If the tolerance is not reached within MAX_NODES exponentials
    """
    alpha = check_alpha(alpha)
    if not eps > 0.0:
        raise ValueError(f"tolerance eps must be positive, got {eps}")
    if not 0.0 < dx_cut < X:
        raise ValueError(f"need 0 < dx_cut < X, got dx_cut={dx_cut}, X={X}")
    beta = alpha - 1.0
    t0 = 1.0 / X
    T = _cutoff(beta, eps, dx_cut, t0)
    n_panels = max(1, math.ceil(math.log2(T / t0)))
    xs = _sample(dx_cut, X, SAMPLE_POINTS)
    logger.debug("soe alpha=%g eps=%g range=[%g, %g]: cutoff T=%.3e over %d panels", alpha, eps, dx_cut, X, T, n_panels)

    order = FIRST_ORDER
    best = math.inf
    while (n_panels + 1) * order <= MAX_NODES:
        lambdas, thetas = _raw_nodes(beta, t0, n_panels, order)
        lambdas, thetas = _truncate(lambdas, thetas, dx_cut, 0.1 * eps)
        err = _max_error(lambdas, thetas, alpha, xs)
        best = min(best, err)
        logger.debug("soe order %d: %d nodes, sampled error %.3e", order, lambdas.size, err)
        if err <= eps:
            logger.info("built soe with %d exponentials (alpha=%g eps=%g range=[%g, %g])",
                        lambdas.size, alpha, eps, dx_cut, X)
            return SoeApproximation(
                alpha=alpha,
                eps=eps,
                dx_cut=dx_cut,
                X=X,
                lambdas=lambdas,
                thetas=thetas,
                gauss_order=order,
                max_error=err,
            )
        order += ORDER_STEP
    raise SoeError(
        f"soe for alpha={alpha} could not reach eps={eps:.3e} on [{dx_cut:.3e}, {X:.3e}] "
        f"with at most {MAX_NODES} exponentials (best sampled error {best:.3e})"
    )


def eval_soe(soe: SoeApproximation, x):
    """
    Evaluate the exponential sum at x > 0.

    Args:
        soe: The approximation
        x: Scalar or array of positive points

    Returns:
        float or np.ndarray matching the shape of x
    """
    arr = np.asarray(x, dtype=np.float64)
    vals = _sum_exponentials(soe.lambdas, soe.thetas, np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(vals[0])
    return vals


def soe_error(soe: SoeApproximation, n_samples: int = SAMPLE_POINTS) -> float:
    """Maximum error against x**(1 - alpha) on a geometric sample of the range."""
    return _max_error(soe.lambdas, soe.thetas, soe.alpha, _sample(soe.dx_cut, soe.X, n_samples))


def soe_for_grid(grid: StaggeredGrid, alpha: float, eps: float) -> SoeApproximation:
    """
    Build the exponential sum whose range covers every history distance on a grid.

    The range is [smallest center spacing, b - a].
    """
    return build_soe(alpha, eps, grid.min_interior_stag, grid.length)
