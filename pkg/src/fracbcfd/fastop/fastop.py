#
# fastop - Matrix-free stiffness operator built on a sum-of-exponentials kernel.
#

from dataclasses import dataclass, field, replace
import logging
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from ..dense import DiffusionVectors, ProblemSpec, diffusion_vectors, interior_flux
from ..errors import SoeError
from ..grid import StaggeredGrid, readonly_array
from ..quadrature import boundary_weights, left_coefficient_rows, right_coefficient_rows
from ..soe import SoeApproximation
from .kernels import left_history, right_history

logger = logging.getLogger(__name__)

# Rows of the (M+1) x N_exp tables filled per block during precompute.
ROW_CHUNK = 4096
# Below this argument the weight functions use their Taylor series.
SERIES_CUTOFF = 0.5
_SERIES_TERMS = 16


def _series_coefficients():
    k = np.arange(_SERIES_TERMS)
    fact = np.cumprod(np.concatenate(([1.0], np.arange(1.0, _SERIES_TERMS))))
    sign = (-1.0) ** k
    far = sign / (fact * (k + 2.0))
    near = sign / (fact * (k + 1.0) * (k + 2.0))
    return far, near


_FAR_SERIES, _NEAR_SERIES = _series_coefficients()


def segment_weights(y: np.ndarray):
    """
    Exact weights of a linear function under exp(-y*s) on s in [0, 1].

    Returns:
        Tuple[np.ndarray, np.ndarray]: (far, near), the integrals of
        s*exp(-y*s) and (1-s)*exp(-y*s)
    """
    y = np.asarray(y, dtype=np.float64)
    far = np.empty(y.shape)
    near = np.empty(y.shape)
    small = y < SERIES_CUTOFF
    ys = y[small]
    far[small] = np.polynomial.polynomial.polyval(ys, _FAR_SERIES)
    near[small] = np.polynomial.polynomial.polyval(ys, _NEAR_SERIES)
    big = ~small
    yb = y[big]
    phi1 = -np.expm1(-yb) / yb
    far[big] = (phi1 - np.exp(-yb)) / yb
    near[big] = (1.0 - phi1) / yb
    return far, near


@dataclass(frozen=True, eq=False)
class FastOperator:
    """
    Precomputed tables for O(M * N_exp) application of the stiffness operator.

    Local weights: for 1 <= i the left integral has local part
    muL[i]*u[i-1] + nuL[i]*u[i]; row 0 is g_0 = nuL[0]*u[0] + muL[0]*u[1].
    The right side mirrors this: muR[i]*u[i+1] + nuR[i]*u[i] for i <= M-2 and
    g_{M-1} = nuR[M-1]*u[M-1] + muR[M-1]*u[M-2].

    History weights rhoL/sigmaL (rows 1..M-1) and rhoR/sigmaR (rows 0..M-2)
    multiply the far and near cell of the newest history segment.
    ``decay[k] = exp(-lambdas * stag_widths[k])``; the left sweep reads rows
    0..M-1 (``decayL``) and the right sweep rows 1..M (``decayR``).

    ``t`` and ``vectors`` hold the diffusion scalings of one time level and are
    replaced through ``at_time``; every table is shared between time levels.
    """
    grid: StaggeredGrid
    alpha: float
    soe: SoeApproximation
    muL: np.ndarray = field(repr=False)
    nuL: np.ndarray = field(repr=False)
    muR: np.ndarray = field(repr=False)
    nuR: np.ndarray = field(repr=False)
    rhoL: np.ndarray = field(repr=False)
    sigmaL: np.ndarray = field(repr=False)
    rhoR: np.ndarray = field(repr=False)
    sigmaR: np.ndarray = field(repr=False)
    decay: np.ndarray = field(repr=False)
    t: Optional[float] = None
    vectors: Optional[DiffusionVectors] = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return self.grid.M

    @property
    def n_exp(self) -> int:
        return self.soe.n_exp

    @property
    def decayL(self) -> np.ndarray:
        return self.decay[:-1]

    @property
    def decayR(self) -> np.ndarray:
        return self.decay[1:]

    @property
    def history_scale(self) -> float:
        return 1.0 / gamma_fn(2.0 - self.alpha)

    def at_time(self, problem: ProblemSpec, t: float) -> "FastOperator":
        """Return an operator sharing these tables with scalings for time t."""
        return replace(self, t=t, vectors=diffusion_vectors(self.grid, problem, t))

    def table_nbytes(self) -> int:
        """Bytes held by the operator's arrays, scalings included."""
        arrays = [self.muL, self.nuL, self.muR, self.nuR, self.rhoL, self.sigmaL,
                  self.rhoR, self.sigmaR, self.decay, self.soe.lambdas, self.soe.thetas]
        if self.vectors is not None:
            v = self.vectors
            arrays += [v.dplusL, v.dminusL, v.dplusR, v.dminusR]
        return int(sum(arr.nbytes for arr in arrays))


def precompute(grid: StaggeredGrid, alpha: float, soe: SoeApproximation) -> FastOperator:
    """
    Build the local weights, history weights and decay factors.

    Each fractional integral at x_i splits into a local part over the adjacent
    staggered cell, integrated exactly, and a history part over the rest of
    the domain. With the kernel replaced by sum_s theta_s exp(-lambda_s x) the
    history part obeys a first order recurrence per exponential, so one sweep
    evaluates all M integrals in O(M * N_exp) work and storage.

    Args:
        grid: The mesh
        alpha: Fractional order, must match the soe
        soe: Exponential sum covering [grid.min_interior_stag, b - a]

    Returns:
        FastOperator: Operator without time-level scalings

    Raises:
        SoeError: If the soe range does not cover the history distances
        ValueError: If alpha does not match the soe
    """
    if abs(alpha - soe.alpha) > 1e-15:
        raise ValueError(f"alpha={alpha} does not match the soe built for alpha={soe.alpha}")
    lo = grid.min_interior_stag
    hi = grid.length
    if not soe.covers(lo * (1.0 + 1e-12), hi * (1.0 - 1e-12)):
        raise SoeError(
            f"soe range [{soe.dx_cut:.6e}, {soe.X:.6e}] does not cover history distances [{lo:.6e}, {hi:.6e}]"
        )
    M = grid.M
    n_exp = soe.n_exp
    lam = soe.lambdas
    stag = np.asarray(grid.stag_widths)

    # Local weights over the adjacent staggered cell.
    g3 = 1.0 / gamma_fn(3.0 - alpha)
    g4 = 1.0 / gamma_fn(4.0 - alpha)
    hl = stag[:M] ** (2.0 - alpha)
    hr = stag[1:] ** (2.0 - alpha)
    muL = (g3 - g4) * hl
    nuL = g4 * hl
    muR = (g3 - g4) * hr
    nuR = g4 * hr
    qL0, _ = left_coefficient_rows(grid, alpha, [0])
    qR1, _ = right_coefficient_rows(grid, alpha, [M - 1])
    nuL[0], muL[0] = qL0[0, 0], qL0[0, 1]
    nuR[-1], muR[-1] = qR1[0, -1], qR1[0, -2]

    decay = np.empty((M + 1, n_exp))
    rhoL = np.zeros((M, n_exp))
    sigmaL = np.zeros((M, n_exp))
    rhoR = np.zeros((M, n_exp))
    sigmaR = np.zeros((M, n_exp))
    for lo_k in range(0, M + 1, ROW_CHUNK):
        hi_k = min(lo_k + ROW_CHUNK, M + 1)
        y = np.multiply.outer(stag[lo_k:hi_k], lam)
        decay[lo_k:hi_k] = np.exp(-y)
        far, near = segment_weights(y)
        far *= stag[lo_k:hi_k, None]
        near *= stag[lo_k:hi_k, None]
        # Segment k is the newest left history cell of row k+1 ...
        k = np.arange(lo_k, hi_k)
        sel = k <= M - 2
        rows = k[sel] + 1
        rhoL[rows] = far[sel]
        sigmaL[rows] = near[sel]
        # ... and the newest right history cell of row k-2.
        sel = k >= 2
        rows = k[sel] - 2
        rhoR[rows] = far[sel]
        sigmaR[rows] = near[sel]
        del y, far, near
    rhoL[1:] *= decay[1:M]
    sigmaL[1:] *= decay[1:M]
    rhoR[:M - 1] *= decay[1:M]
    sigmaR[:M - 1] *= decay[1:M]

    # Segments touching a or b carry the extrapolated end value.
    wts = boundary_weights(grid)
    eta = rhoL[1].copy()
    rhoL[1] = wts.left[0] * eta + sigmaL[1]
    sigmaL[1] = wts.left[1] * eta
    eta = rhoR[M - 2].copy()
    sigmaR[M - 2] = wts.right[0] * eta + sigmaR[M - 2]
    rhoR[M - 2] = wts.right[1] * eta

    op = FastOperator(
        grid=grid,
        alpha=float(alpha),
        soe=soe,
        muL=readonly_array(muL),
        nuL=readonly_array(nuL),
        muR=readonly_array(muR),
        nuR=readonly_array(nuR),
        rhoL=readonly_array(rhoL),
        sigmaL=readonly_array(sigmaL),
        rhoR=readonly_array(rhoR),
        sigmaR=readonly_array(sigmaR),
        decay=readonly_array(decay),
    )
    logger.info("fast operator ready: M=%d N_exp=%d, %.1f MiB of tables", M, n_exp, op.table_nbytes() / 2**20)
    return op


def _check_vector(op: FastOperator, u) -> np.ndarray:
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.shape != (op.M,):
        raise ValueError(f"vector has shape {u.shape}, expected ({op.M},)")
    return u


def fast_g_left(op: FastOperator, u) -> np.ndarray:
    """
    Left fractional integral of the interpolant of u at every center.

    Args:
        op: Precomputed operator
        u: Length-M cell values

    Returns:
        np.ndarray: Approximation of eval_g_left within the soe tolerance
    """
    u = _check_vector(op, u)
    hist = np.empty(op.M)
    left_history(u, op.rhoL, op.sigmaL, op.decay, op.soe.thetas, hist)
    g = op.history_scale * hist
    g += op.nuL * u
    g[1:] += op.muL[1:] * u[:-1]
    g[0] += op.muL[0] * u[1]
    return g


def fast_g_right(op: FastOperator, u) -> np.ndarray:
    """Right fractional integral of the interpolant of u at every center."""
    u = _check_vector(op, u)
    hist = np.empty(op.M)
    right_history(u, op.rhoR, op.sigmaR, op.decay, op.soe.thetas, hist)
    g = op.history_scale * hist
    g += op.nuR * u
    g[:-1] += op.muR[:-1] * u[1:]
    g[-1] += op.muR[-1] * u[-2]
    return g


def _vectors_for(op: FastOperator, problem: ProblemSpec, t_n: float) -> DiffusionVectors:
    if op.vectors is not None and op.t == t_n:
        return op.vectors
    return diffusion_vectors(op.grid, problem, t_n)


def apply_B(op: FastOperator, problem: ProblemSpec, t_n: float, v) -> np.ndarray:
    """
    Apply the stiffness operator at time t_n to v without forming a matrix.

    Args:
        op: Precomputed operator, ideally from ``op.at_time(problem, t_n)``
        problem: Supplies gamma and, if op carries no scalings for t_n, K
        t_n: Time level
        v: Length-M vector

    Returns:
        np.ndarray: B^n v

    Raises:
        CoefficientError: If K is negative or non-finite at an edge
    """
    v = _check_vector(op, v)
    dv = _vectors_for(op, problem, t_n)
    gam = problem.gamma
    out = np.zeros(op.M)
    if gam != 0.0:
        dg = np.diff(fast_g_left(op, v))
        out[:-1] += gam * dv.dplusL[:-1] * dg
        out[1:] -= gam * dv.dminusL[1:] * dg
    if gam != 1.0:
        dg = np.diff(fast_g_right(op, v))
        out[:-1] += (1.0 - gam) * dv.dplusR[:-1] * dg
        out[1:] -= (1.0 - gam) * dv.dminusR[1:] * dg
    return out


def fast_flux(op: FastOperator, problem: ProblemSpec, u, t_n: float) -> np.ndarray:
    """Flux at all M+1 edges from the fast integrals, boundary data at the ends."""
    u = _check_vector(op, u)
    p = np.empty(op.M + 1)
    p[1:-1] = interior_flux(op.grid, fast_g_left(op, u), fast_g_right(op, u), problem, t_n)
    p[0] = problem.phi(t_n)
    p[-1] = problem.varphi(t_n)
    return p
