#
# bicgstab - Matrix-free BiCGSTAB for nonsymmetric systems.
#

import logging
from typing import Callable, NamedTuple, Optional

import numpy as np

logger = logging.getLogger(__name__)

_TINY = np.finfo(np.float64).tiny


class BicgstabResult(NamedTuple):
    """Outcome of one solve; unpacks as (x, iters, converged, matvecs, resid_norm)."""
    x: np.ndarray
    iters: int
    converged: bool
    matvecs: int
    resid_norm: float


def bicgstab(
    apply: Callable[[np.ndarray], np.ndarray],
    rhs,
    x0=None,
    rel_tol: float = 1e-10,
    max_iters: Optional[int] = None,
) -> BicgstabResult:
    """
    Solve A x = rhs with BiCGSTAB using only products v -> A v.

    Args:
        apply: The operator, a fixed linear map for the whole solve
        rhs: Right-hand side
        x0: Initial guess, zero when None
        rel_tol: Stop once ||rhs - A x||_2 <= rel_tol * ||rhs||_2
        max_iters: Iteration cap, len(rhs) when None

    Returns:
        BicgstabResult: Iterate, iteration count, convergence flag and the
        number of operator applications. An iteration that converges at its
        half step counts as one iteration.

    Note:
        Breakdown (a vanishing inner product or stabilisation weight) is not
        raised; the current iterate comes back with converged=False.
    """
    if not rel_tol > 0.0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    rhs = np.asarray(rhs, dtype=np.float64)
    n = rhs.shape[0]
    if max_iters is None:
        max_iters = n
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")

    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return BicgstabResult(np.zeros(n), 0, True, 0, 0.0)
    threshold = rel_tol * bnorm

    matvecs = 0
    if x0 is None:
        x = np.zeros(n)
        r = rhs.copy()
    else:
        x = np.array(x0, dtype=np.float64)
        if x.shape != rhs.shape:
            raise ValueError(f"x0 has shape {x.shape}, expected {rhs.shape}")
        r = rhs - apply(x)
        matvecs += 1
    resid = float(np.linalg.norm(r))
    if resid <= threshold:
        return BicgstabResult(x, 0, True, matvecs, resid)

    r_hat = r.copy()
    p = np.zeros(n)
    v = np.zeros(n)
    rho = alpha = omega = 1.0
    iters = 0
    while iters < max_iters:
        iters += 1
        rho_next = float(np.dot(r_hat, r))
        if abs(rho_next) < _TINY:
            logger.warning("bicgstab breakdown: rho vanished at iteration %d (residual %.3e)", iters, resid)
            return BicgstabResult(x, iters, False, matvecs, resid)
        beta = (rho_next / rho) * (alpha / omega)
        rho = rho_next
        p = r + beta * (p - omega * v)
        v = apply(p)
        matvecs += 1
        denom = float(np.dot(r_hat, v))
        if abs(denom) < _TINY:
            logger.warning("bicgstab breakdown: <r_hat, v> vanished at iteration %d", iters)
            return BicgstabResult(x, iters, False, matvecs, resid)
        alpha = rho / denom
        s = r - alpha * v
        resid = float(np.linalg.norm(s))
        if resid <= threshold:
            x += alpha * p
            return BicgstabResult(x, iters, True, matvecs, resid)
        t = apply(s)
        matvecs += 1
        tt = float(np.dot(t, t))
        if tt < _TINY:
            logger.warning("bicgstab breakdown: A s vanished at iteration %d", iters)
            return BicgstabResult(x, iters, False, matvecs, resid)
        omega = float(np.dot(t, s)) / tt
        x += alpha * p + omega * s
        r = s - omega * t
        resid = float(np.linalg.norm(r))
        logger.debug("bicgstab iteration %d: residual %.3e", iters, resid)
        if resid <= threshold:
            return BicgstabResult(x, iters, True, matvecs, resid)
        if abs(omega) < _TINY:
            logger.warning("bicgstab breakdown: omega vanished at iteration %d", iters)
            return BicgstabResult(x, iters, False, matvecs, resid)
    logger.debug("bicgstab hit max_iters=%d with residual %.3e > %.3e", max_iters, resid, threshold)
    return BicgstabResult(x, iters, False, matvecs, resid)
