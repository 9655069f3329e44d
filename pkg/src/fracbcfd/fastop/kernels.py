#
# kernels - Compiled history sweeps for the fast operator.
#

import numpy as np
from numba import njit


@njit(cache=True)
def left_history(u, rho, sigma, decay, thetas, out):
    """
    Forward sweep of the left history sums.

    out[i] = sum_s thetas[s] * S[i, s] for i >= 1, with
    S[1] = rho[1]*u[0] + sigma[1]*u[1] and
    S[i] = decay[i]*S[i-1] + rho[i]*u[i-2] + sigma[i]*u[i-1].
    """
    M, n_exp = rho.shape
    S = np.empty(n_exp)
    out[0] = 0.0
    acc = 0.0
    for s in range(n_exp):
        S[s] = rho[1, s] * u[0] + sigma[1, s] * u[1]
        acc += thetas[s] * S[s]
    out[1] = acc
    for i in range(2, M):
        acc = 0.0
        ua = u[i - 2]
        ub = u[i - 1]
        for s in range(n_exp):
            S[s] = decay[i, s] * S[s] + rho[i, s] * ua + sigma[i, s] * ub
            acc += thetas[s] * S[s]
        out[i] = acc


@njit(cache=True)
def right_history(u, rho, sigma, decay, thetas, out):
    """
    Backward sweep of the right history sums.

    out[i] = sum_s thetas[s] * S[i, s] for i <= M-2, with
    S[M-2] = rho[M-2]*u[M-2] + sigma[M-2]*u[M-1] and
    S[i] = decay[i+1]*S[i+1] + rho[i]*u[i+2] + sigma[i]*u[i+1].
    """
    M, n_exp = rho.shape
    S = np.empty(n_exp)
    out[M - 1] = 0.0
    acc = 0.0
    for s in range(n_exp):
        S[s] = rho[M - 2, s] * u[M - 2] + sigma[M - 2, s] * u[M - 1]
        acc += thetas[s] * S[s]
    out[M - 2] = acc
    for i in range(M - 3, -1, -1):
        acc = 0.0
        ua = u[i + 2]
        ub = u[i + 1]
        for s in range(n_exp):
            S[s] = decay[i + 1, s] * S[s] + rho[i, s] * ua + sigma[i, s] * ub
            acc += thetas[s] * S[s]
        out[i] = acc
