#
# problemspec - Data of a two-sided fractional diffusion problem.
#

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..quadrature import check_alpha

SpaceTimeFn = Callable[[np.ndarray, float], np.ndarray]
TimeFn = Callable[[float], float]
SpaceFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    """
    Model data for u_t - d/dx p = f on [a, b] x (0, T] with flux boundary data.

    The flux is p = gamma*K^L*d/dx I_L u + (1-gamma)*K^R*d/dx I_R u where I_L and
    I_R are the left and right Riemann-Liouville integrals of order 2 - alpha.
    All space-time callables take an array of x values and a scalar t.

    Attributes:
        alpha: Fractional order in (1, 2)
        gamma: Left/right weight in [0, 1]
        KL: Left diffusion coefficient K^L(x, t), non-negative
        KR: Right diffusion coefficient K^R(x, t), non-negative
        f: Source f(x, t)
        phi: Flux at x = a, phi(t)
        varphi: Flux at x = b, varphi(t)
        u0: Initial condition u0(x)
        T: Final time
        a: Left endpoint
        b: Right endpoint
        exact_u: Optional exact solution u(x, t)
        exact_p: Optional exact flux p(x, t)
    """
    alpha: float
    gamma: float
    KL: SpaceTimeFn
    KR: SpaceTimeFn
    f: SpaceTimeFn
    phi: TimeFn
    varphi: TimeFn
    u0: SpaceFn
    T: float = 1.0
    a: float = 0.0
    b: float = 1.0
    exact_u: Optional[SpaceTimeFn] = None
    exact_p: Optional[SpaceTimeFn] = None

    def __post_init__(self):
        check_alpha(self.alpha)
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"weight gamma must lie in [0, 1], got {self.gamma}")
        if not self.T > 0.0:
            raise ValueError(f"final time T must be positive, got {self.T}")
        if not self.a < self.b:
            raise ValueError(f"degenerate domain [{self.a}, {self.b}]")

    @property
    def has_exact(self) -> bool:
        return self.exact_u is not None and self.exact_p is not None
