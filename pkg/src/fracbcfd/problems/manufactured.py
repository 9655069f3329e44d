#
# manufactured - Test problems with closed-form solution and flux.
#

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, Dict, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import gamma as gamma_fn

from ..dense import ProblemSpec
from ..quadrature import check_alpha, riemann_liouville_monomial

logger = logging.getLogger(__name__)

# Relative size below which a composed polynomial coefficient is taken as zero.
_COEFF_ROUNDOFF = 1e-13


@dataclass(frozen=True, eq=False)
class Monomials:
    """
    A polynomial sum_m coeffs[m] * s**m in the distance s from one endpoint.

    Only nonzero terms are evaluated, so a profile vanishing at its endpoint
    has a finite fractional flux there.
    """
    coeffs: np.ndarray

    @classmethod
    def from_polynomial(cls, poly: Polynomial) -> "Monomials":
        coeffs = np.array(poly.coef, dtype=np.float64)
        scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
        coeffs[np.abs(coeffs) <= _COEFF_ROUNDOFF * scale] = 0.0
        return cls(coeffs=coeffs)

    def mirrored(self, length: float) -> "Monomials":
        """The same function written in r = length - s."""
        return Monomials.from_polynomial(Polynomial(self.coeffs)(Polynomial([length, -1.0])))

    def _terms(self):
        return [(m, c) for m, c in enumerate(self.coeffs) if c != 0.0]

    def value(self, s):
        return Polynomial(self.coeffs)(np.asarray(s, dtype=np.float64))

    def flux_profile(self, s, alpha: float):
        """d/ds of the order 2-alpha integral from the endpoint, i.e. the derivative of order alpha-1."""
        s = np.maximum(np.asarray(s, dtype=np.float64), 0.0)
        out = np.zeros(s.shape)
        for m, c in self._terms():
            out = out + c * riemann_liouville_monomial(m, 1.0 - alpha, s)
        return out

    def flux_profile_slope(self, s, alpha: float):
        """d/ds of ``flux_profile``, the derivative of order alpha."""
        s = np.maximum(np.asarray(s, dtype=np.float64), 0.0)
        out = np.zeros(s.shape)
        for m, c in self._terms():
            out = out + c * riemann_liouville_monomial(m, -alpha, s)
        return out


@dataclass(frozen=True)
class ManufacturedProblem:
    """A registered problem with its data and exact solution."""
    name: str
    spec: ProblemSpec
    notes: str = field(default="", compare=False)

    @property
    def a(self) -> float:
        return self.spec.a

    @property
    def b(self) -> float:
        return self.spec.b

    @property
    def T(self) -> float:
        return self.spec.T


def _polynomial_problem(
    name: str,
    alpha: float,
    gamma: float,
    domain: Tuple[float, float],
    profile: Polynomial,
    time_factor: Tuple[Callable, Callable],
    coef_time: Callable,
    coef_left: Tuple[Callable, Callable],
    coef_right: Tuple[Callable, Callable],
    notes: str,
) -> ManufacturedProblem:
    """
    Problem with u = g(t) * U(x), U a polynomial in x - a, and K = k(t) * kappa(x).

    The flux follows from the exact fractional derivatives of each monomial;
    the source is f = g'(t) U(x) - d/dx p.
    """
    alpha = check_alpha(alpha)
    a, b = domain
    length = b - a
    left = Monomials.from_polynomial(profile)
    right = left.mirrored(length)
    g, dg = time_factor
    kl, dkl = coef_left
    kr, dkr = coef_right

    def exact_u(x, t):
        return g(t) * left.value(np.asarray(x, dtype=np.float64) - a)

    def flux_bracket(x):
        x = np.asarray(x, dtype=np.float64)
        dl = left.flux_profile(x - a, alpha)
        dr = -right.flux_profile(b - x, alpha)
        return gamma * kl(x) * dl + (1.0 - gamma) * kr(x) * dr

    def flux_bracket_slope(x):
        x = np.asarray(x, dtype=np.float64)
        dl = left.flux_profile(x - a, alpha)
        dl_x = left.flux_profile_slope(x - a, alpha)
        dr = -right.flux_profile(b - x, alpha)
        dr_x = right.flux_profile_slope(b - x, alpha)
        return gamma * (dkl(x) * dl + kl(x) * dl_x) + (1.0 - gamma) * (dkr(x) * dr + kr(x) * dr_x)

    def exact_p(x, t):
        return g(t) * coef_time(t) * flux_bracket(x)

    def source(x, t):
        x = np.asarray(x, dtype=np.float64)
        return dg(t) * left.value(x - a) - g(t) * coef_time(t) * flux_bracket_slope(x)

    spec = ProblemSpec(
        alpha=alpha,
        gamma=gamma,
        KL=lambda x, t: coef_time(t) * kl(np.asarray(x, dtype=np.float64)),
        KR=lambda x, t: coef_time(t) * kr(np.asarray(x, dtype=np.float64)),
        f=source,
        phi=lambda t: float(exact_p(a, t)),
        varphi=lambda t: float(exact_p(b, t)),
        u0=lambda x: exact_u(x, 0.0),
        T=1.0,
        a=a,
        b=b,
        exact_u=exact_u,
        exact_p=exact_p,
    )
    return ManufacturedProblem(name=name, spec=spec, notes=notes)


def _power(c: float, e: float):
    """(c * z**e, c * e * z**(e-1)) for z >= 0."""
    def value(z):
        return c * np.power(np.maximum(z, 0.0), e)

    def slope(z):
        return c * e * np.power(np.maximum(z, 0.0), e - 1.0)

    return value, slope


def example1(alpha: float, gamma: float) -> ManufacturedProblem:
    """
    u = e^t x^4 (2-x)^4 on [0, 2], K^L = t x^alpha, K^R = t (2-x)^alpha.

    Smooth solution; second order on perturbed grids.
    """
    xl, dxl = _power(1.0, alpha)
    x = Polynomial([0.0, 1.0])
    return _polynomial_problem(
        "ex1",
        alpha,
        gamma,
        (0.0, 2.0),
        x ** 4 * (2.0 - x) ** 4,
        (math.exp, math.exp),
        lambda t: t,
        (xl, dxl),
        (lambda z: xl(2.0 - z), lambda z: -dxl(2.0 - z)),
        "smooth profile vanishing to fourth order at both ends",
    )


def example2(alpha: float, gamma: float) -> ManufacturedProblem:
    """
    u = e^{-t} x^2 (2-x)^2 on [0, 2], K^L = t (5 + x^alpha), K^R = t (5 + (2-x)^alpha).

    The flux has x^{3-alpha} terms, so graded grids are needed for second order.
    """
    xl, dxl = _power(1.0, alpha)
    x = Polynomial([0.0, 1.0])
    return _polynomial_problem(
        "ex2",
        alpha,
        gamma,
        (0.0, 2.0),
        x ** 2 * (2.0 - x) ** 2,
        (lambda t: math.exp(-t), lambda t: -math.exp(-t)),
        lambda t: t,
        (lambda z: 5.0 + xl(z), dxl),
        (lambda z: 5.0 + xl(2.0 - z), lambda z: -dxl(2.0 - z)),
        "weakly singular flux near both ends",
    )


def example3(alpha: float, gamma: float = 0.5) -> ManufacturedProblem:
    """
    u = 4 e^t (x (1-x))^{alpha/2} on [0, 1], K^L = K^R = t (1 + x (1-x)).

    The closed-form flux holds for the symmetric operator only.

    Raises:
        ValueError: If gamma is not 1/2
    """
    alpha = check_alpha(alpha)
    if gamma != 0.5:
        raise ValueError(f"ex3 has a closed-form flux only for gamma=0.5, got {gamma}")
    amp = 4.0 * gamma_fn(alpha + 1.0) * math.cos(alpha * math.pi / 2.0)

    def shape(x):
        x = np.asarray(x, dtype=np.float64)
        return 1.0 + x * (1.0 - x)

    def exact_u(x, t):
        x = np.asarray(x, dtype=np.float64)
        return 4.0 * math.exp(t) * np.power(np.clip(x * (1.0 - x), 0.0, None), 0.5 * alpha)

    def exact_p(x, t):
        x = np.asarray(x, dtype=np.float64)
        return amp * t * math.exp(t) * shape(x) * (x - 0.5)

    def source(x, t):
        x = np.asarray(x, dtype=np.float64)
        dp = amp * t * math.exp(t) * ((1.0 - 2.0 * x) * (x - 0.5) + shape(x))
        return exact_u(x, t) - dp

    spec = ProblemSpec(
        alpha=alpha,
        gamma=gamma,
        KL=lambda x, t: t * shape(x),
        KR=lambda x, t: t * shape(x),
        f=source,
        phi=lambda t: float(exact_p(0.0, t)),
        varphi=lambda t: float(exact_p(1.0, t)),
        u0=lambda x: exact_u(x, 0.0),
        T=1.0,
        a=0.0,
        b=1.0,
        exact_u=exact_u,
        exact_p=exact_p,
    )
    return ManufacturedProblem(name="ex3", spec=spec, notes="solution only Holder continuous at both ends")


def example4(alpha: float, gamma: float) -> ManufacturedProblem:
    """
    u = 4 t x (2-x) on [0, 2], K^L = K^R = x (2-x).

    The coefficient vanishes at both ends; used for solver comparisons.
    """
    x = Polynomial([0.0, 1.0])
    bump = x * (2.0 - x)
    dbump = bump.deriv()
    return _polynomial_problem(
        "ex4",
        alpha,
        gamma,
        (0.0, 2.0),
        4.0 * x * (2.0 - x),
        (lambda t: t, lambda t: 1.0),
        lambda t: 1.0,
        (bump, dbump),
        (bump, dbump),
        "time-linear quadratic profile, degenerate coefficient at the ends",
    )


PROBLEMS: Dict[str, Callable[..., ManufacturedProblem]] = {
    "ex1": example1,
    "ex2": example2,
    "ex3": example3,
    "ex4": example4,
}


def get_problem(name: str, alpha: float, gamma: float) -> ManufacturedProblem:
    """
    Instantiate a registered problem by name.

    Args:
        name: One of ex1, ex2, ex3, ex4
        alpha: Fractional order in (1, 2)
        gamma: Left/right weight

    Returns:
        ManufacturedProblem: The problem

    Raises:
        ValueError: If the name is unknown or the parameters are invalid
    """
    key = name.strip().lower()
    if key not in PROBLEMS:
        raise ValueError(f"Unknown problem {name!r}, expected one of {', '.join(PROBLEMS)}")
    logger.debug("instantiating %s with alpha=%g gamma=%g", key, alpha, gamma)
    return PROBLEMS[key](alpha, gamma)
