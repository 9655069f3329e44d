#
# quadrature - Riemann-Liouville integral tables on staggered meshes.
#

from .fracquad import DirectCoefficients
from .fracquad import InterpolantBoundaryWeights
from .fracquad import boundary_weights
from .fracquad import build_left_coefficients
from .fracquad import build_right_coefficients
from .fracquad import check_alpha
from .fracquad import eval_g_left
from .fracquad import eval_g_right
from .fracquad import left_coefficient_rows
from .fracquad import right_coefficient_rows
from .fracquad import riemann_liouville_monomial

__all__ = [
    "DirectCoefficients",
    "InterpolantBoundaryWeights",
    "boundary_weights",
    "build_left_coefficients",
    "build_right_coefficients",
    "check_alpha",
    "eval_g_left",
    "eval_g_right",
    "left_coefficient_rows",
    "right_coefficient_rows",
    "riemann_liouville_monomial",
]
