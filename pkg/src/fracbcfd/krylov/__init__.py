#
# krylov - BiCGSTAB and the Crank-Nicolson time-marching driver.
#

from .bicgstab import BicgstabResult
from .bicgstab import bicgstab
from .march import DENSE_BICGSTAB
from .march import DENSE_GE
from .march import FAST_BICGSTAB
from .march import METHODS
from .march import MarchResult
from .march import SolveConfig
from .march import cn_march
from .march import normalize_method

__all__ = [
    "BicgstabResult",
    "bicgstab",
    "DENSE_BICGSTAB",
    "DENSE_GE",
    "FAST_BICGSTAB",
    "METHODS",
    "MarchResult",
    "SolveConfig",
    "cn_march",
    "normalize_method",
]
