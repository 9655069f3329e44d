#
# fastop - Matrix-free stiffness operator in O(M * N_exp).
#

from .fastop import FastOperator
from .fastop import apply_B
from .fastop import fast_flux
from .fastop import fast_g_left
from .fastop import fast_g_right
from .fastop import precompute
from .fastop import segment_weights

__all__ = [
    "FastOperator",
    "apply_B",
    "fast_flux",
    "fast_g_left",
    "fast_g_right",
    "precompute",
    "segment_weights",
]
