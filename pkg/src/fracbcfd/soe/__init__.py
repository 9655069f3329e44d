#
# soe - Sum-of-exponentials compression of the power kernel.
#

from .soe import MAX_NODES
from .soe import SoeApproximation
from .soe import build_soe
from .soe import eval_soe
from .soe import soe_error
from .soe import soe_for_grid

__all__ = [
    "MAX_NODES",
    "SoeApproximation",
    "build_soe",
    "eval_soe",
    "soe_error",
    "soe_for_grid",
]
