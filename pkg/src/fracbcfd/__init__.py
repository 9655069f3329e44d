__version__ = "0.1.0"

# Import main modules
from .grid import StaggeredGrid, build_grid
from .dense import ProblemSpec
from .soe import SoeApproximation, build_soe
from .fastop import FastOperator, apply_B, precompute
from .krylov import MarchResult, SolveConfig, bicgstab, cn_march
from .problems import ManufacturedProblem, get_problem

__all__ = [
    "StaggeredGrid",
    "build_grid",
    "ProblemSpec",
    "SoeApproximation",
    "build_soe",
    "FastOperator",
    "apply_B",
    "precompute",
    "MarchResult",
    "SolveConfig",
    "bicgstab",
    "cn_march",
    "ManufacturedProblem",
    "get_problem",
]
