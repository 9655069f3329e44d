#
# problems - Registry of manufactured-solution test problems.
#

from .manufactured import ManufacturedProblem
from .manufactured import Monomials
from .manufactured import PROBLEMS
from .manufactured import example1
from .manufactured import example2
from .manufactured import example3
from .manufactured import example4
from .manufactured import get_problem

__all__ = [
    "ManufacturedProblem",
    "Monomials",
    "PROBLEMS",
    "example1",
    "example2",
    "example3",
    "example4",
    "get_problem",
]
