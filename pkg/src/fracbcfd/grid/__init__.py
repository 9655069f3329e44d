#
# grid - Nonuniform staggered meshes for block-centered schemes.
#

from .staggered import StaggeredGrid
from .staggered import GRID_KINDS
from .staggered import build_uniform
from .staggered import build_perturbed
from .staggered import build_graded
from .staggered import build_grid
from .staggered import readonly_array
from .gridfile import read_grid_file
from .gridfile import write_grid_file

__all__ = [
    "StaggeredGrid",
    "GRID_KINDS",
    "build_uniform",
    "build_perturbed",
    "build_graded",
    "build_grid",
    "readonly_array",
    "read_grid_file",
    "write_grid_file",
]
