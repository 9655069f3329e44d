#
# gridfile - Read and write plain-text grid edge files.
#

import logging
import re

import numpy as np

from ..errors import GridError
from .staggered import StaggeredGrid

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(
    r"^#\s*edges\s+M=(?P<M>\d+)\s+a=(?P<a>\S+)\s+b=(?P<b>\S+)\s*$"
)


def write_grid_file(grid: StaggeredGrid, filepath: str) -> None:
    """
    Write a grid as a header line followed by one edge per line.

    Args:
        grid: Grid to write
        filepath: Destination path

    Raises:
        OSError: If the file cannot be written
    """
    try:
        with open(filepath, "w", encoding="utf-8") as gridfile:
            gridfile.write(f"# edges M={grid.M} a={grid.a:.17g} b={grid.b:.17g}\n")
            for edge in grid.edges:
                gridfile.write(f"{edge:.17g}\n")
    except OSError as err:
        raise OSError(f"Failed writing grid file {filepath}: {err}") from err


def read_grid_file(filepath: str) -> StaggeredGrid:
    """
    Read a grid file written by ``write_grid_file``.

    Args:
        filepath: Path to the grid file

    Returns:
        StaggeredGrid: The validated grid

    Raises:
        GridError: If the header is malformed or disagrees with the edges
        OSError: If the file cannot be read
    """
    try:
        with open(filepath, "r", encoding="utf-8") as gridfile:
            lines = [line.strip() for line in gridfile]
    except OSError as err:
        raise OSError(f"Failed reading grid file {filepath}: {err}") from err
    lines = [line for line in lines if line != ""]
    if len(lines) == 0:
        raise GridError(f"{filepath}: empty grid file")
    match = HEADER_RE.match(lines[0])
    if match is None:
        raise GridError(f"{filepath}: bad header {lines[0]!r}, expected '# edges M=<int> a=<real> b=<real>'")
    M = int(match.group("M"))
    a = float(match.group("a"))
    b = float(match.group("b"))
    try:
        edges = np.array([float(line) for line in lines[1:]])
    except ValueError as err:
        raise GridError(f"{filepath}: unparseable edge value: {err}") from err
    if edges.size != M + 1:
        raise GridError(f"{filepath}: header says M={M} but found {edges.size} edges")
    if edges[0] != a or edges[-1] != b:
        raise GridError(f"{filepath}: end edges {edges[0]!r}, {edges[-1]!r} do not match a={a!r}, b={b!r}")
    grid = StaggeredGrid.from_edges(edges)
    logger.info("read grid with M=%d on [%g, %g] from %s", M, a, b, filepath)
    return grid
