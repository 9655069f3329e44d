#
# dense - Problem data and the dense direct form of the scheme.
#

from .problemspec import ProblemSpec
from .stiffness import DenseScheme
from .stiffness import DenseStiffness
from .stiffness import DiffusionVectors
from .stiffness import apply_flux_divergence
from .stiffness import assemble_stiffness
from .stiffness import cn_system_matrices
from .stiffness import dense_lu_solve
from .stiffness import diffusion_vectors
from .stiffness import interior_flux
from .stiffness import recover_flux
from .stiffness import sample_coefficient
from .stiffness import source_vector

__all__ = [
    "ProblemSpec",
    "DenseScheme",
    "DenseStiffness",
    "DiffusionVectors",
    "apply_flux_divergence",
    "assemble_stiffness",
    "cn_system_matrices",
    "dense_lu_solve",
    "diffusion_vectors",
    "interior_flux",
    "recover_flux",
    "sample_coefficient",
    "source_vector",
]
