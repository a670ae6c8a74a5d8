"""Projective shape analysis: subspace constraints, frames and pseudo-frame
charts, Tyler standardization and topological witnesses.

Landmark indices are 0-based in the library and 1-based in serialized output.
"""

__version__ = "0.1.0"

from .constraints import (
    ConstraintReport,
    Flat,
    SplitWitness,
    SubspaceConstraint,
    SubspaceNumbers,
    constraint_flats,
    hausdorff_violations,
    is_free,
    is_general_position,
    is_hausdorff_numbers,
    is_maximal_numbers,
    is_splittable,
    is_tyler_regular,
    isotropy_dimension,
    satisfies_subspace_numbers,
    tyler_maximal_gcd,
    tyler_numbers,
)
from .core import (
    Configuration,
    GroupElement,
    ProjectivePoint,
    act,
    canonicalize_point,
    compose,
    configuration_rank,
    load,
    save,
)
from .errors import *  # noqa: F401,F403
from .frames import (
    ChartPoint,
    ColoredGraph,
    PseudoFrame,
    find_frame,
    find_pseudo_frame,
    first_base,
    frame_coordinates,
    graph_of,
    normalize_to_graph_form,
    pseudo_frame_coordinates,
    shape_equal,
)
from .kernels import BACKEND
from .linalg import numerical_rank
from .topology import (
    BlockPair,
    ShapeSequence,
    blur_sequence,
    merge_sequence,
    nonhausdorff_witness,
    random_general_position,
    random_with_constraint,
)
from .tyler import (
    Standardizability,
    TylerStandardization,
    align_signs,
    diagonal_action_derivative,
    is_standardizable,
    projection_matrix,
    shape_distance,
    tyler_standardize,
)
