"""Exact computer algebra for algebraic statistics.

Gaussian graphical models (plain, colored, DAG) and group-based
phylogenetic models on trees and level-1 networks, their conditional
independence and vanishing ideals, toric and multigraded implicitization,
and JSON persistence with a queryable file collection.
"""

from .ci import CIStmt, GaussianRing, ci_ideal, ci_stmt, gaussian_ring, global_markov
from .exactnum import (
    BigRat,
    IntMatrix,
    SNFResult,
    lattice_kernel,
    rational_nullspace,
    smith_normal_form,
)
from .gaussmodels import GaussianModel, gaussian_graphical_model
from .graphcore import (
    DIRECTED,
    UNDIRECTED,
    Graph,
    Labeling,
    PhyloNetwork,
    d_separated,
    displayed_trees,
    graph_from_edges,
    graph_from_labeled_edges,
    is_separated,
    labeling,
    minimal_separators,
    phylo_validate,
)
from .groebner import (
    Ideal,
    buchberger,
    eliminate,
    ideal_equal,
    kernel_of_map,
    normal_form,
    saturate,
)
from .implicit import (
    GradedKernelResult,
    GradingGroup,
    components_of_kernel,
    graded_component,
    maximal_grading,
)
from .persist import Collection, find, load, load_string, save, save_string
from .phylomodels import (
    GroupStructure,
    PhyloModel,
    general_markov_model,
    jukes_cantor_model,
    kimura2_model,
    kimura3_model,
    phylogenetic_model,
)
from .polyring import (
    DEGREVLEX,
    LEX,
    MonomialOrder,
    MultiPoly,
    PolyRing,
    RingMap,
    apply_map,
    block_order,
    compare,
    parse_poly,
    ring_new,
)

__version__ = "0.1.0"
