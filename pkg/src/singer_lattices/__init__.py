"""Panel-regular lattices in Ã2 and C̃2 buildings from Singer groups.

Finite fields, Singer difference sets and planes, the slanted symplectic
quadrangle, complexes of groups with their fundamental groups and local
developments, the level-2 Hjelmslev plane, and group homology.
"""

from .gf import FieldElement, field_of_order, make_field
from .hjelmslev import HjelmslevPlane, cmsz_test, general_adjacency, hjelmslev_plane, splitting_map
from .homology import AbelianGroup, abelianization, a2_homology_table, c2_homology, kernel_mod_n, smith_normal_form
from .lattice import (
    A2LatticeSpec,
    C2LatticeSpec,
    a2_complex_of_groups,
    a2_presentation,
    c2_complex_of_groups,
    c2_presentation,
)
from .polygon import IncidenceStructure, verify_generalized_polygon
from .scwol import (
    ComplexOfGroups,
    Scwol,
    development,
    fundamental_group,
    local_development_check,
    quotient_complex,
    universal_cover_ball,
)
from .singer import DifferenceSet, plane_from_difference_set, singer_difference_set, slanted_quadrangle

__version__ = "0.1.0"
