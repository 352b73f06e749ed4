"""
Finite-group symmetries of metric graphs and their quotients.

Example:
    >>> from qgraph.symmetry import builtin_d4_example, quotient, induction_equivalent
    >>> parent, action, r1, r2, T = builtin_d4_example()
    >>> induction_equivalent(action.group, r1, r2)
    True
    >>> q1 = quotient(parent, action, r1)
"""

from qgraph.symmetry._actions import (
    ActionReport,
    ActionViolation,
    EdgeImage,
    FixedPointSet,
    GraphAction,
    ViolationKind,
    action_from_maps,
    fixed_points,
    lead_permutation,
    require_valid_action,
    verify_action,
)
from qgraph.symmetry._builtin import (
    BUILTIN_NAMES,
    BUILTIN_T,
    H1,
    H2,
    D4Example,
    builtin_d4_example,
    builtin_graph,
    d4_action,
    d4_group,
    d4_parent_graph,
    d4_reps,
)
from qgraph.symmetry._groups import (
    FiniteGroup,
    Rep1D,
    induced_character,
    induction_equivalent,
    one_dim_reps,
    sunada_equivalent,
)
from qgraph.symmetry._io import (
    SymmetryDescription,
    load_symmetry,
    parse_symmetry,
    serialize_symmetry,
    symmetry_from_dict,
    symmetry_to_dict,
)
from qgraph.symmetry._quotient import (
    EdgePiece,
    EdgeSource,
    LeadSource,
    NodeProvenance,
    QuotientResult,
    Segment,
    SegmentOrbit,
    quotient,
    segment_orbits,
)

__all__ = [
    # Groups and representations
    "FiniteGroup",
    "Rep1D",
    "induced_character",
    "induction_equivalent",
    "sunada_equivalent",
    "one_dim_reps",
    # Actions
    "EdgeImage",
    "GraphAction",
    "ViolationKind",
    "ActionViolation",
    "ActionReport",
    "FixedPointSet",
    "verify_action",
    "require_valid_action",
    "fixed_points",
    "lead_permutation",
    "action_from_maps",
    # Quotients
    "Segment",
    "SegmentOrbit",
    "EdgePiece",
    "EdgeSource",
    "LeadSource",
    "NodeProvenance",
    "QuotientResult",
    "quotient",
    "segment_orbits",
    # Built-in example
    "BUILTIN_NAMES",
    "BUILTIN_T",
    "H1",
    "H2",
    "D4Example",
    "builtin_d4_example",
    "builtin_graph",
    "d4_group",
    "d4_action",
    "d4_parent_graph",
    "d4_reps",
    # Files
    "SymmetryDescription",
    "load_symmetry",
    "parse_symmetry",
    "serialize_symmetry",
    "symmetry_from_dict",
    "symmetry_to_dict",
]
