"""Star-domain resource geometry with geometric-mean quantifiers.

Builds star resource theories from cones, fortresses, and convex free
sections, and ships four ready-made witnesses: two-qubit quantum discord,
bipartite total correlations, non-unistochasticity of circulant bistochastic
matrices, and non-Markovianity of Pauli-channel mixtures.
"""

from .core import (
    ConvexSection,
    Domain,
    FortressReport,
    PolyhedralCone,
    StarTheory,
    WitnessReport,
    cone_contains,
    g_domain,
    g_monotone,
    g_robustness,
    hyperbolic_contraction,
    monotone_bounds,
    redundancy_deletion,
    reflect_cone,
    relative_error_factor,
    robustness,
    section_distance,
    shrink_to_kernel,
    theory_from_json,
    theory_to_json,
    validate_fortress,
)
from .numerics import eigvalsh, geometric_mean, minimize_1d, project_onto_polytope, trace_distance
from .quantum import PauliHalfMixture, TwoQubitFano, choi_of_mixture, choi_of_section_point

__version__ = "0.1.0"

__all__ = [
    "ConvexSection",
    "Domain",
    "FortressReport",
    "PauliHalfMixture",
    "PolyhedralCone",
    "StarTheory",
    "TwoQubitFano",
    "WitnessReport",
    "choi_of_mixture",
    "choi_of_section_point",
    "cone_contains",
    "eigvalsh",
    "g_domain",
    "g_monotone",
    "g_robustness",
    "geometric_mean",
    "hyperbolic_contraction",
    "minimize_1d",
    "monotone_bounds",
    "project_onto_polytope",
    "redundancy_deletion",
    "reflect_cone",
    "relative_error_factor",
    "robustness",
    "section_distance",
    "shrink_to_kernel",
    "theory_from_json",
    "theory_to_json",
    "trace_distance",
    "validate_fortress",
]
