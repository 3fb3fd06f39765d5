"""Bounded-cohomology volume and Borel cocycles for free-group representations."""

from .errors import (AmbiguousClass, BudgetExceeded, DegenerateFrame, DependentBasis,
                     DiscsOverlap, EmptyFamily, HypvolError, IdentityHasAllFixed,
                     InvalidParameter, NonGenericConfiguration, NotFound, NotReal)
from .isometry import (IDENTITY, INFINITY, ORIGIN, BoundaryPoint, Elementarity, H2Point,
                       H3Point, IsometryKind, ProjectiveIsometry, apply_boundary, apply_h2,
                       apply_h3, classify, compose, dist_h2, dist_h3, fixed_points,
                       is_elementary_pair, isometry)
from .volume import V3, bloch_wigner, cross_ratio, ideal_tet_volume, signed_area_h2
from .borel import (Flag, borel_bound, borel_cocycle, gram_schmidt_flag, is_generic,
                    multi_index_set, veronese_flag, veronese_matrix)
from .chains import (BorelCocycle, FreeRepresentation, GroupChain, Vol2Cocycle, Vol3Cocycle,
                     boundary, evaluate, pushforward, word_eval)
from .representations import (certify_dense, certify_schottky, dense_psl2r, find_exponents,
                              fuchsian_surface_rep, h_alpha_beta, rho_theta, threshold_tau0)
from .approx import ApproxRequest, approximate_element, transfer_chain
from .pipeline import FreeApproximation, seminorm_bound, surface_chain

__version__ = "0.1.0"

__all__ = [
    "AmbiguousClass",
    "BudgetExceeded",
    "DegenerateFrame",
    "DependentBasis",
    "DiscsOverlap",
    "EmptyFamily",
    "HypvolError",
    "IdentityHasAllFixed",
    "InvalidParameter",
    "NonGenericConfiguration",
    "NotFound",
    "NotReal",
    "IDENTITY",
    "INFINITY",
    "ORIGIN",
    "BoundaryPoint",
    "Elementarity",
    "H2Point",
    "H3Point",
    "IsometryKind",
    "ProjectiveIsometry",
    "apply_boundary",
    "apply_h2",
    "apply_h3",
    "classify",
    "compose",
    "dist_h2",
    "dist_h3",
    "fixed_points",
    "is_elementary_pair",
    "isometry",
    "V3",
    "bloch_wigner",
    "cross_ratio",
    "ideal_tet_volume",
    "signed_area_h2",
    "Flag",
    "borel_bound",
    "borel_cocycle",
    "gram_schmidt_flag",
    "is_generic",
    "multi_index_set",
    "veronese_flag",
    "veronese_matrix",
    "BorelCocycle",
    "FreeRepresentation",
    "GroupChain",
    "Vol2Cocycle",
    "Vol3Cocycle",
    "boundary",
    "evaluate",
    "pushforward",
    "word_eval",
    "certify_dense",
    "certify_schottky",
    "dense_psl2r",
    "find_exponents",
    "fuchsian_surface_rep",
    "h_alpha_beta",
    "rho_theta",
    "threshold_tau0",
    "ApproxRequest",
    "approximate_element",
    "transfer_chain",
    "FreeApproximation",
    "seminorm_bound",
    "surface_chain",
]

