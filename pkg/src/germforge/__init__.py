"""Exact jet computations for codimension-one holomorphic foliations.

Jets of functions and differential forms near the origin, with rational
coefficients, are decomposed, normalized and certified without floating
point anywhere.
"""

from .forms import PForm, TForm, WeightVector, d_function, exterior_d, pullback_weighted, twedge, wedge
from .normalizer import DeformationFamily, NotIntegrable, certify_first_integral, check_cascade, normalize
from .quasihom import (
    certify_isolated_singularity,
    detect_quasihomogeneity,
    embed_as_deformation,
    singular_curve_check,
    theorem3_criterion,
)
from .ring import Jet, TPoly
from .solver import (
    Decomposition,
    NotInvariant,
    ObstructionCertificate,
    solve_invariant_split,
    solve_relative,
    unit_test_claim,
)

__all__ = [
    "Jet", "TPoly", "PForm", "TForm", "WeightVector",
    "d_function", "exterior_d", "wedge", "twedge", "pullback_weighted",
    "Decomposition", "ObstructionCertificate", "NotInvariant",
    "solve_relative", "solve_invariant_split", "unit_test_claim",
    "DeformationFamily", "NotIntegrable", "check_cascade", "normalize", "certify_first_integral",
    "detect_quasihomogeneity", "embed_as_deformation", "certify_isolated_singularity",
    "theorem3_criterion", "singular_curve_check",
]
