"""Rational caustics of billiard tables close to a circle.

Support-function geometry, the billiard map, the Levi-Moser error functional,
its Taylor expansion and the second-order obstruction to co-preserving two
rational caustics.  Set ``CAUSTICS_DISABLE_JIT=1`` to run the pure-numpy
kernels instead of the numba ones.
"""

__version__ = "0.1.0"

from .fourier import FourierSeries, ModeSet, multiples
from .geometry import (ConvexityError, DegenerateChordError, Deformation, SupportFunction,
                       boundary_point, constant_width_check, ellipse_support,
                       generating_function, partial_S)
from .dynamics import ChordState, Orbit, iterate, next_point, reflection_residual, rotation_number
from .variational import (CausticCandidate, FirstOrderObstruction, MonotonicityError,
                          a_coeff, error_functional, error_sup_norm, solve_first_order)
from .expansion import (e11_projection, expansion_reports, expansion_term_E10,
                        expansion_term_E11, numeric_eps_terms)
from .newton import NewtonFailure, newton_solve_caustic
from .obstruction import (HypothesisViolation, quadratic_obstruction, rigidity_sweep,
                          split_constants, triviality_certificate)

__all__ = [
    "FourierSeries", "ModeSet", "multiples",
    "SupportFunction", "Deformation", "ConvexityError", "DegenerateChordError",
    "boundary_point", "constant_width_check", "ellipse_support",
    "generating_function", "partial_S",
    "ChordState", "Orbit", "iterate", "next_point", "reflection_residual", "rotation_number",
    "CausticCandidate", "FirstOrderObstruction", "MonotonicityError", "a_coeff",
    "error_functional", "error_sup_norm", "solve_first_order",
    "e11_projection", "expansion_reports", "expansion_term_E10", "expansion_term_E11",
    "numeric_eps_terms",
    "NewtonFailure", "newton_solve_caustic",
    "HypothesisViolation", "quadratic_obstruction", "rigidity_sweep", "split_constants",
    "triviality_certificate",
]
