"""Multilinear potential operators, Orlicz maximal functions and weighted
Poincaré inequalities on finite spaces of homogeneous type."""

from .dyadic import DyadicTree, build_dyadic, verify_properties
from .errors import (CapacityError, CCPoincareError, DiagnosticError, DisconnectedGraphError,
                     EmptyConstraintError, InputError, ParameterError)
from .fields import (FieldFamily, cc_distance_matrix, comparability_check, euclidean_fields,
                     grushin_fields, heisenberg_fields, heisenberg_grid, product_metric)
from .grid import GridSpec
from .orlicz import (YoungFunction, bp_condition_check, generalized_holder_check,
                     orlicz_ball_norm, orlicz_maximal)
from .poincare import (TestFunctionFamily, bilinear_alternative_check, exponent_arithmetic,
                       holder_product_bound, jerison_h1_check, linear_failure_demo,
                       representation_check, verify_theorem)
from .space import Ball, BallFamily, DiscreteSpace
from .weights import (WeightSystem, a_pq_constant, check_orlicz_condition,
                      check_power_condition, fracmax_weight_bound_check)

__version__ = "0.1.0"

__all__ = [
    "Ball", "BallFamily", "CCPoincareError", "CapacityError", "DiagnosticError",
    "DiscreteSpace", "DisconnectedGraphError", "DyadicTree", "EmptyConstraintError",
    "FieldFamily", "GridSpec", "InputError", "ParameterError", "TestFunctionFamily",
    "WeightSystem", "YoungFunction", "a_pq_constant", "bilinear_alternative_check",
    "bp_condition_check", "build_dyadic", "cc_distance_matrix", "check_orlicz_condition",
    "check_power_condition", "comparability_check", "euclidean_fields", "exponent_arithmetic",
    "fracmax_weight_bound_check", "generalized_holder_check", "grushin_fields",
    "heisenberg_fields", "heisenberg_grid", "holder_product_bound", "jerison_h1_check",
    "linear_failure_demo", "orlicz_ball_norm", "orlicz_maximal", "product_metric",
    "representation_check", "verify_properties", "verify_theorem",
]
