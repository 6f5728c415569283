from .kernels import (GrowthReport, Kernel, MainAssumptionReport, PhiFunctional,
                      default_c, family_balls, growth_check, mainassump_check,
                      phi_equivalence, phi_of_ball)
from .maximal import (dyadic_maximal, gamma_maximal, hardy_littlewood, iterated_maximal,
                      m_s_maximal, multilinear_maximal)
from .potential import (discretization_c, discretize_bound_check, eval_I_alpha,
                        eval_potential, potential_all, potential_operator_norm)
from .stopping import (StoppingDecomposition, default_stopping_base, descendants,
                       dyadic_ball_pairs, packing_constant, packing_sum_check,
                       stopping_decomposition)

__all__ = [
    "GrowthReport", "Kernel", "MainAssumptionReport", "PhiFunctional", "StoppingDecomposition",
    "default_c", "default_stopping_base", "descendants", "discretization_c",
    "discretize_bound_check", "dyadic_ball_pairs", "dyadic_maximal", "eval_I_alpha",
    "eval_potential", "family_balls", "gamma_maximal", "growth_check", "hardy_littlewood",
    "iterated_maximal", "m_s_maximal", "mainassump_check", "multilinear_maximal",
    "packing_constant", "packing_sum_check", "phi_equivalence", "phi_of_ball",
    "potential_all", "potential_operator_norm", "stopping_decomposition",
]
