"""Coherent states of polynomially deformed su(1,1) and su(2) algebras."""

from .algebra_core import (
    AlgebraSpec,
    CasimirShift,
    LowestWeightRep,
    StructurePolynomial,
    bg_algebra,
    build_lowest_weight_rep,
    casimir_value,
    difference_of_g,
    generator_matrices,
    higgs_algebra,
    quadratic_algebra,
    quadratic_eps_algebra,
    solve_g,
    su11_algebra,
    verify_closure,
)
from .coherent_states import (
    annihilation_cs,
    closed_form_bg,
    closed_form_quadratic,
    dual_cs,
    eigen_residual,
    exp_conjugate_cs,
    perelomov_cs,
    state_statistics,
)
from .conjugate_ops import canonical_conjugate_matrix, ccr_residual, conjugate_shift, lie_mapping, mapping_residual
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
