"""Exact and floating-point checks for ergodic actions of compact quantum groups.

Submodules: :mod:`tensor` (tensor powers, product states, classical points),
:mod:`temperley_lieb`, :mod:`haar`, :mod:`cuntz`, :mod:`modular`,
:mod:`magic`, :mod:`quotient`, :mod:`acceptance` and the :mod:`cli`.
"""

from .cuntz import CuntzElement, CuntzWord, act_classical, invariance_check, quasi_free_state
from .haar import NonConvergence, haar_average_fixed_space, sampler_by_name
from .linalg import RationalMatrix
from .magic import build_magic, coaction_check, noncommutativity_witness, tensor_compose, verify_magic, word_independence_rank
from .modular import (
    EigenvalueList,
    FactorTypeLabel,
    cuntz_factor_type,
    kms_identity_check,
    modular_spectrum,
    omega_from_q,
    spectrum_growth_report,
    uhf_factor_type,
)
from .quotient import FiniteGroup, Subgroup, fixed_algebra, integration_formula_check, projection_E, subgroup_coaction
from .scalars import QQi
from .temperley_lieb import (
    jones_projection,
    markov_check,
    quantum_vs_classical_contrast,
    tl_span_dimension,
    verify_tl_relations,
)
from .tensor import (
    DensityFunctional,
    TensorOperator,
    UnitaryPoint,
    classical_point_check,
    embed_at_leg,
    matrix_unit,
    phi_Q,
    product_functional,
)

__version__ = "0.1.0"

__all__ = [
    "CuntzElement",
    "CuntzWord",
    "DensityFunctional",
    "EigenvalueList",
    "FactorTypeLabel",
    "FiniteGroup",
    "NonConvergence",
    "QQi",
    "RationalMatrix",
    "Subgroup",
    "TensorOperator",
    "UnitaryPoint",
    "act_classical",
    "build_magic",
    "classical_point_check",
    "coaction_check",
    "cuntz_factor_type",
    "embed_at_leg",
    "fixed_algebra",
    "haar_average_fixed_space",
    "integration_formula_check",
    "invariance_check",
    "jones_projection",
    "kms_identity_check",
    "markov_check",
    "matrix_unit",
    "modular_spectrum",
    "noncommutativity_witness",
    "omega_from_q",
    "phi_Q",
    "product_functional",
    "projection_E",
    "quantum_vs_classical_contrast",
    "quasi_free_state",
    "sampler_by_name",
    "spectrum_growth_report",
    "subgroup_coaction",
    "tensor_compose",
    "tl_span_dimension",
    "uhf_factor_type",
    "verify_magic",
    "verify_tl_relations",
    "word_independence_rank",
]
