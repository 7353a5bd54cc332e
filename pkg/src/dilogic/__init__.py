"""Formula compiler and exact verification harness for direct integrals
of finite metric structures over finite probability spaces."""

from .errors import (
    BudgetError,
    ChainError,
    DilogicError,
    EvaluationError,
    InputError,
    ParseError,
    SignatureError,
    ValidationError,
)
from .formula import (
    Signature,
    canonicalize,
    free_vars,
    normalize_range,
    parse_formula,
    rewrite_inf,
    to_text,
)
from .integral import (
    FiniteProbabilitySpace,
    IntegralElement,
    MeasurableField,
    eval_on_integral,
    level_set,
    relabel_field,
    theory_distribution,
)
from .mba import (
    FiniteMeasureAlgebra,
    MbaFormula,
    SetVarIndex,
    check_monotone,
    dist_to_chain_set,
    eval_mba,
    phi_chain,
    psi_multichain,
    simple_definables,
)
from .structure import (
    FiniteMetricStructure,
    eval_formula,
    is_isomorphic,
    theory_norm,
    validate,
)
# The transform function itself stays at dilogic.transform.transform; a
# bare re-export would shadow the submodule of the same name.
from .transform import (
    TransformResult,
    corollary_equivalence_check,
    determination_check,
)
from .typei import TypeIDescription, equiv, matrix_tensor, rho, tensor

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
