"""Exact and formula-based sample complexities for simple binary
hypothesis testing, with the divergence machinery, reductions, and
constrained variants needed to cross-validate them at desk scale.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .distributions import Distribution
from .divergences import (
    ClassicDivergences,
    LambdaParam,
    PriorParams,
    binary_entropy,
    classic_divergences,
    e_gamma,
    h_lambda,
    js_alpha,
    lambda_for_prior,
    mutual_info_binary,
    tensorize_h_lambda,
)
from .errors import (
    BhtlabError,
    CapacityError,
    DistributionError,
    DomainError,
    SupportMismatchError,
)
from .formulas import (
    UNBOUNDED,
    ComplexityEstimate,
    gaussian_tv,
    general_bayes_bounds,
    n_star_bayes_estimate,
    n_star_pf_estimate,
    weak_detection_bounds,
)
from .oracle import (
    LlrAtomTable,
    TestingInstance,
    bayes_error_exact,
    build_llr_table,
    exact_capacity_n,
    mutual_info_product,
    n_star_bayes_exact,
    n_star_pf_exact,
    np_curve_point,
)

__version__ = "0.1.0"

__all__ = [
    "BhtlabError",
    "CapacityError",
    "ClassicDivergences",
    "ComplexityEstimate",
    "Distribution",
    "DistributionError",
    "DomainError",
    "KERNEL_BACKEND",
    "LambdaParam",
    "LlrAtomTable",
    "PriorParams",
    "SupportMismatchError",
    "TestingInstance",
    "UNBOUNDED",
    "bayes_error_exact",
    "binary_entropy",
    "build_llr_table",
    "classic_divergences",
    "e_gamma",
    "exact_capacity_n",
    "gaussian_tv",
    "general_bayes_bounds",
    "h_lambda",
    "js_alpha",
    "lambda_for_prior",
    "mutual_info_binary",
    "mutual_info_product",
    "n_star_bayes_estimate",
    "n_star_bayes_exact",
    "n_star_pf_estimate",
    "n_star_pf_exact",
    "np_curve_point",
    "tensorize_h_lambda",
    "weak_detection_bounds",
]
