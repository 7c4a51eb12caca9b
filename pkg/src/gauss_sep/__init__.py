"""Separability of two-mode Gaussian states from their covariance matrices."""

from .criteria import (
    Verdict,
    dgcz_standard_bound,
    explicit_bound,
    optimal_squeezing,
    ppt_full,
    separability_verdict,
)
from .gaussian_state import (
    CovarianceMatrix,
    LocalSymplectic,
    SqueezeParams,
    StandardForm,
    apply_symplectic,
    is_physical,
    p_condition,
    partial_transpose,
    to_standard_form,
)

__version__ = "0.1.0"
