"""Learnable spectral filtering for 1D ill-posed inverse problems.

A diagonal spectral forward model with polynomially decaying singular values,
classical regularization filters (Tikhonov, truncated SVD, Landweber, oracle
Wiener) with oracle and discrepancy parameter rules, and a pointwise neural
spectral filter trained on (data, source) pairs that stays valid across grid
resolutions.
"""

from .core import (
    AliasingError,
    ProblemConfig,
    SpectralOperator,
    add_noise,
    analyze,
    build_operator,
    coeff_norm,
    forward,
    grid_norm,
    midpoints,
    rel_l2_error,
    sample_source,
    substream,
    synthesize,
)
from .filters import (
    FilterSpec,
    apply_filter,
    default_alpha_grid,
    discrepancy_alpha,
    discrepancy_truncation,
    filter_value,
    oracle_search,
)
from .network import (
    FeatureNormalizer,
    FilterNet,
    NetArchitecture,
    TrainConfig,
    TrainingDivergence,
    fit_to_target_filter,
    gradient_check,
    load_model,
    naive_inverse,
    psi_forward,
    reconstruct,
    save_model,
    sobolev_loss,
    train,
)
from .datasets import Dataset, load_dataset, make_dataset, save_dataset
from .experiments import (
    ExperimentReport,
    convergence_experiment,
    filter_profile,
    fit_slope,
    resolution_transfer,
    train_models,
    write_report,
)

__version__ = "0.1.0"
