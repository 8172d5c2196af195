"""Spectral-bias toolkit for kernel ridge regression.

The package measures which features a rotation-invariant kernel learns
from limited data: exact sphere spectra via one-dimensional quadrature,
empirical and cross-distribution learnabilities from fitted predictors,
eigenvalue-based upper bounds with matched sample-complexity lower
bounds, density-ratio diagnostics for covariate shift, and closed-form
worked examples (low-dimensional manifold targets, parity on the
hypercube, a copying head on one-hot sequences).
"""

__version__ = "0.1.0"

from .config import (
    EXPERIMENT_KINDS,
    ConfigError,
    ExperimentConfig,
    default_config,
    default_p_grid,
    load_config,
    validate_config,
    validate_config_dict,
)
from .covariate import (
    DensityRatioReport,
    DiscreteInstance,
    RatioEstimate,
    SupportViolationError,
    discrete_mse,
    importance_ratios,
    mse_sandwich,
    q_side_mse,
    random_discrete_instance,
)
from .data import (
    DATA_DIR_ENV,
    DataFormatError,
    DataUnavailableError,
    PCABasis,
    PCAReducer,
    SampleSet,
    SphereProjector,
    cube_to_sphere,
    load_cifar10,
    load_idx,
    load_sample_set,
    pca_reduce,
    project_sphere,
    real_data_pipeline,
    resolve_data_dir,
    save_sample_set,
    sequence_view,
    synth_hypercube_correlated,
    synth_manifold,
    synth_onehot_sequences,
    whiten,
)
from .experiments import InvariantViolationError, RunResult, run_experiment
from .kernels import (
    KERNEL_FAMILIES,
    KernelSpec,
    cross_gram,
    diagonal_values,
    eval_kernel,
    gram_matrix,
    trace_estimate,
)
from .learnability import (
    CrossLearnability,
    LearnabilityReport,
    UndefinedOverlapError,
    bound_margin,
    cross_dataset_learnability,
    cross_learnability_bound,
    cross_learnability_from_samples,
    ek_learnability,
    ek_sample_complexity,
    learnability,
    linear_learnability_bound,
    sample_complexity_lower,
)
from .regression import (
    FittedPredictor,
    KernelRidgeRegressor,
    fit,
    predict,
    train_residual,
)
from .spectrum import (
    HarmonicFeature,
    SpectralLine,
    degeneracy,
    funk_hecke_eigenvalue,
    gegenbauer,
    harmonic_eval,
    random_harmonic,
    sample_uniform_sphere,
    spectrum_table,
    unit_sphere_trace,
)
from .vignettes import (
    CopyingHeadBound,
    CopyingHeadSpec,
    ParityComplexity,
    copying_head_bound,
    copying_head_feature,
    copying_head_feature_norm,
    copying_head_feature_norm_sup,
    copying_head_overlap_terms,
    copying_head_target_norm,
    copying_head_z_report,
    irrep_eigenvalue_bound,
    manifold_vignette,
    manifold_vignette_mc,
    parity_normalization,
    parity_normalization_mc,
    parity_sample_complexity,
)

__all__ = [
    "__version__",
    # configuration
    "EXPERIMENT_KINDS",
    "ConfigError",
    "ExperimentConfig",
    "default_config",
    "default_p_grid",
    "load_config",
    "validate_config",
    "validate_config_dict",
    # kernels
    "KERNEL_FAMILIES",
    "KernelSpec",
    "eval_kernel",
    "gram_matrix",
    "cross_gram",
    "diagonal_values",
    "trace_estimate",
    # regression
    "FittedPredictor",
    "KernelRidgeRegressor",
    "fit",
    "predict",
    "train_residual",
    # sphere spectra and harmonic features
    "SpectralLine",
    "HarmonicFeature",
    "degeneracy",
    "funk_hecke_eigenvalue",
    "gegenbauer",
    "harmonic_eval",
    "random_harmonic",
    "sample_uniform_sphere",
    "spectrum_table",
    "unit_sphere_trace",
    # learnability and bounds
    "CrossLearnability",
    "LearnabilityReport",
    "UndefinedOverlapError",
    "bound_margin",
    "cross_dataset_learnability",
    "cross_learnability_bound",
    "cross_learnability_from_samples",
    "ek_learnability",
    "ek_sample_complexity",
    "learnability",
    "linear_learnability_bound",
    "sample_complexity_lower",
    # covariate-shift diagnostics
    "DensityRatioReport",
    "DiscreteInstance",
    "RatioEstimate",
    "SupportViolationError",
    "discrete_mse",
    "importance_ratios",
    "mse_sandwich",
    "q_side_mse",
    "random_discrete_instance",
    # datasets
    "DATA_DIR_ENV",
    "DataFormatError",
    "DataUnavailableError",
    "PCABasis",
    "PCAReducer",
    "SampleSet",
    "SphereProjector",
    "cube_to_sphere",
    "load_cifar10",
    "load_idx",
    "load_sample_set",
    "pca_reduce",
    "project_sphere",
    "real_data_pipeline",
    "resolve_data_dir",
    "save_sample_set",
    "sequence_view",
    "synth_hypercube_correlated",
    "synth_manifold",
    "synth_onehot_sequences",
    "whiten",
    # worked examples
    "CopyingHeadBound",
    "CopyingHeadSpec",
    "ParityComplexity",
    "copying_head_bound",
    "copying_head_feature",
    "copying_head_feature_norm",
    "copying_head_feature_norm_sup",
    "copying_head_overlap_terms",
    "copying_head_target_norm",
    "copying_head_z_report",
    "irrep_eigenvalue_bound",
    "manifold_vignette",
    "manifold_vignette_mc",
    "parity_normalization",
    "parity_normalization_mc",
    "parity_sample_complexity",
    # experiment runner
    "InvariantViolationError",
    "RunResult",
    "run_experiment",
]
