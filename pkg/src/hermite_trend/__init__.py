"""Simulation and nonparametric trend estimation for Hermite-driven SDEs.

The package covers the full pipeline: exact fractional Gaussian noise and
Hermite-process path generation, a bank of higher-order polynomial kernels
with exact moment arithmetic, small-noise SDE simulation with pathwise error
bounds, kernel-type trend estimators with their bandwidth rules, and a
deterministic Monte Carlo harness (consistency / rate / CLT experiments)
behind the ``hermite-trend`` command line tool.
"""

from .estimators import (
    EstimateSeries,
    EstimatorConfig,
    alternate_estimate,
    bandwidth_alt,
    bandwidth_main,
    bias_center_term,
    default_division_floor,
    estimate_series,
    indicator_path,
    kernel_estimate_product,
    kernel_estimate_theta,
)
from .experiments import (
    CltReport,
    ConditionViolated,
    ConsistencyReport,
    ExperimentConfig,
    ExperimentResult,
    FitDegenerate,
    RateFit,
    load_experiment_config,
    parse_experiment_config,
    run_clt,
    run_consistency,
    run_experiment,
    run_rate,
    theoretical_rate_alt,
    theoretical_rate_main,
    write_report,
)
from .gaussian import (
    EmbeddingFailure,
    FgnSpec,
    GaussianPath,
    fgn_autocovariance,
    sample_fbm,
    sample_fgn,
)
from .hermite import (
    HermitePath,
    HermiteSpec,
    covariance_oracle,
    discrete_normalizer,
    h_zero,
    hermite_polynomial,
    max_moment_scaling_check,
    sample_hermite,
    scaling_constant,
)
from .kernels import (
    MAX_KERNEL_ORDER,
    Kernel,
    asymptotic_variance,
    box_kernel,
    kernel_autocorrelation,
    kernel_moment,
    rescale_kernel,
    vanishing_moment_kernel,
    wiener_integrability_check,
)
from .rng import derive_seed, philox_generator
from .sde import (
    BoundViolation,
    GronwallReport,
    MeanSquareReport,
    PathConfig,
    SdePath,
    gronwall_check,
    mean_square_bound_check,
    simulate_path,
    simulate_sde,
    solve_ode,
)
from .trends import (
    DerivativeUnavailable,
    TrendFunction,
    constant_trend,
    parse_trend,
    polynomial_trend,
    sinusoid_trend,
    weierstrass_trend,
)

__version__ = "0.1.0"
