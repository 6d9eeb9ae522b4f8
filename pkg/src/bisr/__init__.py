"""Banded inverse square-root factorizations and correlated noise for
differentially private iterative training."""

from .factorization import (
    Factorization,
    FactorizationKind,
    bisr,
    bsr,
    from_inverse_band,
    from_json,
    identity_factorization,
    to_json,
)
from .metrics import (
    ErrorReport,
    bandwidth_grid,
    expected_error,
    rmse_bandwidth_sweep,
    select_bandwidth,
)
from .noise import NoiseStream, noise_offline, noise_stream_next
from .optimizer import OptimizerConfig, band_inv_loss, optimize_band
from .privacy import PrivacyParams, calibrate_sigma, gaussian_mechanism_delta
from .sensitivity import (
    ParticipationSchema,
    brute_force_sensitivity,
    sens_gram_upper_bound,
    sens_monotone_toeplitz,
)
from .sgd import LinearRegressionTask, QuadraticBowl, SgdConfig, SgdResult, dp_sgd_run
from .toeplitz import ltt_inverse, ltt_mul, ltt_sqrt, r_sequence, r_tilde_sequence
from .workload import WorkloadParams, inv_sqrt_coeffs, sqrt_coeffs, workload_coeffs

__version__ = "0.1.0"

__all__ = [
    "Factorization",
    "FactorizationKind",
    "ErrorReport",
    "NoiseStream",
    "OptimizerConfig",
    "ParticipationSchema",
    "PrivacyParams",
    "LinearRegressionTask",
    "QuadraticBowl",
    "SgdConfig",
    "SgdResult",
    "WorkloadParams",
    "band_inv_loss",
    "bandwidth_grid",
    "bisr",
    "brute_force_sensitivity",
    "bsr",
    "calibrate_sigma",
    "dp_sgd_run",
    "expected_error",
    "from_inverse_band",
    "from_json",
    "gaussian_mechanism_delta",
    "identity_factorization",
    "inv_sqrt_coeffs",
    "ltt_inverse",
    "ltt_mul",
    "ltt_sqrt",
    "noise_offline",
    "noise_stream_next",
    "optimize_band",
    "r_sequence",
    "r_tilde_sequence",
    "rmse_bandwidth_sweep",
    "select_bandwidth",
    "sens_gram_upper_bound",
    "sens_monotone_toeplitz",
    "sqrt_coeffs",
    "to_json",
    "workload_coeffs",
]
