"""Granger causality robust to delayed latent common inputs."""

__version__ = "0.1.0"

from .causality import (CausalityTestResult, PartialGcInputs, noise_corr_test, normal_gc_test,
                        partial_gc_measure, proposed_gc_test)
from .distributions import FParams, chi2_cdf, f_cdf, f_quantile, f_sf
from .harness import (ExperimentConfig, ExperimentResult, run_accuracy, run_experiment,
                      run_power_curve, run_sampling_distribution)
from .regression import (DesignSpec, RegressionFit, build_design, fit_least_squares,
                         residual_series)
from .selection import BicValue, StepwiseDecision, bic, search_lag, stepwise_decide, stepwise_decide_normal
from .simulation import SimModelSpec, generate, preset
from .timeseries import LagConfig, NoiseSpec, ReparameterizedNoise, TimeSeriesPair, reparameterize

__all__ = [
    "BicValue", "CausalityTestResult", "DesignSpec", "ExperimentConfig", "ExperimentResult",
    "FParams", "LagConfig", "NoiseSpec", "PartialGcInputs", "RegressionFit", "ReparameterizedNoise",
    "SimModelSpec", "StepwiseDecision", "TimeSeriesPair", "bic", "build_design", "chi2_cdf",
    "f_cdf", "f_quantile", "f_sf", "fit_least_squares", "generate", "noise_corr_test",
    "normal_gc_test", "partial_gc_measure", "preset", "proposed_gc_test", "reparameterize",
    "residual_series", "run_accuracy", "run_experiment", "run_power_curve",
    "run_sampling_distribution", "search_lag", "stepwise_decide", "stepwise_decide_normal",
]
