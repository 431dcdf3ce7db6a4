"""Granger-causality tests for the direction y -> x.

Three measures live here:

* ``normal_gc_test``: the classical nested F-test of y-lags on top of x's
  own lags.
* ``proposed_gc_test``: the two-stage test that is robust to a delayed
  latent common input. The source AR model is fitted first; its lagged
  residual enters both nested models as an extra regressor, so the part
  of the target noise shared with the source is absorbed before the
  interaction block is tested.
* ``partial_gc_measure``: the log-ratio of conditional variances used by
  partial Granger causality, kept as a comparison measure.

Both models of every F-test are fitted on one shared window, which makes
them exactly nested and the statistic non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import FParams, f_sf
from .errors import DegenerateError
from .regression import DesignSpec, ResidualSeries, fit_model, residual_series
from .timeseries import LagConfig, TimeSeriesPair


@dataclass(frozen=True)
class CausalityTestResult:
    f_value: float
    d1: int
    d2: int
    p_value: float
    rss_null: float
    rss_alt: float
    n_used: int
    method: str = ""

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


@dataclass(frozen=True)
class PartialGcInputs:
    """Residual covariances: ``S`` (2x2) of the restricted fit, ``Sigma`` (3x3) of the full fit."""

    S: np.ndarray
    Sigma: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        Sigma = np.asarray(self.Sigma, dtype=float)
        if S.shape != (2, 2) or Sigma.shape != (3, 3):
            raise ValueError("S must be 2x2 and Sigma 3x3")
        if not (np.allclose(S, S.T) and np.allclose(Sigma, Sigma.T)):
            raise ValueError("covariance matrices must be symmetric")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "Sigma", Sigma)


EXACT_FIT_RTOL = 1e-26


def nested_f_test(pair: TimeSeriesPair, xi_hat: ResidualSeries | None,
                  null: DesignSpec, alt: DesignSpec, method: str = "") -> CausalityTestResult:
    """F-test of ``null`` against the larger ``alt`` on the window of ``alt``.

    The residual series is only used by specs that carry a residual lag.
    """
    xi_start = xi_hat.start if xi_hat is not None else 1
    start = max(null.max_lag(xi_start), alt.max_lag(xi_start)) + 1
    fit_alt = fit_model(pair, xi_hat if alt.xi_lag is not None else None, alt.with_window(start))
    fit_null = fit_model(pair, xi_hat if null.xi_lag is not None else None, null.with_window(start))
    d1 = alt.p - null.p
    d2 = fit_alt.n_used - alt.p
    response = pair.x[start - 1:]
    # an exact fit leaves only rounding noise of order eps^2 in the RSS
    if not fit_alt.rss > EXACT_FIT_RTOL * float(response @ response):
        raise DegenerateError("alternative model fits the target exactly (zero residual sum of squares)")
    # both fits share the window, so any negative gap is rounding only
    gap = max(fit_null.rss - fit_alt.rss, 0.0)
    f_value = (gap / d1) / (fit_alt.rss / d2)
    return CausalityTestResult(
        f_value=f_value, d1=d1, d2=d2, p_value=f_sf(f_value, FParams(d1, d2)),
        rss_null=fit_null.rss, rss_alt=fit_alt.rss, n_used=fit_alt.n_used, method=method,
    )


def _lags(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def normal_gc_test(pair: TimeSeriesPair, l_a: int, l_c: int) -> CausalityTestResult:
    null = DesignSpec(x_lags=_lags(l_a))
    alt = DesignSpec(x_lags=_lags(l_a), y_lags=_lags(l_c))
    return nested_f_test(pair, None, null, alt, method="normal")


def proposed_gc_test(pair: TimeSeriesPair, lags: LagConfig,
                     xi_hat: ResidualSeries | None = None) -> CausalityTestResult:
    """Test the interaction block with the lagged source residual in both models.

    ``xi_hat`` may be passed to reuse a stage-one fit; it must come from an
    AR(``lags.l_b``) fit of ``pair.y``.
    """
    if xi_hat is None:
        xi_hat = residual_series(pair.y, lags.l_b)
    null = DesignSpec(x_lags=_lags(lags.l_a), xi_lag=lags.l_eta)
    alt = DesignSpec(x_lags=_lags(lags.l_a), y_lags=_lags(lags.l_c), xi_lag=lags.l_eta)
    return nested_f_test(pair, xi_hat, null, alt, method="proposed")


def noise_corr_test(pair: TimeSeriesPair, l_a: int, l_b: int, l_eta: int,
                    include_y_lags: int | None = None,
                    xi_hat: ResidualSeries | None = None) -> CausalityTestResult:
    """Test whether the source residual at lag ``l_eta`` enters the target equation.

    With ``include_y_lags`` set, y-lags 1..l_c are present in both models.
    """
    if xi_hat is None:
        xi_hat = residual_series(pair.y, l_b)
    y_lags = _lags(include_y_lags) if include_y_lags else ()
    null = DesignSpec(x_lags=_lags(l_a), y_lags=y_lags)
    alt = DesignSpec(x_lags=_lags(l_a), y_lags=y_lags, xi_lag=l_eta)
    return nested_f_test(pair, xi_hat, null, alt, method="noise_corr")


def partial_gc_measure(inputs: PartialGcInputs) -> float:
    """Log-ratio of the target's conditional noise variance without and with the source.

    The value can be negative; it carries no significance test.
    """
    S, Sig = inputs.S, inputs.Sigma
    if not S[1, 1] > 0 or not Sig[2, 2] > 0:
        raise DegenerateError("conditioning variance must be positive")
    r1 = S[0, 0] - S[0, 1] * S[1, 0] / S[1, 1]
    r2 = Sig[0, 0] - Sig[0, 2] * Sig[2, 0] / Sig[2, 2]
    if not (r1 > 0 and r2 > 0):
        raise DegenerateError(f"conditional variances must be positive (got {r1:.3g}, {r2:.3g})")
    return math.log(r1 / r2)
