"""Design matrices and least-squares fits for the zero-mean AR regressions.

No intercept column is ever added. Fits use a QR factorisation of the
column-equilibrated design; the reciprocal condition number of the Gram
matrix is read off the triangular factor and drives the collinearity
check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import AlignmentError, MulticollinearityError, SampleSizeError
from .timeseries import TimeSeriesPair

RCOND_THRESHOLD = 1e-10


@dataclass(frozen=True)
class ResidualSeries:
    """Innovations of the source AR model.

    ``values`` has the full series length; entries before ``start`` (1-based)
    are NaN because they have no residual.
    """

    values: np.ndarray
    start: int
    coefficients: np.ndarray

    @property
    def l_b(self) -> int:
        return self.start - 1

    def defined(self) -> np.ndarray:
        return self.values[self.start - 1:]


@dataclass(frozen=True)
class DesignSpec:
    """Which regressors enter a model for ``x_t``.

    Columns are ordered x-lags ascending, then y-lags ascending, then the
    residual lag. ``window_start`` is the first 1-based time index used; when
    ``None`` the smallest admissible value is taken.
    """

    x_lags: tuple[int, ...] = ()
    y_lags: tuple[int, ...] = ()
    xi_lag: int | None = None
    window_start: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "x_lags", tuple(sorted(int(l) for l in self.x_lags)))
        object.__setattr__(self, "y_lags", tuple(sorted(int(l) for l in self.y_lags)))
        for lag in self.x_lags + self.y_lags + ((self.xi_lag,) if self.xi_lag is not None else ()):
            if lag < 1:
                raise ValueError(f"lags must be >= 1, got {lag}")

    @property
    def p(self) -> int:
        return len(self.x_lags) + len(self.y_lags) + (1 if self.xi_lag is not None else 0)

    def max_lag(self, xi_start: int = 1) -> int:
        """Largest look-back, counting the residual's own start offset."""
        lags = list(self.x_lags) + list(self.y_lags)
        if self.xi_lag is not None:
            lags.append(self.xi_lag + xi_start - 1)
        return max(lags, default=0)

    def with_window(self, window_start: int) -> "DesignSpec":
        return DesignSpec(self.x_lags, self.y_lags, self.xi_lag, window_start)


@dataclass(frozen=True)
class RegressionFit:
    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    n_used: int
    p: int
    rcond: float

    @property
    def dof(self) -> int:
        return self.n_used - self.p


def lag_columns(series: np.ndarray, lags, start: int) -> np.ndarray:
    """Matrix whose column j holds ``series[t - lags[j]]`` for 1-based t = start..T."""
    T = series.size
    cols = [series[start - 1 - lag:T - lag] for lag in lags]
    if not cols:
        return np.empty((T - start + 1, 0))
    return np.column_stack(cols)


def build_design(pair: TimeSeriesPair, xi_hat: ResidualSeries | None, spec: DesignSpec):
    """Return ``(design, response)`` for regressing ``x_t`` on the lags in ``spec``.

    Rows run over t = window_start..T.
    """
    if (xi_hat is None) != (spec.xi_lag is None):
        raise AlignmentError("a residual series must be given exactly when a residual lag is requested")
    T = pair.T
    xi_start = xi_hat.start if xi_hat is not None else 1
    needed = spec.max_lag(xi_start) + 1
    start = spec.window_start if spec.window_start is not None else needed
    if xi_hat is not None and xi_hat.values.size != T:
        raise AlignmentError(f"residual series has length {xi_hat.values.size}, expected {T}")
    if start < needed:
        raise AlignmentError(f"window starts at t={start} but the lags need t >= {needed}")
    if not T > start + spec.p:
        raise SampleSizeError(
            f"T={T} is too short for a window starting at t={start} with {spec.p} regressors"
        )
    blocks = [lag_columns(pair.x, spec.x_lags, start), lag_columns(pair.y, spec.y_lags, start)]
    if xi_hat is not None:
        blocks.append(lag_columns(xi_hat.values, (spec.xi_lag,), start))
    design = np.hstack(blocks)
    response = pair.x[start - 1:]
    return design, response


def fit_least_squares(design, response, rcond_threshold: float = RCOND_THRESHOLD) -> RegressionFit:
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if y.shape != (n,):
        raise ValueError(f"response has shape {y.shape}, expected ({n},)")
    if n < p + 1:
        raise SampleSizeError(f"{n} rows cannot fit {p} coefficients")
    if p == 0:
        return RegressionFit(np.empty(0), y.copy(), float(y @ y), n, 0, 1.0)

    norms = np.sqrt(np.einsum("ij,ij->j", X, X))
    if np.any(norms == 0):
        raise MulticollinearityError(0.0, "design has an all-zero column")
    Xs = X / norms
    q, r = np.linalg.qr(Xs)
    sv = np.linalg.svd(r, compute_uv=False)
    rcond = float((sv[-1] / sv[0]) ** 2)
    if not rcond >= rcond_threshold:
        raise MulticollinearityError(rcond)
    coef = solve_triangular(r, q.T @ y) / norms
    resid = y - X @ coef
    return RegressionFit(coef, resid, float(resid @ resid), n, p, rcond)


def residual_series(y, l_b: int, rcond_threshold: float = RCOND_THRESHOLD) -> ResidualSeries:
    """Fit ``y_t`` on its own lags 1..l_b and return the residual innovations."""
    y = np.asarray(getattr(y, "y", y), dtype=float)
    T = y.size
    if not T > l_b + 1:
        raise SampleSizeError(f"T={T} is too short for an AR({l_b}) source fit")
    start = l_b + 1
    X = lag_columns(y, range(1, l_b + 1), start)
    fit = fit_least_squares(X, y[start - 1:], rcond_threshold)
    values = np.full(T, np.nan)
    values[start - 1:] = fit.residuals
    values.setflags(write=False)
    return ResidualSeries(values, start, fit.coefficients)


def fit_model(pair: TimeSeriesPair, xi_hat: ResidualSeries | None, spec: DesignSpec,
              rcond_threshold: float = RCOND_THRESHOLD) -> RegressionFit:
    X, resp = build_design(pair, xi_hat, spec)
    return fit_least_squares(X, resp, rcond_threshold)
