import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from latentgc.errors import AlignmentError, MulticollinearityError, SampleSizeError
from latentgc.regression import (DesignSpec, build_design, fit_least_squares, fit_model,
                                 residual_series)
from latentgc.simulation import generate, preset
from latentgc.timeseries import TimeSeriesPair


def normal_equations(X, y):
    return np.linalg.solve(X.T @ X, X.T @ y)


def test_build_design_shift():
    pair = TimeSeriesPair([1, 2, 3, 4], [0, 0, 0, 0])
    X, resp = build_design(pair, None, DesignSpec(x_lags=(1,), window_start=2))
    np.testing.assert_array_equal(resp, [2, 3, 4])
    np.testing.assert_array_equal(X, [[1], [2], [3]])


def test_build_design_too_short():
    pair = TimeSeriesPair([1, 2, 3, 4], [0, 0, 0, 0])
    with pytest.raises(SampleSizeError):
        build_design(pair, None, DesignSpec(x_lags=(5,)))


def test_build_design_against_hand_built_matrix():
    g = generate(preset("b"), 11, T=10)
    x, y = g.x, g.y
    X, resp = build_design(g, None, DesignSpec(x_lags=(1, 2), y_lags=(1, 2)))
    assert X.shape == (8, 4)
    rows = [[x[t - 1], x[t - 2], y[t - 1], y[t - 2]] for t in range(2, 10)]
    np.testing.assert_array_equal(X, rows)
    np.testing.assert_array_equal(resp, x[2:])


def test_build_design_residual_column_alignment():
    g = generate(preset("b"), 3, T=20)
    xi = residual_series(g.y, 2)
    X, _ = build_design(g, xi, DesignSpec(x_lags=(1,), xi_lag=1))
    # residuals exist from t = 3, so xi_{t-1} starts the window at t = 4
    assert X.shape == (17, 2)
    np.testing.assert_array_equal(X[:, 1], xi.values[2:19])
    with pytest.raises(AlignmentError):
        build_design(g, xi, DesignSpec(x_lags=(1,), xi_lag=1, window_start=3))
    with pytest.raises(AlignmentError):
        build_design(g, None, DesignSpec(x_lags=(1,), xi_lag=1))


def test_fit_exact_line():
    fit = fit_least_squares(np.array([[1.0], [2.0]]), np.array([2.0, 4.0]))
    assert fit.coefficients[0] == pytest.approx(2.0, abs=1e-14)
    assert fit.rss == pytest.approx(0.0, abs=1e-24)


def test_fit_identical_columns():
    X = np.column_stack([np.arange(1.0, 7.0), np.arange(1.0, 7.0)])
    with pytest.raises(MulticollinearityError) as info:
        fit_least_squares(X, np.ones(6))
    assert info.value.rcond < 1e-10


def test_fit_zero_column():
    X = np.column_stack([np.arange(1.0, 7.0), np.zeros(6)])
    with pytest.raises(MulticollinearityError):
        fit_least_squares(X, np.ones(6))


def test_fit_matches_normal_equations_fixed_instance():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((6, 2))
    y = rng.standard_normal(6)
    fit = fit_least_squares(X, y)
    np.testing.assert_allclose(fit.coefficients, normal_equations(X, y), atol=1e-8)


def test_rcond_is_scale_free():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 3))
    a = fit_least_squares(X, rng.standard_normal(50)).rcond
    b = fit_least_squares(X * [1e6, 1.0, 1e-6], rng.standard_normal(50)).rcond
    assert a == pytest.approx(b, rel=1e-6)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(4, 30), st.integers(1, 3)),
              elements=st.floats(-10, 10)),
       st.integers(0, 2**32 - 1))
def test_orthogonality_and_rss(X, seed):
    y = np.random.default_rng(seed).standard_normal(X.shape[0])
    try:
        fit = fit_least_squares(X, y)
    except (MulticollinearityError, SampleSizeError):
        return
    assert fit.rss == pytest.approx(np.sum(fit.residuals**2), rel=1e-10, abs=1e-300)
    rn = np.linalg.norm(fit.residuals)
    for j in range(X.shape[1]):
        assert abs(X[:, j] @ fit.residuals) <= 1e-8 * np.linalg.norm(X[:, j]) * max(rn, 1e-300) + 1e-12
    assert fit.n_used - fit.p >= 1


def test_nested_monotonicity(rng):
    for _ in range(1000):
        n = int(rng.integers(5, 40))
        p = int(rng.integers(1, min(4, n - 2)))
        X = rng.standard_normal((n, p + 1))
        y = rng.standard_normal(n)
        sub = fit_least_squares(X[:, :p], y)
        sup = fit_least_squares(X, y)
        assert sub.rss >= sup.rss - 1e-12 * max(sub.rss, 1.0)


def test_determinism():
    rng = np.random.default_rng(5)
    X, y = rng.standard_normal((40, 3)), rng.standard_normal(40)
    a = fit_least_squares(X, y).coefficients
    b = fit_least_squares(X.copy(), y.copy()).coefficients
    assert a.tobytes() == b.tobytes()


def test_residual_series_noise_free():
    y = 0.5 ** np.arange(30) * 3.0
    xi = residual_series(y, 1)
    assert xi.start == 2
    assert np.all(np.isnan(xi.values[:1]))
    np.testing.assert_allclose(xi.defined(), 0.0, atol=1e-12)
    assert xi.coefficients[0] == pytest.approx(0.5)


def test_residual_series_white_noise():
    T = 2000
    y = np.random.default_rng(9).standard_normal(T)
    xi = residual_series(y, 1)
    assert abs(xi.coefficients[0]) < 3 / np.sqrt(T)
    np.testing.assert_allclose(xi.defined(), y[1:] - xi.coefficients[0] * y[:-1])
    assert np.corrcoef(xi.defined(), y[1:])[0, 1] > 0.99


def test_residual_series_orthogonal_to_lags():
    g = generate(preset("b"), 2, T=500)
    xi = residual_series(g.y, 2)
    e = xi.defined()
    for lag in (1, 2):
        col = g.y[2 - lag:500 - lag]
        assert abs(col @ e) <= 1e-8 * np.linalg.norm(col) * np.linalg.norm(e)


def test_residual_series_recovers_source_coefficients():
    T = 3000
    g = generate(preset("b"), 2024, T=T)
    xi = residual_series(g.y, 2)
    Y = np.column_stack([g.y[1:T - 1], g.y[0:T - 2]])
    se = np.sqrt(np.diag(np.var(xi.defined()) * np.linalg.inv(Y.T @ Y)))
    assert abs(xi.coefficients[0] - 0.5) < 3 * se[0]
    assert abs(xi.coefficients[1] + 0.2) < 3 * se[1]


def test_residual_series_short():
    with pytest.raises(SampleSizeError):
        residual_series(np.ones(3), 2)


def test_fit_model_uses_lags():
    g = generate(preset("a"), 1, T=200)
    fit = fit_model(g, None, DesignSpec(x_lags=(1, 2)))
    assert fit.n_used == 198
    assert fit.p == 2
