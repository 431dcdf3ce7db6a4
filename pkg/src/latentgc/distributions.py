"""Central F and chi-square distribution functions.

CDFs are evaluated through the regularized incomplete beta and gamma
functions (modified Lentz continued fractions plus a power series for the
gamma case). Upper tails are computed directly rather than as ``1 - cdf``
so that small p-values keep their relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


@dataclass(frozen=True)
class FParams:
    d1: int
    d2: int

    def __post_init__(self):
        if not (self.d1 >= 1 and self.d2 >= 1):
            raise DomainError(f"F degrees of freedom must be >= 1, got ({self.d1}, {self.d2})")


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _beta_front(a: float, b: float, x: float) -> float:
    return math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )


def betainc_pair(a: float, b: float, x: float) -> tuple[float, float]:
    """Return ``(I_x(a, b), 1 - I_x(a, b))``.

    The continued fraction is evaluated on whichever side converges; the
    tail it yields is the small one there, so the complement by subtraction
    loses nothing.
    """
    if x <= 0.0:
        return 0.0, 1.0
    if x >= 1.0:
        return 1.0, 0.0
    front = _beta_front(a, b, x)
    if x < (a + 1.0) / (a + b + 2.0):
        lower = front * _betacf(a, b, x) / a
        return lower, 1.0 - lower
    upper = front * _betacf(b, a, 1.0 - x) / b
    return 1.0 - upper, upper


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``."""
    return betainc_pair(a, b, x)[0]


def _gamma_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_cf(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def gammainc_pair(a: float, x: float) -> tuple[float, float]:
    """Return ``(P(a, x), Q(a, x))``, the regularized lower and upper incomplete gamma."""
    if x <= 0.0:
        return 0.0, 1.0
    if x < a + 1.0:
        p = _gamma_series(a, x)
        return p, 1.0 - p
    q = _gamma_cf(a, x)
    return 1.0 - q, q


def _check_nonneg(x: float) -> float:
    x = float(x)
    if math.isnan(x) or x < 0:
        raise DomainError(f"argument must be non-negative, got {x!r}")
    return x


def _f_tails(x: float, d1: int, d2: int) -> tuple[float, float]:
    if math.isinf(x):
        return 1.0, 0.0
    z = d1 * x / (d1 * x + d2)
    return betainc_pair(d1 / 2.0, d2 / 2.0, z)


def f_cdf(x: float, params: FParams) -> float:
    x = _check_nonneg(x)
    return _f_tails(x, params.d1, params.d2)[0]


def f_sf(x: float, params: FParams) -> float:
    """Upper tail ``P(F > x)``; this is the p-value of an observed statistic."""
    x = _check_nonneg(x)
    return _f_tails(x, params.d1, params.d2)[1]


def f_pdf(x: float, params: FParams) -> float:
    x = _check_nonneg(x)
    d1, d2 = params.d1, params.d2
    if x == 0.0:
        return {1: math.inf, 2: 1.0}.get(d1, 0.0)
    log_pdf = (
        0.5 * d1 * math.log(d1) + 0.5 * d2 * math.log(d2) + (0.5 * d1 - 1) * math.log(x)
        - 0.5 * (d1 + d2) * math.log(d1 * x + d2)
        - (math.lgamma(0.5 * d1) + math.lgamma(0.5 * d2) - math.lgamma(0.5 * (d1 + d2)))
    )
    return math.exp(log_pdf)


def f_quantile(p: float, params: FParams) -> float:
    """Inverse of :func:`f_cdf` by bracketed root finding."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    hi = 1.0
    while f_cdf(hi, params) < p:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("could not bracket the F quantile")
    lo = 0.0 if hi == 1.0 else hi / 2.0
    return brentq(lambda q: f_cdf(q, params) - p, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)


def chi2_cdf(x: float, k: int) -> float:
    x = _check_nonneg(x)
    if k < 1:
        raise DomainError(f"chi-square degrees of freedom must be >= 1, got {k}")
    if math.isinf(x):
        return 1.0
    return gammainc_pair(k / 2.0, x / 2.0)[0]


def chi2_sf(x: float, k: int) -> float:
    x = _check_nonneg(x)
    if k < 1:
        raise DomainError(f"chi-square degrees of freedom must be >= 1, got {k}")
    if math.isinf(x):
        return 0.0
    return gammainc_pair(k / 2.0, x / 2.0)[1]


def chi2_pdf(x: float, k: int) -> float:
    x = _check_nonneg(x)
    if x == 0.0:
        return {1: math.inf, 2: 0.5}.get(k, 0.0)
    h = k / 2.0
    return math.exp((h - 1) * math.log(x) - x / 2.0 - h * math.log(2.0) - math.lgamma(h))
