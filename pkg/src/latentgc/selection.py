"""BIC lag selection and the stepwise interaction / noise-correlation procedure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .causality import CausalityTestResult, noise_corr_test, normal_gc_test, proposed_gc_test
from .errors import DegenerateError, MulticollinearityError
from .regression import DesignSpec, RegressionFit, ResidualSeries, fit_model, residual_series
from .timeseries import LagConfig, TimeSeriesPair

INTERACTION = "interaction"
NOISE_CORR = "noise_corr"
TERMS = (INTERACTION, NOISE_CORR)


@dataclass(frozen=True)
class BicValue:
    bic: float
    lag: int
    p: int
    n_used: int


@dataclass(frozen=True)
class LagSearchResult:
    """Outcome of a BIC search; ``lag`` is None when no candidate could be fitted."""

    term: str
    lag: int | None
    best: BicValue | None
    candidates: tuple[tuple[int, BicValue], ...]
    collinear: bool


@dataclass(frozen=True)
class TrailRecord:
    term: str
    lag: int
    p_value: float
    threshold: float
    adopted: bool
    f_value: float
    d1: int
    d2: int
    stage: int


@dataclass
class StepwiseDecision:
    interaction_detected: bool = False
    noise_corr_detected: bool = False
    selected_l_c: int | None = None
    selected_l_eta: int | None = None
    p_value_trail: list[TrailRecord] = field(default_factory=list)
    aborted_for_collinearity: bool = False
    searches: list[LagSearchResult] = field(default_factory=list)

    def interaction_record(self) -> TrailRecord | None:
        """Last interaction test performed, if any."""
        for rec in reversed(self.p_value_trail):
            if rec.term == INTERACTION:
                return rec
        return None


def bic(fit: RegressionFit, l: int) -> BicValue:
    """BIC of a Gaussian fit with the dispersion estimated as ``rss / n_used``.

    ``l`` is the largest look-back of the model, so ``n_used == T - l``.
    """
    n = fit.n_used
    if not fit.rss > 0:
        raise DegenerateError("zero residual sum of squares: BIC is undefined")
    value = n * math.log(fit.rss / n) + fit.p * math.log(n)
    return BicValue(bic=value, lag=l, p=fit.p, n_used=n)


def _lags(n: int | None) -> tuple[int, ...]:
    return tuple(range(1, n + 1)) if n else ()


def search_lag(pair: TimeSeriesPair, xi_hat: ResidualSeries, term: str, l_a: int,
               base_l_c: int | None = None, base_l_eta: int | None = None,
               l_search_max: int = 6) -> LagSearchResult:
    """Pick the lag of ``term`` that minimises BIC.

    For the interaction term the candidates are y-lag blocks 1..l_c; for the
    noise-correlation term a single residual column at lag l_eta. The other
    term can be held fixed in the base model through ``base_l_c`` or
    ``base_l_eta``. Each candidate is fitted on its own window. The search
    stops at the first collinear candidate and keeps the best lag so far.
    """
    if term not in TERMS:
        raise ValueError(f"unknown term {term!r}")
    if l_search_max < 1:
        raise ValueError("l_search_max must be >= 1")
    candidates = []
    collinear = False
    for lag in range(1, l_search_max + 1):
        if term == INTERACTION:
            spec = DesignSpec(x_lags=_lags(l_a), y_lags=_lags(lag), xi_lag=base_l_eta)
        else:
            spec = DesignSpec(x_lags=_lags(l_a), y_lags=_lags(base_l_c), xi_lag=lag)
        uses_xi = spec.xi_lag is not None
        try:
            fit = fit_model(pair, xi_hat if uses_xi else None, spec)
        except MulticollinearityError:
            collinear = True
            break
        l_max = spec.max_lag(xi_hat.start if uses_xi else 1)
        candidates.append((lag, bic(fit, l_max)))
    if not candidates:
        return LagSearchResult(term, None, None, (), collinear)
    # strict < keeps the smaller lag on exact ties
    best_lag, best = candidates[0]
    for lag, value in candidates[1:]:
        if value.bic < best.bic:
            best_lag, best = lag, value
    return LagSearchResult(term, best_lag, best, tuple(candidates), collinear)


def _record(result: CausalityTestResult, term: str, lag: int, threshold: float,
            stage: int) -> TrailRecord:
    return TrailRecord(
        term=term, lag=lag, p_value=result.p_value, threshold=threshold,
        adopted=result.p_value < threshold, f_value=result.f_value,
        d1=result.d1, d2=result.d2, stage=stage,
    )


def stepwise_decide(pair: TimeSeriesPair, l_a: int, l_b: int, fwer: float = 0.05,
                    l_search_max: int = 6) -> StepwiseDecision:
    """Stepwise multiple test for interaction and noise correlation.

    Both terms are BIC-searched and tested against the x-lags-only model.
    The one with the smaller p-value is adopted if it clears ``fwer / 2``;
    then the other term is searched and tested again, at ``fwer / 2``,
    with the adopted term in the base model. Equal p-values favour the
    noise-correlation term.
    """
    threshold = fwer / 2.0
    decision = StepwiseDecision()
    xi_hat = residual_series(pair.y, l_b)

    first: dict[str, TrailRecord] = {}
    for term in (NOISE_CORR, INTERACTION):
        search = search_lag(pair, xi_hat, term, l_a, l_search_max=l_search_max)
        decision.searches.append(search)
        decision.aborted_for_collinearity |= search.collinear
        if search.lag is None:
            continue
        try:
            if term == NOISE_CORR:
                res = noise_corr_test(pair, l_a, l_b, search.lag, xi_hat=xi_hat)
            else:
                res = normal_gc_test(pair, l_a, search.lag)
        except MulticollinearityError:
            decision.aborted_for_collinearity = True
            continue
        first[term] = _record(res, term, search.lag, threshold, stage=1)

    if not first:
        return decision
    # NOISE_CORR was inserted first, so min() keeps it on ties
    lead = min(first.values(), key=lambda r: r.p_value)
    # only the smaller p-value can be adopted in the first stage
    for term, rec in first.items():
        if rec is not lead and rec.adopted:
            rec = replace(rec, adopted=False)
        decision.p_value_trail.append(rec)
    if not lead.adopted:
        return decision

    if lead.term == NOISE_CORR:
        decision.noise_corr_detected = True
        decision.selected_l_eta = lead.lag
        search = search_lag(pair, xi_hat, INTERACTION, l_a, base_l_eta=lead.lag,
                            l_search_max=l_search_max)
    else:
        decision.interaction_detected = True
        decision.selected_l_c = lead.lag
        search = search_lag(pair, xi_hat, NOISE_CORR, l_a, base_l_c=lead.lag,
                            l_search_max=l_search_max)
    decision.searches.append(search)
    decision.aborted_for_collinearity |= search.collinear
    if search.lag is None:
        return decision

    try:
        if lead.term == NOISE_CORR:
            res = proposed_gc_test(pair, LagConfig(l_a, l_b, search.lag, lead.lag), xi_hat=xi_hat)
            rec = _record(res, INTERACTION, search.lag, threshold, stage=2)
        else:
            res = noise_corr_test(pair, l_a, l_b, search.lag, include_y_lags=lead.lag, xi_hat=xi_hat)
            rec = _record(res, NOISE_CORR, search.lag, threshold, stage=2)
    except MulticollinearityError:
        decision.aborted_for_collinearity = True
        return decision
    decision.p_value_trail.append(rec)
    if rec.adopted:
        if rec.term == INTERACTION:
            decision.interaction_detected = True
            decision.selected_l_c = rec.lag
        else:
            decision.noise_corr_detected = True
            decision.selected_l_eta = rec.lag
    return decision


def stepwise_decide_normal(pair: TimeSeriesPair, l_a: int, alpha: float = 0.05,
                           l_search_max: int = 6) -> StepwiseDecision:
    """BIC-select the y-lag block and run a single classical Granger test at ``alpha``."""
    decision = StepwiseDecision()
    search = search_lag(pair, None, INTERACTION, l_a, l_search_max=l_search_max)
    decision.searches.append(search)
    decision.aborted_for_collinearity = search.collinear
    if search.lag is None:
        return decision
    try:
        res = normal_gc_test(pair, l_a, search.lag)
    except MulticollinearityError:
        decision.aborted_for_collinearity = True
        return decision
    rec = _record(res, INTERACTION, search.lag, alpha, stage=1)
    decision.p_value_trail.append(rec)
    decision.interaction_detected = rec.adopted
    decision.selected_l_c = rec.lag if rec.adopted else None
    return decision
