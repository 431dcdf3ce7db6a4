"""Monte Carlo driver for sampling distributions, decision accuracy and power.

Every trial draws its series from a Philox stream keyed by ``(seed, trial)``,
so results do not depend on the order in which trials complete or on how
they are split across workers.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .causality import normal_gc_test, proposed_gc_test
from .distributions import FParams, f_cdf, f_quantile
from .errors import ConfigError, GrangerError, HarnessError
from .regression import residual_series
from .selection import (INTERACTION, NOISE_CORR, search_lag, stepwise_decide,
                        stepwise_decide_normal)
from .simulation import SimModelSpec, generate, make_rng, preset
from .timeseries import LagConfig

logger = logging.getLogger(__name__)

SAMPLING_PROCEDURES = ("normal", "proposed")
STEPWISE_PROCEDURES = ("stepwise_normal", "stepwise_proposed")
PROCEDURES = SAMPLING_PROCEDURES + STEPWISE_PROCEDURES
MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple = ("b",)
    sample_sizes: tuple[int, ...] = (1000,)
    trials: int = 2000
    procedures: tuple[str, ...] = ("proposed",)
    seed: int = 0
    known_lags: bool = True
    delay: int | None = None
    fwer: float = 0.05
    max_lag_search: int = 6
    burn_in: int = 1000

    def __post_init__(self):
        for name in ("models", "sample_sizes", "procedures"):
            value = getattr(self, name)
            if isinstance(value, (str, int, SimModelSpec)):
                value = (value,)
            object.__setattr__(self, name, tuple(value))
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        unknown = [p for p in self.procedures if p not in PROCEDURES]
        if unknown:
            raise ConfigError(f"unknown procedure(s): {', '.join(unknown)}")
        if not 0 < self.fwer < 1:
            raise ConfigError(f"fwer must lie in (0, 1), got {self.fwer}")
        if self.max_lag_search < 1:
            raise ConfigError("max_lag_search must be >= 1")
        if self.delay is not None and not 0 <= self.delay <= 6:
            raise ConfigError(f"delay must lie in 0..6, got {self.delay}")
        too_small = [T for T in self.sample_sizes if T < self.min_sample_size]
        if too_small:
            raise ConfigError(
                f"sample sizes {too_small} are below the minimum of {self.min_sample_size}"
            )

    @property
    def min_sample_size(self) -> int:
        # widest window (l_b + l_eta) plus the largest regressor count, with slack
        widest = max(2 + max(self.max_lag_search, self.delay or 1), self.max_lag_search)
        return widest + 2 + self.max_lag_search + 1 + 2

    def model_specs(self) -> list[tuple[str, SimModelSpec]]:
        out = []
        for i, m in enumerate(self.models):
            spec = m if isinstance(m, SimModelSpec) else preset(m)
            label = f"custom{i}" if isinstance(m, SimModelSpec) else str(m)
            if self.delay is not None:
                spec = spec.with_delay(self.delay)
            if spec.burn_in != self.burn_in:
                spec = replace(spec, burn_in=self.burn_in)
            out.append((label, spec))
        return out


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    f_value: float = math.nan
    d1: int = 0
    d2: int = 0
    p_value: float = math.nan
    rejected: bool = False
    interaction: bool = False
    noise_corr: bool = False
    error: str | None = None


def mc_stderr(rate: float, n: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / n) if n > 0 else math.nan


def ks_distance(statistics, d1s, d2s) -> float:
    """Kolmogorov-Smirnov distance between the statistics and their reference F laws.

    Each statistic is mapped through its own reference CDF, so trials with
    different degrees of freedom can be pooled.
    """
    u = np.sort([f_cdf(f, FParams(a, b)) for f, a, b in zip(statistics, d1s, d2s)])
    n = u.size
    if n == 0:
        return math.nan
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


@dataclass
class CellResult:
    """All trials of one (model, sample size, procedure) combination."""

    model: str
    T: int
    procedure: str
    truth_interaction: bool
    truth_noise_corr: bool
    outcomes: list[TrialOutcome]
    seconds: float = 0.0

    @property
    def ok(self) -> list[TrialOutcome]:
        return [o for o in self.outcomes if o.error is None]

    @property
    def failures(self) -> int:
        return len(self.outcomes) - len(self.ok)

    @property
    def statistics(self) -> np.ndarray:
        return np.array([o.f_value for o in self.ok])

    def _rate(self, flag) -> tuple[float, float]:
        ok = self.ok
        r = float(np.mean([flag(o) for o in ok])) if ok else math.nan
        return r, mc_stderr(r, len(ok))

    @property
    def is_stepwise(self) -> bool:
        return self.procedure in STEPWISE_PROCEDURES

    def rejection_rate(self) -> tuple[float, float]:
        return self._rate(lambda o: o.rejected)

    def interaction_rate(self) -> tuple[float, float]:
        return self._rate(lambda o: o.interaction)

    def noise_corr_rate(self) -> tuple[float, float]:
        return self._rate(lambda o: o.noise_corr)

    def accuracy(self) -> tuple[float, float]:
        return self._rate(lambda o: o.interaction == self.truth_interaction)

    def ks_distance(self) -> float:
        ok = [o for o in self.ok if o.d1 > 0 and math.isfinite(o.f_value)]
        return ks_distance([o.f_value for o in ok], [o.d1 for o in ok], [o.d2 for o in ok])

    def rate_rows(self) -> list[dict]:
        n = len(self.ok)
        rows = []

        def add(metric, rate, stderr):
            rows.append({
                "T": self.T, "procedure": self.procedure, "rate": rate,
                "stderr": stderr if n >= 2 else math.nan, "metric": metric, "model": self.model,
            })

        if self.is_stepwise:
            add("interaction_detected", *self.interaction_rate())
            add("noise_corr_detected", *self.noise_corr_rate())
            add("accuracy", *self.accuracy())
        else:
            add("rejection", *self.rejection_rate())
            add("ks_distance", self.ks_distance(), math.nan)
        add("failure", self.failures / len(self.outcomes), math.nan)
        return rows


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list[CellResult] = field(default_factory=list)

    def cell(self, T: int, procedure: str, model: str | None = None) -> CellResult:
        for c in self.cells:
            if c.T == T and c.procedure == procedure and (model is None or c.model == model):
                return c
        raise KeyError((model, T, procedure))

    def rate_rows(self) -> list[dict]:
        return [row for c in self.cells for row in c.rate_rows()]


def _known_or_searched_test(pair, spec: SimModelSpec, procedure: str, config: ExperimentConfig):
    lags = spec.true_lags()
    if procedure == "normal":
        l_c = lags.l_c
        if not config.known_lags:
            l_c = search_lag(pair, None, INTERACTION, lags.l_a, l_search_max=config.max_lag_search).lag
        return normal_gc_test(pair, lags.l_a, l_c)
    xi_hat = residual_series(pair.y, lags.l_b)
    if not config.known_lags:
        l_eta = search_lag(pair, xi_hat, NOISE_CORR, lags.l_a, l_search_max=config.max_lag_search).lag
        l_c = search_lag(pair, xi_hat, INTERACTION, lags.l_a, base_l_eta=l_eta,
                         l_search_max=config.max_lag_search).lag
        if l_eta is None or l_c is None:
            raise HarnessError("lag search found no admissible candidate")
        lags = LagConfig(lags.l_a, lags.l_b, l_c, l_eta)
    return proposed_gc_test(pair, lags, xi_hat=xi_hat)


_quantile_cache: dict[tuple[float, int, int], float] = {}


def _critical_value(level: float, d1: int, d2: int) -> float:
    key = (level, d1, d2)
    if key not in _quantile_cache:
        _quantile_cache[key] = f_quantile(level, FParams(d1, d2))
    return _quantile_cache[key]


def run_trial(spec: SimModelSpec, T: int, procedure: str, config: ExperimentConfig,
              trial: int) -> TrialOutcome:
    try:
        pair = generate(spec, make_rng(config.seed, trial), T=T)
        if procedure in SAMPLING_PROCEDURES:
            res = _known_or_searched_test(pair, spec, procedure, config)
            crit = _critical_value(1.0 - config.fwer, res.d1, res.d2)
            return TrialOutcome(trial, res.f_value, res.d1, res.d2, res.p_value,
                                rejected=res.f_value > crit)
        lags = spec.true_lags()
        if procedure == "stepwise_proposed":
            dec = stepwise_decide(pair, lags.l_a, lags.l_b, fwer=config.fwer,
                                  l_search_max=config.max_lag_search)
        else:
            dec = stepwise_decide_normal(pair, lags.l_a, alpha=config.fwer,
                                         l_search_max=config.max_lag_search)
        rec = dec.interaction_record()
        return TrialOutcome(
            trial,
            f_value=rec.f_value if rec else math.nan, d1=rec.d1 if rec else 0,
            d2=rec.d2 if rec else 0, p_value=rec.p_value if rec else math.nan,
            rejected=dec.interaction_detected, interaction=dec.interaction_detected,
            noise_corr=dec.noise_corr_detected,
        )
    except GrangerError as exc:
        return TrialOutcome(trial, error=f"{type(exc).__name__}: {exc}")


def _run_chunk(args) -> list[TrialOutcome]:
    spec, T, procedure, config, trials = args
    return [run_trial(spec, T, procedure, config, i) for i in trials]


def _run_cell(label, spec, T, procedure, config, pool, threads) -> CellResult:
    t0 = time.perf_counter()
    trials = range(config.trials)
    if pool is None:
        outcomes = _run_chunk((spec, T, procedure, config, trials))
    else:
        n = threads * 4
        chunks = [trials[i::n] for i in range(n)]
        outcomes = [o for part in pool.map(_run_chunk, [(spec, T, procedure, config, c) for c in chunks])
                    for o in part]
    outcomes.sort(key=lambda o: o.trial)
    cell = CellResult(label, T, procedure, spec.has_interaction, spec.has_noise_corr, outcomes,
                      time.perf_counter() - t0)
    if cell.failures > MAX_FAILURE_FRACTION * config.trials:
        errors = sorted({o.error for o in outcomes if o.error})
        raise HarnessError(
            f"{cell.failures}/{config.trials} trials failed for model {label}, T={T}, "
            f"{procedure}: {'; '.join(errors[:5])}"
        )
    logger.info("model %s T=%d %s: %d trials in %.1fs", label, T, procedure, config.trials, cell.seconds)
    return cell


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run every (model, sample size, procedure) cell of ``config``."""
    result = ExperimentResult(config)
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for label, spec in config.model_specs():
            for T in config.sample_sizes:
                for procedure in config.procedures:
                    result.cells.append(_run_cell(label, spec, T, procedure, config, pool, threads))
    finally:
        if pool is not None:
            pool.shutdown()
    return result


def run_sampling_distribution(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    bad = [p for p in config.procedures if p not in SAMPLING_PROCEDURES]
    if bad:
        raise ConfigError(f"sampling distributions need a single-test procedure, got {bad}")
    return run_experiment(config, threads)


def run_accuracy(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    bad = [p for p in config.procedures if p not in STEPWISE_PROCEDURES]
    if bad:
        raise ConfigError(f"accuracy needs a stepwise procedure, got {bad}")
    return run_experiment(config, threads)


def run_power_curve(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Interaction detection rate per sample size; only models with an interaction make sense."""
    specs = config.model_specs()
    if not all(spec.has_interaction for _, spec in specs):
        raise ConfigError("power curves need a model with a true interaction")
    return run_accuracy(config, threads)
