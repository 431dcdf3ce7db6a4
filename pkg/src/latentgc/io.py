"""File formats: series CSV, flat ``key = value`` config files, result CSVs and the run manifest."""

from __future__ import annotations

import csv
import io
import math
import sys
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import ConfigError, GrangerError
from .harness import PROCEDURES, ExperimentConfig, ExperimentResult
from .simulation import MODEL_IDS, SimModelSpec
from .timeseries import NoiseSpec, TimeSeriesPair

CONFIG_KEYS = (
    "model", "procedure", "sample_sizes", "trials", "seed", "delay", "fwer",
    "max_lag_search", "known_lags", "burn_in",
)
SPEC_KEYS = ("a1", "a2", "b1", "b2", "c1", "c2", "sigma_x", "sigma_y", "rho", "delay", "burn_in")

PRESETS = {
    "fig3_equal": "model = b\nprocedure = normal\nsample_sizes = 100\ndelay = 0\n",
    "fig3_delayed": "model = b\nprocedure = normal\nsample_sizes = 100\ndelay = 1\n",
    "fig4": "model = b\nprocedure = proposed\nsample_sizes = 300, 1000, 3000\n",
    "fig5": "model = d\nprocedure = proposed\nsample_sizes = 100, 300, 1000\n",
    "fig6_small": "model = a, b, c, d\nprocedure = stepwise_normal, stepwise_proposed\nsample_sizes = 75\n",
    "fig6": "model = a, b, c, d\nprocedure = stepwise_normal, stepwise_proposed\nsample_sizes = 1000\n",
    "fig7": "model = c\nprocedure = stepwise_normal, stepwise_proposed\n"
            "sample_sizes = 75, 150, 300, 600, 1000\n",
}


class InputFormatError(GrangerError, ValueError):
    """A file could not be parsed."""


def format_decimal(value: float) -> str:
    """Shortest round-tripping decimal (never exponent) notation."""
    return np.format_float_positional(float(value), unique=True, trim="-")


def format_float(value: float) -> str:
    return "" if value is None or (isinstance(value, float) and math.isnan(value)) else repr(float(value))


# -- series ------------------------------------------------------------------

def write_series_csv(pair: TimeSeriesPair, out: IO[str]) -> None:
    out.write("t,x,y\n")
    for t, (x, y) in enumerate(zip(pair.x, pair.y), start=1):
        out.write(f"{t},{format_decimal(x)},{format_decimal(y)}\n")


def read_series_csv(source: IO[str], name: str = "<input>") -> TimeSeriesPair:
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise InputFormatError(f"{name}: file is empty") from None
    header = [h.strip().lstrip("﻿") for h in header]
    for required in ("x", "y"):
        if required not in header:
            raise InputFormatError(f"{name}: line 1: header lacks a '{required}' column")
    ix, iy = header.index("x"), header.index("y")
    xs, ys = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise InputFormatError(f"{name}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            x, y = float(row[ix]), float(row[iy])
        except ValueError:
            raise InputFormatError(f"{name}: line {lineno}: non-numeric value in {row!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InputFormatError(f"{name}: line {lineno}: non-finite value in {row!r}")
        xs.append(x)
        ys.append(y)
    if not xs:
        raise InputFormatError(f"{name}: no data rows")
    return TimeSeriesPair(np.array(xs), np.array(ys))


# -- flat key = value files ----------------------------------------------------

def parse_key_values(text: str, name: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{name}: line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def _int_list(value: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected a comma-separated list of integers, got {value!r}") from None


def _scalar(value: str, key: str, kind):
    try:
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {kind.__name__}") from None


def _bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(value)


def config_from_mapping(values: dict[str, str], seed: int | None = None,
                        trials: int | None = None) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`; ``seed`` and ``trials`` override file values."""
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if seed is None:
        if "seed" not in values:
            raise ConfigError("a seed is required (config 'seed' key or --seed)")
        seed = _scalar(values["seed"], "seed", int)
    models = tuple(m.strip() for m in values.get("model", "b").split(",") if m.strip())
    bad_models = [m for m in models if m not in MODEL_IDS]
    if bad_models:
        raise ConfigError(f"unknown model(s): {', '.join(bad_models)}")
    procedures = tuple(p.strip() for p in values.get("procedure", "proposed").split(",") if p.strip())
    bad = [p for p in procedures if p not in PROCEDURES]
    if bad:
        raise ConfigError(f"unknown procedure(s): {', '.join(bad)}")
    kwargs = dict(
        models=models,
        procedures=procedures,
        sample_sizes=_int_list(values.get("sample_sizes", "1000"), "sample_sizes"),
        trials=trials if trials is not None else _scalar(values.get("trials", "2000"), "trials", int),
        seed=seed,
        fwer=_scalar(values.get("fwer", "0.05"), "fwer", float),
        max_lag_search=_scalar(values.get("max_lag_search", "6"), "max_lag_search", int),
        burn_in=_scalar(values.get("burn_in", "1000"), "burn_in", int),
    )
    if values.get("delay", "") != "":
        kwargs["delay"] = _scalar(values["delay"], "delay", int)
    if "known_lags" in values:
        kwargs["known_lags"] = _scalar(values["known_lags"], "known_lags", _bool)
    return ExperimentConfig(**kwargs)


def config_to_mapping(config: ExperimentConfig) -> dict[str, str]:
    return {
        "model": ",".join(str(m) for m in config.models),
        "procedure": ",".join(config.procedures),
        "sample_sizes": ",".join(str(T) for T in config.sample_sizes),
        "trials": str(config.trials),
        "seed": str(config.seed),
        "delay": "" if config.delay is None else str(config.delay),
        "fwer": repr(config.fwer),
        "max_lag_search": str(config.max_lag_search),
        "known_lags": str(config.known_lags).lower(),
        "burn_in": str(config.burn_in),
    }


def spec_from_mapping(values: dict[str, str]) -> SimModelSpec:
    unknown = sorted(set(values) - set(SPEC_KEYS))
    if unknown:
        raise ConfigError(f"unknown spec key(s): {', '.join(unknown)}")
    missing = [k for k in ("a1", "a2", "b1", "b2", "c1", "c2", "sigma_x", "sigma_y", "rho") if k not in values]
    if missing:
        raise ConfigError(f"spec file lacks key(s): {', '.join(missing)}")
    num = {k: _scalar(values[k], k, float) for k in values if k not in ("delay", "burn_in")}
    try:
        noise = NoiseSpec(num["sigma_x"], num["sigma_y"], num["rho"],
                          _scalar(values.get("delay", "1"), "delay", int))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return SimModelSpec(num["a1"], num["a2"], num["b1"], num["b2"], num["c1"], num["c2"], noise,
                        burn_in=_scalar(values.get("burn_in", "1000"), "burn_in", int))


# -- experiment outputs --------------------------------------------------------

def write_statistics(result: ExperimentResult, out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["trial", "T", "procedure", "f_value", "model"])
    for cell in result.cells:
        for o in cell.outcomes:
            writer.writerow([o.trial, cell.T, cell.procedure, format_float(o.f_value), cell.model])


def write_rates(result: ExperimentResult, out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["T", "procedure", "rate", "stderr", "metric", "model"])
    for row in result.rate_rows():
        writer.writerow([row["T"], row["procedure"], format_float(row["rate"]),
                         format_float(row["stderr"]), row["metric"], row["model"]])


def write_key_values(values: Iterable[tuple[str, str]], out: IO[str]) -> None:
    for key, value in values:
        out.write(f"{key} = {value}\n")


def read_manifest(text: str, name: str = "<manifest>") -> dict[str, str]:
    return parse_key_values(text, name)


def manifest_config(manifest: dict[str, str]) -> dict[str, str]:
    """Extract the ``config.*`` entries of a manifest as a plain config mapping."""
    return {k[len("config."):]: v for k, v in manifest.items() if k.startswith("config.")}


def open_text(path: str, mode: str = "r") -> IO[str]:
    if path == "-":
        return io.TextIOWrapper(sys.stdin.buffer, encoding="utf-8") if "r" in mode else sys.stdout
    return open(Path(path), mode, encoding="utf-8", newline="")
