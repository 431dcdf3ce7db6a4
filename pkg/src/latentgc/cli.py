"""Command-line front end.

Exit codes: 0 success, 2 usage or config error, 3 data or numerical error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .causality import CausalityTestResult, normal_gc_test, proposed_gc_test
from .errors import (ConfigError, DataError, GrangerError, HarnessError, NumericalError,
                     StationarityError)
from .harness import run_experiment
from .io import (PRESETS, InputFormatError, config_from_mapping, config_to_mapping,
                 manifest_config, open_text, parse_key_values, read_manifest, read_series_csv,
                 spec_from_mapping, write_key_values, write_rates, write_series_csv,
                 write_statistics)
from .selection import StepwiseDecision, stepwise_decide, stepwise_decide_normal
from .simulation import MODEL_IDS, generate, preset
from .timeseries import LagConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3

log = logging.getLogger("latentgc")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latentgc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a series pair and write it as CSV")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", choices=MODEL_IDS)
    src.add_argument("--spec-file", help="key = value file with a1..c2, sigma_x, sigma_y, rho, delay")
    sim.add_argument("--T", type=int, required=True, dest="T")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--delay", type=int, help="override the noise-correlation delay")
    sim.add_argument("--burn-in", type=int)
    sim.add_argument("--out", default="-", help="output CSV (default: stdout)")

    test = sub.add_parser("test", help="test y -> x causality on a CSV file")
    test.add_argument("input", help="CSV with columns x, y (t optional); '-' for stdin")
    test.add_argument("--method", choices=("normal", "proposed"), default="proposed")
    test.add_argument("--la", type=int, required=True)
    test.add_argument("--lb", type=int)
    test.add_argument("--lc", type=int)
    test.add_argument("--leta", type=int)
    test.add_argument("--search", action="store_true", help="BIC lag search with the stepwise procedure")
    test.add_argument("--fwer", type=float, default=0.05)
    test.add_argument("--max-lag-search", type=int, default=6)
    test.add_argument("--center", action="store_true", help="subtract each series' sample mean")
    test.add_argument("--out", help="machine-readable result CSV")

    exp = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    cfg = exp.add_mutually_exclusive_group(required=True)
    cfg.add_argument("config", nargs="?", help="key = value config file")
    cfg.add_argument("--preset", choices=sorted(PRESETS))
    cfg.add_argument("--manifest", help="re-run the experiment recorded in a manifest")
    exp.add_argument("--out-dir", required=True)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--trials", type=int, help="override the trial count")
    exp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    return parser


def cmd_simulate(args) -> int:
    if args.spec_file:
        spec = spec_from_mapping(parse_key_values(Path(args.spec_file).read_text(), args.spec_file))
    else:
        spec = preset(args.model)
    if args.delay is not None:
        spec = spec.with_delay(args.delay)
    if args.burn_in is not None:
        from dataclasses import replace
        spec = replace(spec, burn_in=args.burn_in)
    if args.T < 1:
        raise ConfigError("--T must be positive")
    try:
        pair = generate(spec, args.seed, T=args.T)
    except StationarityError as exc:
        raise ConfigError(str(exc)) from None
    out = open_text(args.out, "w")
    try:
        write_series_csv(pair, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _result_rows(result: CausalityTestResult, alpha: float) -> list[tuple[str, str]]:
    return [
        ("method", result.method), ("f_value", repr(result.f_value)), ("d1", str(result.d1)),
        ("d2", str(result.d2)), ("p_value", repr(result.p_value)), ("alpha", repr(alpha)),
        ("rejected", str(result.rejects(alpha)).lower()), ("rss_null", repr(result.rss_null)),
        ("rss_alt", repr(result.rss_alt)), ("n_used", str(result.n_used)),
    ]


def _decision_rows(dec: StepwiseDecision, method: str) -> list[tuple[str, str]]:
    opt = lambda v: "" if v is None else str(v)
    rows = [
        ("method", method),
        ("interaction_detected", str(dec.interaction_detected).lower()),
        ("noise_corr_detected", str(dec.noise_corr_detected).lower()),
        ("selected_l_c", opt(dec.selected_l_c)), ("selected_l_eta", opt(dec.selected_l_eta)),
        ("aborted_for_collinearity", str(dec.aborted_for_collinearity).lower()),
    ]
    for i, rec in enumerate(dec.p_value_trail, start=1):
        for name in ("term", "lag", "f_value", "d1", "d2", "p_value", "threshold", "adopted", "stage"):
            value = getattr(rec, name)
            text = str(value).lower() if isinstance(value, bool) else (
                repr(value) if isinstance(value, float) else str(value))
            rows.append((f"trail.{i}.{name}", text))
    return rows


def _report(rows: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def cmd_test(args) -> int:
    with open_text(args.input) as fh:
        pair = read_series_csv(fh, args.input)
    if args.center:
        pair = pair.centered()
    if args.search:
        if args.method == "proposed":
            if args.lb is None:
                raise ConfigError("--method proposed --search needs --lb")
            dec = stepwise_decide(pair, args.la, args.lb, fwer=args.fwer,
                                  l_search_max=args.max_lag_search)
        else:
            dec = stepwise_decide_normal(pair, args.la, alpha=args.fwer,
                                         l_search_max=args.max_lag_search)
        rows = _decision_rows(dec, f"stepwise_{args.method}")
    else:
        if args.lc is None:
            raise ConfigError("--lc is required unless --search is given")
        if args.method == "proposed":
            if args.lb is None or args.leta is None:
                raise ConfigError("--method proposed needs --lb and --leta (or --search)")
            try:
                lags = LagConfig(args.la, args.lb, args.lc, args.leta)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            res = proposed_gc_test(pair, lags)
        else:
            res = normal_gc_test(pair, args.la, args.lc)
        rows = _result_rows(res, args.fwer)
    print(_report(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("key,value\n")
            for k, v in rows:
                fh.write(f"{k},{v}\n")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.manifest:
        values = manifest_config(read_manifest(Path(args.manifest).read_text(), args.manifest))
    elif args.preset:
        values = parse_key_values(PRESETS[args.preset], args.preset)
    else:
        values = parse_key_values(Path(args.config).read_text(), args.config)
    config = config_from_mapping(values, seed=args.seed, trials=args.trials)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    result = run_experiment(config, threads=max(1, args.threads))
    paths = {name: out_dir / name for name in ("statistics.csv", "rates.csv", "manifest")}
    with open(paths["statistics.csv"], "w", encoding="utf-8", newline="") as fh:
        write_statistics(result, fh)
    with open(paths["rates.csv"], "w", encoding="utf-8", newline="") as fh:
        write_rates(result, fh)
    entries = [("command", "experiment"), ("version", __version__), ("seed", str(config.seed))]
    entries += [(f"config.{k}", v) for k, v in config_to_mapping(config).items()]
    entries += [
        ("started", started),
        ("finished", datetime.now(timezone.utc).isoformat(timespec="seconds")),
        ("output.statistics", str(paths["statistics.csv"])),
        ("output.rates", str(paths["rates.csv"])),
        ("output.manifest", str(paths["manifest"])),
    ]
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        write_key_values(entries, fh)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "test": cmd_test, "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InputFormatError) as exc:
        print(f"latentgc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, NumericalError, HarnessError) as exc:
        print(f"latentgc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"latentgc: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrangerError as exc:
        print(f"latentgc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
