"""Batch driver: sweeps, figure presets, validation runs, CSV emission.

Outputs are a CSV of ResultRecord rows plus a JSON sidecar with the full
parameter set, seed, and RNG provenance; plotting happens elsewhere.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import analytic, montecarlo
from .params import (
    EstimateWithCI,
    ParameterError,
    SystemParams,
    build_params,
    n_best,
    n_nearest,
)
from .specfun import QuadratureError
from .validation import calibrate_reading, validate_run

METHODS = ("analytic_closed", "analytic_numeric", "monte_carlo")
AXES = ("tx_power", "num_antennas", "lambda", "assoc_n")
METRICS = ("capacity_bps_hz", "outage")
INFINITE_MC_RANK = 64  # stands in for the many-RRH limit in simulation


def _round9(x: float | None) -> float | None:
    """Round to the CSV's 9 significant digits so round-trips are exact."""
    if x is None:
        return None
    return float(f"{x:.9g}")


@dataclass(frozen=True)
class SweepSpec:
    """One batch run: evaluate each method at each sweep point."""

    axis: str
    values: tuple
    fixed: SystemParams
    methods: tuple
    strategies: tuple  # association sizes as strings, e.g. ("1", "2", "inf")
    family: str = "n_nearest"  # simulated family for finite sizes
    metric: str = "capacity_bps_hz"
    threshold: float | None = None
    fading_mode: str = "exact"
    trials: int = 100_000
    seed: int = 1
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ParameterError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ParameterError("values must be a non-empty increasing list")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ParameterError("values must be strictly increasing")
        if not self.methods:
            raise ParameterError("methods must be non-empty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ParameterError(f"unknown methods {bad}; choose from {METHODS}")
        if not self.strategies:
            raise ParameterError("strategies must be non-empty")
        for s in self.strategies:
            if s != "inf" and not (s.isdigit() and int(s) >= 1):
                raise ParameterError(f"strategy {s!r} must be a positive integer or 'inf'")
        if self.family not in ("n_nearest", "n_best"):
            raise ParameterError(f"family must be n_nearest or n_best, got {self.family!r}")
        if self.metric not in METRICS:
            raise ParameterError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.metric == "outage" and self.threshold is None:
            raise ParameterError("outage sweeps need a threshold")
        if self.metric == "outage" and "analytic_numeric" in self.methods:
            big = [s for s in self.strategies if s not in ("1", "2") and s != "inf"]
            if big:
                raise ParameterError(
                    f"no analytic_numeric outage form for sizes {big}; use monte_carlo"
                )
        if self.trials < 1000:
            raise ParameterError("trials must be at least 1000")


RECORD_FIELDS = (
    "lam",
    "num_antennas",
    "path_loss_exp",
    "tx_power_w",
    "noise_psd_w_hz",
    "bandwidth_hz",
    "disc_radius_m",
    "method",
    "strategy",
    "metric",
    "value",
    "std_error",
    "err_estimate",
    "runtime_ms",
    "seed",
)


@dataclass(frozen=True)
class ResultRecord:
    """One CSV row: flattened inputs plus one measured value."""

    lam: float
    num_antennas: int
    path_loss_exp: float
    tx_power_w: float
    noise_psd_w_hz: float
    bandwidth_hz: float
    disc_radius_m: float
    method: str
    strategy: str
    metric: str
    value: float
    std_error: float | None  # blank for analytic methods
    err_estimate: float | None  # blank for Monte Carlo
    runtime_ms: float
    seed: int

    def to_row(self) -> list[str]:
        row = []
        for name in RECORD_FIELDS:
            v = getattr(self, name)
            if v is None:
                row.append("")
            elif isinstance(v, float):
                row.append(f"{v:.9g}")
            else:
                row.append(str(v))
        return row

    @classmethod
    def from_row(cls, row: dict) -> "ResultRecord":
        def opt_float(s):
            return None if s == "" else float(s)

        return cls(
            lam=float(row["lam"]),
            num_antennas=int(row["num_antennas"]),
            path_loss_exp=float(row["path_loss_exp"]),
            tx_power_w=float(row["tx_power_w"]),
            noise_psd_w_hz=float(row["noise_psd_w_hz"]),
            bandwidth_hz=float(row["bandwidth_hz"]),
            disc_radius_m=float(row["disc_radius_m"]),
            method=row["method"],
            strategy=row["strategy"],
            metric=row["metric"],
            value=float(row["value"]),
            std_error=opt_float(row["std_error"]),
            err_estimate=opt_float(row["err_estimate"]),
            runtime_ms=float(row["runtime_ms"]),
            seed=int(row["seed"]),
        )


def read_records(path: str) -> list[ResultRecord]:
    """Read back a CSV written by run_sweep."""
    with open(path, newline="") as fh:
        return [ResultRecord.from_row(row) for row in csv.DictReader(fh)]


def _params_at(spec: SweepSpec, value) -> SystemParams:
    if spec.axis == "tx_power":
        return spec.fixed.replace(tx_power_w=float(value))
    if spec.axis == "num_antennas":
        return spec.fixed.replace(num_antennas=int(value))
    if spec.axis == "lambda":
        return spec.fixed.replace(lam=float(value))
    return spec.fixed  # assoc_n sweeps vary the strategy, not the params


def _strategy_sort_key(s: str) -> float:
    return math.inf if s == "inf" else float(s)


def _analytic_capacity(method: str, size: str, params: SystemParams) -> float:
    if size == "inf":
        mode = "closed_form" if method == "analytic_closed" else "numeric_integral"
        return analytic.capacity_upper(params, mode=mode)
    n = int(size)
    if method == "analytic_closed":
        if n == 1:
            return analytic.capacity_single_closed(params)
        if n == 2:
            return analytic.capacity_two(params, mode="closed_alpha4")
        return analytic.capacity_n(n, params)
    if n == 1:
        return analytic.capacity_single_numeric(params)
    if n == 2:
        return analytic.capacity_two(params, mode="numeric_integral")
    return analytic.capacity_n_exact(n, params)


def _analytic_outage(method: str, size: str, T: float, params: SystemParams) -> float:
    if size == "inf":
        return float(analytic.snr_cdf_limit(T, params, lam_exponent=2))
    n = int(size)
    if n == 1:
        return analytic.outage_single(T, params)
    if n == 2:
        mode = "mean_fading_single" if method == "analytic_closed" else "exact_double"
        return analytic.outage_two(T, params, mode=mode)
    return analytic.outage_n(T, n, params)


def _evaluate_cell(spec: SweepSpec, method: str, size: str, params: SystemParams):
    """Returns (value, std_error, err_estimate, resampled)."""
    if method == "monte_carlo":
        if size == "inf":
            strategy = n_nearest(INFINITE_MC_RANK)
            sampling = "plane"
        else:
            n = int(size)
            strategy = n_best(n) if spec.family == "n_best" else n_nearest(n)
            sampling = "disc"
        config = montecarlo.TrialConfig(
            n_trials=spec.trials,
            seed=spec.seed,
            strategy=strategy,
            fading_mode=spec.fading_mode,
            sampling=sampling,
        )
        sim = montecarlo.simulate_snr(config, params)
        if spec.metric == "outage":
            est = EstimateWithCI.from_binomial(
                int(np.sum(sim.snr < spec.threshold)), spec.trials
            )
        else:
            est = EstimateWithCI.from_samples(np.log2(1.0 + sim.snr))
        return est.mean, est.std_error, None, sim.resampled_trials

    if spec.metric == "outage":
        value = _analytic_outage(method, size, spec.threshold, params)
    else:
        value = _analytic_capacity(method, size, params)
    # closed forms are exact arithmetic; numeric modes carry the quadrature bound
    err = 0.0 if method == "analytic_closed" else abs(value) * 1e-7
    return value, None, err, 0


def run_sweep(spec: SweepSpec) -> list[ResultRecord]:
    """Execute the sweep; write CSV and JSON sidecar if output_path is set.

    Records are ordered by (sweep value, method, strategy size); floats are
    stored pre-rounded to the CSV's 9 significant digits, so written and
    re-read records compare equal.
    """
    records = []
    resampled_total = 0
    for value in spec.values:
        params = _params_at(spec, value)
        sizes = (str(value),) if spec.axis == "assoc_n" else spec.strategies
        for method in sorted(spec.methods):
            for size in sorted(sizes, key=_strategy_sort_key):
                t0 = time.perf_counter()
                val, se, err, resampled = _evaluate_cell(spec, method, size, params)
                ms = (time.perf_counter() - t0) * 1000.0
                resampled_total += resampled
                if size == "inf":
                    label = "inf" if method != "monte_carlo" else f"{INFINITE_MC_RANK}-nearest"
                elif method == "monte_carlo" and spec.family == "n_best":
                    label = f"{size}-best"
                else:
                    label = f"{size}-nearest"
                records.append(
                    ResultRecord(
                        lam=_round9(params.lam),
                        num_antennas=params.num_antennas,
                        path_loss_exp=_round9(params.path_loss_exp),
                        tx_power_w=_round9(params.tx_power_w),
                        noise_psd_w_hz=_round9(params.noise_psd_w_hz),
                        bandwidth_hz=_round9(params.bandwidth_hz),
                        disc_radius_m=_round9(params.disc_radius_m),
                        method=method,
                        strategy=label,
                        metric=spec.metric,
                        value=_round9(val),
                        std_error=_round9(se),
                        err_estimate=_round9(err),
                        runtime_ms=_round9(ms),
                        seed=spec.seed,
                    )
                )
    if spec.output_path:
        _write_outputs(spec, records, resampled_total)
    return records


def _write_outputs(spec: SweepSpec, records: list[ResultRecord], resampled: int) -> None:
    try:
        with open(spec.output_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RECORD_FIELDS)
            for rec in records:
                writer.writerow(rec.to_row())
    except OSError as exc:
        raise ParameterError(f"cannot write output path {spec.output_path!r}: {exc}") from exc
    meta = {
        "tool": "crancap",
        "version": __version__,
        "rng_algorithm": montecarlo.RNG_ALGORITHM,
        "seed": spec.seed,
        "trials": spec.trials,
        "fading_mode": spec.fading_mode,
        "metric": spec.metric,
        "threshold": spec.threshold,
        "axis": spec.axis,
        "values": list(spec.values),
        "strategies": list(spec.strategies),
        "methods": sorted(spec.methods),
        "family": spec.family,
        "resampled_trials_total": resampled,
        "infinite_strategy_mc_rank": INFINITE_MC_RANK,
        "fixed_params": dataclasses.asdict(spec.fixed),
    }
    with open(spec.output_path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# argument and config-file handling
# ---------------------------------------------------------------------------

_PARAM_KEYS = {
    "lam": float,
    "antennas": int,
    "alpha": float,
    "tx_power_dbm": float,
    "radius_m": float,
    "noise_psd_dbm_hz": float,
    "bandwidth_hz": float,
}
_SWEEP_KEYS = {
    "axis": str,
    "values": list,
    "strategies": list,
    "methods": list,
    "family": str,
    "metric": str,
    "threshold": float,
    "fading": str,
    "trials": int,
    "seed": int,
    "out": str,
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParameterError(f"config file {path!r} must hold a JSON object")
    known = {**_PARAM_KEYS, **_SWEEP_KEYS}
    out = {}
    for key, value in raw.items():
        if key not in known:
            raise ParameterError(f"unknown config field {key!r}")
        caster = known[key]
        try:
            if caster is list:
                out[key] = [str(v) for v in value]
            else:
                out[key] = caster(value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"config field {key!r}: {exc}") from exc
    return out


def _merged(args: argparse.Namespace, key: str, default):
    """Flag beats config file beats default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return args._config.get(key, default)


def parse_config(args: argparse.Namespace) -> SweepSpec:
    """Assemble a SweepSpec from flags, config file, and defaults."""
    args._config = _load_config(args.config)
    fixed = build_params(
        lam=_merged(args, "lam", 1e-4),
        num_antennas=_merged(args, "antennas", 4),
        path_loss_exp=_merged(args, "alpha", 4.0),
        tx_power_dbm=_merged(args, "tx_power_dbm", 10.0),
        noise_psd_dbm_hz=_merged(args, "noise_psd_dbm_hz", -174.0),
        bandwidth_hz=_merged(args, "bandwidth_hz", 100e6),
        disc_radius_m=_merged(args, "radius_m", 600.0),
    )
    values = _merged(args, "values", None)
    if values is None:
        raise ParameterError("field 'values': a sweep needs explicit axis values")
    try:
        parsed_values = tuple(float(v) for v in values)
    except ValueError as exc:
        raise ParameterError(f"field 'values': {exc}") from exc
    strategies = tuple(_merged(args, "strategies", ["1", "2", "4", "8", "inf"]))
    methods = tuple(_merged(args, "methods", ["analytic_closed", "monte_carlo"]))
    axis = _merged(args, "axis", "tx_power")
    if axis == "num_antennas" or axis == "assoc_n":
        parsed_values = tuple(int(v) for v in parsed_values)
    return SweepSpec(
        axis=axis,
        values=parsed_values,
        fixed=fixed,
        methods=methods,
        strategies=strategies,
        family=_merged(args, "family", "n_nearest"),
        metric=_merged(args, "metric", "capacity_bps_hz"),
        threshold=_merged(args, "threshold", None),
        fading_mode=_merged(args, "fading", "exact"),
        trials=_merged(args, "trials", 100_000),
        seed=_merged(args, "seed", 1),
        output_path=_merged(args, "out", None),
    )


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--lambda", dest="lam", type=float, help="RRH intensity per m^2")
    p.add_argument("--antennas", type=int, help="antennas per RRH (L)")
    p.add_argument("--alpha", type=float, help="path-loss exponent")
    p.add_argument("--tx-power-dbm", dest="tx_power_dbm", type=float, help="transmit power, dBm")
    p.add_argument("--radius-m", dest="radius_m", type=float, help="deployment disc radius, m")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument("--out", help="output CSV path (sidecar JSON written next to it)")


def _comma_list(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crancap",
        description="Outage/capacity analysis of RRH association with Monte Carlo cross-checks",
    )
    parser.add_argument("--version", action="version", version=f"crancap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="evaluate methods over a parameter sweep")
    _add_param_flags(p_sweep)
    p_sweep.add_argument("--axis", choices=AXES)
    p_sweep.add_argument("--values", type=_comma_list, help="comma-separated axis values")
    p_sweep.add_argument(
        "--assoc-n",
        dest="strategies",
        type=_comma_list,
        help="association sizes, e.g. 1,2,4,8,inf",
    )
    p_sweep.add_argument("--strategy", dest="family", choices=("n_nearest", "n_best"))
    p_sweep.add_argument("--methods", type=_comma_list, help=f"subset of {METHODS}")
    p_sweep.add_argument("--metric", choices=METRICS)
    p_sweep.add_argument("--threshold", type=float, help="SNR threshold for outage sweeps")
    p_sweep.add_argument("--fading", choices=("exact", "mean"))

    for name, help_text in (
        ("fig1", "capacity vs transmit power preset (1..100 mW)"),
        ("fig2", "capacity vs antenna count preset (L in 1,2,4,8)"),
    ):
        p_fig = sub.add_parser(name, help=help_text)
        _add_param_flags(p_fig)

    p_val = sub.add_parser("validate", help="run the analytic-vs-simulation cross-check matrix")
    _add_param_flags(p_val)
    p_val.add_argument(
        "--skip-calibration",
        action="store_true",
        help="do not run the intensity-reading calibration",
    )
    return parser


_FIG1_VALUES = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1)  # watts


def _preset_spec(args: argparse.Namespace, name: str) -> SweepSpec:
    """Figure presets: closed forms plus mean-fading simulation markers."""
    merged = dict(vars(args))
    merged.update(
        values=["1"],  # placeholder; replaced below
        axis=None,
        strategies=None,
        methods=None,
        family=None,
        metric=None,
        threshold=None,
        fading=None,
    )
    base = parse_config(argparse.Namespace(**merged))
    if name == "fig1":
        axis, values = "tx_power", _FIG1_VALUES
    else:
        axis, values = "num_antennas", (1, 2, 4, 8)
    return dataclasses.replace(
        base,
        axis=axis,
        values=values,
        strategies=("1", "2", "4", "8", "inf"),
        methods=("analytic_closed", "monte_carlo"),
        fading_mode="mean",
        trials=base.trials,
        output_path=base.output_path or f"{name}.csv",
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            spec = parse_config(args)
            if spec.output_path is None:
                spec = dataclasses.replace(spec, output_path="sweep.csv")
            records = run_sweep(spec)
            print(f"wrote {len(records)} records to {spec.output_path}")
            return 0
        if args.command in ("fig1", "fig2"):
            spec = _preset_spec(args, args.command)
            records = run_sweep(spec)
            print(f"wrote {len(records)} records to {spec.output_path}")
            return 0
        # validate
        args._config = _load_config(args.config)
        params = build_params(
            lam=_merged(args, "lam", 1e-4),
            num_antennas=_merged(args, "antennas", 4),
            path_loss_exp=_merged(args, "alpha", 4.0),
            tx_power_dbm=_merged(args, "tx_power_dbm", 10.0),
            noise_psd_dbm_hz=_merged(args, "noise_psd_dbm_hz", -174.0),
            bandwidth_hz=_merged(args, "bandwidth_hz", 100e6),
            disc_radius_m=_merged(args, "radius_m", 600.0),
        )
        trials = _merged(args, "trials", 200_000)
        seed = _merged(args, "seed", 1)
        report = validate_run(params, trials=trials, seed=seed)
        print(report.format_table())
        if not args.skip_calibration:
            calibration = calibrate_reading(params, trials=min(trials, 400_000), seed=seed)
            print()
            print(calibration.format_table())
        return 0 if report.all_pass else 1
    except QuadratureError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
