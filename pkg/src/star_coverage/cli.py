"""star-cov: rates, coverage regions, parameter sweeps, Monte-Carlo validation.

Subcommands
    rate         per-user NOMA/OMA ergodic rates at given distances
    coverage     max distance meeting each user's target rate (4 rows)
    sweep        coverage boundary along a parameter grid (optionally plotted)
    mc-validate  quadrature vs. Monte-Carlo cross-checks plus the Gamma-fit report

Exit status: 0 success, 2 usage error, 3 configuration/argument error,
4 numerical failure, 5 I/O error, 1 unexpected internal error. Every failure
prints a one-line ``star-cov: <category>: <message>`` diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

from .channel import LinkGeometry, Protocol, Side, gamma_params
from .config import ConfigError, RunConfig, default_run_config, parse_config
from .coverage import (
    CoverageQuery,
    SolverError,
    SweepAxis,
    max_distance,
    sweep,
)
from .mc import (
    SampleBackend,
    gamma_fit_report,
    mc_rate_noma_reflect,
    mc_rate_noma_transmit,
    mc_rate_oma,
    mc_sic_sinr_check,
)
from .plotting import render_sweep_figure
from .rates import QuadratureError, rate_for
from .report import (
    format_axis,
    format_distance,
    format_general,
    format_rate,
    open_output,
    render_csv,
    render_json,
)

_EXIT_OK = 0
_EXIT_INTERNAL = 1
_EXIT_CONFIG = 3
_EXIT_NUMERICAL = 4
_EXIT_IO = 5


def parse_grid(text: str) -> list[float]:
    """Grid syntax: 'start:stop:step' (stop included when exactly reachable)
    or an explicit comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be > 0")
        if stop < start:
            raise ValueError("grid stop must be >= start")
        values = []
        k = 0
        edge = stop + 1e-9 * max(1.0, abs(stop))
        while True:
            v = start + k * step
            if v > edge:
                break
            values.append(v)
            k += 1
        return values
    values = [float(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ValueError("grid list is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="star-cov",
        description="Ergodic rates and coverage regions for a two-user "
        "STAR-RIS downlink under NOMA/OMA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--config", metavar="PATH", help="flat key/value configuration file")
        p.add_argument("--format", choices=("csv", "json"), help="output format override")
        p.add_argument("--out", metavar="PATH", help="output path override ('-' = stdout)")
        p.add_argument("--seed", type=int, metavar="U64", help="Monte-Carlo seed override")

    p_rate = sub.add_parser("rate", help="per-user NOMA/OMA rates at given distances")
    add_common(p_rate)
    p_rate.add_argument("--d-reflect", type=float, default=10.0, metavar="M")
    p_rate.add_argument("--d-transmit", type=float, default=10.0, metavar="M")

    p_cov = sub.add_parser("coverage", help="max distance per user/protocol at target rates")
    add_common(p_cov)

    p_sweep = sub.add_parser("sweep", help="coverage boundary along a parameter grid")
    add_common(p_sweep)
    p_sweep.add_argument(
        "--axis",
        required=True,
        choices=[a.value for a in SweepAxis],
        help="swept parameter",
    )
    p_sweep.add_argument(
        "--grid", required=True, metavar="SPEC", help="start:stop:step or v1,v2,..."
    )
    p_sweep.add_argument(
        "--independent-beta",
        action="store_true",
        help="beta_sq axis: change only the served user's coefficient "
        "(default couples beta_t^2 = 1 - beta_r^2)",
    )
    p_sweep.add_argument(
        "--plot", metavar="PATH", help="also render the sweep as a figure to PATH"
    )

    p_mc = sub.add_parser("mc-validate", help="Monte-Carlo vs. quadrature cross-checks")
    add_common(p_mc)
    p_mc.add_argument("--d-reflect", type=float, default=10.0, metavar="M")
    p_mc.add_argument("--d-transmit", type=float, default=10.0, metavar="M")

    return parser


def _load_config(args) -> RunConfig:
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
        cfg = parse_config(text)
    else:
        cfg = default_run_config()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, mc=dataclasses.replace(cfg.mc, seed=args.seed))
    if args.format is not None:
        cfg = dataclasses.replace(cfg, output_format=args.format)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_path=args.out)
    return cfg


def _cmd_rate(cfg: RunConfig, args):
    g = gamma_params(cfg.system.n_elements)
    header = ["protocol", "side", "distance_m", "rate_bps_hz", "method", "est_abs_error"]
    csv_rows, records = [], []
    distances = {Side.REFLECT: args.d_reflect, Side.TRANSMIT: args.d_transmit}
    for protocol in (Protocol.NOMA, Protocol.OMA):
        for side in (Side.REFLECT, Side.TRANSMIT):
            d = distances[side]
            rr = rate_for(cfg.system, protocol, side, d, g, cfg.quadrature)
            records.append(
                {
                    "record": "rate",
                    "protocol": protocol.value,
                    "side": side.value,
                    "distance_m": d,
                    "rate_bps_hz": rr.rate_bps_hz,
                    "method": rr.method.value,
                    "est_abs_error": rr.est_abs_error,
                }
            )
            csv_rows.append(
                {
                    "protocol": protocol.value,
                    "side": side.value,
                    "distance_m": format_distance(d),
                    "rate_bps_hz": format_rate(rr.rate_bps_hz),
                    "method": rr.method.value,
                    "est_abs_error": format_general(rr.est_abs_error),
                }
            )
    return header, csv_rows, records, {}


def _cmd_coverage(cfg: RunConfig, args):
    g = gamma_params(cfg.system.n_elements)
    header = [
        "protocol",
        "side",
        "target_rate_bps_hz",
        "max_distance_m",
        "rate_at_boundary_bps_hz",
        "iterations",
        "status",
    ]
    csv_rows, records = [], []
    for protocol in (Protocol.NOMA, Protocol.OMA):
        for side in (Side.REFLECT, Side.TRANSMIT):
            query = CoverageQuery(
                target_rate_bps_hz=cfg.targets.for_side(side),
                protocol=protocol,
                side=side,
                d_min_m=cfg.solver_d_min_m,
                d_max_m=cfg.solver_d_max_m,
                rate_tolerance=cfg.solver_rate_tolerance,
            )
            res = max_distance(cfg.system, query, g, cfg.quadrature)
            records.append(
                {
                    "record": "coverage",
                    "protocol": protocol.value,
                    "side": side.value,
                    "target_rate_bps_hz": query.target_rate_bps_hz,
                    "max_distance_m": res.max_distance_m,
                    "rate_at_boundary_bps_hz": res.rate_at_boundary,
                    "iterations": res.iterations,
                    "status": res.bracket_status.value,
                }
            )
            csv_rows.append(
                {
                    "protocol": protocol.value,
                    "side": side.value,
                    "target_rate_bps_hz": format_rate(query.target_rate_bps_hz),
                    "max_distance_m": format_distance(res.max_distance_m),
                    "rate_at_boundary_bps_hz": format_rate(res.rate_at_boundary),
                    "iterations": str(res.iterations),
                    "status": res.bracket_status.value,
                }
            )
    return header, csv_rows, records, {}


def _cmd_sweep(cfg: RunConfig, args):
    grid = parse_grid(args.grid)
    axis = SweepAxis(args.axis)
    rows = sweep(
        cfg.system,
        axis,
        grid,
        cfg.targets,
        protocols=(Protocol.NOMA, Protocol.OMA),
        q=cfg.quadrature,
        d_min_m=cfg.solver_d_min_m,
        d_max_m=cfg.solver_d_max_m,
        rate_tolerance=cfg.solver_rate_tolerance,
        coupled_beta=not args.independent_beta,
    )
    header = ["axis_value", "protocol", "side", "max_distance_m", "status"]
    csv_rows = [
        {
            "axis_value": format_axis(row.axis_value),
            "protocol": row.protocol.value,
            "side": row.side.value,
            "max_distance_m": format_distance(row.max_distance_m),
            "status": row.status,
        }
        for row in rows
    ]
    records = [
        {
            "record": "sweep",
            "axis": axis.value,
            "axis_value": row.axis_value,
            "protocol": row.protocol.value,
            "side": row.side.value,
            # None rather than a bare NaN literal keeps the JSON strict
            "max_distance_m": None if math.isnan(row.max_distance_m) else row.max_distance_m,
            "status": row.status,
        }
        for row in rows
    ]
    if args.plot:
        render_sweep_figure(rows, axis, args.plot)
    return header, csv_rows, records, {"axis": axis.value}


def _cmd_mc_validate(cfg: RunConfig, args):
    params = cfg.system
    g = gamma_params(params.n_elements)
    distances = {Side.REFLECT: args.d_reflect, Side.TRANSMIT: args.d_transmit}

    def mc_estimate(protocol, side, backend):
        d = distances[side]
        if protocol == Protocol.OMA:
            return mc_rate_oma(params, LinkGeometry(d, side), cfg.mc, backend)
        if side == Side.REFLECT:
            return mc_rate_noma_reflect(params, d, cfg.mc, backend)
        return mc_rate_noma_transmit(params, d, cfg.mc, backend)

    header = [
        "record",
        "protocol",
        "side",
        "n_elements",
        "seed",
        "quadrature_rate",
        "mc_gamma_mean",
        "mc_gamma_std_error",
        "mc_exact_mean",
        "mc_exact_std_error",
        "gamma_gap_in_std_errors",
        "moment_rel_err_mean",
        "moment_rel_err_var",
        "ks_distance_w",
        "ks_distance_s",
        "sic_target_rate",
        "sic_success_fraction",
    ]
    csv_rows, records = [], []

    for protocol in (Protocol.NOMA, Protocol.OMA):
        for side in (Side.REFLECT, Side.TRANSMIT):
            quad = rate_for(params, protocol, side, distances[side], g, cfg.quadrature)
            est_gamma = mc_estimate(protocol, side, SampleBackend.GAMMA_SURROGATE)
            est_exact = mc_estimate(protocol, side, SampleBackend.EXACT_CASCADE)
            gap = abs(est_gamma.mean - quad.rate_bps_hz)
            gap_in_se = gap / est_gamma.std_error if est_gamma.std_error > 0 else 0.0
            records.append(
                {
                    "record": "rate_check",
                    "protocol": protocol.value,
                    "side": side.value,
                    "n_elements": params.n_elements,
                    "seed": cfg.mc.seed,
                    "distance_m": distances[side],
                    "quadrature_rate": quad.rate_bps_hz,
                    "mc_gamma_mean": est_gamma.mean,
                    "mc_gamma_std_error": est_gamma.std_error,
                    "mc_exact_mean": est_exact.mean,
                    "mc_exact_std_error": est_exact.std_error,
                    "gamma_gap_in_std_errors": gap_in_se,
                }
            )
            csv_rows.append(
                {
                    "record": "rate_check",
                    "protocol": protocol.value,
                    "side": side.value,
                    "n_elements": str(params.n_elements),
                    "seed": str(cfg.mc.seed),
                    "quadrature_rate": format_rate(quad.rate_bps_hz),
                    "mc_gamma_mean": format_rate(est_gamma.mean),
                    "mc_gamma_std_error": format_general(est_gamma.std_error),
                    "mc_exact_mean": format_rate(est_exact.mean),
                    "mc_exact_std_error": format_general(est_exact.std_error),
                    "gamma_gap_in_std_errors": format_general(gap_in_se),
                }
            )

    fit = gamma_fit_report(params.n_elements, cfg.mc)
    records.append(
        {
            "record": "gamma_fit",
            "n_elements": fit.n_elements,
            "seed": fit.seed,
            "n_samples": fit.n_samples,
            "moment_rel_err_mean": fit.moment_rel_err_mean,
            "moment_rel_err_var": fit.moment_rel_err_var,
            "ks_distance_w": fit.ks_distance_w,
            "ks_distance_s": fit.ks_distance_s,
        }
    )
    csv_rows.append(
        {
            "record": "gamma_fit",
            "n_elements": str(fit.n_elements),
            "seed": str(fit.seed),
            "moment_rel_err_mean": format_general(fit.moment_rel_err_mean),
            "moment_rel_err_var": format_general(fit.moment_rel_err_var),
            "ks_distance_w": format_general(fit.ks_distance_w),
            "ks_distance_s": format_general(fit.ks_distance_s),
        }
    )

    sic_fraction = mc_sic_sinr_check(
        params, args.d_reflect, cfg.targets.transmit, cfg.mc
    )
    records.append(
        {
            "record": "sic_check",
            "n_elements": params.n_elements,
            "seed": cfg.mc.seed,
            "distance_m": args.d_reflect,
            "sic_target_rate": cfg.targets.transmit,
            "sic_success_fraction": sic_fraction,
        }
    )
    csv_rows.append(
        {
            "record": "sic_check",
            "n_elements": str(params.n_elements),
            "seed": str(cfg.mc.seed),
            "sic_target_rate": format_rate(cfg.targets.transmit),
            "sic_success_fraction": format_general(sic_fraction),
        }
    )
    return header, csv_rows, records, {}


_COMMANDS = {
    "rate": _cmd_rate,
    "coverage": _cmd_coverage,
    "sweep": _cmd_sweep,
    "mc-validate": _cmd_mc_validate,
}


def _diagnose(category: str, message: str) -> None:
    print(f"star-cov: {category}: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        header, csv_rows, records, extra_meta = _COMMANDS[args.command](cfg, args)
        if cfg.output_format == "csv":
            payload = render_csv(header, csv_rows)
        else:
            payload = render_json(records, cfg, extra_meta)
        with open_output(cfg.output_path) as fh:
            fh.write(payload)
        return _EXIT_OK
    except ConfigError as exc:
        _diagnose("config-error", str(exc))
        return _EXIT_CONFIG
    except (QuadratureError, SolverError) as exc:
        _diagnose("numerical-error", str(exc))
        return _EXIT_NUMERICAL
    except ValueError as exc:
        _diagnose("invalid-argument", str(exc))
        return _EXIT_CONFIG
    except OSError as exc:
        _diagnose("io-error", str(exc))
        return _EXIT_IO
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        _diagnose("internal-error", f"{type(exc).__name__}: {exc}")
        return _EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
