"""Run configuration: flat key/value documents with validated defaults.

The configuration format is deliberately primitive: one ``key = value`` pair
per line, ``#`` comments, blank lines ignored. Unknown keys are rejected by
name, duplicates are rejected, and every missing key falls back to the
default two-user setup (30 dBm total power over a -30 dBm noise floor,
15-element surface, path-loss exponent 2.5, surface 10 m from the BS,
amplitude coefficients 0.8/0.6, NOMA power split 0.4/0.6, rate targets
0.8/0.3 bits/s/Hz, OMA power and resource shares both 0.5).

Powers enter in dBm only; the library converts to linear scale exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channel import SystemParams
from .coverage import RateTargets
from .mc import McConfig
from .rates import QuadratureSpec

STDOUT_SENTINEL = "-"

OUTPUT_FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Malformed or invalid configuration; message names the offending key/line."""


# key -> (python type, default). This is the complete documented schema.
_SCHEMA: dict[str, tuple[type, object]] = {
    "total_power_dbm": (float, 30.0),
    "noise_power_dbm": (float, -30.0),
    "n_elements": (int, 15),
    "path_loss_exponent": (float, 2.5),
    "bs_ris_distance_m": (float, 10.0),
    "power_split_reflect": (float, 0.4),
    "power_split_transmit": (float, 0.6),
    "amp_reflect": (float, 0.8),
    "amp_transmit": (float, 0.6),
    "oma_resource_share_reflect": (float, 0.5),
    "oma_resource_share_transmit": (float, 0.5),
    "oma_power_reflect": (float, 0.5),
    "oma_power_transmit": (float, 0.5),
    "target_rate_reflect": (float, 0.8),
    "target_rate_transmit": (float, 0.3),
    "quad_rel_tolerance": (float, 1e-10),
    "quad_abs_tolerance": (float, 1e-12),
    "quad_max_subdivisions": (int, 200),
    "mc_n_samples": (int, 1_000_000),
    "mc_seed": (int, 0),
    "mc_chunk_size": (int, 1 << 16),
    "solver_d_min_m": (float, 0.1),
    "solver_d_max_m": (float, 1e4),
    "solver_rate_tolerance": (float, 1e-6),
    "output_path": (str, STDOUT_SENTINEL),
    "output_format": (str, "csv"),
}

_SYSTEM_KEYS = (
    "total_power_dbm",
    "noise_power_dbm",
    "n_elements",
    "path_loss_exponent",
    "bs_ris_distance_m",
    "power_split_reflect",
    "power_split_transmit",
    "amp_reflect",
    "amp_transmit",
    "oma_resource_share_reflect",
    "oma_resource_share_transmit",
    "oma_power_reflect",
    "oma_power_transmit",
)


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    quadrature: QuadratureSpec
    mc: McConfig
    targets: RateTargets
    solver_d_min_m: float
    solver_d_max_m: float
    solver_rate_tolerance: float
    output_path: str
    output_format: str

    def echo(self) -> dict:
        """Flat key/value view of the effective configuration (JSON metadata)."""
        out = {key: getattr(self.system, key) for key in _SYSTEM_KEYS}
        out.update(
            target_rate_reflect=self.targets.reflect,
            target_rate_transmit=self.targets.transmit,
            quad_rel_tolerance=self.quadrature.rel_tolerance,
            quad_abs_tolerance=self.quadrature.abs_tolerance,
            quad_max_subdivisions=self.quadrature.max_subdivisions,
            mc_n_samples=self.mc.n_samples,
            mc_seed=self.mc.seed,
            mc_chunk_size=self.mc.chunk_size,
            solver_d_min_m=self.solver_d_min_m,
            solver_d_max_m=self.solver_d_max_m,
            solver_rate_tolerance=self.solver_rate_tolerance,
            output_path=self.output_path,
            output_format=self.output_format,
        )
        return out


def _convert(key: str, raw: str, line_no: int):
    target_type, _ = _SCHEMA[key]
    try:
        if target_type is int:
            value = int(raw, 0)  # accept 0x..., underscores not needed
        elif target_type is float:
            value = float(raw)
        else:
            value = raw
    except ValueError as exc:
        raise ConfigError(
            f"line {line_no}: key '{key}' expects {target_type.__name__}, got {raw!r}"
        ) from exc
    return value


def _build(values: dict) -> RunConfig:
    def get(key):
        return values.get(key, _SCHEMA[key][1])

    if get("output_format") not in OUTPUT_FORMATS:
        raise ConfigError(
            f"key 'output_format' must be one of {OUTPUT_FORMATS}, got {get('output_format')!r}"
        )

    try:
        system = SystemParams(**{key: get(key) for key in _SYSTEM_KEYS})
        quadrature = QuadratureSpec(
            rel_tolerance=get("quad_rel_tolerance"),
            abs_tolerance=get("quad_abs_tolerance"),
            max_subdivisions=get("quad_max_subdivisions"),
        )
        mc = McConfig(
            n_samples=get("mc_n_samples"),
            seed=get("mc_seed"),
            chunk_size=get("mc_chunk_size"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    targets = RateTargets(
        reflect=get("target_rate_reflect"), transmit=get("target_rate_transmit")
    )
    if targets.reflect <= 0 or targets.transmit <= 0:
        raise ConfigError("target rates must be > 0")
    d_min, d_max = get("solver_d_min_m"), get("solver_d_max_m")
    if not 0 < d_min < d_max:
        raise ConfigError("need 0 < solver_d_min_m < solver_d_max_m")
    rate_tol = get("solver_rate_tolerance")
    if rate_tol <= 0:
        raise ConfigError("solver_rate_tolerance must be > 0")

    return RunConfig(
        system=system,
        quadrature=quadrature,
        mc=mc,
        targets=targets,
        solver_d_min_m=d_min,
        solver_d_max_m=d_max,
        solver_rate_tolerance=rate_tol,
        output_path=get("output_path"),
        output_format=get("output_format"),
    )


def parse_config(text: str) -> RunConfig:
    """Parse a flat key/value document into a validated RunConfig.

    Empty input yields the full default configuration. Errors carry the
    offending line number and key name.
    """
    values: dict[str, object] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw_line!r}")
        key, _, raw_value = line.partition("=")
        key, raw_value = key.strip(), raw_value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {line_no}: unknown configuration key '{key}'")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate configuration key '{key}'")
        if raw_value == "":
            raise ConfigError(f"line {line_no}: key '{key}' has no value")
        values[key] = _convert(key, raw_value, line_no)
    return _build(values)


def default_run_config() -> RunConfig:
    return _build({})


def default_system_params(**overrides) -> SystemParams:
    """Default SystemParams, optionally overriding individual fields."""
    values = {key: _SCHEMA[key][1] for key in _SYSTEM_KEYS}
    values.update(overrides)
    return SystemParams(**values)
