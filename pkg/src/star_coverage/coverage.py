"""Coverage-region solver: maximum user distance meeting a target rate.

Every per-user ergodic rate is strictly decreasing in that user's distance,
so the coverage boundary is a single root found by bisection. Because the
transmit-user rate depends only on d_t and the reflect-user rate only on
d_r, the joint feasible set is the product of the two per-user intervals;
`coverage_rectangle` returns its corner. `sweep` repeats the solve along a
parameter grid (element count, transmit SNR in dB, or squared amplitude
coefficient) to trace how the coverage boundary moves.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, NamedTuple, Sequence

from .channel import GammaApprox, Protocol, Side, SystemParams, gamma_params
from .rates import QuadratureSpec, rate_for

_MAX_BISECTIONS = 200


class BracketStatus(str, Enum):
    CONVERGED = "converged"
    TARGET_UNREACHABLE_AT_DMIN = "target_unreachable_at_dmin"
    TARGET_MET_AT_DMAX = "target_met_at_dmax"


class SweepAxis(str, Enum):
    N_ELEMENTS = "n_elements"
    SNR_DB = "snr_db"
    BETA_SQ = "beta_sq"


class SolverError(RuntimeError):
    """Bisection exhausted its iteration cap without meeting the rate tolerance."""


@dataclass(frozen=True)
class CoverageQuery:
    target_rate_bps_hz: float
    protocol: Protocol
    side: Side
    d_min_m: float = 0.1
    d_max_m: float = 1e4
    rate_tolerance: float = 1e-6

    def __post_init__(self):
        if not self.target_rate_bps_hz > 0:
            raise ValueError("target_rate_bps_hz must be > 0")
        if not (0 < self.d_min_m < self.d_max_m):
            raise ValueError("need 0 < d_min_m < d_max_m")
        if not self.rate_tolerance > 0:
            raise ValueError("rate_tolerance must be > 0")


@dataclass(frozen=True)
class CoverageResult:
    max_distance_m: float
    rate_at_boundary: float
    iterations: int
    bracket_status: BracketStatus


class RateTargets(NamedTuple):
    reflect: float
    transmit: float

    def for_side(self, side: Side) -> float:
        return self.reflect if side == Side.REFLECT else self.transmit


class CoverageRectangle(NamedTuple):
    transmit: CoverageResult
    reflect: CoverageResult


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    protocol: Protocol
    side: Side
    max_distance_m: float
    status: str


def max_distance(
    params: SystemParams,
    query: CoverageQuery,
    g: GammaApprox,
    q: QuadratureSpec | None = None,
    rate_fn: Callable[[float], float] | None = None,
) -> CoverageResult:
    """Largest distance at which the (protocol, side) rate still meets the target.

    Bisects the strictly decreasing map distance -> rate after bracketing at
    the query bounds. Out-of-bracket cases come back as statuses, never as
    exceptions: `target_unreachable_at_dmin` when even the closest allowed
    distance falls short, `target_met_at_dmax` when the far bound still
    satisfies the target (no clamping or extrapolation).

    `rate_fn` overrides the quadrature rate with any other strictly
    decreasing rate model sharing the same signature.
    """
    if rate_fn is None:
        def rate_fn(d: float) -> float:
            return rate_for(params, query.protocol, query.side, d, g, q).rate_bps_hz

    target = query.target_rate_bps_hz
    tol = query.rate_tolerance

    rate_lo = rate_fn(query.d_min_m)
    if abs(rate_lo - target) <= tol:
        return CoverageResult(query.d_min_m, rate_lo, 0, BracketStatus.CONVERGED)
    if rate_lo < target:
        return CoverageResult(
            query.d_min_m, rate_lo, 0, BracketStatus.TARGET_UNREACHABLE_AT_DMIN
        )

    rate_hi = rate_fn(query.d_max_m)
    if abs(rate_hi - target) <= tol:
        return CoverageResult(query.d_max_m, rate_hi, 0, BracketStatus.CONVERGED)
    if rate_hi > target:
        return CoverageResult(query.d_max_m, rate_hi, 0, BracketStatus.TARGET_MET_AT_DMAX)

    lo, hi = query.d_min_m, query.d_max_m  # rate(lo) > target > rate(hi)
    for iteration in range(1, _MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        rate_mid = rate_fn(mid)
        if abs(rate_mid - target) <= tol:
            return CoverageResult(mid, rate_mid, iteration, BracketStatus.CONVERGED)
        if rate_mid > target:
            lo = mid
        else:
            hi = mid
    raise SolverError(
        f"bisection did not reach rate tolerance {tol:g} within {_MAX_BISECTIONS} iterations "
        f"(bracket [{lo:g}, {hi:g}] m)"
    )


def coverage_rectangle(
    params: SystemParams,
    targets: RateTargets,
    protocol: Protocol,
    g: GammaApprox,
    q: QuadratureSpec | None = None,
    d_min_m: float = 0.1,
    d_max_m: float = 1e4,
    rate_tolerance: float = 1e-6,
) -> CoverageRectangle:
    """Corner (d_t*, d_r*) of the product-form coverage region.

    The two per-user solves are independent because each user's rate depends
    only on its own distance.
    """
    results = {}
    for side in (Side.TRANSMIT, Side.REFLECT):
        query = CoverageQuery(
            target_rate_bps_hz=targets.for_side(side),
            protocol=protocol,
            side=side,
            d_min_m=d_min_m,
            d_max_m=d_max_m,
            rate_tolerance=rate_tolerance,
        )
        results[side] = max_distance(params, query, g, q)
    return CoverageRectangle(transmit=results[Side.TRANSMIT], reflect=results[Side.REFLECT])


def _params_for_axis_value(
    base: SystemParams, axis: SweepAxis, value: float, coupled_beta: bool, side: Side
) -> SystemParams:
    if axis == SweepAxis.N_ELEMENTS:
        n = int(value)
        if n != value or n < 1:
            raise ValueError(f"n_elements grid values must be positive integers (got {value!r})")
        return dataclasses.replace(base, n_elements=n)
    if axis == SweepAxis.SNR_DB:
        # Sweep the transmit SNR by moving total power over a fixed noise floor.
        return dataclasses.replace(base, total_power_dbm=base.noise_power_dbm + value)
    # beta_sq sweep
    if not 0.0 < value < 1.0:
        raise ValueError(f"beta_sq grid values must lie in (0,1) (got {value!r})")
    if coupled_beta:
        # Energy-splitting equality: the swept value is this row's beta_r^2
        # for reflect rows / beta_t^2 for transmit rows, with the other side
        # taking the remainder so the passive constraint binds.
        b_r_sq = value if side == Side.REFLECT else 1.0 - value
        return dataclasses.replace(
            base, amp_reflect=math.sqrt(b_r_sq), amp_transmit=math.sqrt(1.0 - b_r_sq)
        )
    if side == Side.REFLECT:
        candidate = dataclasses.replace(base, amp_reflect=math.sqrt(value))
    else:
        candidate = dataclasses.replace(base, amp_transmit=math.sqrt(value))
    return candidate  # SystemParams validation rejects beta_r^2 + beta_t^2 > 1


def sweep(
    params_base: SystemParams,
    axis: SweepAxis,
    grid: Sequence[float],
    targets: RateTargets,
    protocols: Iterable[Protocol],
    q: QuadratureSpec | None = None,
    d_min_m: float = 0.1,
    d_max_m: float = 1e4,
    rate_tolerance: float = 1e-6,
    coupled_beta: bool = True,
) -> list[SweepRow]:
    """Coverage boundary along a parameter grid, one row per (value, protocol, side).

    For the beta_sq axis the default coupling sweeps each user's own squared
    coefficient with the other side taking 1 - value; `coupled_beta=False`
    instead changes only the swept side and rejects grids that break the
    passive constraint. A row that fails (invalid parameters, quadrature or
    solver trouble) is reported with status ``error`` and never aborts the
    remaining rows. Rows are ordered by grid index, then protocol, then side.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(b >= a for a, b in zip(grid[1:], grid)):
        raise ValueError("grid must be strictly increasing")

    protocol_order = [p for p in (Protocol.NOMA, Protocol.OMA) if p in set(protocols)]
    if not protocol_order:
        raise ValueError("protocols must contain at least one of noma, oma")

    rows: list[SweepRow] = []
    for value in grid:
        for protocol in protocol_order:
            for side in (Side.REFLECT, Side.TRANSMIT):
                try:
                    params = _params_for_axis_value(
                        params_base, axis, value, coupled_beta, side
                    )
                    g = gamma_params(params.n_elements)
                    query = CoverageQuery(
                        target_rate_bps_hz=targets.for_side(side),
                        protocol=protocol,
                        side=side,
                        d_min_m=d_min_m,
                        d_max_m=d_max_m,
                        rate_tolerance=rate_tolerance,
                    )
                    result = max_distance(params, query, g, q)
                    rows.append(
                        SweepRow(
                            axis_value=float(value),
                            protocol=protocol,
                            side=side,
                            max_distance_m=result.max_distance_m,
                            status=result.bracket_status.value,
                        )
                    )
                except Exception as exc:  # noqa: BLE001 - per-row isolation is the contract
                    rows.append(
                        SweepRow(
                            axis_value=float(value),
                            protocol=protocol,
                            side=side,
                            max_distance_m=math.nan,
                            status=f"error: {exc}",
                        )
                    )
    return rows
