"""System parameters and the Gamma model of the cascaded BS-surface-user channel.

All downstream math works in linear scale; the dB -> linear conversion happens
here and nowhere else. The cascaded channel power W = (sum_n h_n * g_n)^2 under
ideal phase alignment is modelled as Gamma(shape, scale) with

    shape = N * pi^2 / (16 - pi^2),    scale = (16 - pi^2) / (4 * pi),

which matches the first two moments of the amplitude sum when every Rayleigh
amplitude is normalized to unit second moment (mean N*pi/4, variance
N*(16-pi^2)/16).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

_PI_SQ = math.pi**2
_SHAPE_PER_ELEMENT = _PI_SQ / (16.0 - _PI_SQ)
_SCALE = (16.0 - _PI_SQ) / (4.0 * math.pi)


class Protocol(str, Enum):
    NOMA = "noma"
    OMA = "oma"


class Side(str, Enum):
    REFLECT = "reflect"
    TRANSMIT = "transmit"


class Role(str, Enum):
    """Which part of the superposed downlink signal a gain multiplies."""

    SIGNAL = "signal"
    INTERFERENCE = "interference"
    FULL = "full"


class ProtocolMismatchError(ValueError):
    """Raised when a role/protocol combination has no physical meaning."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol scalars of the two-user downlink.

    Power splits (NOMA) and amplitude coefficients obey:
      * power_split_reflect + power_split_transmit = 1
      * power_split_reflect <= power_split_transmit (fixed decoding order:
        the reflect-plane user runs SIC, so the transmit user gets more power)
      * amp_reflect^2 + amp_transmit^2 <= 1 (passive surface)
    """

    total_power_dbm: float
    noise_power_dbm: float
    n_elements: int
    path_loss_exponent: float
    bs_ris_distance_m: float
    power_split_reflect: float
    power_split_transmit: float
    amp_reflect: float
    amp_transmit: float
    oma_resource_share_reflect: float
    oma_resource_share_transmit: float
    oma_power_reflect: float
    oma_power_transmit: float

    def __post_init__(self):
        for name in (
            "total_power_dbm",
            "noise_power_dbm",
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
        ):
            _require(math.isfinite(getattr(self, name)), f"{name} must be finite")
        _require(
            isinstance(self.n_elements, int) and self.n_elements >= 1,
            "n_elements must be an integer >= 1",
        )
        _require(self.path_loss_exponent > 0, "path_loss_exponent must be > 0")
        _require(self.bs_ris_distance_m > 0, "bs_ris_distance_m must be > 0")

        p_r, p_t = self.power_split_reflect, self.power_split_transmit
        _require(0.0 <= p_r <= 1.0 and 0.0 <= p_t <= 1.0, "power splits must lie in [0,1]")
        _require(
            abs(p_r + p_t - 1.0) <= 1e-12,
            f"power_split_reflect + power_split_transmit must equal 1 (got {p_r + p_t!r})",
        )
        _require(
            p_r <= p_t,
            "power_split_reflect must not exceed power_split_transmit (decoding order)",
        )

        b_r, b_t = self.amp_reflect, self.amp_transmit
        _require(0.0 <= b_r <= 1.0 and 0.0 <= b_t <= 1.0, "amplitude coefficients must lie in [0,1]")
        # 0.8^2 + 0.6^2 evaluates to 1 + 2 ulp in binary; allow that slack.
        _require(
            b_r**2 + b_t**2 <= 1.0 + 1e-12,
            f"amp_reflect^2 + amp_transmit^2 must be <= 1 (got {b_r**2 + b_t**2!r})",
        )

        for name in ("oma_resource_share_reflect", "oma_resource_share_transmit"):
            v = getattr(self, name)
            _require(0.0 < v <= 1.0, f"{name} must lie in (0,1]")
        for name in ("oma_power_reflect", "oma_power_transmit"):
            v = getattr(self, name)
            _require(0.0 <= v <= 1.0, f"{name} must lie in [0,1]")

    def power_split(self, side: Side) -> float:
        return self.power_split_reflect if side == Side.REFLECT else self.power_split_transmit

    def amp(self, side: Side) -> float:
        return self.amp_reflect if side == Side.REFLECT else self.amp_transmit

    def oma_resource_share(self, side: Side) -> float:
        return (
            self.oma_resource_share_reflect
            if side == Side.REFLECT
            else self.oma_resource_share_transmit
        )

    def oma_power(self, side: Side) -> float:
        return self.oma_power_reflect if side == Side.REFLECT else self.oma_power_transmit


@dataclass(frozen=True)
class GammaApprox:
    """Shape/scale pair of the Gamma model for the cascaded channel power."""

    shape: float
    scale: float

    def __post_init__(self):
        _require(self.shape > 0, "shape must be > 0")
        _require(self.scale > 0, "scale must be > 0")


@dataclass(frozen=True)
class LinkGeometry:
    """Distance from the surface to one user, plus which side the user is on."""

    user_distance_m: float
    user_side: Side

    def __post_init__(self):
        _require(
            math.isfinite(self.user_distance_m) and self.user_distance_m > 0,
            "user_distance_m must be > 0",
        )


def transmit_snr(params: SystemParams) -> float:
    """Linear transmit SNR: total power over noise power, both given in dBm."""
    return 10.0 ** ((params.total_power_dbm - params.noise_power_dbm) / 10.0)


def gamma_params(n_elements: int) -> GammaApprox:
    """Gamma shape/scale for an N-element surface.

    shape = N*pi^2/(16-pi^2) grows linearly in N; scale = (16-pi^2)/(4*pi)
    does not depend on N. Non-integer shapes are the norm.
    """
    _require(
        isinstance(n_elements, int) and n_elements >= 1,
        "n_elements must be an integer >= 1",
    )
    return GammaApprox(shape=n_elements * _SHAPE_PER_ELEMENT, scale=_SCALE)


def gamma_pdf(w: float, g: GammaApprox) -> float:
    """Gamma(shape, scale) density at w >= 0, evaluated in log space.

    The log-space path keeps shape ~ 50 (N = 30) from overflowing the
    Gamma-function and scale**shape factors.
    """
    _require(w >= 0, "w must be >= 0")
    k, t = g.shape, g.scale
    if w == 0.0:
        if k > 1.0:
            return 0.0
        if k == 1.0:
            return 1.0 / t
        return math.inf  # density diverges at the origin for shape < 1
    log_pdf = (k - 1.0) * math.log(w) - w / t - math.lgamma(k) - k * math.log(t)
    return math.exp(log_pdf)


def effective_gain(
    params: SystemParams,
    geometry: LinkGeometry,
    protocol: Protocol,
    role: Role,
) -> float:
    """Scalar c such that the instantaneous SNR/SINR term equals c * W.

    NOMA, user k at distance d_k with rho = transmit SNR:
      full          c = rho * beta_k^2 / (d^alpha * d_k^alpha)
      signal        c = p_k * full
      interference  c = p_r * full   (the reflect-user share left undecoded)

    OMA, user k:
      c = rho * p_k * beta_k^2 / (delta_k * d^alpha * d_k^alpha)
      (role 'interference' is meaningless: OMA users are orthogonal)
    """
    rho = transmit_snr(params)
    side = geometry.user_side
    alpha = params.path_loss_exponent
    path = params.bs_ris_distance_m**alpha * geometry.user_distance_m**alpha
    beta_sq = params.amp(side) ** 2

    if protocol == Protocol.OMA:
        if role == Role.INTERFERENCE:
            raise ProtocolMismatchError("role 'interference' is not defined for OMA")
        delta = params.oma_resource_share(side)
        return rho * params.oma_power(side) * beta_sq / (delta * path)

    full = rho * beta_sq / path
    if role == Role.FULL:
        return full
    if role == Role.SIGNAL:
        return params.power_split(side) * full
    return params.power_split_reflect * full
