"""mmWave link budget in the dB domain.

Received power follows a log-distance path-loss law plus an exponential
atmospheric absorption term (oxygen dominates near 60 GHz):

    P_r = P_t + G_t + G_r + 10 eta log10(lambda / (4 pi d)) - 10 log10(e) alpha d

with everything in dB/dBm.  Noise is thermal (-174 dBm/Hz) plus the receiver
noise figure over the channel bandwidth.  Rates use Shannon capacity with a
fractional efficiency factor and an SINR cap modelling the highest
modulation/coding the hardware supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0          # m/s
THERMAL_NOISE_DBM_PER_HZ = -174.0
# 10*log10(e): converts a natural-log attenuation coefficient (1/m) to dB/m.
_NEPER_TO_DB = 10.0 * math.log10(math.e)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError(f"linear value must be positive, got {x}")
    return 10.0 * math.log10(x)


def power_sum_dbm(*terms_dbm: float) -> float:
    """Sum powers given in dBm, returning dBm."""
    if not terms_dbm:
        raise ValueError("need at least one term")
    return linear_to_db(sum(db_to_linear(p) for p in terms_dbm))


@dataclass(frozen=True)
class RadioParams:
    """Physical-layer constants for one deployment.

    Attributes:
        tx_power_dbm: transmit power.
        carrier_ghz: carrier frequency (sets lambda).
        bandwidth_mhz: channel bandwidth.
        path_loss_exponent: eta in the log-distance law.
        attenuation_per_m: atmospheric absorption alpha, 1/m (natural log).
        noise_figure_db: receiver noise figure.
        snr_cap_db: SINR above this contributes no extra rate.
        utility_ratio: fraction of Shannon capacity actually delivered.
    """

    tx_power_dbm: float = 10.0
    carrier_ghz: float = 60.0
    bandwidth_mhz: float = 2160.0
    path_loss_exponent: float = 2.0
    attenuation_per_m: float = 0.0016
    noise_figure_db: float = 6.0
    snr_cap_db: float = 40.0
    utility_ratio: float = 0.5

    def __post_init__(self):
        if self.carrier_ghz <= 0:
            raise ValueError(f"carrier_ghz must be positive, got {self.carrier_ghz}")
        if self.bandwidth_mhz <= 0:
            raise ValueError(f"bandwidth_mhz must be positive, got {self.bandwidth_mhz}")
        if self.path_loss_exponent < 1.0:
            raise ValueError(
                f"path_loss_exponent must be >= 1, got {self.path_loss_exponent}")
        if self.attenuation_per_m < 0:
            raise ValueError(
                f"attenuation_per_m must be >= 0, got {self.attenuation_per_m}")
        if not 0.0 < self.utility_ratio <= 1.0:
            raise ValueError(
                f"utility_ratio must be in (0, 1], got {self.utility_ratio}")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)

    @property
    def bandwidth_hz(self) -> float:
        return self.bandwidth_mhz * 1e6


def path_db(params: RadioParams, distance_m: float) -> float:
    """Signed propagation term: 10 eta log10(lambda/(4 pi d)) - alpha-in-dB * d.

    Negative for any distance beyond lambda/(4 pi); add it to the dB budget
    rather than subtracting.
    """
    if distance_m <= 0:
        raise ValueError(f"distance_m must be positive, got {distance_m}")
    spread = 10.0 * params.path_loss_exponent * math.log10(
        params.wavelength_m / (4.0 * math.pi * distance_m))
    absorption = _NEPER_TO_DB * params.attenuation_per_m * distance_m
    return spread - absorption


def received_power_dbm(params: RadioParams, distance_m: float,
                       tx_gain_dbi: float, rx_gain_dbi: float) -> float:
    """Received power over a single path."""
    return (params.tx_power_dbm + tx_gain_dbi + rx_gain_dbi
            + path_db(params, distance_m))


def noise_power_dbm(params: RadioParams) -> float:
    """Thermal noise plus noise figure over the channel bandwidth."""
    return (THERMAL_NOISE_DBM_PER_HZ
            + 10.0 * math.log10(params.bandwidth_hz)
            + params.noise_figure_db)


def sinr_db(signal_dbm: float, noise_dbm: float,
            interference_dbm: float | None = None) -> float:
    """SINR in dB; pass interference_dbm=None for the noise-only SNR."""
    if interference_dbm is None:
        return signal_dbm - noise_dbm
    denom = power_sum_dbm(noise_dbm, interference_dbm)
    return signal_dbm - denom


def link_rate_bps(params: RadioParams, sinr_value_db: float) -> float:
    """Achievable rate: utility_ratio * B * log2(1 + min(SINR, cap)), bit/s.

    log1p keeps the rate positive (instead of rounding to zero) when the
    SINR linear value drops below machine epsilon.
    """
    capped = min(sinr_value_db, params.snr_cap_db)
    return (params.utility_ratio * params.bandwidth_hz
            * math.log1p(db_to_linear(capped)) / math.log(2.0))


@dataclass(frozen=True)
class LinkReport:
    """One evaluated link: budget terms plus the resulting rate."""

    distance_m: float
    signal_dbm: float
    noise_dbm: float
    interference_dbm: float | None
    sinr_db: float
    rate_bps: float


def evaluate_link(params: RadioParams, distance_m: float,
                  tx_gain_dbi: float, rx_gain_dbi: float,
                  interference_dbm: float | None = None) -> LinkReport:
    """Full budget for one link, optionally under a single interferer."""
    s = received_power_dbm(params, distance_m, tx_gain_dbi, rx_gain_dbi)
    n = noise_power_dbm(params)
    q = sinr_db(s, n, interference_dbm)
    return LinkReport(
        distance_m=distance_m,
        signal_dbm=s,
        noise_dbm=n,
        interference_dbm=interference_dbm,
        sinr_db=q,
        rate_bps=link_rate_bps(params, q),
    )
