"""Physical layer: link budget, Rayleigh fading, square M-QAM error rates.

Table defaults reinterpret the published noise entries: the noise floor is
taken as -20 dBm (not +20 dBm, which would exceed the 25 dBm transmit power)
and the noise figure as 15 dB.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from coopgeo import kernels

SUPPORTED_M = (4, 16, 64)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def qfunc(x: float) -> float:
    """Gaussian tail probability."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


@dataclass(frozen=True)
class ChannelParams:
    tx_power_dbm: float = 25.0
    noise_power_dbm: float = -20.0
    noise_figure_db: float = 15.0
    carrier_freq_hz: float = 2.412e9
    bandwidth_hz: float = 22e6
    path_loss_exponent: float = 2.0
    reference_distance_m: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth must be positive")
        if not self.path_loss_exponent >= 2:
            raise ValueError("path-loss exponent must be >= 2")
        if not self.reference_distance_m > 0:
            raise ValueError("reference distance must be positive")

    @property
    def link_margin_db(self) -> float:
        return self.tx_power_dbm - self.noise_power_dbm - self.noise_figure_db


@dataclass(frozen=True)
class Modulation:
    constellation_size: int = 64

    def __post_init__(self):
        m = self.constellation_size
        if m < 4 or (m & (m - 1)) or int(math.log2(m)) % 2:
            raise ValueError(f"M={m} is not a square QAM size (power of 4)")

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.constellation_size))


@dataclass(frozen=True)
class SerConstants:
    a_squared: float
    b: float

    def __post_init__(self):
        if not (self.a_squared > 0 and self.b > 0):
            raise ValueError("SER constants must be strictly positive")


@dataclass(frozen=True)
class LinkDraw:
    instantaneous_snr: float

    def __post_init__(self):
        if self.instantaneous_snr < 0:
            raise ValueError("instantaneous SNR must be non-negative")


def mean_snr(d: float, params: ChannelParams) -> float:
    """Mean received SNR (linear) under a power-law path loss."""
    if d < params.reference_distance_m:
        raise ValueError(
            f"distance {d} m is below the reference distance "
            f"{params.reference_distance_m} m")
    return (db_to_linear(params.link_margin_db)
            * (params.reference_distance_m / d) ** params.path_loss_exponent)


def draw_rayleigh_snr(mean: float, rng) -> LinkDraw:
    """Exponentially distributed SNR (Rayleigh amplitude) with the given mean."""
    if not mean > 0:
        raise ValueError("mean SNR must be positive")
    return LinkDraw(float(rng.exponential(mean)))


def ser_mqam(snr: float, mod: Modulation) -> float:
    return kernels.ser_mqam(float(snr), float(mod.constellation_size))


def packet_success(ser: float, n_symbols: int) -> float:
    if not 0.0 <= ser <= 1.0:
        raise ValueError("ser must be a probability")
    if ser == 1.0:
        return 0.0
    return math.exp(n_symbols * math.log1p(-ser))


def mrc_combine(snr_direct: float, snr_relay: float) -> float:
    if snr_direct < 0 or snr_relay < 0:
        raise ValueError("SNRs must be non-negative")
    return snr_direct + snr_relay


def ser_constants(mod: Modulation,
                  override: Optional[SerConstants] = None) -> SerConstants:
    """(A^2, B) for the relay metric, from the M-PSK style closed forms."""
    if override is not None:
        return override
    m = mod.constellation_size
    if m not in SUPPORTED_M:
        raise ValueError(f"unsupported constellation size {m}")
    s2 = math.sin(2.0 * math.pi / m) / (4.0 * math.pi)
    a = (m - 1) / (2.0 * m) + s2
    b = 3.0 * (m - 1) / (8.0 * m) + s2 - math.sin(4.0 * math.pi / m) / (32.0 * math.pi)
    return SerConstants(a * a, b)


def symbols_per_packet(octets: int, mod: Modulation) -> int:
    return int(math.ceil(8 * octets / mod.bits_per_symbol))


def airtime_us(octets: int, mod: Modulation, bandwidth_hz: float) -> float:
    """Frame airtime with one symbol per Hz-second."""
    return 8.0 * octets / (mod.bits_per_symbol * bandwidth_hz) * 1e6


class LinkModel:
    """Per-attempt link realization used by the protocol engine.

    One Rayleigh draw per (link, transmission attempt). Distances below the
    reference distance are evaluated at the reference distance: the near-field
    is outside the path-loss law, so such links get the full link margin.
    """

    def __init__(self, params: ChannelParams, mod: Modulation,
                 packet_octets: int, control_octets: int = 20,
                 ideal: bool = False):
        self.params = params
        self.mod = mod
        self.ideal = ideal
        self.packet_octets = packet_octets
        self.control_octets = control_octets
        self.n_data = symbols_per_packet(packet_octets, mod)
        self.n_ctrl = symbols_per_packet(control_octets, mod)
        self._m = float(mod.constellation_size)

    def mean_snr(self, d: float) -> float:
        return mean_snr(max(d, self.params.reference_distance_m), self.params)

    def draw_snr(self, tx: int, rx: int, d: float, rng) -> float:
        if self.ideal:
            return math.inf
        return float(rng.exponential(self.mean_snr(d)))

    def data_success(self, snr: float) -> float:
        return kernels.packet_success_snr(snr, self._m, float(self.n_data))

    def control_success(self, snr: float) -> float:
        return kernels.packet_success_snr(snr, self._m, float(self.n_ctrl))
