"""Flat experiment configuration and the objects derived from it."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from coopgeo.channel import (ChannelParams, LinkModel, Modulation, SerConstants,
                             airtime_us, ser_constants)
from coopgeo.contention import ContentionConfig
from coopgeo.geometry import RelayMetricParams
from coopgeo.protocol.config import REULEAUX_SIDES, ProtocolConfig

TOPOLOGY_MODES = ("per-hop-disk", "multi-hop-area")


@dataclass(frozen=True)
class SimConfig:
    # link budget
    tx_power_dbm: float = 25.0
    noise_power_dbm: float = -20.0
    noise_figure_db: float = 15.0
    carrier_freq_hz: float = 2.412e9
    bandwidth_hz: float = 22e6
    path_loss_exponent: float = 2.0
    reference_distance_m: float = 1.0
    # modulation and frames
    constellation: int = 64
    packet_size: int = 1538          # octets
    control_frame_octets: int = 20
    # contention
    t_max_us: float = 500.0
    nsa: int = 8
    collision_window_us: Optional[float] = None   # None: CTF airtime + guard
    turnaround_us: float = 20.0
    jitter: bool = True
    collision_retries: int = 1
    # relay metric; None means derived from the modulation / channel
    a_squared: Optional[float] = None
    b: Optional[float] = None
    metric_p: Optional[float] = None
    reuleaux_side: str = "upper"
    # topology
    range_m: float = 1.5
    topology_mode: str = "per-hop-disk"
    neighbor_count: int = 10
    dst_factor: float = 2.0
    node_count: int = 50
    area_side_m: float = 8.0
    require_connected: bool = True
    hop_limit: Optional[int] = None
    # experiment
    replications: int = 20000
    runs_per_topology: int = 1
    seed: int = 1
    cooperative: bool = True
    recovery: bool = True
    ideal_channel: bool = False

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications: must be >= 1")
        if self.runs_per_topology < 1:
            raise ValueError("runs_per_topology: must be >= 1")
        if self.topology_mode not in TOPOLOGY_MODES:
            raise ValueError(f"topology_mode: must be one of {TOPOLOGY_MODES}")
        if self.topology_mode == "per-hop-disk" and not 1 <= self.neighbor_count <= 20:
            raise ValueError("neighbor_count: must lie in [1, 20]")
        if self.node_count < 2:
            raise ValueError("node_count: must be >= 2")
        if self.reuleaux_side not in REULEAUX_SIDES:
            raise ValueError(f"reuleaux_side: must be one of {REULEAUX_SIDES}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed: must be an unsigned 64-bit integer")
        if self.packet_size < 1 or self.control_frame_octets < 1:
            raise ValueError("packet_size: frame sizes must be positive")
        if not self.range_m > 0:
            raise ValueError("range_m: must be positive")
        if self.turnaround_us < 0:
            raise ValueError("turnaround_us: must be non-negative")
        if not self.t_max_us > 0:
            raise ValueError("t_max_us: must be positive")
        if self.nsa < 2 or self.nsa % 2:
            raise ValueError("nsa: must be an even integer >= 2")
        if self.collision_window_us is not None and self.collision_window_us < 0:
            raise ValueError("collision_window_us: must be non-negative")
        if self.collision_retries < 0:
            raise ValueError("collision_retries: must be non-negative")
        m = self.constellation
        if m < 4 or m & (m - 1) or (m.bit_length() - 1) % 2:
            raise ValueError("constellation: must be a power of 4 (4, 16, 64, ...)")
        if self.path_loss_exponent < 2:
            raise ValueError("path_loss_exponent: must be >= 2")
        if self.metric_p is not None and self.metric_p < 2:
            raise ValueError("metric_p: must be >= 2")
        if not self.reference_distance_m > 0:
            raise ValueError("reference_distance_m: must be positive")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz: must be positive")
        for key in ("a_squared", "b"):
            v = getattr(self, key)
            if v is not None and not v > 0:
                raise ValueError(f"{key}: must be positive")
        if not self.dst_factor > 1:
            raise ValueError("dst_factor: must exceed 1")
        if not self.area_side_m > 0:
            raise ValueError("area_side_m: must be positive")
        if self.hop_limit is not None and self.hop_limit < 1:
            raise ValueError("hop_limit: must be >= 1")
        # Let the component types validate their own fields.
        self.channel_params()
        self.modulation()
        self.contention()
        self.metric_params()

    def replace(self, **kw) -> "SimConfig":
        return dataclasses.replace(self, **kw)

    def channel_params(self) -> ChannelParams:
        return ChannelParams(self.tx_power_dbm, self.noise_power_dbm,
                             self.noise_figure_db, self.carrier_freq_hz,
                             self.bandwidth_hz, self.path_loss_exponent,
                             self.reference_distance_m)

    def modulation(self) -> Modulation:
        return Modulation(self.constellation)

    def data_airtime_us(self) -> float:
        return airtime_us(self.packet_size, self.modulation(), self.bandwidth_hz)

    def ctrl_airtime_us(self) -> float:
        return airtime_us(self.control_frame_octets, self.modulation(), self.bandwidth_hz)

    def effective_collision_window(self) -> float:
        if self.collision_window_us is not None:
            return self.collision_window_us
        return self.ctrl_airtime_us() + self.turnaround_us

    def contention(self) -> ContentionConfig:
        return ContentionConfig(self.t_max_us, self.nsa,
                                self.effective_collision_window(), self.jitter)

    def ser_constants(self) -> SerConstants:
        override = None
        if self.a_squared is not None or self.b is not None:
            base = ser_constants(self.modulation())
            override = SerConstants(
                self.a_squared if self.a_squared is not None else base.a_squared,
                self.b if self.b is not None else base.b)
        return ser_constants(self.modulation(), override)

    def metric_params(self) -> RelayMetricParams:
        k = self.ser_constants()
        p = self.metric_p if self.metric_p is not None else self.path_loss_exponent
        return RelayMetricParams(k.a_squared, k.b, p)

    def protocol(self) -> ProtocolConfig:
        return ProtocolConfig(
            range_m=self.range_m,
            contention=self.contention(),
            metric=self.metric_params(),
            cooperative=self.cooperative,
            recovery=self.recovery,
            reuleaux_side=self.reuleaux_side,
            collision_retries=self.collision_retries,
            data_airtime=self.data_airtime_us(),
            ctrl_airtime=self.ctrl_airtime_us(),
        )

    def link(self) -> LinkModel:
        return LinkModel(self.channel_params(), self.modulation(), self.packet_size,
                         self.control_frame_octets, ideal=self.ideal_channel)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)
