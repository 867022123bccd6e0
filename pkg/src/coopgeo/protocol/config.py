from __future__ import annotations

from dataclasses import dataclass, field

from coopgeo.contention import ContentionConfig
from coopgeo.geometry import RelayMetricParams

REULEAUX_SIDES = ("upper", "lower", "both")


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything the per-hop state machine needs besides the channel."""

    range_m: float
    contention: ContentionConfig = field(default_factory=ContentionConfig)
    metric: RelayMetricParams = field(default_factory=lambda: RelayMetricParams(1.0, 1.0))
    cooperative: bool = True
    recovery: bool = True
    reuleaux_side: str = "upper"
    collision_retries: int = 1
    data_airtime: float = 0.0   # us
    ctrl_airtime: float = 0.0   # us

    def __post_init__(self):
        if not self.range_m > 0:
            raise ValueError("range must be positive")
        if self.reuleaux_side not in REULEAUX_SIDES:
            raise ValueError(f"reuleaux_side must be one of {REULEAUX_SIDES}")
        if self.collision_retries < 0:
            raise ValueError("collision_retries must be >= 0")
