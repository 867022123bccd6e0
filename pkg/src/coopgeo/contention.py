"""Contention timers for forwarder, planarization and relay elections."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple


class BidKind(enum.Enum):
    CTF = "CTF"
    CTR = "CTR"
    PROTEST = "PROTEST"


@dataclass(frozen=True)
class ContentionConfig:
    t_max: float = 500.0          # us
    nsa: int = 4
    collision_window: float = 0.0  # us
    jitter: bool = True

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.collision_window < 0:
            raise ValueError("collision_window must be non-negative")
        if self.nsa < 2 or self.nsa % 2:
            raise ValueError("nsa must be an even integer >= 2")

    @property
    def band(self) -> float:
        return self.t_max / self.nsa


@dataclass(frozen=True)
class Bid:
    node_id: int
    fire_time: float
    kind: BidKind = BidKind.CTF

    def __post_init__(self):
        if self.fire_time < 0:
            raise ValueError("fire_time must be non-negative")


class Outcome(enum.Enum):
    WINNER = "Winner"
    COLLISION = "Collision"
    SILENCE = "Silence"


@dataclass(frozen=True)
class ContentionResult:
    outcome: Outcome
    node_ids: Tuple[int, ...] = ()
    resolved_at: float = 0.0
    bids: Tuple[Bid, ...] = field(default=(), compare=False)

    @property
    def winner(self) -> Optional[int]:
        return self.node_ids[0] if self.outcome is Outcome.WINNER else None


def _jitter(width: float, cfg: ContentionConfig, rng) -> float:
    if not cfg.jitter or width <= 0:
        return 0.0
    return float(rng.uniform(0.0, width))


def t_cbf(csa: int, cfg: ContentionConfig, rng) -> float:
    """Forwarding timer: sub-area offset plus uniform jitter within the band."""
    if not 0 <= csa < cfg.nsa:
        raise ValueError(f"csa {csa} outside [0, {cfg.nsa})")
    band = cfg.band
    t = csa * band + _jitter(band, cfg, rng)
    # uniform(a, b) may return b under rounding; keep the band half-open.
    hi = (csa + 1) * band
    if t >= hi:
        t = hi - hi * 1e-12
    return t


def t_bfp(d_to_sender: float, range_: float, cfg: ContentionConfig, rng) -> float:
    """Recovery timer: nearest neighbors answer first, after t_max/2."""
    if not 0 < d_to_sender <= range_ * (1 + 1e-12):
        raise ValueError("distance to sender must lie in (0, range]")
    base = 0.5 * cfg.t_max * (1.0 + d_to_sender / range_)
    return base + _jitter(cfg.t_max / (4.0 * cfg.nsa), cfg, rng)


def t_cbr(mapped: float, cfg: ContentionConfig, rng) -> float:
    """Relay timer from the mapped metric value in [0, 1]."""
    if not 0.0 <= mapped <= 1.0:
        raise ValueError("mapped metric must lie in [0, 1]")
    return cfg.t_max * mapped + _jitter(2.0 * cfg.t_max / cfg.nsa, cfg, rng)


def resolve(bids: Sequence[Bid], cfg: ContentionConfig) -> ContentionResult:
    """Earliest bid wins unless another fires within the collision window."""
    if not bids:
        return ContentionResult(Outcome.SILENCE, (), 0.0, ())
    ordered = sorted(bids, key=lambda b: (b.fire_time, b.node_id))
    t1 = ordered[0].fire_time
    clash = [b for b in ordered if b.fire_time - t1 <= cfg.collision_window]
    if len(clash) > 1:
        return ContentionResult(Outcome.COLLISION,
                                tuple(b.node_id for b in clash), t1, tuple(ordered))
    return ContentionResult(Outcome.WINNER, (ordered[0].node_id,), t1,
                            tuple(ordered))
