"""Protocol messages, per-hop records and routing state."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from coopgeo.geometry import Point2D


class FrameKind(enum.Enum):
    DATA = "DATA"
    CTF = "CTF"
    SELECT = "SELECT"
    CTR = "CTR"
    PROTEST = "PROTEST"


@dataclass(frozen=True)
class Frame:
    kind: FrameKind
    sender: int
    sent_at: float
    decoded_ok: Optional[bool] = None
    target: Optional[int] = None
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind is FrameKind.SELECT and self.target is None:
            raise ValueError("SELECT must name its target")
        if self.kind is FrameKind.CTF and self.decoded_ok is None:
            raise ValueError("CTF must carry decoded_ok")

    def shifted(self, dt: float) -> "Frame":
        return Frame(self.kind, self.sender, self.sent_at + dt, self.decoded_ok,
                     self.target, self.tags)

    def flags(self) -> str:
        parts = []
        if self.decoded_ok is not None:
            parts.append(f"decoded_ok={int(self.decoded_ok)}")
        if self.target is not None:
            parts.append(f"target={self.target}")
        parts.extend(self.tags)
        return ";".join(parts)


class HopMode(enum.Enum):
    GREEDY_DIRECT = "GreedyDirect"
    GREEDY_COOPERATIVE = "GreedyCooperative"
    GREEDY_DIRECT_RETX = "GreedyDirectRetx"
    RECOVERY = "Recovery"


class RouteMode(enum.Enum):
    GREEDY = "Greedy"
    RECOVERY = "Recovery"


@dataclass
class RoutingState:
    """Greedy/recovery mode plus face-traversal bookkeeping.

    In recovery, ``entry_point`` is where the episode began, ``face_point``
    the last point where the traversal changed faces, ``first_edge`` the
    first directed edge on the current face and ``prev`` the node the packet
    arrived from.
    """

    mode: RouteMode = RouteMode.GREEDY
    recovery_entry_distance: Optional[float] = None
    entry_point: Optional[Point2D] = None
    face_point: Optional[Point2D] = None
    first_edge: Optional[tuple[int, int]] = None
    prev: Optional[int] = None
    prev_pos: Optional[Point2D] = None
    visited: set = field(default_factory=set)

    def enter_recovery(self, where: Point2D, dist_to_dst: float) -> None:
        self.mode = RouteMode.RECOVERY
        self.recovery_entry_distance = dist_to_dst
        self.entry_point = where
        self.face_point = where
        self.first_edge = None
        self.prev = None
        self.prev_pos = None
        self.visited = set()

    def leave_recovery(self) -> None:
        self.mode = RouteMode.GREEDY
        self.recovery_entry_distance = None
        self.entry_point = None
        self.face_point = None
        self.first_edge = None
        self.prev = None
        self.prev_pos = None
        self.visited = set()


@dataclass
class PlanarNeighborhood:
    """Edges around ``center`` kept after the selection and protest phases."""

    center: int
    edges: frozenset
    positions: dict
    responders: tuple = ()
    hidden: frozenset = frozenset()
    protests: tuple = ()          # (protester, violator) pairs actually sent
    frames: tuple = ()
    finished_at: float = 0.0


@dataclass
class HopOutcome:
    forwarder: Optional[int]
    relay: Optional[int]
    mode: Optional[HopMode]
    events: list
    collision_count: int = 0
    channel_failure: bool = False
    elapsed: float = 0.0
    sender: Optional[int] = None
    collided_out: bool = False     # failed because every contention round collided
    dead_end: bool = False
    decoded: bool = False
    cbf_rounds: int = 0
    cbr_time: float = 0.0          # relay contention time actually spent
    retransmitted: bool = False
    relay_transmitted: bool = False
    recovery_time: float = 0.0
    state: Optional[RoutingState] = None

    @property
    def success(self) -> bool:
        return self.forwarder is not None and self.decoded

    @property
    def data_transmitted(self) -> bool:
        return self.forwarder is not None


class RoutingFailure(Exception):
    """Face traversal cannot continue (dead end or traversal loop)."""


@dataclass
class DeliveryReport:
    hops: list
    delivered: bool
    forwarders: list   # the forwarding path
    relays: list       # relays used along it

    @property
    def frames(self) -> list:
        out = []
        t = 0.0
        for h in self.hops:
            out.extend(f.shifted(t) for f in h.events)
            t += h.elapsed
        return out
