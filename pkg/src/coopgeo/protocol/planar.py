"""Beaconless planarization (select and protest) and face traversal."""
from __future__ import annotations

import math
from typing import Iterable, Optional

from coopgeo import kernels
from coopgeo.contention import t_bfp
from coopgeo.geometry import EPS, Point2D, distance
from coopgeo.protocol.config import ProtocolConfig
from coopgeo.protocol.frames import (Frame, FrameKind, PlanarNeighborhood,
                                     RouteMode, RoutingFailure, RoutingState)
from coopgeo.simcore.engine import EventQueue

_TWO_PI = 2.0 * math.pi


def run_bfp(topology, center: int, cfg: ProtocolConfig, rng,
            participants: Optional[Iterable[int]] = None,
            t0: float = 0.0) -> PlanarNeighborhood:
    """Build the local planar (Gabriel) neighborhood of ``center``.

    Selection: every neighbor arms a distance-based timer; a neighbor that
    hears a CTF from a node inside its own proximity circle cancels and goes
    hidden. Hidden nodes keep listening and remember each responder whose
    circle contains them. Protest: after the selection window each hidden
    node protests those responders, unless someone already did.
    """
    cc = cfg.contention
    if participants is None:
        nbrs = list(topology.neighbors(center))
    else:
        nbrs = sorted(participants)
    c = topology.position(center)
    pos = {v: topology.position(v) for v in nbrs}
    n = len(nbrs)
    inside = kernels.proximity_matrix(c[0], c[1], [pos[v][0] for v in nbrs],
                                      [pos[v][1] for v in nbrs], EPS)
    dist = [max(distance(c, pos[v]), 1e-12) for v in nbrs]

    q = EventQueue(t0)
    timers = [q.schedule(t0 + t_bfp(min(dist[i], cfg.range_m), cfg.range_m, cc, rng),
                         "ctf", i) for i in range(n)]
    responded: list[int] = []
    has_responded = [False] * n
    hidden = [False] * n
    heard_violators: list[list[int]] = [[] for _ in range(n)]
    frames: list[Frame] = []

    def on_ctf(ev):
        i = ev.payload
        responded.append(i)
        has_responded[i] = True
        frames.append(Frame(FrameKind.CTF, nbrs[i], ev.time, decoded_ok=True,
                            tags=("bfp",)))
        row_i = inside[i]
        for j in range(n):
            if j == i or has_responded[j]:
                continue
            if row_i[j]:
                heard_violators[j].append(i)
            if not hidden[j] and inside[j][i]:
                hidden[j] = True
                EventQueue.cancel(timers[j])

    q.run(on_ctf)

    jitter_w = cc.t_max / (4.0 * cc.nsa) if cc.jitter else 0.0
    selection_end = t0 + cc.t_max + jitter_w
    protest_end = selection_end + 0.5 * cc.t_max + jitter_w

    pq = EventQueue(selection_end)
    for j in range(n):
        if hidden[j] and heard_violators[j]:
            dt = t_bfp(min(dist[j], cfg.range_m), cfg.range_m, cc, rng) - 0.5 * cc.t_max
            pq.schedule(selection_end + dt, "protest", j)
    protested: set[int] = set()
    protests: list[tuple[int, int]] = []

    def on_protest(ev):
        j = ev.payload
        k = 0
        for v in heard_violators[j]:
            if v in protested:
                continue
            protested.add(v)
            protests.append((nbrs[j], nbrs[v]))
            frames.append(Frame(FrameKind.PROTEST, nbrs[j], ev.time + k * cfg.ctrl_airtime,
                                target=nbrs[v]))
            k += 1

    pq.run(on_protest)

    resp_set = set(responded)
    retained = set()
    for i in responded:
        if i in protested:
            continue
        # The center knows every responder position from its CTF.
        if any(inside[i][u] for u in resp_set if u != i):
            continue
        retained.add(nbrs[i])
    positions = dict(pos)
    positions[center] = c
    return PlanarNeighborhood(
        center=center,
        edges=frozenset(retained),
        positions=positions,
        responders=tuple(nbrs[i] for i in responded),
        hidden=frozenset(nbrs[j] for j in range(n) if hidden[j]),
        protests=tuple(protests),
        frames=tuple(sorted(frames, key=lambda f: f.sent_at)),
        finished_at=max(protest_end, max((f.sent_at for f in frames), default=t0)),
    )


def _bearing(a: Point2D, b: Point2D) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0])


def _next_ccw(planar: PlanarNeighborhood, ref_angle: float) -> int:
    """First retained neighbor counterclockwise from ``ref_angle`` (exclusive;
    a neighbor exactly at the reference direction comes last)."""
    c = planar.positions[planar.center]
    best, best_a = None, math.inf
    for v in sorted(planar.edges):
        a = (_bearing(c, planar.positions[v]) - ref_angle) % _TWO_PI
        if a <= 1e-12:
            a = _TWO_PI
        if a < best_a:
            best, best_a = v, a
    return best


def _segment_crossing(p1, p2, p3, p4) -> Optional[Point2D]:
    """Intersection of segments p1p2 and p3p4, excluding the endpoints of
    p1p2; None when parallel or disjoint."""
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = p4[0] - p3[0], p4[1] - p3[1]
    den = rx * sy - ry * sx
    if abs(den) < 1e-15:
        return None
    qx, qy = p3[0] - p1[0], p3[1] - p1[1]
    t = (qx * sy - qy * sx) / den
    u = (qx * ry - qy * rx) / den
    if 1e-9 < t < 1 - 1e-9 and -1e-12 <= u <= 1 + 1e-12:
        return Point2D(p1[0] + t * rx, p1[1] + t * ry)
    return None


def face_route_step(planar: PlanarNeighborhood, state: RoutingState,
                    src_of_recovery: Point2D, dst: Point2D) -> int:
    """Next hop of a right-hand-rule face traversal.

    Faces are changed where the chosen edge crosses the segment from the
    recovery entry point to the destination closer to the destination than
    the previous change point. Updates ``state`` in place.
    """
    if state.mode is not RouteMode.RECOVERY:
        raise ValueError("face routing requires recovery mode")
    if not planar.edges:
        raise RoutingFailure("dead end: no planar edges")
    cur = planar.center
    c = planar.positions[cur]
    if state.face_point is None:
        state.face_point = src_of_recovery
    if state.prev_pos is None:
        nxt = _next_ccw(planar, _bearing(c, dst))
    else:
        nxt = _next_ccw(planar, _bearing(c, state.prev_pos))
    d_face = distance(state.face_point, dst)
    for _ in range(len(planar.edges) + 1):
        hit = _segment_crossing(c, planar.positions[nxt], src_of_recovery, dst)
        if hit is None or not distance(hit, dst) < d_face - EPS:
            break
        state.face_point = hit
        d_face = distance(hit, dst)
        nxt = _next_ccw(planar, _bearing(c, planar.positions[nxt]))
        state.first_edge = (cur, nxt)
    if state.first_edge is None:
        state.first_edge = (cur, nxt)
    edge = (cur, nxt)
    if edge in state.visited:
        raise RoutingFailure(f"face traversal loop on edge {edge}")
    state.visited.add(edge)
    state.prev = cur
    state.prev_pos = c
    return nxt
