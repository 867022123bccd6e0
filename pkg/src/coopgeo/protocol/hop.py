"""Per-hop handshake: DATA/CTF/SELECT forwarding, relay election,
cooperative combining and direct retransmission."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from coopgeo.channel import LinkModel, mrc_combine
from coopgeo.contention import (Bid, BidKind, ContentionResult, Outcome,
                                resolve, t_cbf, t_cbr)
from coopgeo.geometry import (EPS, Point2D, ProgressClass, RelayMetricParams,
                              classify_progress, csa_index, distance,
                              f_max_over_region, f_min_over_region, map_metric,
                              optimal_relay_point, relay_metric,
                              reuleaux_contains, reuleaux_region)
from coopgeo.protocol.config import ProtocolConfig
from coopgeo.protocol.frames import (DeliveryReport, Frame, FrameKind,
                                     HopMode, HopOutcome, RouteMode,
                                     RoutingFailure, RoutingState)
from coopgeo.protocol.planar import face_route_step, run_bfp


class Reception:
    """Channel realization of one DATA broadcast at every neighbor.

    Each receiver gets one SNR draw and, on first use, one uniform variate
    that decides payload decoding (so combining with a second copy is
    evaluated against the same variate).
    """

    def __init__(self, topology, sender: int, link: LinkModel, rng):
        self.sender = sender
        self.link = link
        self._rng = rng
        p = topology.position(sender)
        self.snr: dict[int, float] = {}
        self.header_ok: dict[int, bool] = {}
        self._u: dict[int, float] = {}
        for v in topology.neighbors(sender):
            s = link.draw_snr(sender, v, distance(p, topology.position(v)), rng)
            self.snr[v] = s
            self.header_ok[v] = link.ideal or rng.random() < link.control_success(s)

    def _uniform(self, v: int) -> float:
        u = self._u.get(v)
        if u is None:
            u = 0.0 if self.link.ideal else float(self._rng.random())
            self._u[v] = u
        return u

    def payload_ok(self, v: int, snr: Optional[float] = None) -> bool:
        s = self.snr[v] if snr is None else snr
        return self._uniform(v) < self.link.data_success(s)


@dataclass
class CbfRound:
    result: ContentionResult
    csa: dict
    reception: Reception
    progress: dict = field(default_factory=dict)


@dataclass
class CbrRound:
    result: ContentionResult
    eligible: list
    metric: dict
    mapped: dict


def run_cbf_round(topology, current: int, dst: Point2D, cfg: ProtocolConfig,
                  link: LinkModel, rng,
                  reception: Optional[Reception] = None) -> CbfRound:
    """One forwarder election. Bid times are relative to the end of DATA."""
    cc = cfg.contention
    rec = reception if reception is not None else Reception(topology, current, link, rng)
    c = topology.position(current)
    bids = []
    csa = {}
    progress = {}
    for v in topology.neighbors(current):
        if not rec.header_ok[v]:
            continue
        pv = topology.position(v)
        cls = classify_progress(c, dst, pv, cfg.range_m)
        progress[v] = cls
        if cls is ProgressClass.OUT_OF_RANGE:
            continue
        if cls is ProgressClass.NPA and cfg.recovery:
            continue
        k = csa_index(c, dst, pv, cfg.range_m, cc.nsa)
        csa[v] = k
        bids.append(Bid(v, t_cbf(k, cc, rng), BidKind.CTF))
    result = resolve(bids, cc)
    if result.outcome is Outcome.SILENCE:
        wait = 0.5 * cc.t_max if cfg.recovery else cc.t_max
        result = dataclasses.replace(result, resolved_at=wait)
    return CbfRound(result, csa, rec, progress)


def detect_local_optimum(result: ContentionResult, cfg: ProtocolConfig) -> bool:
    """True iff no forwarding bid was heard before t_max/2."""
    if result.outcome is Outcome.SILENCE:
        return True
    return not result.resolved_at < 0.5 * cfg.contention.t_max


def _regions(src: Point2D, fwd: Point2D, side: str):
    if side == "both":
        return [reuleaux_region(src, fwd, True), reuleaux_region(src, fwd, False)]
    return [reuleaux_region(src, fwd, side == "upper")]


def run_cbr_round(topology, src: int, forwarder: int, cfg: ProtocolConfig,
                  link: LinkModel, metric_params: Optional[RelayMetricParams],
                  rng, reception: Reception) -> CbrRound:
    """Relay election among overhearing nodes inside the Reuleaux region."""
    cc = cfg.contention
    params = metric_params or cfg.metric
    s = topology.position(src)
    f = topology.position(forwarder)
    regions = _regions(s, f, cfg.reuleaux_side)
    bounds = None
    bids, eligible, metric, mapped = [], [], {}, {}
    for v in topology.neighbors(src):
        if v == forwarder or not reception.header_ok[v]:
            continue
        pv = topology.position(v)
        if not any(reuleaux_contains(r, pv) for r in regions):
            continue
        if distance(pv, f) > cfg.range_m + EPS:
            continue
        if not reception.payload_ok(v):
            continue
        if bounds is None:
            if params.p == 2:
                f_star = relay_metric(optimal_relay_point(s, f, params), s, f, params)
            else:
                f_star = min(f_min_over_region(r, s, f, params) for r in regions)
            f_hi = max(f_max_over_region(r, s, f, params) for r in regions)
            bounds = (f_star, f_hi)
        fv = relay_metric(pv, s, f, params)
        m = map_metric(fv, *bounds)
        eligible.append(v)
        metric[v] = fv
        mapped[v] = m
        bids.append(Bid(v, t_cbr(m, cc, rng), BidKind.CTR))
    return CbrRound(resolve(bids, cc), eligible, metric, mapped)


def _log_collision(frames, bids, ids, t0, kind, rec=None):
    for b in bids:
        if b.node_id in ids:
            ok = rec.payload_ok(b.node_id) if (kind is FrameKind.CTF and rec) else None
            frames.append(Frame(kind, b.node_id, t0 + b.fire_time, decoded_ok=ok,
                                tags=("collided",)))


def run_hop(topology, current: int, dst: int, cfg: ProtocolConfig,
            link: LinkModel, metric_params: Optional[RelayMetricParams], rng,
            state: Optional[RoutingState] = None) -> HopOutcome:
    if current == dst:
        raise ValueError("current node is already the destination")
    cc = cfg.contention
    td, tc = cfg.data_airtime, cfg.ctrl_airtime
    state = state if state is not None else RoutingState()
    frames: list[Frame] = []
    out = HopOutcome(forwarder=None, relay=None, mode=None, events=frames,
                     sender=current, state=state)
    cpos = topology.position(current)
    dpos = topology.position(dst)
    if (state.mode is RouteMode.RECOVERY
            and distance(cpos, dpos) < state.recovery_entry_distance - EPS):
        state.leave_recovery()

    t = 0.0
    rec = None
    forwarder = None
    t_sel = 0.0
    if state.mode is RouteMode.GREEDY:
        for _ in range(cfg.collision_retries + 1):
            frames.append(Frame(FrameKind.DATA, current, t))
            t0 = t + td
            rnd = run_cbf_round(topology, current, dpos, cfg, link, rng)
            rec = rnd.reception
            res = rnd.result
            out.cbf_rounds += 1
            if res.outcome is Outcome.COLLISION:
                out.collision_count += 1
                _log_collision(frames, res.bids, res.node_ids, t0, FrameKind.CTF, rec)
                t = t0 + cc.t_max
                continue
            if res.outcome is Outcome.WINNER and not (
                    cfg.recovery and detect_local_optimum(res, cfg)):
                forwarder = res.winner
                t_ctf = t0 + res.resolved_at
                frames.append(Frame(FrameKind.CTF, forwarder, t_ctf,
                                    decoded_ok=rec.payload_ok(forwarder)))
                t_sel = t_ctf + tc
                break
            if not cfg.recovery:
                out.dead_end = True
                out.elapsed = t0 + cc.t_max
                return out
            state.enter_recovery(cpos, distance(cpos, dpos))
            t = t0
            break
        else:
            out.collided_out = True
            out.elapsed = t
            return out
    else:
        frames.append(Frame(FrameKind.DATA, current, t))
        rec = None
        t = td

    if state.mode is RouteMode.RECOVERY:
        if rec is None:
            rec = Reception(topology, current, link, rng)
        t_rec0 = t
        heard = [v for v in topology.neighbors(current) if rec.header_ok[v]]
        if dst in heard:
            forwarder = dst
            frames.append(Frame(FrameKind.CTF, dst, t, decoded_ok=rec.payload_ok(dst)))
            t_sel = t + tc
        else:
            planar = run_bfp(topology, current, cfg, rng, heard, t)
            frames.extend(planar.frames)
            try:
                forwarder = face_route_step(planar, state, state.entry_point, dpos)
            except RoutingFailure:
                out.dead_end = True
                out.elapsed = planar.finished_at
                out.recovery_time = planar.finished_at - t_rec0
                return out
            t_sel = planar.finished_at
        out.recovery_time = t_sel - t_rec0
        mode = HopMode.RECOVERY
    else:
        mode = HopMode.GREEDY_DIRECT

    frames.append(Frame(FrameKind.SELECT, current, t_sel, target=forwarder))
    out.forwarder = forwarder
    t = t_sel + tc
    ok = rec.payload_ok(forwarder)
    if not ok and cfg.cooperative:
        retx = True
        if mode is HopMode.GREEDY_DIRECT:
            cbr = run_cbr_round(topology, current, forwarder, cfg, link,
                                metric_params, rng, rec)
            res = cbr.result
            if res.outcome is Outcome.WINNER:
                retx = False
                r = res.winner
                t_ctr = t + res.resolved_at
                frames.append(Frame(FrameKind.CTR, r, t_ctr, target=forwarder))
                frames.append(Frame(FrameKind.DATA, r, t_ctr + tc, target=forwarder,
                                    tags=("relay",)))
                fpos = topology.position(forwarder)
                snr_rf = link.draw_snr(r, forwarder, distance(topology.position(r), fpos), rng)
                combined = mrc_combine(rec.snr[forwarder], snr_rf)
                ok = rec.payload_ok(forwarder, combined)
                out.relay = r
                out.relay_transmitted = True
                out.cbr_time = res.resolved_at + tc
                mode = HopMode.GREEDY_COOPERATIVE
                t = t_ctr + tc + td
            else:
                if res.outcome is Outcome.COLLISION:
                    out.collision_count += 1
                    _log_collision(frames, res.bids, res.node_ids, t, FrameKind.CTR)
                window = cc.t_max + 2.0 * cc.t_max / cc.nsa
                out.cbr_time = window
                t += window
                mode = HopMode.GREEDY_DIRECT_RETX
        if retx:
            frames.append(Frame(FrameKind.DATA, current, t, target=forwarder,
                                tags=("retx",)))
            fpos = topology.position(forwarder)
            snr2 = link.draw_snr(current, forwarder, distance(cpos, fpos), rng)
            ok = link.ideal or rng.random() < link.data_success(snr2)
            out.retransmitted = True
            t += td
    out.decoded = ok
    out.channel_failure = not ok
    out.mode = mode
    out.elapsed = t
    return out


def run_route(topology, src: int, dst: int, cfg: ProtocolConfig,
              link: LinkModel, metric_params: Optional[RelayMetricParams], rng,
              hop_limit: Optional[int] = None) -> DeliveryReport:
    """Chain hops from src until dst, a failed hop, or the hop limit."""
    if src == dst:
        raise ValueError("src and dst must differ")
    limit = hop_limit if hop_limit is not None else 4 * len(topology)
    state = RoutingState()
    hops = []
    cur = src
    while cur != dst and len(hops) < limit:
        o = run_hop(topology, cur, dst, cfg, link, metric_params, rng, state)
        hops.append(o)
        if not o.success:
            break
        cur = o.forwarder
    return DeliveryReport(
        hops=hops,
        delivered=cur == dst,
        forwarders=[h.forwarder for h in hops if h.success],
        relays=[h.relay for h in hops if h.relay is not None],
    )
