"""Monte-Carlo replication and the hop-level estimators."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from coopgeo.protocol import HopMode, HopOutcome, run_hop, run_route
from coopgeo.simcore.config import SimConfig
from coopgeo.simcore.topology import gen_area_topology, gen_per_hop_topology

log = logging.getLogger(__name__)

Z95 = 1.959963984540054


@dataclass
class MetricsReport:
    per: float
    tx_error_prob: float
    saturated_throughput: float     # bits/s
    collision_rate: float
    ci95: dict
    replications_used: int
    hops: int = 0
    delivery_ratio: float = float("nan")


def rng_for(seed: int, index: int) -> np.random.Generator:
    """Independent stream for replication ``index`` of experiment ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def cycle_time(o: HopOutcome, cfg: SimConfig) -> float:
    """Channel time (us) one hop occupies under saturation.

    Each forwarding contention round costs the full contention period plus
    the DATA broadcast; a selected forwarder adds CTF and SELECT; the relay
    phase adds the time spent contending plus the relay or retransmitted
    DATA. Recovery hops are charged their elapsed time.
    """
    if o.mode is HopMode.RECOVERY or o.recovery_time > 0:
        return o.elapsed
    td = cfg.data_airtime_us()
    tc = cfg.ctrl_airtime_us()
    c = o.cbf_rounds * (cfg.t_max_us + td)
    if o.forwarder is not None:
        c += 2.0 * tc + o.cbr_time
        if o.relay_transmitted:
            c += td
        if o.retransmitted:
            c += td
    return c


@dataclass
class _Tally:
    hops: int = 0
    failed: int = 0
    data_tx: int = 0
    data_fail: int = 0
    collided_hops: int = 0
    routes: int = 0
    delivered: int = 0
    s: float = 0.0
    c: float = 0.0
    ss: float = 0.0
    cc: float = 0.0
    sc: float = 0.0

    def add(self, o: HopOutcome, cyc: float) -> None:
        self.hops += 1
        ok = 1.0 if o.success else 0.0
        if not o.success:
            self.failed += 1
        if o.data_transmitted:
            self.data_tx += 1
            if not o.decoded:
                self.data_fail += 1
        if o.collision_count:
            self.collided_hops += 1
        self.s += ok
        self.c += cyc
        self.ss += ok * ok
        self.cc += cyc * cyc
        self.sc += ok * cyc


def _half_width(p: float, n: int) -> float:
    if n <= 0:
        return float("nan")
    return Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def saturated_throughput(outcomes: Iterable[HopOutcome], cfg: SimConfig) -> float:
    """payload bits x success fraction / mean cycle time, in bits/s."""
    t = _Tally()
    for o in outcomes:
        t.add(o, cycle_time(o, cfg))
    return _throughput(t, cfg)[0]


def _throughput(t: _Tally, cfg: SimConfig) -> tuple[float, float]:
    if t.hops == 0 or t.s == 0 or t.c <= 0:
        return 0.0, 0.0
    bits = 8.0 * cfg.packet_size
    n = t.hops
    mean_c = t.c / n
    theta = bits * t.s / t.c * 1e6
    # Delta method on the ratio estimator: residual r = bits*s - theta*c.
    k = theta / 1e6
    var_r = (bits * bits * t.ss - 2 * bits * k * t.sc + k * k * t.cc) / n
    var_r -= ((bits * t.s - k * t.c) / n) ** 2
    se = math.sqrt(max(var_r, 0.0) / n) / mean_c * 1e6
    return theta, Z95 * se


def _report(t: _Tally, cfg: SimConfig, replications: int) -> MetricsReport:
    per = t.failed / t.hops if t.hops else 0.0
    txe = t.data_fail / t.data_tx if t.data_tx else 0.0
    col = t.collided_hops / t.hops if t.hops else 0.0
    thr, thr_hw = _throughput(t, cfg)
    return MetricsReport(
        per=per,
        tx_error_prob=txe,
        saturated_throughput=thr,
        collision_rate=col,
        ci95={
            "per": _half_width(per, t.hops),
            "tx_error_prob": _half_width(txe, t.data_tx),
            "saturated_throughput": thr_hw,
            "collision_rate": _half_width(col, t.hops),
        },
        replications_used=replications,
        hops=t.hops,
        delivery_ratio=(t.delivered / t.routes) if t.routes else float("nan"),
    )


def run_replications(cfg: SimConfig, link=None) -> MetricsReport:
    """Run ``cfg.replications`` independent topologies and aggregate in
    replication-index order. ``link`` overrides the config's channel."""
    pcfg = cfg.protocol()
    link = link if link is not None else cfg.link()
    if cfg.reuleaux_side == "both":
        log.warning("reuleaux_side = both: relay candidates on opposite sides "
                    "may not hear each other")
    metric = pcfg.metric
    t = _Tally()
    for i in range(cfg.replications):
        rng = rng_for(cfg.seed, i)
        if cfg.topology_mode == "per-hop-disk":
            topo = gen_per_hop_topology(cfg.neighbor_count, cfg.range_m, rng,
                                        cfg.dst_factor)
            for _ in range(cfg.runs_per_topology):
                o = run_hop(topo, topo.src, topo.dst, pcfg, link, metric, rng)
                t.add(o, cycle_time(o, cfg))
        else:
            topo = gen_area_topology(cfg.node_count, cfg.area_side_m, cfg.range_m,
                                     rng, require_connected=cfg.require_connected)
            for _ in range(cfg.runs_per_topology):
                rep = run_route(topo, topo.src, topo.dst, pcfg, link, metric, rng,
                                cfg.hop_limit)
                t.routes += 1
                t.delivered += int(rep.delivered)
                for o in rep.hops:
                    t.add(o, cycle_time(o, cfg))
    log.debug("replications=%d hops=%d", cfg.replications, t.hops)
    return _report(t, cfg, cfg.replications)
