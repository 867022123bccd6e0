import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

from coopgeo.channel import LinkModel
from coopgeo.protocol import HopMode, HopOutcome, run_route
from coopgeo.simcore import EventQueue, Topology, gen_area_topology, gen_per_hop_topology
from coopgeo.simcore.config import SimConfig
from coopgeo.simcore.experiment import (cycle_time, rng_for, run_replications,
                                        saturated_throughput)

# 1538 octets at 6 bits/symbol over 22 MHz, plus the 500 us contention period
# and two 20-octet control frames; frozen regression value in bits/s.
DIRECT_IDEAL_64QAM_THROUGHPUT = 20_656_898.65689866


class FixedSnrLink(LinkModel):
    """Every link sees the same instantaneous SNR."""

    def __init__(self, cfg, snr):
        super().__init__(cfg.channel_params(), cfg.modulation(), cfg.packet_size)
        self.fixed = snr

    def draw_snr(self, tx, rx, d, rng):
        return self.fixed


# ---------------------------------------------------------------- engine

def test_events_dequeue_in_time_order_with_fifo_ties():
    q = EventQueue()
    for t, k in [(5, "a"), (1, "b"), (5, "c"), (3, "d"), (1, "e")]:
        q.schedule(t, k)
    out = []
    q.run(lambda ev: out.append((ev.time, ev.kind)))
    assert out == [(1, "b"), (1, "e"), (3, "d"), (5, "a"), (5, "c")]
    assert q.now == 5 and len(q) == 0


def test_cancel_and_until():
    q = EventQueue()
    a = q.schedule(1, "a")
    q.schedule(2, "b")
    q.schedule(10, "c")
    EventQueue.cancel(a)
    assert len(q) == 2 and q.peek_time() == 2
    seen = []
    q.run(lambda ev: seen.append(ev.kind), until=5)
    assert seen == ["b"] and q.peek_time() == 10


def test_schedule_in_past_rejected():
    q = EventQueue(start=4.0)
    with pytest.raises(ValueError):
        q.schedule(3.9, "late")


def test_handler_may_schedule_follow_ups():
    q = EventQueue()
    q.schedule(0, "tick", 0)
    log = []

    def h(ev):
        log.append(ev.time)
        if ev.payload < 4:
            q.schedule(ev.time + 1.5, "tick", ev.payload + 1)

    q.run(h)
    assert log == [0, 1.5, 3.0, 4.5, 6.0]


@given(st.lists(st.floats(0, 1e6), max_size=50))
def test_pop_order_nondecreasing(times):
    q = EventQueue()
    for i, t in enumerate(times):
        q.schedule(t, "e", i)
    out = []
    while (ev := q.pop()) is not None:
        out.append((ev.time, ev.payload))
    assert [t for t, _ in out] == sorted(times)
    for (t1, i1), (t2, i2) in zip(out, out[1:]):
        if t1 == t2:
            assert i1 < i2


# ---------------------------------------------------------------- topologies

def test_topology_adjacency_symmetric_and_unit_disk():
    rng = np.random.default_rng(1)
    topo = gen_area_topology(40, 5.0, 1.2, rng)
    pos = np.array(topo.positions)
    for i in range(len(topo)):
        for j in range(len(topo)):
            if i == j:
                continue
            d = math.dist(pos[i], pos[j])
            assert (j in topo.neighbors(i)) == (d <= 1.2)
            assert (j in topo.neighbors(i)) == (i in topo.neighbors(j))


def test_topology_rejects_bad_range():
    with pytest.raises(ValueError):
        Topology([(0, 0)], 0.0)


def test_per_hop_single_neighbor():
    topo = gen_per_hop_topology(1, 1.5, np.random.default_rng(0))
    assert len(topo) == 3
    assert topo.position(0) == (0.0, 0.0)
    assert topo.position(1) == (3.0, 0.0)
    assert topo.neighbors(0) == [2]


def test_per_hop_neighbors_adjacent_to_source_not_destination():
    rng = np.random.default_rng(2)
    for n in (1, 5, 20):
        for _ in range(200):
            topo = gen_per_hop_topology(n, 1.5, rng)
            assert len(topo) == n + 2
            assert set(topo.neighbors(0)) == set(range(2, n + 2))


def test_per_hop_rejects_zero_neighbors():
    with pytest.raises(ValueError):
        gen_per_hop_topology(0, 1.0, np.random.default_rng(0))


def test_per_hop_positions_uniform_over_disk():
    # Equal-area cells: 10 annuli in r^2 by 8 sectors, 10^5 draws.
    rng = np.random.default_rng(3)
    pts = []
    while len(pts) < 100_000:
        topo = gen_per_hop_topology(20, 2.0, rng)
        pts.extend(topo.positions[2:])
    pts = np.array(pts[:100_000])
    r2 = (pts ** 2).sum(axis=1) / 4.0
    th = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * math.pi)
    ri = np.minimum((r2 * 10).astype(int), 9)
    ti = np.minimum((th / (2 * math.pi) * 8).astype(int), 7)
    counts = np.bincount(ri * 8 + ti, minlength=80)
    assert chisquare(counts).pvalue > 0.05


def test_area_two_nodes():
    topo = gen_area_topology(2, 10.0, 1.0, np.random.default_rng(0))
    assert len(topo) == 2 and {topo.src, topo.dst} == {0, 1}


def _bfs_path(topo, a, b):
    prev = {a: None}
    frontier = [a]
    while frontier:
        nxt = []
        for u in frontier:
            for v in topo.neighbors(u):
                if v not in prev:
                    prev[v] = u
                    nxt.append(v)
        frontier = nxt
    if b not in prev:
        return None
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def test_area_connectivity_required():
    rng = np.random.default_rng(4)
    for _ in range(100):
        topo = gen_area_topology(30, 8.0, 1.5, rng, require_connected=True)
        path = _bfs_path(topo, topo.src, topo.dst)
        assert path is not None
        for u, v in zip(path, path[1:]):
            assert math.dist(topo.position(u), topo.position(v)) <= 1.5


def test_area_src_dst_nearest_opposite_corners():
    rng = np.random.default_rng(5)
    topo = gen_area_topology(25, 6.0, 1.0, rng)
    pos = np.array(topo.positions)
    assert topo.src == int(np.argmin(np.hypot(pos[:, 0], pos[:, 1])))
    d_hi = np.hypot(pos[:, 0] - 6, pos[:, 1] - 6)
    d_hi[topo.src] = np.inf
    assert topo.dst == int(np.argmin(d_hi))


def test_area_neighbor_density():
    # Range small against the side so the border deficit stays near 3%.
    n, side, r = 100, 10.0, 0.3
    rng = np.random.default_rng(6)
    total = 0
    draws = 10_000
    for _ in range(draws):
        topo = gen_area_topology(n, side, r, rng)
        p = np.array(topo.positions)
        d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(-1)
        total += int((d2 <= r * r).sum()) - n
    mean = total / (draws * n)
    expected = n * math.pi * r * r / side ** 2
    assert abs(mean - expected) / expected < 0.05


# ---------------------------------------------------------------- replications

def test_noncooperative_ideal_single_neighbor_never_fails():
    cfg = SimConfig(neighbor_count=1, cooperative=False, ideal_channel=True,
                    replications=2000, seed=9)
    r = run_replications(cfg)
    assert r.per == 0.0 and r.tx_error_prob == 0.0 and r.collision_rate == 0.0
    assert r.replications_used == 2000 and r.hops == 2000


def test_same_seed_bit_identical_report():
    cfg = SimConfig(neighbor_count=6, replications=500, seed=77)
    # repr round-trips floats exactly and treats NaN fields as equal
    assert repr(run_replications(cfg)) == repr(run_replications(cfg))
    assert repr(run_replications(cfg)) != repr(run_replications(cfg.replace(seed=78)))


def test_area_mode_deterministic():
    cfg = SimConfig(topology_mode="multi-hop-area", node_count=25, area_side_m=5.0,
                    replications=20, seed=5)
    a, b = run_replications(cfg), run_replications(cfg)
    assert a == b
    assert 0.0 <= a.delivery_ratio <= 1.0


@pytest.mark.parametrize("snr", [250.0, 300.0, 400.0])
def test_fixed_snr_single_neighbor_per_matches_closed_form(snr):
    cfg = SimConfig(neighbor_count=1, cooperative=False, replications=20_000, seed=3)
    link = FixedSnrLink(cfg, snr)
    p = 1.0 - link.control_success(snr) * link.data_success(snr)
    r = run_replications(cfg, link)
    assert abs(r.per - p) <= 3 * math.sqrt(p * (1 - p) / r.hops)


def test_report_probabilities_in_unit_interval():
    for coop in (True, False):
        r = run_replications(SimConfig(neighbor_count=12, cooperative=coop,
                                       replications=400, seed=2))
        for v in (r.per, r.tx_error_prob, r.collision_rate):
            assert 0.0 <= v <= 1.0
        assert all(h >= 0 for h in r.ci95.values())
        assert r.saturated_throughput > 0


def test_ci_shrinks_with_doubled_replications():
    base = SimConfig(neighbor_count=8, replications=3000, seed=12)
    a = run_replications(base)
    b = run_replications(base.replace(replications=6000))
    for key in ("per", "saturated_throughput"):
        ratio = b.ci95[key] / a.ci95[key]
        assert abs(ratio - 1 / math.sqrt(2)) <= 0.2 / math.sqrt(2)


def test_per_nonincreasing_in_mean_snr():
    pers = []
    for tx in (15.0, 20.0, 25.0, 30.0, 35.0):
        r = run_replications(SimConfig(neighbor_count=8, tx_power_dbm=tx,
                                       replications=3000, seed=4))
        pers.append((r.per, r.ci95["per"]))
    for (p1, h1), (p2, h2) in zip(pers, pers[1:]):
        assert p2 <= p1 + max(h1, h2)
    assert pers[-1][0] < pers[0][0]


def test_substreams_distinct_and_reproducible():
    a = rng_for(1, 0).random(4)
    assert np.array_equal(a, rng_for(1, 0).random(4))
    assert not np.array_equal(a, rng_for(1, 1).random(4))
    assert not np.array_equal(a, rng_for(2, 0).random(4))


def test_route_event_log_deterministic():
    cfg = SimConfig(topology_mode="multi-hop-area", node_count=30, area_side_m=6.0)
    pcfg, link = cfg.protocol(), cfg.link()

    def log(seed):
        rng = rng_for(seed, 0)
        topo = gen_area_topology(30, 6.0, cfg.range_m, rng, require_connected=True)
        rep = run_route(topo, topo.src, topo.dst, pcfg, link, pcfg.metric, rng)
        return repr([e for h in rep.hops for e in h.events]).encode()

    assert log(8) == log(8)
    assert log(8) != log(9)


# ---------------------------------------------------------------- throughput

def _direct(decoded=True):
    return HopOutcome(forwarder=2, relay=None, mode=HopMode.GREEDY_DIRECT, events=[],
                      decoded=decoded, cbf_rounds=1)


def test_throughput_zero_successes():
    cfg = SimConfig()
    assert saturated_throughput([], cfg) == 0.0
    assert saturated_throughput([_direct(False)] * 5, cfg) == 0.0


def test_direct_ideal_64qam_throughput_frozen():
    cfg = SimConfig()
    bits = 1538 * 8
    cycle_s = 500e-6 + bits / (6 * 22e6) + 2 * 160 / (6 * 22e6)
    assert bits / cycle_s == pytest.approx(DIRECT_IDEAL_64QAM_THROUGHPUT, rel=1e-12)
    assert saturated_throughput([_direct()] * 10, cfg) == pytest.approx(
        DIRECT_IDEAL_64QAM_THROUGHPUT, rel=1e-12)


def test_direct_ideal_simulation_hits_frozen_throughput():
    # Twenty neighbors, no collision window and an ideal channel: every hop
    # is one greedy round that succeeds.
    cfg = SimConfig(neighbor_count=20, cooperative=False, ideal_channel=True,
                    collision_window_us=0.0, replications=300, seed=1)
    r = run_replications(cfg)
    assert r.per == 0.0
    assert r.saturated_throughput == pytest.approx(DIRECT_IDEAL_64QAM_THROUGHPUT,
                                                   rel=1e-12)


def test_cooperative_cycle_longer_when_relay_transmits():
    cfg = SimConfig()
    direct = _direct()
    coop = HopOutcome(forwarder=2, relay=3, mode=HopMode.GREEDY_COOPERATIVE, events=[],
                      decoded=True, cbf_rounds=1, cbr_time=120.0, relay_transmitted=True)
    assert cycle_time(coop, cfg) > cycle_time(direct, cfg)
    assert cycle_time(coop, cfg) - cycle_time(direct, cfg) == pytest.approx(
        120.0 + cfg.data_airtime_us())


def test_recovery_hop_charged_elapsed_time():
    o = HopOutcome(forwarder=2, relay=None, mode=HopMode.RECOVERY, events=[],
                   decoded=True, elapsed=812.5, recovery_time=300.0)
    assert cycle_time(o, SimConfig()) == 812.5


# ---------------------------------------------------------------- config

@pytest.mark.parametrize("key,value", [
    ("replications", 0), ("neighbor_count", 21), ("neighbor_count", 0),
    ("nsa", 3), ("t_max_us", 0.0), ("constellation", 8), ("seed", -1),
    ("topology_mode", "grid"), ("reuleaux_side", "left"), ("range_m", 0.0),
])
def test_config_validation_names_key(key, value):
    with pytest.raises(ValueError, match=key):
        SimConfig(**{key: value})


def test_config_derived_values():
    cfg = SimConfig()
    assert cfg.data_airtime_us() == pytest.approx(1538 * 8 / 132)
    assert cfg.ctrl_airtime_us() == pytest.approx(160 / 132)
    assert cfg.effective_collision_window() == pytest.approx(160 / 132 + 20.0)
    assert cfg.replace(collision_window_us=3.0).effective_collision_window() == 3.0
