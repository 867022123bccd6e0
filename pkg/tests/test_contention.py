import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopgeo.contention import (Bid, BidKind, ContentionConfig, Outcome,
                                resolve, t_bfp, t_cbf, t_cbr)

CFG = ContentionConfig(t_max=500, nsa=4, collision_window=0)
NOJIT = ContentionConfig(t_max=500, nsa=4, collision_window=0, jitter=False)


@pytest.mark.parametrize("kw", [dict(t_max=0), dict(collision_window=-1), dict(nsa=3),
                                dict(nsa=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ContentionConfig(**kw)


def test_bid_rejects_negative_time():
    with pytest.raises(ValueError):
        Bid(1, -0.1)


def test_t_cbf_examples():
    rng = np.random.default_rng(0)
    assert t_cbf(0, NOJIT, rng) == 0.0
    for _ in range(1000):
        assert 125 <= t_cbf(1, CFG, rng) < 250
        assert 375 <= t_cbf(3, CFG, rng) < 500


def test_t_cbf_rejects_bad_csa():
    with pytest.raises(ValueError):
        t_cbf(4, CFG, np.random.default_rng(0))


def test_t_bfp_examples():
    rng = np.random.default_rng(0)
    assert t_bfp(50, 100, NOJIT, rng) == pytest.approx(375.0)
    assert t_bfp(1e-9, 100, NOJIT, rng) == pytest.approx(250.0)
    for _ in range(1000):
        d = rng.uniform(1e-6, 100)
        t = t_bfp(d, 100, CFG, rng)
        base = 250 * (1 + d / 100)
        assert 250 <= base <= t <= base + 500 / 16


def test_t_bfp_nearest_first_without_jitter():
    rng = np.random.default_rng(0)
    assert t_bfp(10, 100, NOJIT, rng) < t_bfp(20, 100, NOJIT, rng)


def test_t_bfp_rejects_out_of_range():
    with pytest.raises(ValueError):
        t_bfp(0.0, 1.0, CFG, np.random.default_rng(0))
    with pytest.raises(ValueError):
        t_bfp(1.5, 1.0, CFG, np.random.default_rng(0))


def test_t_cbr_examples():
    rng = np.random.default_rng(0)
    assert t_cbr(0.0, NOJIT, rng) == 0.0
    assert t_cbr(1.0, NOJIT, rng) == pytest.approx(500.0)
    for _ in range(1000):
        assert 250 <= t_cbr(0.5, CFG, rng) < 500
    with pytest.raises(ValueError):
        t_cbr(1.1, CFG, rng)


@given(st.floats(0, 1), st.floats(0, 1))
def test_t_cbr_order_preserving_without_jitter(a, b):
    rng = np.random.default_rng(0)
    if a < b:
        assert t_cbr(a, NOJIT, rng) < t_cbr(b, NOJIT, rng)


def test_resolve_examples():
    w20 = ContentionConfig(t_max=500, nsa=4, collision_window=20)
    assert resolve([], w20).outcome is Outcome.SILENCE
    r = resolve([Bid(1, 100), Bid(2, 300)], w20)
    assert r.outcome is Outcome.WINNER and r.winner == 1 and r.resolved_at == 100
    r = resolve([Bid(1, 100), Bid(2, 110)], w20)
    assert r.outcome is Outcome.COLLISION and set(r.node_ids) == {1, 2}
    assert r.winner is None


def test_resolve_boundary_is_inclusive():
    w = ContentionConfig(t_max=500, nsa=4, collision_window=10)
    assert resolve([Bid(1, 100), Bid(2, 110)], w).outcome is Outcome.COLLISION
    assert resolve([Bid(1, 100), Bid(2, 110.001)], w).outcome is Outcome.WINNER


def test_collision_includes_all_bids_in_window_only():
    w = ContentionConfig(t_max=500, nsa=4, collision_window=10)
    r = resolve([Bid(1, 100), Bid(2, 105), Bid(3, 109), Bid(4, 120)], w)
    assert r.outcome is Outcome.COLLISION and r.node_ids == (1, 2, 3)


bid_lists = st.lists(st.tuples(st.integers(0, 50), st.floats(0, 1000)), max_size=12,
                     unique_by=lambda t: t[0])


@given(bid_lists, st.floats(0, 50), st.randoms(use_true_random=False))
def test_resolve_permutation_invariant(pairs, window, rnd):
    cfg = ContentionConfig(t_max=500, nsa=4, collision_window=window)
    bids = [Bid(i, t, BidKind.CTR) for i, t in pairs]
    shuffled = list(bids)
    rnd.shuffle(shuffled)
    assert resolve(bids, cfg) == resolve(shuffled, cfg)


@given(st.lists(st.floats(0, 1000), min_size=1, max_size=12, unique=True))
def test_zero_window_distinct_times_always_win(times):
    r = resolve([Bid(i, t) for i, t in enumerate(times)], CFG)
    assert r.outcome is Outcome.WINNER
    assert r.resolved_at == min(times)


@given(st.integers(1, 10).map(lambda k: 2 * k), st.floats(1, 5000))
def test_t_cbf_partition(nsa, tmax):
    cfg = ContentionConfig(t_max=tmax, nsa=nsa)
    rng = np.random.default_rng(nsa)
    band = tmax / nsa
    for csa in range(nsa):
        for _ in range(20):
            t = t_cbf(csa, cfg, rng)
            assert csa * band <= t < (csa + 1) * band
            assert (t < tmax / 2) == (csa < nsa // 2)
