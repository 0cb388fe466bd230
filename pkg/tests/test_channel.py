import math

import numpy as np
import pytest
from scipy import stats

from mmwbeams import geometry
from mmwbeams.channel import (received_power, sample_fading, sample_link,
                              sample_links, sample_multipath)
from mmwbeams.geometry import BsPoint


def test_fading_mean_normalized(rng):
    draws = sample_fading(2, rng, size=1_000_000)
    assert np.mean(draws) == pytest.approx(1.0, abs=0.003)


def test_fading_variance(rng):
    draws = sample_fading(3, rng, size=1_000_000)
    assert np.var(draws) == pytest.approx(1.0 / 3.0, abs=0.01)


def test_fading_shape_one_is_exponential(rng):
    draws = sample_fading(1, rng, size=100_000)
    d, _ = stats.kstest(draws, "expon")
    assert d < 0.01


def test_fading_rejects_bad_shape(rng):
    with pytest.raises(ValueError):
        sample_fading(0, rng)


def test_link_angles_uniform(cfg, rng):
    bs = BsPoint(np.array([30.0, 0.0]), 30.0, True, 0.0)
    aoa = np.array([sample_link(bs, cfg, rng).aoa for _ in range(20_000)])
    counts, _ = np.histogram(aoa, bins=16, range=(0, 2 * math.pi))
    assert stats.chisquare(counts).pvalue > 0.01


def test_link_fading_parameter_tracks_blockage(cfg, rng):
    los = BsPoint(np.array([30.0, 0.0]), 30.0, True, 0.0)
    nlos = BsPoint(np.array([30.0, 0.0]), 30.0, False, 0.0)
    h_los = np.array([sample_link(los, cfg, rng).fading_gain for _ in range(50_000)])
    h_nlos = np.array([sample_link(nlos, cfg, rng).fading_gain for _ in range(50_000)])
    assert np.var(h_los) == pytest.approx(1.0 / cfg.nakagami_los, abs=0.02)
    assert np.var(h_nlos) == pytest.approx(1.0 / cfg.nakagami_nlos, abs=0.02)


def test_link_path_gain_delegates_to_geometry(cfg, rng):
    bs = BsPoint(np.array([123.0, 0.0]), 123.0, False, 0.0)
    link = sample_link(bs, cfg, rng)
    assert link.path_gain == geometry.path_loss(123.0, False, cfg)


def test_vector_links_match_realization(cfg, rng):
    real = geometry.sample_realization(cfg, rng)
    links = sample_links(real, cfg, rng)
    assert np.array_equal(links.path_gain, real.path_gain)
    assert np.array_equal(links.is_los, real.is_los)
    assert links.fading_gain.shape == (real.n_bs,)
    assert np.all((links.aoa >= 0) & (links.aoa < 2 * math.pi))


def test_multipath_three_clusters_and_power_split(cfg, rng):
    bs = BsPoint(np.array([60.0, 0.0]), 60.0, True, 0.0)
    mp = sample_multipath(bs, cfg, rng)
    assert len(mp.path_gain) == 3
    rho = geometry.path_loss(60.0, True, cfg)
    assert np.sum(mp.path_gain) == pytest.approx(rho, rel=1e-12)


def test_multipath_single_cluster_matches_single_path(cfg, rng):
    bs = BsPoint(np.array([60.0, 0.0]), 60.0, True, 0.0)
    n = 20_000
    mp_power = np.array([
        sample_multipath(bs, cfg, rng, n_clusters=1).fading_gain[0]
        for _ in range(n)])
    link_power = np.array([sample_link(bs, cfg, rng).fading_gain for _ in range(n)])
    d = stats.ks_2samp(mp_power, link_power).pvalue
    assert d > 0.01


def test_multipath_fraction_validation(cfg, rng):
    bs = BsPoint(np.array([60.0, 0.0]), 60.0, True, 0.0)
    with pytest.raises(ValueError):
        sample_multipath(bs, cfg, rng, power_fractions=[0.5, 0.2, 0.2])


def test_received_power_assembly_identity(cfg, rng):
    bs = BsPoint(np.array([80.0, 0.0]), 80.0, True, 0.0)
    link = sample_link(bs, cfg, rng)
    g_bs, g_ms = 58.26, 8.0
    expected = cfg.tx_power * link.fading_gain * link.path_gain * g_bs * g_ms
    assert received_power(link, cfg.tx_power, g_bs, g_ms) == pytest.approx(
        expected, rel=1e-15)


def test_fading_independent_across_links(cfg, rng):
    n = 100_000
    a = sample_fading(2, rng, size=n)
    b = sample_fading(2, rng, size=n)
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 0.01
