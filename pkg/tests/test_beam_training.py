import math

import numpy as np
import pytest

from mmwbeams import sim_engine
from mmwbeams.antenna import sector_index
from mmwbeams.beam_training import (Alignment, control_snr, default_codebooks,
                                    exhaustive_sweep, hierarchical_sweep,
                                    hierarchical_training_symbols,
                                    perfect_alignment, thin_copilot,
                                    wide_codebooks)
from mmwbeams.config import ScenarioConfig
from mmwbeams.metrics import data_sinr
from tests.conftest import build_drop

TWO_PI = 2 * math.pi


def _simple_drop(cfg, aoa, aod0, fading=None, gains=None, distances=None,
                 is_los=None):
    n = len(aoa)
    distances = [50.0 + 10 * i for i in range(n)] if distances is None else distances
    is_los = [True] * n if is_los is None else is_los
    fading = [1.0] * n if fading is None else fading
    gains = [1.0] * n if gains is None else gains
    aod = [aod0] + [0.0] * (n - 1)
    return build_drop(cfg, distances, is_los, fading, aoa, aod, gains, serving=0)


def test_thin_copilot_full_reuse(cfg, rng):
    drop = _simple_drop(cfg, aoa=[0.1, 0.2, 0.3], aod0=0.0)
    part = thin_copilot(drop, 1.0, rng)
    assert part.copilot.all()
    assert part.copilot_indices == {0, 1, 2}
    assert part.orthogonal_indices == set()


def test_thin_copilot_vanishing_reuse(cfg, rng):
    drop = build_drop(cfg, np.full(10_000, 70.0), [True] * 10_000,
                      [1.0] * 10_000, np.zeros(10_000), np.zeros(10_000),
                      [1.0] * 10_000, serving=0)
    only_serving = 0
    for _ in range(50):
        part = thin_copilot(drop, 1e-6, rng)
        only_serving += part.copilot.sum() == 1
    # expected extras 1e-6 * 1e4 = 0.01 per trial -> nearly always serving-only
    assert only_serving >= 45


def test_thin_copilot_fraction(cfg, rng):
    n = 100_000
    drop = build_drop(cfg, np.full(n, 70.0), [True] * n, [1.0] * n,
                      np.zeros(n), np.zeros(n), [1.0] * n, serving=0)
    part = thin_copilot(drop, 0.5, rng)
    assert part.copilot.mean() == pytest.approx(0.5, abs=0.01)
    assert part.copilot[0]


def test_thin_copilot_rejects_bad_factor(cfg, rng):
    drop = _simple_drop(cfg, aoa=[0.1], aod0=0.0)
    with pytest.raises(ValueError):
        thin_copilot(drop, 0.0, rng)


def test_control_snr_single_bs_matched(cfg, rng):
    cb_bs, cb_ms = default_codebooks(cfg)
    h0, r0 = 1.7, 80.0
    drop = build_drop(cfg, [r0], [True], [h0], [0.3], [0.2], [1.0], serving=0)
    part = thin_copilot(drop, 1.0, rng)
    m0 = sector_index(cb_ms, 0.3)
    n0 = sector_index(cb_bs, 0.2)
    rho = drop.links.path_gain[0]
    expected = cfg.tx_power * h0 * rho * cb_bs.main_gain * cb_ms.main_gain / cfg.noise_power
    assert control_snr(m0, n0, drop, part, cfg) == pytest.approx(expected, rel=1e-12)
    # MS beam not covering the AoA sees nothing (zero MS side lobes)
    assert control_snr((m0 + 4) % 8, n0, drop, part, cfg) == 0.0


def test_control_snr_three_bs_spreadsheet(cfg, rng):
    """Hand-evaluated sum over a fixed 3-BS network."""
    cb_bs, cb_ms = default_codebooks(cfg)
    # serving in MS sector 0 (aoa 0.3), interferers in sectors 0 and 3
    aoa = [0.3, 0.5, 3.0]
    h = [1.3, 0.6, 2.2]
    dist = [60.0, 90.0, 40.0]
    los = [True, False, True]
    dgain = [0.0, cb_bs.main_gain, cb_bs.side_gain]
    drop = build_drop(cfg, dist, los, h, aoa, [0.2, 0, 0], dgain, serving=0)
    part = thin_copilot(drop, 1.0, rng)
    rho = drop.links.path_gain
    n0 = sector_index(cb_bs, 0.2)

    # sector 0, serving beam: serving main-lobe term + co-sector interferer
    expected = (cfg.tx_power * h[0] * rho[0] * cb_bs.main_gain * cb_ms.main_gain
                + cfg.tx_power * h[1] * rho[1] * dgain[1] * cb_ms.main_gain)
    assert control_snr(0, n0, drop, part, cfg) == pytest.approx(
        expected / cfg.noise_power, rel=1e-12)
    # sector 0, other beam: serving drops to its side lobe
    expected_side = (cfg.tx_power * h[0] * rho[0] * cb_bs.side_gain * cb_ms.main_gain
                     + cfg.tx_power * h[1] * rho[1] * dgain[1] * cb_ms.main_gain)
    assert control_snr(0, (n0 + 1) % 64, drop, part, cfg) == pytest.approx(
        expected_side / cfg.noise_power, rel=1e-12)
    # sector 3 sees only the third BS through its fixed beam
    expected_3 = cfg.tx_power * h[2] * rho[2] * dgain[2] * cb_ms.main_gain
    assert control_snr(3, 0, drop, part, cfg) == pytest.approx(
        expected_3 / cfg.noise_power, rel=1e-12)


def test_exhaustive_matches_brute_force(cfg, rng):
    """The one-pass sweep equals the argmax of control_snr over all pairs."""
    small = cfg.replace(n_bs_beams=8, n_ms_beams=4)
    cbs = default_codebooks(small)
    for trial in range(30):
        n = int(rng.integers(2, 12))
        drop = build_drop(
            small,
            distances=rng.uniform(20, 400, n),
            is_los=rng.random(n) < 0.5,
            fading=rng.gamma(2.0, 0.5, n),
            aoa=rng.uniform(0, TWO_PI, n),
            aod=rng.uniform(0, TWO_PI, n),
            interferer_gain=np.where(rng.random(n) < 1 / 8,
                                     cbs[0].main_gain, cbs[0].side_gain),
        )
        part = thin_copilot(drop, 1.0, rng)
        decision = exhaustive_sweep(drop, part, small, cbs)
        grid = np.array([[control_snr(m, nb, drop, part, small, cbs)
                          for nb in range(8)] for m in range(4)])
        m_star, n_star = np.unravel_index(np.argmax(grid), grid.shape)
        assert (decision.ms_beam, decision.bs_beam) == (m_star, n_star)


def test_exhaustive_near_orthogonal_is_obp(cfg, rng):
    drop = _simple_drop(cfg, aoa=[1.0, 2.0, 4.0], aod0=0.7)
    part = thin_copilot(drop, 1e-9, uniforms=np.array([0.5, 0.9, 0.9]))
    assert part.copilot_indices == {0}
    decision = exhaustive_sweep(drop, part, cfg)
    assert decision.alignment == Alignment.OBP


def test_exhaustive_dominant_interferer_causes_miss(cfg, rng):
    """A co-pilot interferer louder than the serving link steals the sweep."""
    cb_bs, cb_ms = default_codebooks(cfg)
    drop = build_drop(
        cfg,
        distances=[100.0, 20.0],          # interferer much closer
        is_los=[True, True],
        fading=[1.0, 3.0],
        aoa=[0.3, 3.0],                   # different MS sectors
        aod=[0.2, 0.0],
        interferer_gain=[0.0, cb_bs.main_gain],  # its beam points at us
        serving=0,
    )
    part = thin_copilot(drop, 1.0, rng)
    decision = exhaustive_sweep(drop, part, cfg)
    assert decision.alignment == Alignment.MISS
    assert decision.ms_beam == sector_index(cb_ms, 3.0)
    assert data_sinr(decision, drop, cfg) == 0.0


def test_exhaustive_tie_breaks_lowest_pair(cfg):
    """Equal sector powers resolve to the lowest (m, n)."""
    cb_bs, cb_ms = default_codebooks(cfg)
    v = 1e-9  # identical received powers in sectors 0 and 2
    drop = build_drop(
        cfg,
        distances=[50.0, 50.0],
        is_los=[True, True],
        fading=[1.0, 1.0],
        aoa=[2.0, 2.0 + TWO_PI / 8 * 2],  # sectors 2 and 4
        aod=[0.0, 0.0],
        interferer_gain=[1.0, 1.0],
        serving=0,
    )
    # zero the serving contribution so both candidate sectors tie at power 0
    drop.links.fading_gain[0] = 0.0
    drop.links.fading_gain[1] = 0.0
    decision = exhaustive_sweep(drop, thin_copilot(drop, 1.0, uniforms=np.zeros(2)), cfg)
    assert (decision.ms_beam, decision.bs_beam) == (0, 0)
    assert decision.alignment == Alignment.MISS


def test_perfect_alignment_properties(cfg, rng):
    cbs = default_codebooks(cfg)
    for _ in range(100):
        drop, u1, _, gains = sim_engine._sample_block(cfg, rng, cbs)
        perfect = perfect_alignment(drop, cfg, cbs)
        assert perfect.alignment == Alignment.OBP
        part = thin_copilot(drop, 1.0, uniforms=u1)
        swept = exhaustive_sweep(drop, part, cfg, cbs)
        s_perfect = data_sinr(perfect, drop, cfg, cbs, interferer_gain=gains)
        s_swept = data_sinr(swept, drop, cfg, cbs, interferer_gain=gains)
        assert s_perfect >= s_swept
        if swept.alignment == Alignment.OBP:
            assert (swept.ms_beam, swept.bs_beam) == (perfect.ms_beam, perfect.bs_beam)
            assert s_perfect == s_swept


def test_no_sbp_under_full_reuse(cfg, rng):
    cbs = default_codebooks(cfg)
    for _ in range(2_000):
        drop, u1, _, _ = sim_engine._sample_block(cfg, rng, cbs)
        part = thin_copilot(drop, 1.0, uniforms=u1)
        assert exhaustive_sweep(drop, part, cfg, cbs).alignment != Alignment.SBP


def test_obp_probability_rises_as_reuse_shrinks(cfg):
    deltas = [1.0, 0.3, 0.1, 0.01]
    sinr, stats = sim_engine.simulate_specs(
        cfg, [("reuse", d) for d in deltas], 4_000, seed=5)
    p_obp = [stats[("reuse", d)]["p_obp"] for d in deltas]
    assert all(b >= a - 0.01 for a, b in zip(p_obp, p_obp[1:]))
    assert p_obp[-1] >= 0.99


def test_sweep_invariant_to_power_scaling(cfg, rng):
    cbs = default_codebooks(cfg)
    boosted = cfg.replace(tx_power=cfg.tx_power * 250.0)
    for _ in range(50):
        drop, u1, _, _ = sim_engine._sample_block(cfg, rng, cbs)
        part = thin_copilot(drop, 1.0, uniforms=u1)
        a = exhaustive_sweep(drop, part, cfg, cbs)
        b = exhaustive_sweep(drop, part, boosted, cbs)
        assert (a.ms_beam, a.bs_beam, a.alignment) == (b.ms_beam, b.bs_beam, b.alignment)


def test_hierarchical_single_bs_equals_exhaustive(cfg, rng):
    drop = _simple_drop(cfg, aoa=[1.0], aod0=5.1)
    part = thin_copilot(drop, 1.0, rng)
    narrow = default_codebooks(cfg)
    wide = wide_codebooks(cfg)
    hier = hierarchical_sweep(drop, part, part, wide, narrow, cfg)
    flat = exhaustive_sweep(drop, part, cfg, narrow)
    assert (hier.ms_beam, hier.bs_beam, hier.alignment) == \
        (flat.ms_beam, flat.bs_beam, flat.alignment)


def test_hierarchical_degenerate_equals_exhaustive(cfg, rng):
    cfg2 = cfg.replace(wide_bs_beams=cfg.n_bs_beams, wide_ms_beams=cfg.n_ms_beams)
    narrow = default_codebooks(cfg2)
    for _ in range(40):
        drop, u1, u2, _ = sim_engine._sample_block(cfg2, rng, narrow)
        p1 = thin_copilot(drop, 1.0, uniforms=u1)
        hier = hierarchical_sweep(drop, p1, p1, narrow, narrow, cfg2)
        flat = exhaustive_sweep(drop, p1, cfg2, narrow)
        assert (hier.ms_beam, hier.bs_beam) == (flat.ms_beam, flat.bs_beam)


def test_hierarchical_rejects_nondivisible(cfg, rng):
    drop = _simple_drop(cfg, aoa=[1.0], aod0=0.0)
    part = thin_copilot(drop, 1.0, rng)
    bad = cfg.replace(wide_bs_beams=3)  # 64 % 3 != 0
    with pytest.raises(ValueError):
        hierarchical_sweep(drop, part, part, wide_codebooks(bad),
                           default_codebooks(bad), bad)


def test_hierarchical_training_cost(cfg):
    # stage-1 pairs / stage-1 reuse + refinement pairs / stage-2 reuse
    cfg2 = cfg.replace(wide_bs_beams=8, wide_ms_beams=8, pilot_reuse=1.0,
                       pilot_reuse_stage1=1.0)
    assert hierarchical_training_symbols(cfg2) == pytest.approx(64 + 8)
    cfg3 = cfg2.replace(pilot_reuse=0.5, pilot_reuse_stage1=0.25)
    assert hierarchical_training_symbols(cfg3) == pytest.approx(64 / 0.25 + 8 / 0.5)
