import math

import pytest

from mmwbeams.config import (ConfigError, ScenarioConfig, db_to_linear,
                             dbm_to_watt, linear_to_db, load_scenario,
                             scenario_fingerprint, serialize_scenario,
                             thermal_noise_watt)

FIG_ANALYSIS = """
cell_radius = 50
alpha_los = 2.5
alpha_nlos = 4.5
nakagami_los = 2
nakagami_nlos = 3
tx_power_dbm = 43
n_bs_beams = 64
n_ms_beams = 8
"""


def test_load_fig_analysis_scenario():
    cfg = load_scenario(FIG_ANALYSIS)
    assert cfg.bs_density == pytest.approx(1.0 / (math.pi * 50.0**2), rel=1e-12)
    assert cfg.cell_radius == pytest.approx(50.0, rel=1e-12)
    assert cfg.tx_power == pytest.approx(10 ** 1.3, rel=1e-12)
    assert cfg.n_bs_beams == 64 and cfg.n_ms_beams == 8
    assert cfg.alpha_los == 2.5 and cfg.alpha_nlos == 4.5


def test_pilot_reuse_zero_rejected():
    with pytest.raises(ConfigError, match="pilot_reuse"):
        load_scenario("pilot_reuse = 0")


def test_noise_power_from_bandwidth_and_nf():
    # thermal floor arithmetic done by hand: -174 + 10 log10(1e8) + 10 dBm
    cfg = load_scenario("cell_radius = 50\nbandwidth_hz = 1e8\nnoise_figure_db = 10")
    expected = 10 ** ((-174 + 10 * math.log10(1e8) + 10 - 30) / 10)
    assert cfg.noise_power == pytest.approx(expected, rel=1e-12)
    assert thermal_noise_watt(1e8, 10.0) == pytest.approx(expected, rel=1e-12)


def test_serialize_round_trip():
    cfg = load_scenario(FIG_ANALYSIS)
    again = load_scenario(serialize_scenario(cfg))
    assert again == cfg
    assert scenario_fingerprint(again) == scenario_fingerprint(cfg)


def test_fingerprint_stable_across_field_order():
    a = load_scenario("cell_radius = 50\nlos_range = 60")
    b = load_scenario("los_range = 60\ncell_radius = 50")
    assert scenario_fingerprint(a) == scenario_fingerprint(b)


def test_db_round_trips():
    for x in (0.001, 1.0, 19.95, 3.16e-12):
        assert db_to_linear(linear_to_db(x)) == pytest.approx(x, rel=1e-9)
    assert dbm_to_watt(43.0) == pytest.approx(19.952623, rel=1e-6)


def test_sections_and_comments_allowed():
    cfg = load_scenario("[network]\ncell_radius = 40  # meters\n")
    assert cfg.cell_radius == pytest.approx(40.0)


def test_overrides_win():
    cfg = load_scenario(FIG_ANALYSIS, overrides={"n_ms_beams": "2"})
    assert cfg.n_ms_beams == 2


@pytest.mark.parametrize("text,field", [
    ("cell_radius = -5", "cell_radius"),
    ("los_range = 0", "los_range"),
    ("alpha_los = 1.5", "alpha_los"),
    ("nakagami_los = 0", "nakagami_los"),
    ("nakagami_los = 2.5", "nakagami_los"),
    ("n_bs_beams = 1", "n_bs_beams"),
    ("n_ms_beams = 0", "n_ms_beams"),
    ("pilot_reuse = 1.2", "pilot_reuse"),
    ("epsilon1 = 1.0", "epsilon1"),
    ("sinr_threshold_min_db = 20\nsinr_threshold_max_db = 10", "sinr_threshold"),
    ("coherence_symbols = 0", "coherence_symbols"),
])
def test_invariant_violations_name_the_field(text, field):
    with pytest.raises(ConfigError, match=field):
        load_scenario(text)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown config key"):
        load_scenario("not_a_field = 3")


def test_both_radius_and_density_rejected():
    with pytest.raises(ConfigError):
        load_scenario("cell_radius = 50\nbs_density = 1e-4")


def test_threshold_max_unbounded():
    cfg = load_scenario("sinr_threshold_max = inf")
    assert math.isinf(cfg.sinr_threshold_max)


def test_window_defaults_to_20_cell_radii():
    cfg = ScenarioConfig()
    assert cfg.sim_window_radius == pytest.approx(20 * cfg.cell_radius)
    cfg2 = load_scenario("cell_radius = 30")
    assert cfg2.sim_window_radius == pytest.approx(600.0)
