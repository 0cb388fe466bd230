import math

import numpy as np
import pytest

from mmwbeams import channel, geometry
from mmwbeams.beam_training import Drop
from mmwbeams.config import ScenarioConfig


@pytest.fixture
def cfg():
    """Default scenario: R_c = 50 m, mu = 50 m, 64x8 beams, full reuse."""
    return ScenarioConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def build_drop(cfg, distances, is_los, fading, aoa, aod, interferer_gain,
               serving=None):
    """Hand-built drop: BSs on the x-axis at given distances, explicit link
    state, so control-SNR and SINR values can be checked against closed
    forms."""
    distances = np.asarray(distances, dtype=float)
    n = len(distances)
    is_los = np.asarray(is_los, dtype=bool)
    gains = geometry.path_loss(distances, is_los, cfg)
    geo = geometry.NetworkRealization(
        positions=np.column_stack((distances, np.zeros(n))),
        distances=distances,
        is_los=is_los,
        path_gain=gains,
        orientations=np.zeros(n),
        serving_index=geometry.associate(gains) if serving is None else serving,
        window_radius=cfg.sim_window_radius,
    )
    links = channel.LinkSet(
        fading_gain=np.asarray(fading, dtype=float),
        aod=np.asarray(aod, dtype=float),
        aoa=np.asarray(aoa, dtype=float),
        path_gain=gains,
        is_los=is_los,
    )
    return Drop(geo=geo, links=links,
                interferer_gain=np.asarray(interferer_gain, dtype=float))


@pytest.fixture
def drop_builder():
    return build_drop
