"""Per-link small-scale state: Nakagami fading power, AoD/AoA, multipath.

Fading powers are normalized Gamma draws (shape N, scale 1/N, so E[h] = 1)
with the LOS/NLOS shape from the config.  Angles are uniform on [0, 2 pi):
the AoA in the MS frame and the AoD in each BS's own orientation frame.
One draw covers a full coherence block; the training and data phases of
the same block share it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry

TWO_PI = 2.0 * math.pi


@dataclass
class Link:
    """Single-path link between the typical user and one BS."""

    bs_index: int
    fading_gain: float   # h, E[h] = 1
    aod: float           # radians, BS-local frame
    aoa: float           # radians, MS frame
    path_gain: float     # rho, linear
    is_los: bool


@dataclass
class LinkSet:
    """Vectorized links of one drop (arrays indexed like the realization)."""

    fading_gain: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray
    path_gain: np.ndarray
    is_los: np.ndarray


@dataclass
class MultipathLink:
    """Up to 3 single-ray clusters; per-cluster (h, aod, aoa, rho)."""

    bs_index: int
    fading_gain: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray
    path_gain: np.ndarray
    is_los: bool


def sample_fading(nakagami_param, rng, size=None):
    """Normalized Gamma(shape N, scale 1/N) fading power draw(s)."""
    n = int(nakagami_param)
    if n < 1:
        raise ValueError("nakagami_param must be a positive integer")
    return rng.gamma(n, 1.0 / n, size=size)


def sample_link(bs, cfg, rng):
    """Realize the link of one BsPoint: fading, angles, path gain."""
    shape = cfg.nakagami_los if bs.is_los else cfg.nakagami_nlos
    return Link(
        bs_index=-1,
        fading_gain=float(sample_fading(shape, rng)),
        aod=float(TWO_PI * rng.random()),
        aoa=float(TWO_PI * rng.random()),
        path_gain=float(geometry.path_loss(bs.distance, bs.is_los, cfg)),
        is_los=bs.is_los,
    )


def sample_links(realization, cfg, rng):
    """Vectorized sample_link over every BS of a realization."""
    n = realization.n_bs
    shapes = np.where(realization.is_los, cfg.nakagami_los, cfg.nakagami_nlos)
    fading = rng.gamma(shapes, 1.0 / shapes)
    return LinkSet(
        fading_gain=fading,
        aod=TWO_PI * rng.random(n),
        aoa=TWO_PI * rng.random(n),
        path_gain=realization.path_gain.copy(),
        is_los=realization.is_los.copy(),
    )


def sample_multipath(bs, cfg, rng, n_clusters=3, power_fractions=None):
    """3-cluster link with independent per-cluster angles and fading.

    Total mean power is normalized to the single-path rho of the BS; the
    split is equal unless ``power_fractions`` overrides it.
    """
    if not 1 <= n_clusters <= 3:
        raise ValueError("cluster count must lie in 1..3")
    if power_fractions is None:
        fractions = np.full(n_clusters, 1.0 / n_clusters)
    else:
        fractions = np.asarray(power_fractions, dtype=float)
        if len(fractions) != n_clusters or abs(fractions.sum() - 1.0) > 1e-12:
            raise ValueError("power_fractions must have n_clusters entries summing to 1")
    rho = geometry.path_loss(bs.distance, bs.is_los, cfg)
    shape = cfg.nakagami_los if bs.is_los else cfg.nakagami_nlos
    # first cluster carries the LOS state of the link; extra clusters are
    # scattered rays and use the NLOS fading parameter
    shapes = np.full(n_clusters, cfg.nakagami_nlos)
    shapes[0] = shape
    return MultipathLink(
        bs_index=-1,
        fading_gain=rng.gamma(shapes, 1.0 / shapes),
        aod=TWO_PI * rng.random(n_clusters),
        aoa=TWO_PI * rng.random(n_clusters),
        path_gain=rho * fractions,
        is_los=bs.is_los,
    )


def received_power(link, tx_power, bs_gain, ms_gain):
    """P_T h rho D_BS D_MS, the single-path received power through beams."""
    return tx_power * link.fading_gain * link.path_gain * bs_gain * ms_gain
