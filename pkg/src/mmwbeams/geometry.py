"""BS point process, blockage states, path loss, and min-path-loss association.

The typical user sits at the origin; BSs are sampled on a finite disc
(default radius 20 R_c, an approximation of the infinite plane whose edge
effect is checked by the validation suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NoCoverageError(RuntimeError):
    """Association requested on an empty network."""


@dataclass
class BsPoint:
    """One BS seen from the typical user at the origin."""

    position: np.ndarray      # (2,) meters
    distance: float           # meters
    is_los: bool
    array_orientation: float  # radians in [0, 2 pi)


@dataclass
class NetworkRealization:
    """One sampled drop of the geometry: positions, LOS states, path gains.

    ``path_gain`` is the linear gain rho = C r^-alpha (larger = stronger),
    so the serving BS attains the maximum of ``path_gain``.
    """

    positions: np.ndarray     # (B, 2)
    distances: np.ndarray     # (B,)
    is_los: np.ndarray        # (B,) bool
    path_gain: np.ndarray     # (B,)
    orientations: np.ndarray  # (B,) BS array orientations, [0, 2 pi)
    serving_index: int
    window_radius: float

    @property
    def n_bs(self):
        return len(self.distances)

    def bs_point(self, i):
        return BsPoint(self.positions[i], float(self.distances[i]),
                       bool(self.is_los[i]), float(self.orientations[i]))


def sample_ppp(density, window_radius, rng):
    """Sample a homogeneous PPP on the disc of given radius around the origin.

    Returns an (N, 2) array; N ~ Poisson(density * pi * window_radius^2),
    points uniform on the disc (radius via sqrt of a uniform).
    """
    if density < 0:
        raise ValueError("density must be >= 0")
    if window_radius <= 0:
        raise ValueError("window_radius must be > 0")
    n = rng.poisson(density * math.pi * window_radius**2)
    r = window_radius * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def assign_los(distances, los_range, rng):
    """Independent Bernoulli LOS states with P(LOS at r) = exp(-r / mu)."""
    if los_range <= 0:
        raise ValueError("los_range must be > 0")
    distances = np.asarray(distances, dtype=float)
    return rng.random(distances.shape) < np.exp(-distances / los_range)


def path_loss(distance, is_los, cfg):
    """Linear path gain C_L r^-alpha_L (LOS) or C_N r^-alpha_N (NLOS)."""
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0.0):
        raise ValueError("distance must be strictly positive")
    is_los = np.asarray(is_los, dtype=bool)
    los_gain = cfg.intercept_los * distance**(-cfg.alpha_los)
    nlos_gain = cfg.intercept_nlos * distance**(-cfg.alpha_nlos)
    out = np.where(is_los, los_gain, nlos_gain)
    return out if out.ndim else float(out)


def associate(path_gain):
    """Index of the BS with the largest linear path gain (ties: lowest index)."""
    path_gain = np.asarray(path_gain)
    if path_gain.size == 0:
        raise NoCoverageError("network has no BS; typical user is uncovered")
    return int(np.argmax(path_gain))


def exclusion_radius_psi(x, kind, cfg):
    """Minimum distance for an interferer of the other state to match the
    serving path loss at distance x.

    kind "L": LOS-serving, psi_L(x) = (C_N / C_L)^(1/alpha_N) x^(alpha_L/alpha_N).
    kind "N": the role-swapped twin.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be strictly positive")
    if kind == "L":
        out = (cfg.intercept_nlos / cfg.intercept_los) ** (1.0 / cfg.alpha_nlos) \
            * x ** (cfg.alpha_los / cfg.alpha_nlos)
    elif kind == "N":
        out = (cfg.intercept_los / cfg.intercept_nlos) ** (1.0 / cfg.alpha_los) \
            * x ** (cfg.alpha_nlos / cfg.alpha_los)
    else:
        raise ValueError("kind must be 'L' or 'N'")
    return out if out.ndim else float(out)


def sample_realization(cfg, rng, window_radius=None):
    """Sample one non-empty network drop and associate the typical user.

    Drops with zero BSs in the window are resampled (the typical-user
    analysis presumes a serving BS exists); at the default window size the
    empty-window probability is ~e^-400.
    """
    window = cfg.sim_window_radius if window_radius is None else window_radius
    while True:
        positions = sample_ppp(cfg.bs_density, window, rng)
        if len(positions) > 0:
            break
    distances = np.hypot(positions[:, 0], positions[:, 1])
    # a BS exactly at the origin would have infinite gain; nudge it off
    distances = np.maximum(distances, 1e-9)
    is_los = assign_los(distances, cfg.los_range, rng)
    gains = path_loss(distances, is_los, cfg)
    orientations = 2.0 * math.pi * rng.random(len(distances))
    return NetworkRealization(
        positions=positions,
        distances=distances,
        is_los=is_los,
        path_gain=gains,
        orientations=orientations,
        serving_index=associate(gains),
        window_radius=window,
    )
