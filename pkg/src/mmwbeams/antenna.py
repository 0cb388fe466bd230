"""Beam codebooks and beamforming gains.

Two antenna models:

* sectored patterns (analysis grade): constant main-lobe gain G over a
  beamwidth Theta = 2 pi / n_beams, constant side-lobe gain g elsewhere,
  with G and g tied to the beamwidth through a front-to-back ratio
  gamma = 2 pi / (C0 (2 pi - Theta)) so that power is conserved:
  G Theta / 2 pi + g (2 pi - Theta) / 2 pi = 1;

* half-wavelength ULAs with steering-vector beams (robustness grade,
  true side lobes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SectoredCodebook:
    """n_beams sectored beams with disjoint main lobes covering [0, 2 pi).

    Beam n (0-based) covers [reference + n Theta, reference + (n+1) Theta),
    half-open so the union tiles the circle exactly.
    """

    n_beams: int
    beamwidth: float
    main_gain: float
    side_gain: float
    reference: float = 0.0

    @property
    def sector_start(self):
        return np.mod(self.reference + np.arange(self.n_beams) * self.beamwidth, TWO_PI)


def sectored_gains(beamwidth, front_to_back_constant):
    """(G, g) of the gain/beamwidth model for a main lobe of width Theta."""
    if not 0.0 < beamwidth < TWO_PI:
        raise ValueError("beamwidth must lie in (0, 2 pi) for the gamma model")
    gamma = TWO_PI / (front_to_back_constant * (TWO_PI - beamwidth))
    main = (TWO_PI / beamwidth) * gamma / (gamma + 1.0)
    side = (TWO_PI / (TWO_PI - beamwidth)) / (gamma + 1.0)
    return main, side


def build_sectored(n_beams, front_to_back_constant, reference_orientation=0.0,
                   zero_side_lobes=False):
    """Build a sectored codebook.

    ``zero_side_lobes`` selects the MS variant with g = 0; power
    conservation then forces G = 2 pi / Theta.  The BS variant (default)
    uses the gamma front-to-back model and needs n_beams >= 2.
    """
    if zero_side_lobes:
        if n_beams < 1:
            raise ValueError("n_beams must be >= 1")
        beamwidth = TWO_PI / n_beams
        main, side = TWO_PI / beamwidth, 0.0
    else:
        if n_beams < 2:
            raise ValueError("n_beams must be >= 2 in sectored mode")
        beamwidth = TWO_PI / n_beams
        main, side = sectored_gains(beamwidth, front_to_back_constant)
    return SectoredCodebook(
        n_beams=n_beams,
        beamwidth=beamwidth,
        main_gain=main,
        side_gain=side,
        reference=reference_orientation % TWO_PI,
    )


def sector_index(codebook, angle):
    """Index of the beam whose main lobe covers ``angle`` (vectorized)."""
    rel = np.mod(np.asarray(angle, dtype=float) - codebook.reference, TWO_PI)
    idx = np.minimum((rel / codebook.beamwidth).astype(int), codebook.n_beams - 1)
    return idx if idx.ndim else int(idx)


def effective_gain(codebook, beam_index, angle):
    """Gain of beam ``beam_index`` toward ``angle``: G in-sector, g outside."""
    if not 0 <= beam_index < codebook.n_beams:
        raise IndexError(f"beam index {beam_index} out of range")
    in_sector = sector_index(codebook, angle) == beam_index
    out = np.where(in_sector, codebook.main_gain, codebook.side_gain)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class UlaCodebook:
    """Beamsteering codebook for a half-wavelength ULA.

    Beams steer at angles whose sines tile [-1, 1) uniformly (the DFT
    grid), which covers one hemisphere; the 2D ring geometry sees the
    array's natural front-back symmetric pattern.
    """

    n_antennas: int
    steering_angles: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)  # (n_beams, n_antennas), unit rows

    @property
    def n_beams(self):
        return len(self.steering_angles)


def ula_response(angle, n_antennas):
    """Unit-norm steering vector: a_k(phi) = exp(i pi k sin phi) / sqrt(N)."""
    angle = np.asarray(angle, dtype=float)
    k = np.arange(n_antennas)
    phase = np.pi * np.multiply.outer(np.sin(angle), k)
    return np.exp(1j * phase) / math.sqrt(n_antennas)


def build_ula(n_antennas, n_beams=None):
    if n_beams is None:
        n_beams = n_antennas
    sines = -1.0 + (2.0 * np.arange(n_beams) + 1.0) / n_beams
    angles = np.arcsin(sines)
    weights = ula_response(angles, n_antennas)
    return UlaCodebook(n_antennas=n_antennas, steering_angles=angles,
                       weights=weights)


def ula_gain(weights, angle, n_antennas=None):
    """Beamforming gain |w^H e(phi)|^2 of unit-norm weights against the
    physical (unnormalized) array response e_k = exp(i pi k sin phi).

    Matched steering (w = a(phi)) attains the array gain N; the average
    over uniform angles is ~1 for any unit-norm w (energy conservation).
    """
    weights = np.asarray(weights)
    if n_antennas is None:
        n_antennas = weights.shape[-1]
    e = ula_response(angle, n_antennas) * math.sqrt(n_antennas)
    amp = e @ np.conj(weights)
    out = np.abs(amp) ** 2
    return out if out.ndim else float(out)
