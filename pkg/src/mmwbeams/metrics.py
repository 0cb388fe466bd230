"""Data-phase SINR, coverage curves, resource efficiency, effective rate.

The effective reliable rate applies the training-overhead efficiency eta
to the average of log2(1 + SINR capped at T_max), counted only when SINR
clears the minimum MCS threshold T_th.  It can be estimated per drop or
recovered from a coverage curve via

    R = eta [ 1/ln2 * int_{T_th}^{T_max} P_c(y) / (1+y) dy
              + log2(1 + T_th) P_c(T_th) ].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import sector_index
from .beam_training import Alignment, default_codebooks


class CurveKind(enum.Enum):
    SIM = "sim"
    THM1_UB = "thm1_ub"
    THM2_LB = "thm2_lb"
    NEAR_ORTH = "near_orth"


@dataclass
class CoverageCurve:
    """Sampled threshold -> coverage mapping with provenance."""

    thresholds: np.ndarray             # ascending, linear SINR
    coverage: np.ndarray               # P(SINR > T), in [0, 1]
    provenance: CurveKind
    alignment_stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.coverage = np.asarray(self.coverage, dtype=float)
        if np.any(np.diff(self.thresholds) <= 0):
            raise ValueError("threshold grid must be strictly ascending")
        if np.any((self.coverage < 0) | (self.coverage > 1)):
            raise ValueError("coverage values must lie in [0, 1]")

    def at(self, t):
        """Coverage at threshold t by linear interpolation on the grid."""
        return float(np.interp(t, self.thresholds, self.coverage))


@dataclass
class RateReport:
    eta: float
    rate: float              # bits/s/Hz
    pilot_count: float       # Pi_p
    training_symbols: float  # L_T


def data_sinr(decision, drop, cfg, codebooks=None, interferer_gain=None):
    """Data-phase SINR under a beam decision, same coherence block.

    Desired power P_T h0 rho0 D_BS(n*) D_MS(m*); the MS gain is zero when
    the chosen sector misses the serving AoA, which makes a MISS decision
    yield SINR = 0 exactly.  Interference sums every other BS whose AoA
    falls in the chosen MS sector, through its data-beam gain (the drop's
    fixed gains unless ``interferer_gain`` supplies redrawn ones).
    """
    cb_bs, cb_ms = codebooks or default_codebooks(cfg)
    s = drop.serving_index
    gains = drop.interferer_gain if interferer_gain is None else interferer_gain

    ell = np.arange(drop.n_bs) != s
    in_sector = sector_index(cb_ms, drop.links.aoa) == decision.ms_beam
    mask = ell & in_sector
    interference = float(np.sum(
        cfg.tx_power * drop.links.fading_gain[mask]
        * drop.links.path_gain[mask] * cb_ms.main_gain * gains[mask]))

    ms_gain = cb_ms.main_gain if in_sector[s] else cb_ms.side_gain
    n0 = sector_index(cb_bs, drop.links.aod[s])
    bs_gain = cb_bs.main_gain if decision.bs_beam == n0 else cb_bs.side_gain
    desired = (cfg.tx_power * drop.links.fading_gain[s]
               * drop.links.path_gain[s] * bs_gain * ms_gain)
    return float(desired / (interference + cfg.noise_power))


def coverage_from_samples(sinr, t_grid, provenance=CurveKind.SIM,
                          alignment_stats=None):
    """Empirical P(SINR > T) on an ascending grid, common drops across T."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("threshold grid must be strictly ascending")
    sinr = np.sort(np.asarray(sinr, dtype=float))
    n = len(sinr)
    cov = 1.0 - np.searchsorted(sinr, t_grid, side="right") / n
    return CoverageCurve(t_grid, cov, provenance, alignment_stats or {})


def coverage_estimate(procedure, t_grid, n_drops, cfg, seed=0):
    """Monte Carlo coverage of one association mode on a threshold grid.

    ``procedure`` is an association-mode name understood by the simulation
    engine ("perfect", "near-orth", "reuse", "hier").  Every threshold is
    evaluated on the same drops, so the returned curve is non-increasing
    exactly.  OBP/SBP/MISS frequencies ride along in ``alignment_stats``.
    """
    from . import sim_engine  # local import: the engine orchestrates us

    sinr, stats = sim_engine.simulate_sinr(cfg, [procedure], n_drops, seed)
    return coverage_from_samples(sinr[procedure], t_grid, CurveKind.SIM,
                                 stats[procedure])


def resource_efficiency(pilot_count, n_bs_beams, n_ms_beams, coherence_symbols):
    """eta = (1 - Pi_p N_BS N_MS / L_C)^+."""
    if min(pilot_count, n_bs_beams, n_ms_beams, coherence_symbols) <= 0:
        raise ValueError("all efficiency inputs must be positive")
    used = pilot_count * n_bs_beams * n_ms_beams
    return max(0.0, 1.0 - used / coherence_symbols)


def hierarchical_efficiency(wide_bs, wide_ms, reuse_stage1,
                            n_bs, n_ms, reuse_stage2, coherence_symbols):
    """Efficiency of the two-stage search; the refinement stage only sweeps
    the child beams of the stage-1 winner."""
    if n_bs % wide_bs or n_ms % wide_ms:
        raise ValueError("narrow codebook sizes must be multiples of wide sizes")
    cost = (wide_bs * wide_ms / reuse_stage1
            + (n_bs // wide_bs) * (n_ms // wide_ms) / reuse_stage2)
    return max(0.0, 1.0 - cost / coherence_symbols)


def effective_rate_from_coverage(curve, eta, t_th, t_max=math.inf,
                                 tail_cut=1e-4):
    """Effective rate from a coverage curve by trapezoidal quadrature.

    For unbounded T_max the integral is truncated at the top of the grid,
    which must reach coverage below ``tail_cut``; the neglected tail is
    then at most tail_cut * ln((1+y_stop)/(1+y_top)) ~ tail_cut per decade,
    far below the quadrature tolerance.
    """
    t = curve.thresholds
    pc = curve.coverage
    if t_th < t[0]:
        raise ValueError("curve does not cover T_th")
    if math.isinf(t_max):
        if pc[-1] > tail_cut:
            raise ValueError(
                f"coverage at the top of the grid is {pc[-1]:.2e} > {tail_cut:.0e}; "
                "extend the threshold grid to truncate the tail safely")
        t_stop = t[-1]
    else:
        if t_max > t[-1]:
            raise ValueError("curve does not cover T_max")
        t_stop = t_max

    lo, hi = t_th, t_stop
    inner = t[(t > lo) & (t < hi)]
    grid = np.concatenate(([lo], inner, [hi]))
    vals = np.interp(grid, t, pc) / (1.0 + grid)
    integral = float(np.trapezoid(vals, grid))
    return eta * (integral / math.log(2.0) + math.log2(1.0 + t_th) * curve.at(t_th))


def effective_rate_empirical(sinr, eta, t_th, t_max=math.inf):
    """eta * mean of log2(1 + min(SINR, T_max)) over drops clearing T_th."""
    sinr = np.asarray(sinr, dtype=float)
    capped = np.minimum(sinr, t_max)
    rate = np.log2(1.0 + capped) * (sinr >= t_th)
    return eta * float(np.mean(rate))
