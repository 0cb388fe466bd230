"""Initial beam association: pilot thinning, control SNR, sweeps.

Model of one coherence block.  The typical user and its serving BS sweep
beam pairs while every other BS keeps transmitting data on a beam chosen
independently of the user; the gain of that fixed beam toward the user is
G_BS with probability 1/N_BS and g_BS otherwise, drawn once per drop and
(by default) kept for the data phase of the same block.  The MS combiner
has zero side lobes, so only BSs whose AoA falls inside the probed MS
sector contribute to a measurement.

With orthogonal pilots the receiver cancels non-co-pilot BSs perfectly,
so control-phase interference comes from the co-pilot set only, while the
data phase sees every BS.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .antenna import build_sectored, sector_index


class Alignment(enum.Enum):
    OBP = "OBP"    # both serving gains maximal
    SBP = "SBP"    # MS gain maximal, BS gain not
    MISS = "MISS"  # serving AoA not covered by the chosen MS beam


@dataclass(frozen=True)
class BeamDecision:
    """Outcome of an association procedure (0-based beam indices)."""

    bs_beam: int
    ms_beam: int
    alignment: Alignment


@dataclass
class PilotPartition:
    """Co-pilot / orthogonal-pilot split of the BSs of one drop."""

    copilot: np.ndarray  # (B,) bool, True = shares the serving BS pilot
    serving_index: int

    def __post_init__(self):
        if not self.copilot[self.serving_index]:
            raise ValueError("serving BS must belong to the co-pilot set")

    @property
    def copilot_indices(self):
        return set(np.flatnonzero(self.copilot).tolist())

    @property
    def orthogonal_indices(self):
        return set(np.flatnonzero(~self.copilot).tolist())


@dataclass
class Drop:
    """Everything one coherence block needs: geometry plus link state.

    ``interferer_gain`` holds each BS's fixed data-beam gain toward the
    user (the serving entry is present but ignored: the serving BS sweeps).
    """

    geo: "geometry.NetworkRealization"
    links: "channel.LinkSet"
    interferer_gain: np.ndarray

    @property
    def serving_index(self):
        return self.geo.serving_index

    @property
    def n_bs(self):
        return self.geo.n_bs


def default_codebooks(cfg):
    """(BS codebook, MS codebook) from the config; MS side lobes are zero."""
    cb_bs = build_sectored(cfg.n_bs_beams, cfg.front_to_back_constant)
    cb_ms = build_sectored(cfg.n_ms_beams, cfg.front_to_back_constant,
                           zero_side_lobes=True)
    return cb_bs, cb_ms


def wide_codebooks(cfg):
    cb_bs = build_sectored(cfg.wide_bs_beams, cfg.front_to_back_constant)
    cb_ms = build_sectored(cfg.wide_ms_beams, cfg.front_to_back_constant,
                           zero_side_lobes=True)
    return cb_bs, cb_ms


def sample_interferer_gains(n_bs, cfg, rng, codebook=None):
    """Fixed data-beam gain of each BS toward the user: G w.p. 1/N_BS."""
    cb = codebook if codebook is not None else default_codebooks(cfg)[0]
    hit = rng.random(n_bs) < 1.0 / cb.n_beams
    return np.where(hit, cb.main_gain, cb.side_gain)


def thin_copilot(drop, pilot_reuse, rng=None, uniforms=None):
    """Mark each non-serving BS co-pilot independently w.p. ``pilot_reuse``.

    The serving BS is always co-pilot.  ``uniforms`` may supply the
    underlying U(0,1) draws so several reuse factors can be evaluated on
    common randomness (copilot sets are then nested across factors).
    """
    if not 0.0 < pilot_reuse <= 1.0:
        raise ValueError("pilot_reuse must lie in (0, 1]")
    n = drop.n_bs
    if uniforms is None:
        if rng is None:
            raise ValueError("need rng or uniforms")
        uniforms = rng.random(n)
    copilot = uniforms < pilot_reuse
    copilot[drop.serving_index] = True
    return PilotPartition(copilot=copilot, serving_index=drop.serving_index)


def _sector_powers(drop, partition, cfg, cb_ms):
    """Co-pilot interference power per MS sector, serving BS excluded."""
    ell = np.arange(drop.n_bs) != drop.serving_index
    mask = partition.copilot & ell
    sectors = sector_index(cb_ms, drop.links.aoa[mask])
    power = (cfg.tx_power * drop.links.fading_gain[mask]
             * drop.links.path_gain[mask] * cb_ms.main_gain
             * drop.interferer_gain[mask])
    return np.bincount(sectors, weights=power,
                       minlength=cb_ms.n_beams).astype(float)


def _serving_terms(drop, cfg, cb_bs, cb_ms):
    """(m0, n0, covered, grazed): serving MS/BS sectors and the control-SNR
    contributions of the serving BS through its covering / non-covering beam."""
    s = drop.serving_index
    m0 = sector_index(cb_ms, drop.links.aoa[s])
    n0 = sector_index(cb_bs, drop.links.aod[s])
    base = (cfg.tx_power * drop.links.fading_gain[s]
            * drop.links.path_gain[s] * cb_ms.main_gain)
    return m0, n0, base * cb_bs.main_gain, base * cb_bs.side_gain


def control_snr(m, n, drop, partition, cfg, codebooks=None):
    """Control-level SNR of the pair (MS beam m, BS beam n), linear.

    Sum over co-pilot BSs with AoA inside MS sector m of
    P_T h rho G_MS D_BS, over the noise power.  Interferers contribute
    their fixed data-beam gain (independent of the swept n); the serving
    BS contributes through its own beam n, i.e. G_BS iff its AoD falls in
    sector n of its local frame.
    """
    cb_bs, cb_ms = codebooks or default_codebooks(cfg)
    if not 0 <= m < cb_ms.n_beams:
        raise IndexError(f"MS beam {m} out of range")
    if not 0 <= n < cb_bs.n_beams:
        raise IndexError(f"BS beam {n} out of range")
    powers = _sector_powers(drop, partition, cfg, cb_ms)
    total = powers[m]
    m0, n0, covered, grazed = _serving_terms(drop, cfg, cb_bs, cb_ms)
    if m == m0:
        total = total + (covered if n == n0 else grazed)
    return float(total / cfg.noise_power)


def _classify(m_star, n_star, m0, n0):
    if m_star != m0:
        return Alignment.MISS
    return Alignment.OBP if n_star == n0 else Alignment.SBP


def exhaustive_sweep(drop, partition, cfg, codebooks=None):
    """Max-SNR decision over all N_BS x N_MS pairs (ties: lowest m, then n).

    Equivalent to the argmax of ``control_snr`` over the full grid; the
    fixed interferer beams make every pair of a sector share its
    interference, which collapses the grid search to one pass.
    """
    cb_bs, cb_ms = codebooks or default_codebooks(cfg)
    powers = _sector_powers(drop, partition, cfg, cb_ms)
    m0, n0, covered, grazed = _serving_terms(drop, cfg, cb_bs, cb_ms)

    best_n = np.zeros(cb_ms.n_beams, dtype=int)
    values = powers.copy()
    if covered > grazed:
        values[m0] += covered
        best_n[m0] = n0
    else:
        # degenerate serving link (h0 rho0 = 0, covered == grazed): the
        # beam index is immaterial, tie-break keeps the lowest n
        values[m0] += grazed

    if not values.any():
        return BeamDecision(bs_beam=0, ms_beam=0, alignment=Alignment.MISS)

    m_star = int(np.argmax(values))  # argmax keeps the lowest index on ties
    n_star = int(best_n[m_star])
    return BeamDecision(bs_beam=n_star, ms_beam=m_star,
                        alignment=_classify(m_star, n_star, m0, n0))


def perfect_alignment(drop, cfg, codebooks=None):
    """Oracle decision: the pair whose sectors cover the serving link."""
    cb_bs, cb_ms = codebooks or default_codebooks(cfg)
    s = drop.serving_index
    m0 = sector_index(cb_ms, drop.links.aoa[s])
    n0 = sector_index(cb_bs, drop.links.aod[s])
    return BeamDecision(bs_beam=n0, ms_beam=m0, alignment=Alignment.OBP)


def _stage_sweep(drop, partition, cfg, cb_bs, cb_ms, ms_beams, bs_beams):
    """One exhaustive stage restricted to the given beam-index subsets."""
    powers = _sector_powers(drop, partition, cfg, cb_ms)
    m0, n0, covered, grazed = _serving_terms(drop, cfg, cb_bs, cb_ms)

    best_m, best_n, best_v = ms_beams[0], bs_beams[0], -1.0
    for m in ms_beams:
        v = powers[m]
        n_pick = bs_beams[0]
        if m == m0:
            if n0 in bs_beams and covered > grazed:
                v += covered
                n_pick = n0
            else:
                v += grazed
        if v > best_v:
            best_m, best_n, best_v = m, n_pick, v
    if best_v <= 0.0:
        return BeamDecision(bs_beam=int(bs_beams[0]), ms_beam=int(ms_beams[0]),
                            alignment=Alignment.MISS), m0, n0
    return BeamDecision(bs_beam=int(best_n), ms_beam=int(best_m),
                        alignment=_classify(best_m, best_n, m0, n0)), m0, n0


def hierarchical_sweep(drop, partition_stage1, partition_stage2,
                       wide_cbs, narrow_cbs, cfg):
    """Two-stage search: wide-beam sweep, then refinement among children.

    The narrow codebook sizes must be integer multiples of the wide sizes
    and both stages must share the reference orientation, so each wide
    sector tiles exactly into its child narrow sectors.  Stage 2 sweeps
    only the children of the stage-1 winner; the returned decision indexes
    the narrow codebooks.
    """
    wide_bs, wide_ms = wide_cbs
    narrow_bs, narrow_ms = narrow_cbs
    if narrow_bs.n_beams % wide_bs.n_beams or narrow_ms.n_beams % wide_ms.n_beams:
        raise ValueError("narrow codebook sizes must be multiples of wide sizes")
    if wide_bs.reference != narrow_bs.reference or wide_ms.reference != narrow_ms.reference:
        raise ValueError("wide and narrow codebooks must share the reference")

    stage1, _, _ = _stage_sweep(
        drop, partition_stage1, cfg, wide_bs, wide_ms,
        ms_beams=list(range(wide_ms.n_beams)),
        bs_beams=list(range(wide_bs.n_beams)),
    )

    c_bs = narrow_bs.n_beams // wide_bs.n_beams
    c_ms = narrow_ms.n_beams // wide_ms.n_beams
    bs_children = list(range(stage1.bs_beam * c_bs, (stage1.bs_beam + 1) * c_bs))
    ms_children = list(range(stage1.ms_beam * c_ms, (stage1.ms_beam + 1) * c_ms))

    stage2, _, _ = _stage_sweep(
        drop, partition_stage2, cfg, narrow_bs, narrow_ms,
        ms_beams=ms_children, bs_beams=bs_children,
    )
    return stage2


def hierarchical_training_symbols(cfg):
    """Training cost of the two-stage search in symbols:
    wide pairs times stage-1 pilots plus refinement pairs times pilots."""
    stage1 = cfg.wide_bs_beams * cfg.wide_ms_beams / cfg.pilot_reuse_stage1
    stage2 = ((cfg.n_bs_beams // cfg.wide_bs_beams)
              * (cfg.n_ms_beams // cfg.wide_ms_beams) / cfg.pilot_reuse)
    return stage1 + stage2
