"""Closed-form coverage machinery evaluated numerically.

Association probabilities and serving-distance densities of the
min-path-loss cell association under exponential blockage, and the
full-pilot-reuse coverage bounds built from alternating Alzer sums over
interference Laplace transforms.  Interferers live in the PPP thinned to
the chosen MS sector (density lambda * Theta_MS / 2 pi, the zero MS side
lobe makes other sectors invisible) and transmit through a fixed random
beam: main-lobe gain with probability 1/N_BS, side-lobe gain otherwise.

All the radial integrals to infinity are truncated adaptively; the
serving-distance integrals are cut at quad.x_max_factor cell radii where
the density has decayed to e^-100 territory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad as _scipy_quad
from scipy.special import gammaln

from .antenna import sectored_gains
from .geometry import exclusion_radius_psi

TWO_PI = 2.0 * math.pi


class QuadratureError(RuntimeError):
    """Quadrature or alternating-sum non-convergence."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Knobs of the numerical evaluation (all pure accuracy/effort trades)."""

    rel_tol: float = 1e-9        # radial-panel tail stop, relative
    alzer_tol: float = 1e-3      # successive-N stop for the Theorem-1 sum
    alzer_cap: int = 10          # max Alzer order before warning
    x_max_factor: float = 12.0   # serving-distance truncation, in cell radii
    r_max_factor: float = 20.0   # minimum radial reach of interference integrals
    x_nodes: int = 10            # Gauss-Legendre nodes per serving-distance panel
    g_nodes: int = 8             # nodes per fading panel
    w_per_decade: int = 16       # interference-table resolution
    t_nodes: int = 12            # nodes per radial panel

    def refined(self, factor=2):
        """A spec with every resolution knob tightened by ``factor``."""
        return QuadratureSpec(
            rel_tol=self.rel_tol / factor,
            alzer_tol=self.alzer_tol,
            alzer_cap=self.alzer_cap,
            x_max_factor=self.x_max_factor,
            r_max_factor=self.r_max_factor,
            x_nodes=self.x_nodes * factor,
            g_nodes=self.g_nodes * factor,
            w_per_decade=self.w_per_decade * factor,
            t_nodes=self.t_nodes * factor,
        )


DEFAULT_QUAD = QuadratureSpec()


def gamma_pdf(g, n):
    """Density of the normalized Gamma(shape n, scale 1/n) fading power."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("g must be >= 0")
    n = int(n)
    logpdf = n * math.log(n) + (n - 1) * np.log(np.where(g > 0, g, 1.0)) \
        - n * g - gammaln(n)
    out = np.where(g > 0, np.exp(logpdf), 1.0 if n == 1 else 0.0)
    return out if out.ndim else float(out)


def alzer_a(n):
    """Alzer constant a = n (n!)^(-1/n), via log-gamma for stability."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * math.exp(-gammaln(n + 1) / n)


def alzer_f(n, x):
    """F(n, x) = 1 - (1 + x)^-n, computed accurately for small x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    out = -np.expm1(-n * np.log1p(x))
    return out if out.ndim else float(out)


# --- blockage integrals (closed forms for p(t) = exp(-t/mu)) ---------------

def _int_p(x, mu):
    """int_0^x t exp(-t/mu) dt."""
    x = np.asarray(x, dtype=float)
    return mu * mu * (1.0 - np.exp(-x / mu) * (1.0 + x / mu))


def _int_np(x, mu):
    """int_0^x t (1 - exp(-t/mu)) dt."""
    return np.asarray(x, dtype=float) ** 2 / 2.0 - _int_p(x, mu)


def association_intensity(x, kind, cfg):
    """Unnormalized serving-distance density of a kind-"L"/"N" association.

    2 pi lambda x p(x) exp(-2 pi lambda int_0^x p t dt)
                       exp(-2 pi lambda int_0^psi (1-p) t dt)
    for LOS (p(x) -> 1-p(x) and the roles swapped for NLOS); integrates to
    the association probability A_kind.
    """
    lam, mu = cfg.bs_density, cfg.los_range
    x = np.asarray(x, dtype=float)
    p = np.exp(-x / mu)
    if kind == "L":
        own = p
        void_own = _int_p(x, mu)
        void_other = _int_np(exclusion_radius_psi(x, "L", cfg), mu)
    elif kind == "N":
        own = 1.0 - p
        void_own = _int_np(x, mu)
        void_other = _int_p(exclusion_radius_psi(x, "N", cfg), mu)
    else:
        raise ValueError("kind must be 'L' or 'N'")
    out = TWO_PI * lam * x * own * np.exp(-TWO_PI * lam * (void_own + void_other))
    return out if out.ndim else float(out)


def _association_prob(kind, cfg):
    # piecewise quadrature: the integrand spans many orders of magnitude,
    # one global quad call accumulates roundoff on degenerate blockage limits
    edges = np.array([0, .5, 1, 2, 3, 4.5, 6, 8, 10, 14, 20, 40]) * cfg.cell_radius
    val, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        part, part_err = _scipy_quad(
            lambda x: association_intensity(x, kind, cfg), lo, hi, limit=200)
        val += part
        err += part_err
    if not math.isfinite(val) or err > 1e-6:
        raise QuadratureError(f"association probability quadrature error {err:g}")
    return val


def association_probs(cfg):
    """(A_L, A_N): probabilities of LOS / NLOS association.

    Computed independently (not renormalized); warns when the pair misses
    A_L + A_N = 1 beyond quadrature tolerance.
    """
    a_l = _association_prob("L", cfg)
    a_n = _association_prob("N", cfg)
    if abs(a_l + a_n - 1.0) > 1e-6:
        warnings.warn(f"A_L + A_N = {a_l + a_n:.8f} deviates from 1")
    return a_l, a_n


def serving_distance_pdf(x, kind, cfg):
    """Conditional serving-distance density given a kind-"L"/"N" association."""
    a = _association_prob(kind, cfg)
    if a <= 0.0:
        raise ZeroDivisionError(f"association probability A_{kind} is zero; "
                                "conditional density undefined")
    return association_intensity(x, kind, cfg) / a


# --- interference exponents -------------------------------------------------

def _tau(kind, t_threshold, g, x, cfg):
    """tau_kind(g, x) = P_T G_BS G_MS g x^-alpha C / T - sigma^2."""
    g_bs, _ = sectored_gains(cfg.bs_beamwidth, cfg.front_to_back_constant)
    g_ms = float(cfg.n_ms_beams)
    c, alpha = ((cfg.intercept_los, cfg.alpha_los) if kind == "L"
                else (cfg.intercept_nlos, cfg.alpha_nlos))
    desired = cfg.tx_power * g_bs * g_ms * np.asarray(g) * np.asarray(x) ** (-alpha) * c
    return desired / t_threshold - cfg.noise_power


_LEGS = {
    # j -> (serving kind, interferer path kind, lower limit from x)
    1: ("L", "L", "own"),
    2: ("L", "N", "psi"),
    3: ("N", "N", "own"),
    4: ("N", "L", "psi"),
}


class _PathParams:
    def __init__(self, cfg, path):
        if path == "L":
            self.n, self.alpha, self.c = cfg.nakagami_los, cfg.alpha_los, cfg.intercept_los
            self.weight = lambda t, mu=cfg.los_range: np.exp(-t / mu)
        else:
            self.n, self.alpha, self.c = cfg.nakagami_nlos, cfg.alpha_nlos, cfg.intercept_nlos
            self.weight = lambda t, mu=cfg.los_range: -np.expm1(-t / mu)


def _beam_mixture(cfg):
    """(b_k, G_k) pairs of the random interferer-beam gain model."""
    g_bs, g_side = sectored_gains(cfg.bs_beamwidth, cfg.front_to_back_constant)
    g_ms = float(cfg.n_ms_beams)
    n = cfg.n_bs_beams
    return ((1.0 / n, g_bs * g_ms), ((n - 1.0) / n, g_side * g_ms))


def _radial_integral(func_of_t, r_min, cfg, quad):
    """int_{r_min}^inf f(t) dt by geometric Gauss-Legendre panels.

    ``func_of_t`` maps a t-node vector to an (n_rows, n_t) matrix; each row
    is integrated until its tail panel falls below quad.rel_tol of its
    running total and the mandatory radial reach is covered.
    """
    nodes, weights = np.polynomial.legendre.leggauss(quad.t_nodes)
    reach = r_min + quad.r_max_factor * cfg.cell_radius
    lo = r_min
    hi = max(2.0 * r_min, r_min + 0.25 * cfg.cell_radius)
    total = None
    for _ in range(140):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        t = mid + half * nodes
        rows = func_of_t(t)
        part = rows @ weights * half
        total = part if total is None else total + part
        scale = np.maximum(np.abs(total), 1e-290)
        if hi > reach and np.all(np.abs(part) <= quad.rel_tol * scale):
            break
        lo, hi = hi, hi * 2.0
    return total


def _upsilon_from_s(s, path, r_min, cfg, quad, density_scale):
    """2 pi lambda_eff sum_k b_k int F(N, s C P G_k t^-alpha / N) t w(t) dt."""
    p = _PathParams(cfg, path)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    coeff = np.array([s * p.c * cfg.tx_power * gk / p.n
                      for _, gk in _beam_mixture(cfg)])  # (2, n_s)
    bks = np.array([bk for bk, _ in _beam_mixture(cfg)])

    def rows(t):
        base = t ** (-p.alpha)
        z = coeff[..., None] * base  # (2, n_s, n_t)
        f = -np.expm1(-p.n * np.log1p(z))
        return np.tensordot(bks, f * (t * p.weight(t)), axes=(0, 0))

    integral = _radial_integral(rows, r_min, cfg, quad)
    return density_scale * integral


def _density_scale(cfg):
    """2 pi lambda thinned to the chosen MS sector (Theta_MS / 2 pi)."""
    return TWO_PI * cfg.bs_density / cfg.n_ms_beams


def upsilon(j, n, t_threshold, g, x, cfg, quad=DEFAULT_QUAD, alzer_order=None):
    """One interference exponent of the coverage bounds, j in 1..4.

    j = 1, 2 are the LOS / NLOS interference legs of a LOS-serving user
    (lower limits x and psi_L(x)); j = 3, 4 the NLOS-serving twins.
    Returns +inf when tau(g, x) <= 0, where the enclosing coverage
    integrand is zero by convention.  ``alzer_order`` sets the order N of
    the Alzer constant a = N (N!)^(-1/N); it defaults to n.
    """
    if j not in _LEGS:
        raise ValueError("j must be in 1..4")
    serving, path, limit = _LEGS[j]
    tau = float(_tau(serving, t_threshold, g, x, cfg))
    if tau <= 0.0:
        return math.inf
    a = alzer_a(alzer_order if alzer_order is not None else n)
    s = a * n / tau
    r_min = x if limit == "own" else exclusion_radius_psi(x, serving, cfg)
    return float(_upsilon_from_s(s, path, r_min, cfg, quad, _density_scale(cfg))[0])


# --- tabulated interference exponents ---------------------------------------

class _ExponentTable:
    """log-log table of J(W) = int F(N, W t^-alpha) t w(t) dt at fixed r_min.

    Queries clamp to the endpoints: the low end sits where the scaled
    exponent is < 1e-10 (indistinguishable from 0 in e^-J), the high end
    where e^-J underflows or J has saturated (LOS tables saturate at the
    finite total int t w dt).
    """

    def __init__(self, path, r_min, cfg, quad, density_scale):
        p = _PathParams(cfg, path)
        anchor = max(r_min, cfg.los_range, cfg.cell_radius)
        lo_dec, hi_dec = -18.0, 20.0
        per = quad.w_per_decade
        for _ in range(4):
            n_w = int((hi_dec - lo_dec) * per) + 1
            ln_w = math.log(anchor**p.alpha) + np.linspace(
                lo_dec * math.log(10), hi_dec * math.log(10), n_w)
            w = np.exp(ln_w)

            def rows(t, w=w):
                z = np.multiply.outer(w, t ** (-p.alpha))
                f = -np.expm1(-p.n * np.log1p(z))
                return f * (t * p.weight(t))

            j = _radial_integral(rows, r_min, cfg, quad)
            scaled = density_scale * j
            if scaled[-1] < 1e-12:  # weight essentially dead beyond r_min
                self.zero = True
                return
            lo_ok = scaled[0] <= 1e-10
            saturated = j[-1] > 0 and (j[-1] - j[-2]) <= 1e-9 * j[-1]
            hi_ok = scaled[-1] >= 1400.0 or saturated
            if lo_ok and hi_ok:
                break
            if not lo_ok:
                lo_dec -= 8.0
            if not hi_ok:
                hi_dec += 8.0
        self.zero = False
        self.ln_w = ln_w
        self.ln_j = np.log(np.maximum(j, 1e-300))
        self.scale = density_scale

    def __call__(self, w):
        """Scaled exponent 2 pi lambda_eff J(w), clamped outside the table."""
        if self.zero:
            return np.zeros_like(np.asarray(w, dtype=float))
        ln = np.log(np.maximum(np.asarray(w, dtype=float), 1e-300))
        return self.scale * np.exp(np.interp(ln, self.ln_w, self.ln_j))


class CoverageEngine:
    """Shared quadrature state: node grids, weights, interference tables."""

    def __init__(self, cfg, quad=DEFAULT_QUAD):
        self.cfg = cfg
        self.quad = quad
        self.g_bs, self.g_bs_side = sectored_gains(cfg.bs_beamwidth,
                                                   cfg.front_to_back_constant)
        self.g_ms = float(cfg.n_ms_beams)
        self.mixture = _beam_mixture(cfg)
        self.a_l = _association_prob("L", cfg)
        self.a_n = _association_prob("N", cfg)

        rc = cfg.cell_radius
        gl_x, gw_x = np.polynomial.legendre.leggauss(quad.x_nodes)
        edges = np.array([0, .3, .6, .9, 1.2, 1.5, 2, 2.5, 3, 4, 5, 6.5, 8, 10,
                          quad.x_max_factor]) * rc
        xs, xw = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            xs.append(mid + half * gl_x)
            xw.append(gw_x * half)
        self.x = np.concatenate(xs)
        x_quadw = np.concatenate(xw)

        gl_g, gw_g = np.polynomial.legendre.leggauss(quad.g_nodes)
        g_edges = np.array([0, .25, .6, 1, 1.5, 2.2, 3, 4, 5.5, 7.5, 10, 14])
        gs, gw = [], []
        for lo, hi in zip(g_edges[:-1], g_edges[1:]):
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            gs.append(mid + half * gl_g)
            gw.append(gw_g * half)
        self.g = np.concatenate(gs)
        g_quadw = np.concatenate(gw)

        scale = _density_scale(cfg)
        self.tables = {}
        self.x_weight = {}
        self.g_weight = {}
        for kind in ("L", "N"):
            self.x_weight[kind] = x_quadw * association_intensity(self.x, kind, cfg)
            shape = cfg.nakagami_los if kind == "L" else cfg.nakagami_nlos
            self.g_weight[kind] = g_quadw * gamma_pdf(self.g, shape)
            own_path = kind
            other_path = "N" if kind == "L" else "L"
            psi = exclusion_radius_psi(self.x, kind, cfg)
            self.tables[kind] = [
                [_ExponentTable(own_path, float(xj), cfg, quad, scale)
                 for xj in self.x],
                [_ExponentTable(other_path, float(pj), cfg, quad, scale)
                 for pj in psi],
            ]

    # -- exponent queries ----------------------------------------------------

    def _path_pair(self, kind):
        if kind == "L":
            own = (self.cfg.nakagami_los, self.cfg.intercept_los)
            other = (self.cfg.nakagami_nlos, self.cfg.intercept_nlos)
        else:
            own = (self.cfg.nakagami_nlos, self.cfg.intercept_nlos)
            other = (self.cfg.nakagami_los, self.cfg.intercept_los)
        return own, other

    def exponent_sum(self, kind, j_x, s):
        """Both interference legs at serving distance x[j_x], Laplace arg s."""
        (n_own, c_own), (n_oth, c_oth) = self._path_pair(kind)
        own_tab = self.tables[kind][0][j_x]
        oth_tab = self.tables[kind][1][j_x]
        total = np.zeros_like(np.asarray(s, dtype=float))
        for bk, gk in self.mixture:
            total = total + bk * own_tab(s * c_own * self.cfg.tx_power * gk / n_own)
            total = total + bk * oth_tab(s * c_oth * self.cfg.tx_power * gk / n_oth)
        return total

    # -- Theorem 1 upper bound -----------------------------------------------

    def _theorem1_conditional(self, kind, t_threshold, order):
        cfg = self.cfg
        alpha = cfg.alpha_los if kind == "L" else cfg.alpha_nlos
        c = cfg.intercept_los if kind == "L" else cfg.intercept_nlos
        desired = (cfg.tx_power * self.g_bs * self.g_ms * c
                   * np.multiply.outer(self.g, self.x ** (-alpha)))
        tau = desired / t_threshold - cfg.noise_power  # (n_g, n_x)
        a = alzer_a(order)
        gw = self.g_weight[kind]
        xw = self.x_weight[kind]
        terms = np.zeros(order)
        ns = np.arange(1, order + 1)
        for j in range(len(self.x)):
            tau_j = tau[:, j]
            ok = tau_j > 0
            if not ok.any():
                continue
            s = np.multiply.outer(a * ns, 1.0 / tau_j[ok])  # (order, n_ok)
            expo = self.exponent_sum(kind, j, s)
            terms += xw[j] * (np.exp(-expo) @ gw[ok])
        signs = (-1.0) ** (ns + 1)
        binom = np.exp(gammaln(order + 1) - gammaln(ns + 1) - gammaln(order - ns + 1))
        total = float(np.sum(signs * binom * terms))
        norm = float(np.sum(xw) * np.sum(gw))
        return total / norm

    def theorem1_upper(self, t_threshold):
        """Adaptive-order upper bound on full-reuse coverage at threshold T."""
        out = {}
        for kind in ("L", "N"):
            prev, converged = None, False
            for order in range(1, self.quad.alzer_cap + 1):
                val = self._theorem1_conditional(kind, t_threshold, order)
                if prev is not None and abs(val - prev) < self.quad.alzer_tol:
                    converged = True
                    break
                prev = val
            if not converged:
                warnings.warn(
                    f"Theorem-1 alternating sum not within {self.quad.alzer_tol:g} "
                    f"at order cap {self.quad.alzer_cap}")
            out[kind] = val
        p = self.a_l * out["L"] + self.a_n * out["N"]
        return min(max(p, 0.0), 1.0)

    # -- Theorem 2 lower bound and near-orthogonal coverage -------------------

    def _serving_factor(self, kind, t_threshold, with_noise=True):
        """Alternating Alzer sum over the serving fading gain: coverage of
        desired / (sector interference + optional noise) at the threshold."""
        cfg = self.cfg
        if kind == "L":
            shape, alpha, c = cfg.nakagami_los, cfg.alpha_los, cfg.intercept_los
        else:
            shape, alpha, c = cfg.nakagami_nlos, cfg.alpha_nlos, cfg.intercept_nlos
        a = alzer_a(shape)
        tau_bar = cfg.tx_power * self.g_bs * self.g_ms * c \
            * self.x ** (-alpha) / t_threshold  # (n_x,), > 0
        ns = np.arange(1, shape + 1)
        s = np.multiply.outer(a * ns, 1.0 / tau_bar)  # (shape, n_x)
        expo = np.empty_like(s)
        for j in range(len(self.x)):
            expo[:, j] = self.exponent_sum(kind, j, s[:, j])
        weight = np.exp(-expo)
        if with_noise:
            weight = weight * np.exp(-np.multiply.outer(a * ns,
                                                        cfg.noise_power / tau_bar))
        xw = self.x_weight[kind]
        signs = (-1.0) ** (ns + 1)
        binom = np.exp(gammaln(shape + 1) - gammaln(ns + 1) - gammaln(shape - ns + 1))
        return float(np.sum(signs * binom * (weight @ xw))) / float(np.sum(xw))

    def theorem2_lower(self, t_threshold):
        """Lower bound on full-reuse coverage: serving-gain Alzer sum times
        the misalignment bracket raised to N_MS - 1.

        The bracket is the probability that the desired power alone beats
        one other sector's interference, a sufficient condition for the
        sweep to pick the right MS sector; that event does not involve the
        data threshold, so its Laplace argument is evaluated at threshold
        one (and without the noise factor), which is what keeps the bound
        tight at high thresholds.
        """
        total = 0.0
        for kind, a_kind in (("L", self.a_l), ("N", self.a_n)):
            first = self._serving_factor(kind, t_threshold, with_noise=True)
            bracket = self._serving_factor(kind, 1.0, with_noise=False)
            bracket = min(max(bracket, 0.0), 1.0)
            total += a_kind * first * bracket ** (self.cfg.n_ms_beams - 1)
        return min(max(total, 0.0), 1.0)

    def near_orth_coverage(self, t_threshold):
        """Coverage with near-orthogonal pilots (perfect-alignment form)."""
        total = 0.0
        for kind, a_kind in (("L", self.a_l), ("N", self.a_n)):
            first = self._serving_factor(kind, t_threshold, with_noise=True)
            total += a_kind * first
        return min(max(total, 0.0), 1.0)


@lru_cache(maxsize=6)
def _engine(cfg, quad):
    return CoverageEngine(cfg, quad)


def theorem1_upper(t_threshold, cfg, quad=DEFAULT_QUAD):
    """Upper bound on the full-pilot-reuse SINR coverage at threshold T."""
    if t_threshold <= 0:
        raise ValueError("threshold must be > 0")
    return _engine(cfg, quad).theorem1_upper(t_threshold)


def theorem2_lower(t_threshold, cfg, quad=DEFAULT_QUAD):
    """Lower bound on the full-pilot-reuse SINR coverage at threshold T."""
    if t_threshold <= 0:
        raise ValueError("threshold must be > 0")
    return _engine(cfg, quad).theorem2_lower(t_threshold)


def near_orth_coverage(t_threshold, cfg, quad=DEFAULT_QUAD):
    """Coverage with near-orthogonal control pilots (alignment penalty-free)."""
    if t_threshold <= 0:
        raise ValueError("threshold must be > 0")
    return _engine(cfg, quad).near_orth_coverage(t_threshold)


def _monotone_curve(values):
    """Iron sub-tolerance interpolation wiggle so curves are non-increasing."""
    return np.minimum.accumulate(np.asarray(values, dtype=float))


def theorem1_curve(t_grid, cfg, quad=DEFAULT_QUAD):
    return _monotone_curve([theorem1_upper(t, cfg, quad) for t in t_grid])


def theorem2_curve(t_grid, cfg, quad=DEFAULT_QUAD):
    return _monotone_curve([theorem2_lower(t, cfg, quad) for t in t_grid])


def near_orth_curve(t_grid, cfg, quad=DEFAULT_QUAD):
    return _monotone_curve([near_orth_coverage(t, cfg, quad) for t in t_grid])


def min_pilot_reuse(cfg, seed=0, n_drops=10_000, n_iter=12):
    """(delta_c_min, R_I): smallest pilot reuse with negligible co-pilot
    interference.

    Bisects the co-pilot density for the largest lambda_c such that the
    co-pilot interference-to-noise ratio in the serving MS sector stays
    below epsilon1 with probability at least 1 - epsilon2 (Monte Carlo,
    common draws across probes).  R_I = 1 / sqrt(pi lambda_c) is the radius
    holding one co-pilot interferer on average.
    """
    from . import sim_engine

    inr_terms, uniforms, drop_ids = sim_engine.copilot_inr_components(
        cfg, n_drops, seed)

    def accept_prob(delta):
        inr = np.bincount(drop_ids, weights=inr_terms * (uniforms < delta),
                          minlength=n_drops) / cfg.noise_power
        return float(np.mean(inr < cfg.epsilon1))

    target = 1.0 - cfg.epsilon2
    if accept_prob(1.0) >= target:
        warnings.warn("full pilot reuse already meets the interference target; "
                      "delta_c_min clamped to 1")
        lam_c = cfg.bs_density
        return 1.0, 1.0 / math.sqrt(math.pi * lam_c)

    lo, hi = 0.0, 1.0  # accept_prob(0) = 1 by construction
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        if accept_prob(mid) >= target:
            lo = mid
        else:
            hi = mid
    delta = lo if lo > 0.0 else 0.5 * hi
    lam_c = delta * cfg.bs_density
    return delta, 1.0 / math.sqrt(math.pi * lam_c)
