"""Scenario parameters: one immutable record consumed by every other module.

All values are stored in SI linear units (watts, meters, radians, linear
SINR).  dB / dBm conversions happen only at the I/O boundary, i.e. in
``load_scenario`` and in the CLI.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299792458.0
THERMAL_NOISE_DBM_PER_HZ = -174.0

DEFAULT_CARRIER_HZ = 28e9
DEFAULT_BANDWIDTH_HZ = 100e6
DEFAULT_NOISE_FIGURE_DB = 10.0


class ConfigError(ValueError):
    """Raised on parse failures or invariant violations (message names the field)."""


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def dbm_to_watt(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_watt):
    return 10.0 * math.log10(p_watt) + 30.0


def thermal_noise_watt(bandwidth_hz, noise_figure_db=DEFAULT_NOISE_FIGURE_DB):
    """Thermal floor -174 dBm/Hz plus 10*log10(BW) plus receiver noise figure."""
    p_dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return dbm_to_watt(p_dbm)


def free_space_intercept(carrier_hz=DEFAULT_CARRIER_HZ):
    """Path-loss intercept (wavelength / 4 pi)^2, the 1 m free-space gain."""
    wavelength = SPEED_OF_LIGHT / carrier_hz
    return (wavelength / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class ScenarioConfig:
    """Full parameter set of one experiment point.

    ``bs_density`` is the PPP density in BS per m^2; when a scenario is
    given through a mean cell radius R_c the density is 1/(pi R_c^2).
    ``pilot_reuse`` is the probability that a BS shares the serving BS's
    downlink control pilot (1 = full reuse).  SINR thresholds are linear.
    """

    bs_density: float = 1.0 / (math.pi * 50.0**2)
    los_range: float = 50.0                  # mu, meters
    alpha_los: float = 2.5
    alpha_nlos: float = 4.5
    intercept_los: float = free_space_intercept()
    intercept_nlos: float = free_space_intercept()
    nakagami_los: int = 2
    nakagami_nlos: int = 3
    tx_power: float = dbm_to_watt(43.0)      # watts
    noise_power: float = thermal_noise_watt(DEFAULT_BANDWIDTH_HZ)  # watts
    n_bs_beams: int = 64
    n_ms_beams: int = 8
    front_to_back_constant: float = 0.1      # C0 of the gain/beamwidth model
    pilot_reuse: float = 1.0                 # delta_c in (0, 1]
    coherence_symbols: int = 70_000          # L_C
    sinr_threshold_min: float = 1.0          # T_th, linear (0 dB)
    sinr_threshold_max: float = math.inf     # T_max, linear
    sim_window_radius: float = 0.0           # 0 -> resolved to 20 * cell_radius
    interference_radius: float = 0.0         # R_I; 0 -> not yet calibrated
    epsilon1: float = 0.01
    epsilon2: float = 0.01
    # hierarchical-search knobs; stage-1 reuse factor defaults to pilot_reuse
    wide_bs_beams: int = 8
    wide_ms_beams: int = 8
    pilot_reuse_stage1: float = 0.0          # 0 -> same as pilot_reuse
    # redraw interfering BSs' data beams between training and data phase
    # (default keeps them fixed within a coherence block)
    redraw_interferer_beams: bool = False

    def __post_init__(self):
        if self.sim_window_radius == 0.0:
            object.__setattr__(self, "sim_window_radius", 20.0 * self.cell_radius)
        if self.pilot_reuse_stage1 == 0.0:
            object.__setattr__(self, "pilot_reuse_stage1", self.pilot_reuse)
        self.validate()

    @property
    def cell_radius(self):
        """Mean cell radius R_c with lambda = 1/(pi R_c^2)."""
        return 1.0 / math.sqrt(math.pi * self.bs_density)

    @property
    def bs_beamwidth(self):
        return 2.0 * math.pi / self.n_bs_beams

    @property
    def ms_beamwidth(self):
        return 2.0 * math.pi / self.n_ms_beams

    def validate(self):
        pos = [
            "bs_density", "los_range", "intercept_los", "intercept_nlos",
            "tx_power", "noise_power", "front_to_back_constant",
            "sim_window_radius",
        ]
        for name in pos:
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be strictly positive")
        for name in ("alpha_los", "alpha_nlos"):
            if not getattr(self, name) > 2.0:
                raise ConfigError(f"{name} must exceed 2 (integrable interference)")
        for name in ("nakagami_los", "nakagami_nlos"):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise ConfigError(f"{name} must be a positive integer")
        if not (0.0 < self.pilot_reuse <= 1.0):
            raise ConfigError("pilot_reuse must lie in (0, 1]")
        if not (0.0 < self.pilot_reuse_stage1 <= 1.0):
            raise ConfigError("pilot_reuse_stage1 must lie in (0, 1]")
        if self.n_bs_beams < 2:
            raise ConfigError("n_bs_beams must be >= 2")
        if self.n_ms_beams < 1:
            raise ConfigError("n_ms_beams must be >= 1")
        if self.wide_bs_beams < 2:
            raise ConfigError("wide_bs_beams must be >= 2")
        if self.wide_ms_beams < 1:
            raise ConfigError("wide_ms_beams must be >= 1")
        if self.coherence_symbols < 1:
            raise ConfigError("coherence_symbols must be >= 1")
        if not self.sinr_threshold_min < self.sinr_threshold_max:
            raise ConfigError("sinr_threshold_min must be < sinr_threshold_max")
        if self.sinr_threshold_min <= 0.0:
            raise ConfigError("sinr_threshold_min must be > 0 (linear)")
        if self.interference_radius < 0.0:
            raise ConfigError("interference_radius must be >= 0")
        for name in ("epsilon1", "epsilon2"):
            if not (0.0 < getattr(self, name) < 1.0):
                raise ConfigError(f"{name} must lie in (0, 1)")

    def replace(self, **kw):
        """Return a copy with fields replaced (re-validated)."""
        return dataclasses.replace(self, **kw)


# keys accepted by load_scenario beyond the raw dataclass fields
_DB_KEYS = {
    "tx_power_dbm": ("tx_power", dbm_to_watt),
    "noise_power_dbm": ("noise_power", dbm_to_watt),
    "sinr_threshold_min_db": ("sinr_threshold_min", db_to_linear),
    "sinr_threshold_max_db": ("sinr_threshold_max", db_to_linear),
    "intercept_los_db": ("intercept_los", db_to_linear),
    "intercept_nlos_db": ("intercept_nlos", db_to_linear),
}

_INT_FIELDS = {
    "nakagami_los", "nakagami_nlos", "n_bs_beams", "n_ms_beams",
    "coherence_symbols", "wide_bs_beams", "wide_ms_beams",
}
_BOOL_FIELDS = {"redraw_interferer_beams"}


def _parse_scalar(key, raw):
    raw = raw.strip()
    if key in _BOOL_FIELDS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: cannot parse boolean from {raw!r}")
    if raw.lower() in ("inf", "infinity", "unbounded"):
        return math.inf
    try:
        val = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse number from {raw!r}") from exc
    if key in _INT_FIELDS:
        if val != int(val):
            raise ConfigError(f"{key} must be an integer, got {raw!r}")
        return int(val)
    return val


def load_scenario(text, overrides=None):
    """Build a validated ScenarioConfig from key = value text.

    The text follows INI syntax; sections are allowed and flattened, a
    top-level section header is optional.  Besides the ScenarioConfig
    field names the loader accepts:

    * ``cell_radius`` (m) instead of ``bs_density``,
    * ``*_dbm`` / ``*_db`` suffixed variants of power, intercept, and
      threshold fields,
    * ``bandwidth_hz`` + ``noise_figure_db``, from which ``noise_power``
      is derived when not given explicitly,
    * ``carrier_frequency_hz``, from which default path-loss intercepts
      are derived when not given explicitly.

    ``overrides`` (a ``{key: string}`` mapping, e.g. from CLI flags) is
    applied after the file content, same key set.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse failure: {exc}") from exc

    raw = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            raw[key.lower()] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key.lower()] = str(value)

    return scenario_from_dict(raw)


def scenario_from_dict(raw):
    """Resolve a flat string/number mapping into a ScenarioConfig."""
    raw = {k.lower(): v for k, v in raw.items()}
    kw = {}

    def take(key):
        if key in raw:
            v = raw.pop(key)
            return _parse_scalar(key, v) if isinstance(v, str) else v
        return None

    cell_radius = take("cell_radius")
    bs_density = take("bs_density")
    if cell_radius is not None and bs_density is not None:
        raise ConfigError("give either cell_radius or bs_density, not both")
    if cell_radius is not None:
        if cell_radius <= 0:
            raise ConfigError("cell_radius must be strictly positive")
        kw["bs_density"] = 1.0 / (math.pi * cell_radius**2)
    elif bs_density is not None:
        kw["bs_density"] = bs_density

    carrier = take("carrier_frequency_hz")
    if carrier is not None:
        kw["intercept_los"] = free_space_intercept(carrier)
        kw["intercept_nlos"] = free_space_intercept(carrier)

    bandwidth = take("bandwidth_hz")
    noise_figure = take("noise_figure_db")
    if bandwidth is not None:
        kw["noise_power"] = thermal_noise_watt(
            bandwidth,
            noise_figure if noise_figure is not None else DEFAULT_NOISE_FIGURE_DB,
        )
    elif noise_figure is not None:
        kw["noise_power"] = thermal_noise_watt(DEFAULT_BANDWIDTH_HZ, noise_figure)

    for db_key, (field, conv) in _DB_KEYS.items():
        if db_key in raw:
            v = raw.pop(db_key)
            kw[field] = conv(_parse_scalar(db_key, v) if isinstance(v, str) else v)

    field_names = {f.name for f in dataclasses.fields(ScenarioConfig)}
    for key in list(raw):
        if key not in field_names:
            raise ConfigError(f"unknown config key: {key}")
        v = raw.pop(key)
        kw[key] = _parse_scalar(key, v) if isinstance(v, str) else v

    try:
        return ScenarioConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def serialize_scenario(cfg):
    """Canonical key = value text; load_scenario(serialize_scenario(c)) == c."""
    out = io.StringIO()
    out.write("[scenario]\n")
    for field in dataclasses.fields(ScenarioConfig):
        value = getattr(cfg, field.name)
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, int):
            text = str(value)
        elif math.isinf(value):
            text = "inf"
        else:
            text = repr(float(value))
        out.write(f"{field.name} = {text}\n")
    return out.getvalue()


def scenario_fingerprint(cfg):
    """Stable hash of the canonicalized config (field order independent)."""
    return hashlib.sha256(serialize_scenario(cfg).encode()).hexdigest()[:16]
