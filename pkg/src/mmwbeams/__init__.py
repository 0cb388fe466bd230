"""mmWave cellular downlink performance with initial beam-association overhead.

Monte Carlo simulation (PPP base stations, exponential blockage, sectored
or ULA beams, pilot-reuse beam sweeping) plus numerical evaluation of the
matching analytical coverage expressions and bounds.
"""

from .config import ScenarioConfig, load_scenario, scenario_fingerprint, serialize_scenario

__all__ = [
    "ScenarioConfig",
    "load_scenario",
    "serialize_scenario",
    "scenario_fingerprint",
]

__version__ = "0.1.0"
