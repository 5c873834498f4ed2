"""leolink: mega-constellation link characterization for space users.

Propagates LEO/GEO fleets and user orbits with SGP4, applies a two-sided
visibility predicate (user elevation cone vs. satellite beam cone), and
reduces the pair timeline to coverage probability, pass/access intervals,
free-space path loss, and Doppler statistics.
"""

from .constants import VERSION as __version__

from .config import ScenarioConfig, config_from_dict, load_config, validate
from .elements import KeplerianElements, StateVector
from .engine import RunManifest, run
from .geometry import BeamModel, RelativeGeometry, earth_limb_half_cone, is_visible, relative_geometry
from .link import LinkConfig, doppler_offset_hz, doppler_rate_hz_s, fspl_db, zenith_doppler_profile
from .metrics import (
    AccessInterval,
    CoverageSummary,
    PassInterval,
    StepRecord,
    bin_grid,
    coverage_probability,
    extract_accesses,
    extract_passes,
    summarize,
)
from .policy import SelectionPolicy, select_serving
from .population import UserSpec, generate_population, preset, sso_inclination_deg
from .propagation import PropagationError, propagate
from .tle import TleParseError, TwoLineElementSet, elements_to_tle, format_tle, parse_tle
from .walker import ShellSpec, build_walker

__all__ = [
    "__version__",
    "ScenarioConfig",
    "config_from_dict",
    "load_config",
    "validate",
    "KeplerianElements",
    "StateVector",
    "RunManifest",
    "run",
    "BeamModel",
    "RelativeGeometry",
    "earth_limb_half_cone",
    "is_visible",
    "relative_geometry",
    "LinkConfig",
    "doppler_offset_hz",
    "doppler_rate_hz_s",
    "fspl_db",
    "zenith_doppler_profile",
    "AccessInterval",
    "CoverageSummary",
    "PassInterval",
    "StepRecord",
    "bin_grid",
    "coverage_probability",
    "extract_accesses",
    "extract_passes",
    "summarize",
    "SelectionPolicy",
    "select_serving",
    "UserSpec",
    "generate_population",
    "preset",
    "sso_inclination_deg",
    "PropagationError",
    "propagate",
    "TleParseError",
    "TwoLineElementSet",
    "elements_to_tle",
    "format_tle",
    "parse_tle",
    "ShellSpec",
    "build_walker",
]
