"""Monte Carlo user population and named use-case presets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .constants import EARTH_RADIUS_KM, J2_EARTH, MU_EARTH
from .elements import KeplerianElements

# Main stratum altitude band [km] and near-shell refinement bands
MAIN_ALT_RANGE = (350.0, 1200.0)
SHELL_BANDS = ((470.0, 570.0), (1100.0, 1200.0))


@dataclass(frozen=True)
class UserSpec:
    user_id: int
    elements: KeplerianElements
    tag: str  # montecarlo | shell_band | iss_preset | sso_preset | explicit

    @property
    def altitude_km(self) -> float:
        return self.elements.altitude_km

    @property
    def inclination_deg(self) -> float:
        return self.elements.inclination


def generate_population(
    seed: int,
    n_main: int = 1000,
    n_band: int = 100,
    epoch: datetime | None = None,
) -> list[UserSpec]:
    """Seed-determined user population on circular orbits.

    ``n_main`` users draw altitude ~ U[350, 1200] km and ``n_band`` users
    per near-shell refinement band ([470, 570] and [1100, 1200] km);
    inclination ~ U[0, 180] deg, RAAN and mean anomaly ~ U[0, 360) deg for
    every stratum.
    """
    rng = np.random.default_rng(seed)
    users: list[UserSpec] = []

    def draw(n: int, alt_range: tuple[float, float], tag: str) -> None:
        alts = rng.uniform(*alt_range, n)
        incs = rng.uniform(0.0, 180.0, n)
        raans = rng.uniform(0.0, 360.0, n)
        anomalies = rng.uniform(0.0, 360.0, n)
        for k in range(n):
            users.append(
                UserSpec(
                    user_id=len(users),
                    elements=KeplerianElements(
                        semi_major_axis=EARTH_RADIUS_KM + alts[k],
                        eccentricity=0.0,
                        inclination=incs[k],
                        raan=raans[k],
                        arg_perigee=0.0,
                        mean_anomaly=anomalies[k],
                        epoch=epoch,
                    ),
                    tag=tag,
                )
            )

    draw(n_main, MAIN_ALT_RANGE, "montecarlo")
    for band in SHELL_BANDS:
        draw(n_band, band, "shell_band")
    return users


def sso_inclination_deg(altitude_km: float, eccentricity: float = 0.0) -> float:
    """Sun-synchronous inclination from the J2 nodal-precession condition.

    Solves cos(i) = -precession * 2 a^{7/2} (1-e^2)^2 / (3 J2 sqrt(mu) Re^2)
    with the required precession of one revolution per tropical year.
    """
    precession = 2.0 * math.pi / (365.2421897 * 86400.0)  # rad/s
    a = EARTH_RADIUS_KM + altitude_km
    cos_i = (
        -precession
        * 2.0
        * a**3.5
        * (1.0 - eccentricity**2) ** 2
        / (3.0 * J2_EARTH * math.sqrt(MU_EARTH) * EARTH_RADIUS_KM**2)
    )
    if not -1.0 <= cos_i <= 1.0:
        raise ValueError(f"no sun-synchronous inclination at {altitude_km} km")
    return math.degrees(math.acos(cos_i))


PRESETS = {
    "iss": {"altitude_km": 420.0, "inclination_deg": 51.6, "tag": "iss_preset"},
    "sso_eo": {"altitude_km": 500.0, "inclination_deg": None, "tag": "sso_preset"},
}


def preset(
    name: str,
    epoch: datetime | None = None,
    raan_deg: float = 0.0,
    mean_anomaly_deg: float = 0.0,
) -> UserSpec:
    """Named use-case users: ``iss`` (420 km, 51.6 deg) and ``sso_eo``
    (500 km at the sun-synchronous inclination)."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    p = PRESETS[name]
    inc = p["inclination_deg"]
    if inc is None:
        inc = sso_inclination_deg(p["altitude_km"])
    return UserSpec(
        user_id=0,
        elements=KeplerianElements(
            semi_major_axis=EARTH_RADIUS_KM + p["altitude_km"],
            eccentricity=0.0,
            inclination=inc,
            raan=raan_deg,
            arg_perigee=0.0,
            mean_anomaly=mean_anomaly_deg,
            epoch=epoch,
        ),
        tag=p["tag"],
    )
