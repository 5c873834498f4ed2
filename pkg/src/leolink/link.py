"""Link physics: free-space path loss, Doppler offset/rate, and the
closed-form coplanar overhead-pass Doppler profile."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import (
    DEFAULT_CARRIER_HZ,
    DEFAULT_MIN_ELEVATION_DEG,
    EARTH_RADIUS_KM,
    MU_EARTH,
    SPEED_OF_LIGHT,
)


@dataclass(frozen=True)
class LinkConfig:
    carrier_frequency: float = DEFAULT_CARRIER_HZ  # Hz
    min_elevation: float = DEFAULT_MIN_ELEVATION_DEG  # deg

    def __post_init__(self):
        if self.carrier_frequency <= 0.0:
            raise ValueError("carrier frequency must be positive")


def fspl_db(range_km, frequency_hz: float):
    """Free-space path loss 20*log10(4*pi*d*f/c) [dB], range in km."""
    rng = np.asarray(range_km, dtype=float)
    if np.any(rng <= 0.0):
        raise ValueError("range must be positive")
    out = 20.0 * np.log10(4.0 * math.pi * rng * 1000.0 * frequency_hz / SPEED_OF_LIGHT)
    return float(out) if np.isscalar(range_km) else out


def doppler_offset_hz(range_rate_km_s, frequency_hz: float):
    """Carrier shift -f*v/c [Hz]; approaching (negative rate) shifts up."""
    rr = np.asarray(range_rate_km_s, dtype=float)
    out = -frequency_hz * (rr * 1000.0) / SPEED_OF_LIGHT
    return float(out) if np.isscalar(range_rate_km_s) else out


def doppler_rate_hz_s(offsets_hz, step_s: float) -> np.ndarray:
    """Time derivative of an offset series: central differences in the
    interior, one-sided at the ends."""
    f = np.asarray(offsets_hz, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise ValueError("need at least 2 uniformly spaced samples")
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * step_s)
    out[0] = (f[1] - f[0]) / step_s
    out[-1] = (f[-1] - f[-2]) / step_s
    return out


@dataclass(frozen=True)
class ZenithDopplerProfile:
    """Closed-form overhead-conjunction Doppler vs elevation.

    ``offset_hz`` is the approaching-side shift (positive); the receding
    side mirrors it with opposite sign. ``rate_hz_s`` is signed and even in
    time around the conjunction.
    """

    elevation_deg: np.ndarray
    offset_hz: np.ndarray
    rate_hz_s: np.ndarray
    zenith_rate_hz_s: float

    def offset_at(self, elevation_deg: float) -> float:
        return float(np.interp(elevation_deg, self.elevation_deg, self.offset_hz))

    def rate_at(self, elevation_deg: float) -> float:
        return float(np.interp(elevation_deg, self.elevation_deg, self.rate_hz_s))


def zenith_doppler_profile(
    user_altitude_km: float,
    sat_altitude_km: float,
    frequency_hz: float,
    min_elevation_deg: float = DEFAULT_MIN_ELEVATION_DEG,
    retrograde: bool = False,
    points: int = 181,
) -> ZenithDopplerProfile:
    """Coplanar circular two-orbit model of an exactly-overhead pass.

    Both objects move on circular orbits in one plane with angular rates
    w = sqrt(mu/a^3); the separation angle evolves at the signed rate
    w_sat - w_user (``retrograde`` flips the user's sense, modeling head-on
    plane crossings). Range follows the law of cosines; offset and rate are
    its analytic first and second time derivatives scaled by f/c. Elevation
    comes from the same triangle, so the profile tabulates over
    [min_elevation, 90] degrees.
    """
    if sat_altitude_km <= user_altitude_km:
        raise ValueError("satellite must be above the user")
    a_u = EARTH_RADIUS_KM + user_altitude_km
    a_s = EARTH_RADIUS_KM + sat_altitude_km
    w_u = math.sqrt(MU_EARTH / a_u**3)
    w_s = math.sqrt(MU_EARTH / a_s**3)
    d_w = abs(w_s - (-w_u if retrograde else w_u))  # rad/s

    elev = np.linspace(min_elevation_deg, 90.0, points)
    psi = np.radians(90.0 + elev)
    beta = np.arcsin(np.clip(a_u * np.sin(psi) / a_s, -1.0, 1.0))
    theta = math.pi - psi - beta  # central separation angle, >= 0

    rng = np.sqrt(a_u**2 + a_s**2 - 2.0 * a_u * a_s * np.cos(theta))
    rdot = a_u * a_s * np.sin(theta) * d_w / rng  # km/s, receding side
    rddot = (
        d_w**2
        * a_u
        * a_s
        * (np.cos(theta) / rng - (a_u * a_s * np.sin(theta) ** 2) / rng**3)
    )  # km/s^2

    offset = frequency_hz * (rdot * 1000.0) / SPEED_OF_LIGHT  # approaching side
    rate = -frequency_hz * (rddot * 1000.0) / SPEED_OF_LIGHT
    return ZenithDopplerProfile(
        elevation_deg=elev,
        offset_hz=offset,
        rate_hz_s=rate,
        zenith_rate_hz_s=float(rate[-1]),
    )
