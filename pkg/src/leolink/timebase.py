"""UTC instants, Julian dates, and sidereal time.

Julian dates are kept as a (whole, fraction) pair so that second-level
offsets survive the ~2.4e6-day magnitude of the JD epoch.
"""

from __future__ import annotations

import math
from datetime import datetime, timedelta, timezone


def parse_utc(text: str) -> datetime:
    """Parse an ISO-8601 UTC instant such as ``2021-03-20T09:37:29Z``."""
    s = text.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_utc(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f").rstrip("0") + "Z"
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def julian_date(dt: datetime) -> tuple[float, float]:
    """UTC datetime -> (jd_whole, jd_fraction), valid 1900..2100."""
    dt = dt.astimezone(timezone.utc)
    jd = (
        367.0 * dt.year
        - math.floor(7.0 * (dt.year + math.floor((dt.month + 9.0) / 12.0)) * 0.25)
        + math.floor(275.0 * dt.month / 9.0)
        + dt.day
        + 1721013.5
    )
    sec = dt.second + dt.microsecond * 1e-6
    fr = (sec + dt.minute * 60.0 + dt.hour * 3600.0) / 86400.0
    return jd, fr


def datetime_from_jd(jd: float, fr: float = 0.0) -> datetime:
    """Inverse of :func:`julian_date`, accurate to the microsecond."""
    base = datetime(2000, 1, 1, 12, 0, 0, tzinfo=timezone.utc)  # JD 2451545.0
    days = (jd - 2451545.0) + fr
    return base + timedelta(days=days)


def tle_epoch_to_datetime(two_digit_year: int, day_of_year: float) -> datetime:
    """Decode a TLE epoch field (YY, DDD.DDDDDDDD) to a UTC instant.

    Years below 57 are 2000s, otherwise 1900s (standard pivot).
    """
    year = 2000 + two_digit_year if two_digit_year < 57 else 1900 + two_digit_year
    start = datetime(year, 1, 1, tzinfo=timezone.utc)
    return start + timedelta(days=day_of_year - 1.0)


def datetime_to_tle_epoch(dt: datetime) -> tuple[int, float]:
    """Encode a UTC instant as the (YY, fractional day-of-year) epoch pair."""
    dt = dt.astimezone(timezone.utc)
    start = datetime(dt.year, 1, 1, tzinfo=timezone.utc)
    doy = (dt - start).total_seconds() / 86400.0 + 1.0
    return dt.year % 100, doy


def gstime(jdut1: float) -> float:
    """Greenwich sidereal time [rad] at a UT1 Julian date (IAU-82 model)."""
    tut1 = (jdut1 - 2451545.0) / 36525.0
    temp = (
        -6.2e-6 * tut1 * tut1 * tut1
        + 0.093104 * tut1 * tut1
        + (876600.0 * 3600 + 8640184.812866) * tut1
        + 67310.54841
    )
    temp = (temp * (math.pi / 180.0) / 240.0) % (2 * math.pi)
    if temp < 0.0:
        temp += 2 * math.pi
    return temp


def minutes_since(epoch_jd: float, epoch_fr: float, t_jd: float, t_fr: float) -> float:
    """Elapsed minutes from one (jd, fr) instant to another."""
    return ((t_jd - epoch_jd) + (t_fr - epoch_fr)) * 1440.0
