"""Walker-style constellation shell synthesis."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from .constants import EARTH_RADIUS_KM
from .elements import KeplerianElements


@dataclass(frozen=True)
class ShellSpec:
    """One constellation shell: circular planes evenly spread in RAAN.

    ``raan_span`` defaults to the full circle; ``inter_plane_phase`` defaults
    to the classic Walker delta phasing 360/(planes x sats_per_plane). Both
    stay configurable because coverage statistics are sensitive to them.
    """

    altitude: float  # km
    inclination: float  # deg
    plane_count: int
    sats_per_plane: int
    raan_span: float = 360.0
    inter_plane_phase: float | None = None

    def __post_init__(self):
        if self.plane_count < 1 or self.sats_per_plane < 1:
            raise ValueError("plane_count and sats_per_plane must be >= 1")
        if not 0.0 < self.raan_span <= 360.0:
            raise ValueError(f"raan_span {self.raan_span} outside (0, 360]")
        if self.altitude <= 0.0:
            raise ValueError("altitude must be positive")

    @property
    def total(self) -> int:
        return self.plane_count * self.sats_per_plane

    @property
    def phase_deg(self) -> float:
        if self.inter_plane_phase is not None:
            return self.inter_plane_phase
        return 360.0 / (self.plane_count * self.sats_per_plane)


def build_walker(shell: ShellSpec, epoch: datetime) -> list[KeplerianElements]:
    """Synthesize circular elements for every slot of a shell.

    Plane p gets RAAN = p * raan_span / plane_count; slot s of plane p gets
    mean anomaly = s * 360/sats_per_plane + p * inter_plane_phase (mod 360).
    """
    a = EARTH_RADIUS_KM + shell.altitude
    d_raan = shell.raan_span / shell.plane_count
    d_ma = 360.0 / shell.sats_per_plane
    phase = shell.phase_deg
    out = []
    for p in range(shell.plane_count):
        raan = (p * d_raan) % 360.0
        for s in range(shell.sats_per_plane):
            out.append(
                KeplerianElements(
                    semi_major_axis=a,
                    eccentricity=0.0,
                    inclination=shell.inclination,
                    raan=raan,
                    arg_perigee=0.0,
                    mean_anomaly=(s * d_ma + p * phase) % 360.0,
                    epoch=epoch,
                )
            )
    return out
