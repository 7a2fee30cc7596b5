"""Geodetic -> local North-East-Down conversion on the WGS84 ellipsoid.

The INS delivers latitude/longitude/altitude fixes; the estimation
pipeline works in a local metric NED frame anchored at a survey origin
(by default the first fix). Altitude is ellipsoidal height, up-positive;
a geoid correction would enter as a constant offset and is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput

WGS84_A = 6378137.0
WGS84_F = 1.0 / 298.257223563
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)


@dataclass(frozen=True)
class GeodeticFix:
    """One INS position fix with per-axis NED standard deviation (m)."""

    t: float
    lat: float      # degrees
    lon: float      # degrees
    alt: float      # meters, ellipsoidal, up-positive
    sigma: np.ndarray = field(default_factory=lambda: np.ones(3))

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude {self.lat} out of bounds")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude {self.lon} out of bounds")
        sigma = np.asarray(self.sigma, dtype=np.float64).reshape(3)
        if np.any(sigma <= 0.0):
            raise ValueError("sigma components must be positive")
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class LocalFrame:
    """NED tangent frame anchored at a geodetic origin."""

    lat: float
    lon: float
    alt: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError("origin outside geodetic bounds")

    @staticmethod
    def at_fix(fix: GeodeticFix) -> "LocalFrame":
        return LocalFrame(fix.lat, fix.lon, fix.alt)

    @property
    def origin_ecef(self) -> np.ndarray:
        return geodetic_to_ecef(self.lat, self.lon, self.alt)

    @property
    def rotation_ecef_to_ned(self) -> np.ndarray:
        """Rows are the local north, east and down unit vectors in ECEF."""
        lat = np.radians(self.lat)
        lon = np.radians(self.lon)
        sl, cl = np.sin(lat), np.cos(lat)
        so, co = np.sin(lon), np.cos(lon)
        return np.array([
            [-sl * co, -sl * so, cl],
            [-so, co, 0.0],
            [-cl * co, -cl * so, -sl],
        ])


def geodetic_to_ecef(lat, lon, alt) -> np.ndarray:
    """Geodetic (degrees, m) -> ECEF (m). Vectorized over matching shapes."""
    lat = np.radians(np.asarray(lat, dtype=np.float64))
    lon = np.radians(np.asarray(lon, dtype=np.float64))
    alt = np.asarray(alt, dtype=np.float64)
    sl, cl = np.sin(lat), np.cos(lat)
    n = WGS84_A / np.sqrt(1.0 - WGS84_E2 * sl * sl)
    x = (n + alt) * cl * np.cos(lon)
    y = (n + alt) * cl * np.sin(lon)
    z = (n * (1.0 - WGS84_E2) + alt) * sl
    return np.stack([x, y, z], axis=-1)


def ecef_to_geodetic(p_ecef: np.ndarray) -> np.ndarray:
    """ECEF (m) -> geodetic (degrees, m) by fixed-point latitude iteration.

    Five iterations close the round trip to well below 1e-6 m anywhere
    within +/-11 km of the ellipsoid.
    """
    p = np.atleast_2d(np.asarray(p_ecef, dtype=np.float64))
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    lon = np.arctan2(y, x)
    r = np.hypot(x, y)
    lat = np.arctan2(z, r * (1.0 - WGS84_E2))
    alt = np.zeros_like(lat)
    for _ in range(5):
        sl = np.sin(lat)
        n = WGS84_A / np.sqrt(1.0 - WGS84_E2 * sl * sl)
        alt = r / np.cos(lat) - n
        lat = np.arctan2(z, r * (1.0 - WGS84_E2 * n / (n + alt)))
    out = np.stack([np.degrees(lat), np.degrees(lon), alt], axis=-1)
    return out[0] if np.asarray(p_ecef).ndim == 1 else out


def ecef_to_ned(frame: LocalFrame, p_ecef: np.ndarray) -> np.ndarray:
    """Rotate-and-translate ECEF point(s) into the local NED frame."""
    p = np.asarray(p_ecef, dtype=np.float64)
    d = p - frame.origin_ecef
    R = frame.rotation_ecef_to_ned
    return d @ R.T if d.ndim > 1 else R @ d


def ned_to_ecef(frame: LocalFrame, p_ned: np.ndarray) -> np.ndarray:
    p = np.asarray(p_ned, dtype=np.float64)
    R = frame.rotation_ecef_to_ned
    d = p @ R if p.ndim > 1 else R.T @ p
    return d + frame.origin_ecef


def ned_to_geodetic(frame: LocalFrame, p_ned: np.ndarray) -> np.ndarray:
    return ecef_to_geodetic(ned_to_ecef(frame, p_ned))


@dataclass(frozen=True)
class NedFix:
    """A geodetic fix converted to the local frame."""

    t: float
    position: np.ndarray    # (3,) NED meters
    sigma: np.ndarray       # (3,) per-axis std dev, meters


def fixes_to_ned(fixes: list[GeodeticFix], frame: LocalFrame) -> list[NedFix]:
    """Convert a fix sequence to local NED, preserving timestamps and sigmas."""
    if not fixes:
        raise EmptyInput("no fixes")
    lat = np.array([f.lat for f in fixes])
    lon = np.array([f.lon for f in fixes])
    alt = np.array([f.alt for f in fixes])
    ned = ecef_to_ned(frame, geodetic_to_ecef(lat, lon, alt))
    ned = np.atleast_2d(ned)
    return [NedFix(f.t, ned[i], f.sigma) for i, f in enumerate(fixes)]
