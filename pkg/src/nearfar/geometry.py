"""BS array geometry, serviced region and coordinate conversions.

The base station is a wall-mounted uniform planar array lying in the x-z
plane with boresight along +y.  Azimuth is measured from +y toward +x
(``atan2(x, y)``), elevation from the x-y plane toward +z, so the unit
direction vector is ``[cos(el)sin(az), cos(el)cos(az), sin(el)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8
"""Exact vacuum speed of light in m/s."""

SPEED_OF_LIGHT_SIMPLE = 3.0e8
"""Rounded value; scenario presets use it so tabulated constants come out exact."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array in the x-z plane, centered on ``origin``.

    Parameters
    ----------
    n_x, n_z : element counts along x and z
    spacing : inter-element spacing in meters (same in both dimensions)
    origin : array reference point (centroid), meters
    carrier_freq : carrier frequency in Hz
    light_speed : propagation speed; defaults to the exact value, scenario
        presets pass the rounded 3e8 m/s
    """

    n_x: int
    n_z: int
    spacing: float
    origin: np.ndarray
    carrier_freq: float
    light_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.n_x < 1 or self.n_z < 1:
            raise ValueError("element counts must be >= 1")
        if self.spacing <= 0:
            raise ValueError("element spacing must be positive")
        if self.carrier_freq <= 0:
            raise ValueError("carrier frequency must be positive")
        origin = np.asarray(self.origin, dtype=float).reshape(3).copy()
        origin.flags.writeable = False
        object.__setattr__(self, "origin", origin)

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_z

    @property
    def wavelength(self) -> float:
        return self.light_speed / self.carrier_freq


@dataclass(frozen=True)
class Region:
    """Serviced cylindrical-sector region: range, azimuth span and z span."""

    d_min: float
    d_max: float
    az_min: float
    az_max: float
    z_min: float
    z_max: float

    def __post_init__(self):
        if self.d_min <= 0:
            raise ValueError("d_min must be positive")
        if self.d_min >= self.d_max:
            raise ValueError("d_min must be below d_max")
        if self.az_min >= self.az_max:
            raise ValueError("az_min must be below az_max")
        if self.z_min > self.z_max:
            raise ValueError("z_min must not exceed z_max")

    def dz_bounds(self, origin_z: float) -> tuple[float, float]:
        """Height displacement bounds relative to the BS reference height."""
        return self.z_min - origin_z, self.z_max - origin_z

    def contains(self, p, origin) -> bool:
        pose = spherical_from_cartesian(np.asarray(p, float), np.asarray(origin, float))
        return (
            self.d_min <= pose.dof <= self.d_max
            and self.az_min <= pose.az <= self.az_max
            and self.z_min <= p[2] <= self.z_max
        )


@dataclass(frozen=True)
class SphericalPose:
    """Range / azimuth / elevation triple relative to the BS reference."""

    dof: float
    az: float
    el: float

    def __post_init__(self):
        if self.dof <= 0:
            raise ValueError("range must be positive")
        if abs(self.el) >= math.pi / 2:
            raise ValueError("elevation must lie strictly inside (-pi/2, pi/2)")


def element_positions(geom: ArrayGeometry) -> np.ndarray:
    """Element positions as an (n_x * n_z, 3) array, row-major over (i_x, i_z).

    Positions are symmetric about the origin: element (i_x, i_z) sits at
    ``origin + [(i_x - (n_x-1)/2) * spacing, 0, (i_z - (n_z-1)/2) * spacing]``.
    """
    ix = (np.arange(geom.n_x) - (geom.n_x - 1) / 2.0) * geom.spacing
    iz = (np.arange(geom.n_z) - (geom.n_z - 1) / 2.0) * geom.spacing
    out = np.empty((geom.n_x * geom.n_z, 3))
    out[:, 0] = np.repeat(ix, geom.n_z)
    out[:, 1] = 0.0
    out[:, 2] = np.tile(iz, geom.n_x)
    out += geom.origin
    return out


def direction_vector(az: float | np.ndarray, el: float | np.ndarray) -> np.ndarray:
    """Unit direction(s) for azimuth/elevation; broadcasts, last axis is xyz."""
    az = np.asarray(az, float)
    el = np.asarray(el, float)
    cos_el = np.cos(el)
    return np.stack(
        np.broadcast_arrays(cos_el * np.sin(az), cos_el * np.cos(az), np.sin(el)),
        axis=-1,
    )


def cartesian_from_spherical(pose: SphericalPose, origin) -> np.ndarray:
    """Map a (range, azimuth, elevation) pose to a Cartesian point."""
    return np.asarray(origin, float) + pose.dof * direction_vector(pose.az, pose.el)


def spherical_from_cartesian(p, origin) -> SphericalPose:
    """Inverse of :func:`cartesian_from_spherical`.

    Raises ValueError for a point coincident with the origin (zero range) and
    for points on the vertical axis (elevation hits the +-pi/2 pole).
    """
    offset = np.asarray(p, float) - np.asarray(origin, float)
    d = float(np.linalg.norm(offset))
    if d == 0.0:
        raise ValueError("zero range: point coincides with the array reference")
    el = math.asin(max(-1.0, min(1.0, offset[2] / d)))
    az = math.atan2(offset[0], offset[1])
    return SphericalPose(dof=d, az=az, el=el)


def fraunhofer_distance(geom: ArrayGeometry, aperture: str = "max_side") -> float:
    """Near/far-field boundary 2 D^2 / lambda.

    ``aperture="max_side"`` uses D = sqrt(2) * max(n_x, n_z) * spacing, the
    convention that reproduces the tabulated 7.2 / 3.2 / 3.2 m boundaries for
    the three stock scenarios.  ``aperture="diagonal"`` uses the physical
    array diagonal D = sqrt(n_x^2 + n_z^2) * spacing instead.
    """
    # grouped so half-wavelength spacings reproduce tabulated boundaries bit-exactly
    if aperture == "max_side":
        side_sq = max(geom.n_x, geom.n_z) ** 2
        return side_sq * (geom.spacing * (4.0 * geom.spacing / geom.wavelength))
    if aperture == "diagonal":
        diag_sq = geom.n_x**2 + geom.n_z**2
        return diag_sq * (geom.spacing * (2.0 * geom.spacing / geom.wavelength))
    raise ValueError(f"unknown aperture convention: {aperture!r}")
