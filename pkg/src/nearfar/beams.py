"""Beam-sweep codebooks: direction-steered (FF) and point-focused (NF).

The FF book sweeps azimuth only at zero elevation; the NF book places focus
points on a factorized range x azimuth x elevation grid.  Range rings are
geometrically spaced (denser near the BS, where focused signaling pays off)
and the elevation span of each ring follows from the serviced z span at that
ring's range.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, Region, cartesian_from_spherical, SphericalPose
from .ofdm import FF, NF, OfdmGrid, ff_steering, nf_steering

_EL_POLE_MARGIN = 1e-9


@dataclass(frozen=True)
class BeamBook:
    """Precoding matrix with per-beam metadata.

    ``steer_angles`` is (J, 2) az/el for FF books; ``focus_points`` is (J, 3)
    and ``focus_poses`` (J, 3) as (d, az, el) for NF books.
    """

    matrix: np.ndarray
    scheme: str
    column_norm: str = "unit"
    steer_angles: np.ndarray | None = None
    focus_points: np.ndarray | None = None
    focus_poses: np.ndarray | None = None

    def __post_init__(self):
        if self.scheme not in (FF, NF):
            raise ValueError(f"unknown beam scheme: {self.scheme!r}")
        if self.column_norm not in ("unit", "raw"):
            raise ValueError(f"unknown column norm mode: {self.column_norm!r}")
        if self.n_beams < 1:
            raise ValueError("beam book needs at least one column")

    @property
    def n_beams(self) -> int:
        return self.matrix.shape[1]


def _normalize_columns(matrix: np.ndarray, mode: str) -> np.ndarray:
    if mode == "raw":
        return matrix
    return matrix / np.linalg.norm(matrix, axis=0, keepdims=True)


def design_ff_beambook(
    geom: ArrayGeometry, region: Region, j1: int, column_norm: str = "unit"
) -> BeamBook:
    """Azimuth sweep at zero elevation: j1 beams uniform on the azimuth span."""
    if j1 < 2:
        raise ValueError("need at least two beams to span the azimuth interval")
    azimuths = np.linspace(region.az_min, region.az_max, j1)
    matrix = np.column_stack([ff_steering(geom, az, 0.0) for az in azimuths])
    angles = np.column_stack([azimuths, np.zeros(j1)])
    return BeamBook(
        matrix=_normalize_columns(matrix, column_norm),
        scheme=FF,
        column_norm=column_norm,
        steer_angles=angles,
    )


def _axis_grid(lo: float, hi: float, count: int, spacing: str) -> np.ndarray:
    """Inclusive grid; a single point degenerates to the interval midpoint
    (geometric mean for geometric spacing)."""
    if count == 1:
        if spacing == "geometric":
            return np.array([np.sqrt(lo * hi)])
        return np.array([(lo + hi) / 2.0])
    if spacing == "geometric":
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def elevation_bounds(region: Region, origin_z: float, d: float) -> tuple[float, float]:
    """Elevation interval covering the region's z span at range d.

    Ratios are clamped so rings tighter than the z offset stay inside the
    open (-pi/2, pi/2) pole limits.
    """
    dz_lo, dz_hi = region.dz_bounds(origin_z)
    lo = np.arcsin(np.clip(dz_lo / d, -1.0 + _EL_POLE_MARGIN, 1.0 - _EL_POLE_MARGIN))
    hi = np.arcsin(np.clip(dz_hi / d, -1.0 + _EL_POLE_MARGIN, 1.0 - _EL_POLE_MARGIN))
    return float(lo), float(hi)


def design_nf_beambook(
    geom: ArrayGeometry,
    grid: OfdmGrid,
    region: Region,
    n_range: int = 4,
    n_az: int = 21,
    n_el: int = 1,
    column_norm: str = "unit",
) -> BeamBook:
    """Focus points on a range x azimuth x elevation grid, steered at subcarrier 1."""
    if n_range < 1 or n_az < 1 or n_el < 1:
        raise ValueError("empty focus grid")
    ranges = _axis_grid(region.d_min, region.d_max, n_range, "geometric")
    azimuths = _axis_grid(region.az_min, region.az_max, n_az, "uniform")
    columns = []
    points = []
    poses = []
    for d in ranges:
        el_lo, el_hi = elevation_bounds(region, geom.origin[2], d)
        elevations = _axis_grid(el_lo, el_hi, n_el, "uniform")
        for az in azimuths:
            for el in elevations:
                pose = SphericalPose(dof=float(d), az=float(az), el=float(el))
                point = cartesian_from_spherical(pose, geom.origin)
                columns.append(nf_steering(geom, grid, 1, point))
                points.append(point)
                poses.append([pose.dof, pose.az, pose.el])
    matrix = np.column_stack(columns)
    return BeamBook(
        matrix=_normalize_columns(matrix, column_norm),
        scheme=NF,
        column_norm=column_norm,
        focus_points=np.asarray(points),
        focus_poses=np.asarray(poses),
    )


def beambook_to_csv(book: BeamBook, path) -> None:
    """Debug dump: one row per beam with its steer angle or focus point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["scheme", "index", "azimuth", "elevation", "focus_x", "focus_y", "focus_z"]
        )
        for j in range(book.n_beams):
            if book.scheme == FF:
                az, el = book.steer_angles[j]
                writer.writerow([book.scheme, j, repr(az), repr(el), "", "", ""])
            else:
                d, az, el = book.focus_poses[j]
                x, y, z = book.focus_points[j]
                writer.writerow([book.scheme, j, repr(az), repr(el), repr(x), repr(y), repr(z)])
