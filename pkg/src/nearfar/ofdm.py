"""OFDM grid, steering vectors, subcarrier phase rolling and channel matrices.

Two channel models share the same geometry:

* the spherical-wavefront model builds each subcarrier column from exact
  element-to-point distances (valid at any range), and
* the planar-wavefront model factorizes into a rank-one product of a
  direction steering vector and a subcarrier phase-roll vector, valid for
  large range.

Subcarrier q (1-based) is transmitted at ``f_o + (q-1) * W_sub``, so its
wavelength is ``c / (f_o + (q-1) * W_sub)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    direction_vector,
    element_positions,
    spherical_from_cartesian,
)

NF = "NF"
FF = "FF"


@dataclass(frozen=True)
class OfdmGrid:
    """Pilot subcarrier layout.

    q_count subcarriers, each occupying ``sub_bw`` Hz, spaced ``sub_spacing``
    Hz apart starting at the carrier.  Total bandwidth is
    ``(q_count - 1) * sub_spacing + sub_bw``.
    """

    q_count: int
    sub_bw: float
    sub_spacing: float
    carrier_freq: float
    light_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.q_count < 1:
            raise ValueError("need at least one subcarrier")
        if self.sub_bw <= 0 or self.sub_spacing <= 0:
            raise ValueError("bandwidths must be positive")
        if self.carrier_freq <= 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def bandwidth(self) -> float:
        return (self.q_count - 1) * self.sub_spacing + self.sub_bw

    @property
    def wavelengths(self) -> np.ndarray:
        """Per-subcarrier wavelengths, strictly decreasing in q."""
        freqs = self.carrier_freq + np.arange(self.q_count) * self.sub_spacing
        return self.light_speed / freqs

    @property
    def carrier_wavelength(self) -> float:
        return self.light_speed / self.carrier_freq

    @property
    def ambiguous_range(self) -> float:
        """Maximum uniquely resolvable range from the subcarrier phase roll."""
        return self.light_speed / self.sub_spacing


@dataclass(frozen=True)
class PathGain:
    """Free-space gain with synchronization phase offset."""

    dof: float
    phase_offset: float
    value: complex


@dataclass(frozen=True)
class ChannelMatrix:
    """N_BS x Q complex channel, tagged with the generating model."""

    entries: np.ndarray
    model_tag: str

    def __post_init__(self):
        if self.model_tag not in (NF, FF):
            raise ValueError(f"unknown model tag: {self.model_tag!r}")


def _check_consistent(geom: ArrayGeometry, grid: OfdmGrid) -> None:
    if geom.carrier_freq != grid.carrier_freq or geom.light_speed != grid.light_speed:
        raise ValueError("geometry and OFDM grid disagree on carrier frequency or c")


def nf_steering(geom: ArrayGeometry, grid: OfdmGrid, q: int, p) -> np.ndarray:
    """Spherical-wave steering vector for subcarrier q (1-based) at point p.

    Element n carries amplitude ``lam_q * d / (lam_1 * d_n)`` and phase
    ``-2*pi*d_n/lam_q`` where d_n is the exact element-to-point distance.
    """
    _check_consistent(geom, grid)
    if not 1 <= q <= grid.q_count:
        raise ValueError(f"subcarrier index {q} outside 1..{grid.q_count}")
    lam = grid.wavelengths
    point = np.ascontiguousarray(np.asarray(p, float).reshape(1, 3))
    block = _kernels.nf_steering_block(
        element_positions(geom),
        point,
        geom.origin,
        1.0 / lam[q - 1],
        lam[q - 1] / lam[0],
    )
    return block[0]


def ff_steering(geom: ArrayGeometry, az: float, el: float) -> np.ndarray:
    """Planar-wave steering vector toward (az, el) at the carrier wavelength.

    Unit-modulus entries ``exp(+j*2*pi/lam * (p_n - origin) . u)``; the sign
    makes this the large-range limit of :func:`nf_steering` after the common
    phase ``-2*pi*d/lam`` is removed.
    """
    if abs(el) >= np.pi / 2:
        raise ValueError("elevation must lie strictly inside (-pi/2, pi/2)")
    rel = element_positions(geom) - geom.origin
    proj = rel @ direction_vector(az, el)
    return np.exp(2j * np.pi / geom.wavelength * proj)


def subcarrier_phase_vector(grid: OfdmGrid, d: float) -> np.ndarray:
    """Phase roll across subcarriers for range d; entry 1 is always 1.

    Periodic in d with period ``light_speed / sub_spacing``.
    """
    q = np.arange(grid.q_count)
    return np.exp(-2j * np.pi * q * grid.sub_spacing / grid.light_speed * d)


def path_gain(geom: ArrayGeometry, d: float, phase_offset: float) -> PathGain:
    """Free-space path gain ``lam/(4*pi*d) * exp(-j*phase_offset)``."""
    if d <= 0:
        raise ValueError("range must be positive")
    value = geom.wavelength / (4.0 * np.pi * d) * np.exp(-1j * phase_offset)
    return PathGain(dof=d, phase_offset=phase_offset, value=complex(value))


def nf_channel(geom: ArrayGeometry, grid: OfdmGrid, p, phase_offset: float) -> ChannelMatrix:
    """True spherical-wavefront channel: column q is ``beta * alpha_q(p)``."""
    _check_consistent(geom, grid)
    point = np.asarray(p, float).reshape(3)
    d = float(np.linalg.norm(point - geom.origin))
    beta = path_gain(geom, d, phase_offset).value
    lam = grid.wavelengths
    positions = element_positions(geom)
    probe = np.ascontiguousarray(point.reshape(1, 3))
    cols = np.empty((geom.n_elements, grid.q_count), dtype=complex)
    for q in range(grid.q_count):
        cols[:, q] = _kernels.nf_steering_block(
            positions, probe, geom.origin, 1.0 / lam[q], lam[q] / lam[0]
        )[0]
    return ChannelMatrix(entries=beta * cols, model_tag=NF)


def ff_channel(geom: ArrayGeometry, grid: OfdmGrid, p, phase_offset: float) -> ChannelMatrix:
    """Relaxed planar-wavefront channel: rank-one ``beta * steer(theta) t(d)^T``."""
    _check_consistent(geom, grid)
    pose = spherical_from_cartesian(np.asarray(p, float), geom.origin)
    beta = path_gain(geom, pose.dof, phase_offset).value
    steer = ff_steering(geom, pose.az, pose.el)
    roll = subcarrier_phase_vector(grid, pose.dof)
    return ChannelMatrix(entries=beta * np.outer(steer, roll), model_tag=FF)


def model_gap(h_true: ChannelMatrix, h_relaxed: ChannelMatrix, align_phase: bool = True) -> float:
    """Relative Frobenius gap between two channel matrices.

    With ``align_phase`` the relaxed matrix is rotated by the unit-modulus
    scalar that minimizes the gap; the relaxed model drops the common carrier
    phase exp(-j*2*pi*d/lam), which in practice is absorbed into the unknown
    synchronization offset, so the aligned gap is the meaningful model error.
    """
    a = h_true.entries
    b = h_relaxed.entries
    if align_phase:
        inner = np.vdot(b, a)
        if abs(inner) > 0:
            b = b * (inner / abs(inner))
    return float(np.linalg.norm(a - b) / np.linalg.norm(a))
