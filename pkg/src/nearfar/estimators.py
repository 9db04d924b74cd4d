"""Grid-search position estimators for the two signaling schemes.

Both estimators share the same skeleton: RSSI-style beam weighting, then
alternating 1-D grid maximizations over range, azimuth and elevation,
repeated for a fixed number of outer iterations with the search brackets
shrinking around the running estimate.

* The FF estimator exploits the relaxed channel factorization: range is read
  off the subcarrier phase roll per beam (RSSI-weighted mean), angles off the
  element phase profile per subcarrier (plain mean over subcarriers).
* The NF estimator rebuilds an exact spherical-wave steering vector at every
  probe point and searches all three coordinates per subcarrier, starting
  from the focus point of the strongest beam.

Operation tallies follow the per-probe reconstruction cost model (one
steering vector and one full matched-filter chain per probe), not the
vectorized implementation, so they are comparable across schemes and scale
exactly linearly in the loop counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .beams import BeamBook, elevation_bounds
from .geometry import (
    ArrayGeometry,
    Region,
    SphericalPose,
    cartesian_from_spherical,
    direction_vector,
    element_positions,
    spherical_from_cartesian,
)
from .ofdm import FF, NF, OfdmGrid
from .receiver import RxSnapshot


class EstimationError(RuntimeError):
    """Raised when a snapshot carries no usable signal."""


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the alternating grid search.

    ``dz_bracket`` holds height displacements relative to the BS; elevation
    brackets are derived from it at the running range estimate.  An explicit
    ``el_bracket`` overrides that derivation.
    """

    range_bracket: tuple[float, float]
    az_bracket: tuple[float, float]
    dz_bracket: tuple[float, float]
    el_bracket: tuple[float, float] | None = None
    outer_iters: int = 4
    range_steps: int = 100
    angle_steps: int = 100
    rssi_floor: float = 0.05
    refine_factor: float = 0.2

    def __post_init__(self):
        if self.range_steps < 2 or self.angle_steps < 2:
            raise ValueError("grid searches need at least two steps")
        if not 0.0 <= self.rssi_floor < 1.0:
            raise ValueError("rssi floor must lie in [0, 1)")
        if self.outer_iters < 1:
            raise ValueError("need at least one outer iteration")
        if not 0.0 < self.refine_factor <= 1.0:
            raise ValueError("refine factor must lie in (0, 1]")
        if self.range_bracket[0] <= 0 or self.range_bracket[0] >= self.range_bracket[1]:
            raise ValueError("invalid range bracket")

    @classmethod
    def from_region(cls, region: Region, origin_z: float, **overrides) -> "SearchConfig":
        params = dict(
            range_bracket=(region.d_min, region.d_max),
            az_bracket=(region.az_min, region.az_max),
            dz_bracket=region.dz_bounds(origin_z),
        )
        params.update(overrides)
        return cls(**params)


@dataclass
class OpTally:
    """Scalar work counters, in multiply-equivalent units."""

    steering_constructions: int = 0
    inner_products: int = 0
    distance_evals: int = 0

    def total(self) -> int:
        return self.steering_constructions + self.inner_products + self.distance_evals


@dataclass(frozen=True)
class PositionEstimate:
    position: np.ndarray
    pose: SphericalPose
    weights: np.ndarray
    scheme: str
    op_count: OpTally
    objective_trace: tuple = field(default=())


def beam_weights(snapshot: RxSnapshot, rssi_floor: float) -> np.ndarray:
    """Normalized per-beam energy weights; entries below the floor become 0.

    The maximum weight is exactly 1 and is never zeroed.
    """
    norms = np.linalg.norm(snapshot.y, axis=1)
    peak = norms.max()
    if peak == 0.0:
        raise EstimationError("no signal energy in snapshot")
    w = norms / peak
    w[w < rssi_floor] = 0.0
    return w


def line_search_max(objective, bracket: tuple[float, float], steps: int):
    """Maximize a scalar function on a uniform inclusive grid.

    ``objective`` must accept a vector of grid points and return their values.
    Ties break toward the smaller coordinate.  Returns (argmax, max).
    """
    if steps < 2:
        raise ValueError("grid search needs at least two steps")
    grid = np.linspace(bracket[0], bracket[1], steps)
    values = np.asarray(objective(grid))
    best = int(np.argmax(values))
    return float(grid[best]), float(values[best])


def _shrunk_bracket(
    full: tuple[float, float], center: float, shrink: float
) -> tuple[float, float]:
    """Interval of width shrink*(full width) around center, kept inside full."""
    lo, hi = full
    width = (hi - lo) * shrink
    new_lo = min(max(center - width / 2.0, lo), hi - width)
    return new_lo, new_lo + width


def _asin_clipped(ratio: float) -> float:
    return math.asin(max(-1.0 + 1e-9, min(1.0 - 1e-9, ratio)))


def _el_bracket_at(cfg: SearchConfig, d: float) -> tuple[float, float]:
    if cfg.el_bracket is not None:
        return cfg.el_bracket
    return _asin_clipped(cfg.dz_bracket[0] / d), _asin_clipped(cfg.dz_bracket[1] / d)


def _el_bracket_widest(cfg: SearchConfig) -> tuple[float, float]:
    """Widest elevation span consistent with the height and range brackets.

    The first sweep uses this d-independent bracket: deriving the bracket
    from an early wrong range estimate can exclude the true elevation and
    deadlock the alternating search (the range search along a mis-pitched ray
    then keeps the range estimate wrong).
    """
    if cfg.el_bracket is not None:
        return cfg.el_bracket
    d_lo, d_hi = cfg.range_bracket
    dz_lo, dz_hi = cfg.dz_bracket
    lo = _asin_clipped(dz_lo / max(d_lo, abs(dz_lo)) if dz_lo < 0 else dz_lo / d_hi)
    hi = _asin_clipped(dz_hi / d_hi if dz_hi < 0 else dz_hi / max(d_lo, abs(dz_hi)))
    return lo, hi


def localize_ff(
    snapshot: RxSnapshot,
    book: BeamBook,
    cfg: SearchConfig,
    geom: ArrayGeometry,
    grid: OfdmGrid,
) -> PositionEstimate:
    """Position estimate assuming the relaxed planar-wave channel model."""
    if snapshot.scheme != FF or book.scheme != FF:
        raise ValueError("FF estimator requires an FF snapshot and beam book")
    if cfg.range_bracket[1] >= grid.ambiguous_range:
        raise ValueError(
            "range bracket exceeds the non-ambiguous range "
            f"{grid.ambiguous_range:.1f} m of the subcarrier spacing"
        )
    w = beam_weights(snapshot, cfg.rssi_floor)
    active = np.flatnonzero(w)
    if active.size == 0:
        raise EstimationError("no reliable beam above the RSSI floor")

    y = snapshot.y
    n_beams, n_sub = y.shape
    n_el = geom.n_elements
    # Gated beams enter the angular matched filter unweighted: tapering by the
    # data-dependent RSSI squares the beam response and aliases the argmax off
    # the true angle (measured bias up to 0.8 deg on this beam grid).
    gated_book = book.matrix * (w > 0)
    targets = gated_book @ y  # (N, Q), column q feeds the angle searches
    rel_pos = element_positions(geom) - geom.origin
    wavenum = 2.0 * np.pi / geom.wavelength
    roll_rate = 2.0 * np.pi * grid.sub_spacing / grid.light_speed
    q_idx = np.arange(n_sub)
    tally = OpTally()
    trace = []

    def range_objectives(d_grid: np.ndarray) -> np.ndarray:
        """|y_j^H t(d)| for active beams: (n_active, G)."""
        t = np.exp(-1j * roll_rate * np.outer(d_grid, q_idx))  # (G, Q)
        return np.abs(y[active].conj() @ t.T)

    def angle_objectives(az: np.ndarray, el: np.ndarray) -> np.ndarray:
        """|steer(az, el)^H F~ y_q| for all q: (G, Q)."""
        dirs = direction_vector(az, el)
        probe = np.exp(-1j * wavenum * (dirs @ rel_pos.T))  # conj of ff_steering
        return np.abs(probe @ targets)

    full_range = cfg.range_bracket
    full_az = cfg.az_bracket
    d_hat = az_hat = el_hat = None
    for it in range(cfg.outer_iters):
        # one settling iteration at full brackets before shrinking: the first
        # sweep's incumbents can still drift by more than a shrunk window
        shrink = cfg.refine_factor ** max(0, it - 1)
        d_bracket = full_range if it <= 1 else _shrunk_bracket(full_range, d_hat, shrink)
        d_grid = np.linspace(d_bracket[0], d_bracket[1], cfg.range_steps)
        d_vals = range_objectives(d_grid)
        d_js = d_grid[np.argmax(d_vals, axis=1)]
        d_hat = float(np.sum(w[active] * d_js) / np.sum(w[active]))
        tally.steering_constructions += active.size * cfg.range_steps * n_sub
        tally.inner_products += active.size * cfg.range_steps * n_sub

        # the roll-based d_hat is reliable from the first sweep, so the
        # consistent elevation bracket can be derived from it directly
        full_el = _el_bracket_at(cfg, d_hat)
        if el_hat is None:
            el_hat = (full_el[0] + full_el[1]) / 2.0
        az_bracket = full_az if it <= 1 else _shrunk_bracket(full_az, az_hat, shrink)
        az_grid = np.linspace(az_bracket[0], az_bracket[1], cfg.angle_steps)
        az_vals = angle_objectives(az_grid, np.full_like(az_grid, el_hat))
        az_hat = float(np.mean(az_grid[np.argmax(az_vals, axis=0)]))

        el_bracket = full_el if it <= 1 else _shrunk_bracket(full_el, el_hat, shrink)
        el_grid = np.linspace(el_bracket[0], el_bracket[1], cfg.angle_steps)
        el_vals = angle_objectives(np.full_like(el_grid, az_hat), el_grid)
        el_hat = float(np.mean(el_grid[np.argmax(el_vals, axis=0)]))
        tally.steering_constructions += 2 * n_sub * cfg.angle_steps * n_el
        tally.inner_products += 2 * n_sub * cfg.angle_steps * (n_el * n_beams + n_beams)
        trace.append(float(np.mean(np.max(el_vals, axis=0))))

    pose = SphericalPose(dof=d_hat, az=az_hat, el=el_hat)
    return PositionEstimate(
        position=cartesian_from_spherical(pose, geom.origin),
        pose=pose,
        weights=w,
        scheme=FF,
        op_count=tally,
        objective_trace=tuple(trace),
    )


def localize_nf(
    snapshot: RxSnapshot,
    book: BeamBook,
    cfg: SearchConfig,
    geom: ArrayGeometry,
    grid: OfdmGrid,
) -> PositionEstimate:
    """Position estimate using the exact spherical-wave model.

    Initialized at the focus point of the strongest beam; every probe point
    rebuilds the steering vector from the current (d, az, el) triple.
    """
    if snapshot.scheme != NF or book.scheme != NF:
        raise ValueError("NF estimator requires an NF snapshot and beam book")
    w = beam_weights(snapshot, cfg.rssi_floor)
    if not np.any(w):
        raise EstimationError("no reliable beam above the RSSI floor")

    y = snapshot.y
    n_beams, n_sub = y.shape
    n_el = geom.n_elements
    active_book = np.ascontiguousarray(book.matrix[:, w > 0])
    vmat = np.ascontiguousarray((active_book @ y[w > 0]).T)  # (Q, N)
    positions = element_positions(geom)
    lam = grid.wavelengths
    amp_ratios = np.ascontiguousarray(lam / lam[0])
    inv_lams = 1.0 / lam
    f0_over_c = grid.carrier_freq / grid.light_speed
    wsub_over_c = grid.sub_spacing / grid.light_speed
    tally = OpTally()
    trace = []

    best = int(np.argmax(w))
    d_hat, az_hat, el_hat = (float(v) for v in book.focus_poses[best])

    def template_norms(pts: np.ndarray) -> np.ndarray:
        """Beamspace template norm ||F_act^H alpha(p)|| per probe point.

        The raw correlation |alpha(p)^H F y_q| grows wherever the probe sees
        high beamspace gain (near focus points), which drags the argmax off
        the true position; dividing by the template norm removes that pull.
        Evaluated at the carrier subcarrier only: beam gains change by O(1e-4)
        across this band.
        """
        block = _kernels.nf_steering_block(
            positions, pts, geom.origin, inv_lams[0], 1.0
        )
        return np.linalg.norm(block.conj() @ active_book, axis=1)

    def probe(points: np.ndarray) -> np.ndarray:
        """Normalized per-subcarrier correlations, (Q, G): angle searches."""
        pts = np.ascontiguousarray(points)
        num = _kernels.nf_probe_objectives(
            positions, pts, geom.origin, vmat, f0_over_c, wsub_over_c, amp_ratios
        )
        return num / template_norms(pts)

    def probe_coherent(points: np.ndarray) -> np.ndarray:
        """|sum_q alpha_q(p)^H v_q| / ||template||: the range objective.

        Per-subcarrier magnitudes discard the inter-subcarrier phase roll that
        carries the range information once the wavefront curvature has
        flattened out, so the range search combines subcarriers coherently
        (the same combination the far-field compatibility metric uses).
        """
        pts = np.ascontiguousarray(points)
        acc = np.zeros(len(pts), dtype=complex)
        for q in range(n_sub):
            block = _kernels.nf_steering_block(
                positions, pts, geom.origin, inv_lams[q], amp_ratios[q]
            )
            acc += block.conj() @ vmat[q]
        return np.abs(acc) / template_norms(pts)

    def tally_probes(count: int) -> None:
        tally.steering_constructions += n_sub * count * n_el
        tally.distance_evals += n_sub * count * n_el
        tally.inner_products += n_sub * count * (n_el * n_beams + n_beams)

    def az_step(az_bracket):
        nonlocal az_hat
        az_grid = np.linspace(az_bracket[0], az_bracket[1], cfg.angle_steps)
        points = geom.origin + d_hat * direction_vector(az_grid, np.full_like(az_grid, el_hat))
        vals = probe(points)
        az_hat = float(np.mean(az_grid[np.argmax(vals, axis=1)]))
        tally_probes(cfg.angle_steps)

    def el_step(el_bracket):
        nonlocal el_hat
        el_grid = np.linspace(el_bracket[0], el_bracket[1], cfg.angle_steps)
        points = geom.origin + d_hat * direction_vector(np.full_like(el_grid, az_hat), el_grid)
        vals = probe(points)
        el_hat = float(np.mean(el_grid[np.argmax(vals, axis=1)]))
        tally_probes(cfg.angle_steps)
        return vals

    def d_step(d_bracket):
        nonlocal d_hat
        d_grid = np.linspace(d_bracket[0], d_bracket[1], cfg.range_steps)
        points = geom.origin + np.outer(d_grid, direction_vector(az_hat, el_hat))
        d_hat = float(d_grid[np.argmax(probe_coherent(points))])
        tally_probes(cfg.range_steps)

    full_range = cfg.range_bracket
    full_az = cfg.az_bracket
    # Direction is identifiable from probes at any range, but range is only
    # identifiable along a ray that actually passes through the tight
    # short-range focal spot.  The focus grid carries no elevation diversity
    # to initialize from, so the first sweep resolves azimuth, then range and
    # elevation jointly: in the deep near zone those two couple into a
    # diagonal valley that axis-aligned line searches descend too slowly.
    az_step(full_az)
    d_coarse = np.geomspace(full_range[0], full_range[1], 24)
    el_lo, el_hi = _el_bracket_widest(cfg)
    el_coarse = np.linspace(el_lo, el_hi, 24)
    dd, ee = np.meshgrid(d_coarse, el_coarse, indexing="ij")
    points = geom.origin + dd.reshape(-1, 1) * direction_vector(
        ee.reshape(-1), np.full(ee.size, az_hat)
    ).reshape(-1, 3)
    joint = probe_coherent(points)
    best_joint = int(np.argmax(joint))
    d_hat = float(dd.reshape(-1)[best_joint])
    el_hat = float(ee.reshape(-1)[best_joint])
    tally_probes(d_coarse.size * el_coarse.size)
    el_vals = el_step(_el_bracket_widest(cfg))
    d_step(full_range)
    trace.append(float(np.mean(np.max(el_vals, axis=1))))
    for it in range(1, cfg.outer_iters):
        # settle once more at full brackets, then shrink (see localize_ff)
        shrink = cfg.refine_factor ** max(0, it - 1)
        d_step(full_range if it == 1 else _shrunk_bracket(full_range, d_hat, shrink))
        full_el = _el_bracket_at(cfg, d_hat)
        az_step(full_az if it == 1 else _shrunk_bracket(full_az, az_hat, shrink))
        el_vals = el_step(full_el if it == 1 else _shrunk_bracket(full_el, el_hat, shrink))
        trace.append(float(np.mean(np.max(el_vals, axis=1))))

    pose = SphericalPose(dof=d_hat, az=az_hat, el=el_hat)
    return PositionEstimate(
        position=cartesian_from_spherical(pose, geom.origin),
        pose=pose,
        weights=w,
        scheme=NF,
        op_count=tally,
        objective_trace=tuple(trace),
    )


def complexity_ratio(tally_nf: OpTally, tally_ff: OpTally, counters=None) -> dict[str, float]:
    """Per-counter NF/FF work ratios.

    By default only counters with nonzero FF work are reported; explicitly
    requesting a counter whose FF tally is zero raises ZeroDivisionError.
    """
    names = ("steering_constructions", "inner_products", "distance_evals")
    requested = names if counters is None else tuple(counters)
    out = {}
    for name in requested:
        nf_val = getattr(tally_nf, name)
        ff_val = getattr(tally_ff, name)
        if ff_val == 0:
            if counters is None:
                continue
            raise ZeroDivisionError(f"FF tally for {name} is zero")
        out[name] = nf_val / ff_val
    return out
