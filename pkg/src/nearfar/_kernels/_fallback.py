"""Pure-numpy implementations of the hot spherical-wave kernels.

Same signatures as the compiled ``_core`` module.  The subcarrier phase
factorization exp(j*2*pi*d_n/lam_q) = E0 * E1^(q-1) with
E0 = exp(j*2*pi*f0/c*d_n) and E1 = exp(j*2*pi*wsub/c*d_n) keeps the cost at
two complex exponentials per (probe, element) pair regardless of Q.
"""

import numpy as np


def pairwise_distances(points: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Euclidean distances between G probe points and N element positions, (G, N)."""
    diff = points[:, None, :] - positions[None, :, :]
    return np.sqrt(np.einsum("gni,gni->gn", diff, diff))


def nf_steering_block(
    positions: np.ndarray,
    points: np.ndarray,
    origin: np.ndarray,
    inv_wavelength: float,
    amp_ratio: float,
) -> np.ndarray:
    """Spherical-wave steering vectors for one subcarrier at many points.

    Entry (g, n) is ``amp_ratio * d_g / d_gn * exp(-j*2*pi*inv_wavelength*d_gn)``
    with d_gn the point-to-element distance and d_g the point-to-origin
    distance.  Raises if any point coincides with an element (singular range).
    """
    dists = pairwise_distances(points, positions)
    if np.any(dists == 0.0):
        raise ValueError("singular range: evaluation point coincides with an array element")
    d = np.linalg.norm(points - origin, axis=1)
    amps = amp_ratio * d[:, None] / dists
    return amps * np.exp(-2j * np.pi * inv_wavelength * dists)


def nf_probe_objectives(
    positions: np.ndarray,
    points: np.ndarray,
    origin: np.ndarray,
    vmat: np.ndarray,
    f0_over_c: float,
    wsub_over_c: float,
    amp_ratios: np.ndarray,
) -> np.ndarray:
    """|alpha_q(p)^H v_q| for every probe point and subcarrier, (Q, G).

    ``vmat`` is (Q, N); ``amp_ratios`` holds lam_q / lam_1 per subcarrier.
    """
    dists = pairwise_distances(points, positions)
    if np.any(dists == 0.0):
        raise ValueError("singular range: probe point coincides with an array element")
    d = np.linalg.norm(points - origin, axis=1)
    q_count = vmat.shape[0]
    cur = (d[:, None] / dists) * np.exp(2j * np.pi * f0_over_c * dists)
    step = np.exp(2j * np.pi * wsub_over_c * dists)
    out = np.empty((q_count, points.shape[0]))
    for q in range(q_count):
        out[q] = amp_ratios[q] * np.abs(cur @ vmat[q])
        if q + 1 < q_count:
            cur = cur * step
    return out
