"""Downlink pilot reception: beamformed snapshots plus thermal noise."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .beams import BeamBook
from .ofdm import ChannelMatrix, FF, NF, OfdmGrid


@dataclass(frozen=True)
class RxSnapshot:
    """Received J x Q pilot matrix for one sweep of a beam book."""

    y: np.ndarray
    scheme: str
    noise_var: float
    tx_power: float

    def __post_init__(self):
        if self.scheme not in (FF, NF):
            raise ValueError(f"unknown snapshot scheme: {self.scheme!r}")
        if self.noise_var < 0:
            raise ValueError("noise variance must be non-negative")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts) + 30.0


def noise_variance(grid: OfdmGrid, noise_figure_db: float, noise_density_dbm_hz: float) -> float:
    """Thermal noise power per received pilot sample, in watts.

    Integrates the density over the occupied per-subcarrier bandwidth and
    adds the receiver noise figure.
    """
    total_dbm = noise_density_dbm_hz + 10.0 * np.log10(grid.sub_bw) + noise_figure_db
    return dbm_to_watts(total_dbm)


def simulate_rx(
    channel: ChannelMatrix,
    book: BeamBook,
    tx_power: float,
    noise_var: float,
    seed,
) -> RxSnapshot:
    """One pilot sweep: y[j, q] = sqrt(P) f_j^H h_q + CN(0, noise_var).

    All pilot symbols are 1.  ``seed`` may be an integer or a numpy
    Generator; a given integer always reproduces the same snapshot.
    """
    h = channel.entries
    f = book.matrix
    if h.shape[0] != f.shape[0]:
        raise ValueError(
            f"channel has {h.shape[0]} antenna rows but beam book has {f.shape[0]}"
        )
    clean = np.sqrt(tx_power) * (f.conj().T @ h)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    scale = np.sqrt(noise_var / 2.0)
    noise = scale * (rng.standard_normal(clean.shape) + 1j * rng.standard_normal(clean.shape))
    return RxSnapshot(y=clean + noise, scheme=book.scheme, noise_var=noise_var, tx_power=tx_power)


def snapshot_to_csv(snap: RxSnapshot, path) -> None:
    """Dump a snapshot as (j, q, re, im) rows for estimator-only regressions."""
    with open(path, "w", newline="") as fh:
        fh.write(
            f"# scheme={snap.scheme} noise_var={snap.noise_var!r} tx_power={snap.tx_power!r}\n"
        )
        writer = csv.writer(fh)
        writer.writerow(["j", "q", "re", "im"])
        rows, cols = snap.y.shape
        for j in range(rows):
            for q in range(cols):
                writer.writerow([j, q, repr(snap.y[j, q].real), repr(snap.y[j, q].imag)])


def snapshot_from_csv(path) -> RxSnapshot:
    with open(path, newline="") as fh:
        meta_line = fh.readline().strip()
        meta = dict(item.split("=", 1) for item in meta_line.lstrip("# ").split())
        reader = csv.DictReader(fh)
        entries = [(int(r["j"]), int(r["q"]), float(r["re"]), float(r["im"])) for r in reader]
    n_j = max(e[0] for e in entries) + 1
    n_q = max(e[1] for e in entries) + 1
    y = np.zeros((n_j, n_q), dtype=complex)
    for j, q, re, im in entries:
        y[j, q] = re + 1j * im
    return RxSnapshot(
        y=y,
        scheme=meta["scheme"],
        noise_var=float(meta["noise_var"]),
        tx_power=float(meta["tx_power"]),
    )
