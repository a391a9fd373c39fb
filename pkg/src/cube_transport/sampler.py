"""Reproducible sampling from grid densities and from the equicorrelated
Gaussian construction.

All randomness comes from counter-based Philox streams keyed by
(seed, domain tag, batch/chunk index), so any batch can be regenerated
bit-for-bit in isolation and results do not depend on how work is split.

Grid sampling is exact for the piecewise-constant density: cells are drawn
coordinate by coordinate through conditional CDF tables, then a uniform
jitter places the point inside the cell.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .density import DegenerateDensityError, DensityError, GridDensity

_DOMAIN_GRID = 1
_DOMAIN_EQUICORRELATED = 2

MAX_POINT_BUDGET = 1 << 27  # rows * dim guard for materialized batches


def _philox(seed: int, domain: int, index: int) -> np.random.Generator:
    mask = (1 << 64) - 1
    key = np.array([int(seed) & mask, ((domain << 48) | index) & mask],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Points of shape (N, dim) plus the seed and a fingerprint of the
    distribution they were drawn from."""

    points: np.ndarray
    seed: int
    fingerprint: str


def _density_fingerprint(d: GridDensity) -> str:
    payload = json.dumps(d.grid.to_dict(), sort_keys=True).encode()
    digest = hashlib.sha256(payload + d.values.tobytes())
    return digest.hexdigest()[:16]


def sample_grid(d: GridDensity, n_samples: int, seed: int,
                batch_index: int = 0) -> SampleBatch:
    """Draw n_samples points from a normalized grid density.

    Sequential conditional sampling: coordinate k is drawn from its exact
    conditional distribution given the cells already chosen, via one
    searchsorted against an offset-stacked CDF table per axis.
    """
    if n_samples < 1:
        raise DensityError("n_samples must be >= 1")
    if not d.is_normalized(tol=1e-6):
        raise DensityError("sample_grid expects a normalized density")
    grid = d.grid
    n, m = grid.dim, grid.cells_per_axis
    if n_samples * n > MAX_POINT_BUDGET:
        raise DensityError("requested batch exceeds the materialized-point budget")
    # tail[k] = values summed over axes > k, shape (m,)*(k+1)
    tail = [None] * n
    tail[n - 1] = d.values
    for k in range(n - 2, -1, -1):
        tail[k] = tail[k + 1].sum(axis=-1)
    rng = _philox(seed, _DOMAIN_GRID, batch_index)
    u_cell = rng.random((n_samples, n))
    u_jit = rng.random((n_samples, n))
    cells = np.empty((n_samples, n), dtype=np.int64)
    first = np.cumsum(tail[0])
    cells[:, 0] = np.clip(np.searchsorted(first, u_cell[:, 0] * first[-1],
                                          side="right"), 0, m - 1)
    prefix = cells[:, 0].copy()
    for k in range(1, n):
        rows = tail[k].reshape(-1, m)
        row_cdf = np.cumsum(rows, axis=1)
        totals = row_cdf[:, -1:]
        with np.errstate(invalid="ignore", divide="ignore"):
            row_cdf = np.where(totals > 0, row_cdf / totals, 1.0)
        stacked = (row_cdf + np.arange(rows.shape[0])[:, None]).reshape(-1)
        pos = np.searchsorted(stacked, prefix + u_cell[:, k], side="right")
        cells[:, k] = pos - prefix * m
        prefix = prefix * m + cells[:, k]
    points = grid.origin + (cells + u_jit) * grid.h
    return SampleBatch(points, int(seed), _density_fingerprint(d))


def empirical_marginal_distance(batch: SampleBatch, d: GridDensity) -> float:
    """Largest per-axis KS distance between the sample and the exact marginal."""
    pts = batch.points
    if pts.shape[1] != d.grid.dim:
        raise DensityError("batch dimension does not match the density")
    worst = 0.0
    for axis in range(d.grid.dim):
        others = tuple(k for k in range(d.grid.dim) if k != axis)
        line = d.values.sum(axis=others) if others else d.values
        cdf = np.concatenate(([0.0], np.cumsum(line)))
        cdf /= cdf[-1]
        nodes = d.grid.axis_nodes(axis)
        s = np.sort(pts[:, axis])
        c = np.interp(s, nodes, cdf)
        i = np.arange(1, len(s) + 1)
        worst = max(worst, float(max((i / len(s) - c).max(),
                                     (c - (i - 1) / len(s)).max())))
    return worst


# ---------------------------------------------------------------------------
# equicorrelated Gaussian on the centered cube


def equicorrelated_scale(n: int) -> float:
    if n < 2:
        raise DensityError("equicorrelated construction needs n >= 2")
    return 1.0 / (100.0 * math.sqrt(math.log(n)))


def default_chunk_rows(n: int) -> int:
    # fixed formula: the chunk layout must not depend on caller preferences,
    # or substreams would stop being reproducible
    return max(256, (1 << 22) // n)


def iter_equicorrelated_cube(n: int, seed: int):
    """Yield (accepted_points_block, candidates_drawn) forever.

    Each coordinate is scale * (Z_i + Z_0) for a shared Z_0, i.e. a Gaussian
    vector with covariance scale^2 (Id + ones); draws outside the centered
    unit cube are rejected. Chunk c uses the Philox substream
    (seed, chunk domain, c), so consumers may stop at any point and later
    reproduce the exact same stream.
    """
    scale = equicorrelated_scale(n)
    rows = default_chunk_rows(n)
    chunk = 0
    while True:
        rng = _philox(seed, _DOMAIN_EQUICORRELATED, chunk)
        z = rng.standard_normal((rows, n + 1))
        y = (z[:, 1:] + z[:, :1]) * scale
        inside = np.abs(y).max(axis=1) <= 0.5
        yield y[inside], rows
        chunk += 1


def sample_equicorrelated_cube(n: int, n_samples: int, seed: int):
    """Accepted points from the equicorrelated construction, as
    (SampleBatch, acceptance_rate). Aborts if the acceptance rate drops
    below 1% (the construction is designed to make rejection rare)."""
    if n_samples < 1:
        raise DensityError("n_samples must be >= 1")
    if n_samples * n > MAX_POINT_BUDGET:
        raise DensityError("requested batch exceeds the materialized-point budget")
    blocks = []
    accepted = 0
    candidates = 0
    for block, drawn in iter_equicorrelated_cube(n, seed):
        blocks.append(block)
        accepted += len(block)
        candidates += drawn
        if accepted >= n_samples:
            break
        if candidates >= 10 * default_chunk_rows(n) and accepted < 0.01 * candidates:
            raise DegenerateDensityError(
                f"acceptance rate {accepted / candidates:.4f} below 1%")
    points = np.concatenate(blocks, axis=0)[:n_samples]
    rate = accepted / candidates
    payload = json.dumps({"construction": "equicorrelated_cube", "n": n,
                          "scale": equicorrelated_scale(n)}, sort_keys=True)
    fingerprint = hashlib.sha256(payload.encode()).hexdigest()[:16]
    return SampleBatch(points, int(seed), fingerprint), float(rate)
