"""Halfspace concentration profiles, spectral-gap style checks, and the
dimension-scaling experiment for the equicorrelated construction.

A concentration profile compares, for a unit direction u and offsets t, the
measured mass of {x . u <= median + t} against the target lower bound
1 - exp(-t^2 / alpha^2). Grid measures are evaluated exactly along axis
directions (piecewise-linear marginal CDFs) and by cell-center quadrature
otherwise; sample batches use empirical fractions with a binomial standard
error, and the check allows a 3 SE statistical margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityError, GridDensity
from .reports import VerificationReport, make_report
from .sampler import SampleBatch, iter_equicorrelated_cube

POINCARE_FACTOR = 20.0 / 9.0
LSI_FACTOR = 160.0 / 9.0
BASE_ALPHA = 3.0


def alpha_theorem1(side: float, curvature_bound: float) -> float:
    """Concentration constant 3 * side * exp(curvature_bound * side^2 / 8)."""
    if side <= 0:
        raise DensityError("side must be positive")
    if curvature_bound < 0:
        raise DensityError("curvature bound must be nonnegative")
    return BASE_ALPHA * side * math.exp(curvature_bound * side * side / 8.0)


def r_from_m(curvature_bound: float, side: float = 1.0) -> float:
    """Axis convexity ratio exp(curvature_bound * side^2 / 8) implied by a
    diagonal curvature bound on -log f."""
    if curvature_bound < 0:
        raise DensityError("curvature bound must be nonnegative")
    return math.exp(curvature_bound * side * side / 8.0)


@dataclass(frozen=True, eq=False)
class ConcentrationProfile:
    direction: np.ndarray
    median_offset: float
    ts: np.ndarray
    measured: np.ndarray
    std_error: np.ndarray
    bound: np.ndarray
    alpha: float
    n_samples: int = 0
    label: str = ""


def _validate_ts(ts) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or len(ts) == 0:
        raise DensityError("ts must be a nonempty 1d array")
    if np.any(np.diff(ts) <= 0):
        raise DensityError("ts must be strictly increasing")
    if ts[0] < 0:
        raise DensityError("ts must be nonnegative")
    return ts


def _unit(direction, dim: int) -> np.ndarray:
    u = np.asarray(direction, dtype=float).reshape(dim)
    norm = float(np.sqrt((u * u).sum()))
    if norm <= 0:
        raise DensityError("direction must be nonzero")
    return u / norm


def halfspace_profile(mu, direction, ts, alpha: float,
                      label: str = "") -> ConcentrationProfile:
    """Profile of mu{x . u <= c + t} against 1 - exp(-t^2/alpha^2), where c
    is the median of x . u. ``mu`` is a GridDensity or a SampleBatch."""
    ts = _validate_ts(ts)
    if alpha <= 0:
        raise DensityError("alpha must be positive")
    bound = 1.0 - np.exp(-((ts / alpha) ** 2))
    if isinstance(mu, GridDensity):
        u = _unit(direction, mu.grid.dim)
        c, measured = _grid_halfspace_masses(mu, u, ts)
        se = np.zeros_like(ts)
        n_samples = 0
    elif isinstance(mu, SampleBatch):
        u = _unit(direction, mu.points.shape[1])
        proj = mu.points @ u
        c = float(np.quantile(proj, 0.5))
        n_samples = len(proj)
        sorted_proj = np.sort(proj)
        counts = np.searchsorted(sorted_proj, c + ts, side="right")
        measured = counts / n_samples
        se = np.sqrt(measured * (1.0 - measured) / n_samples)
    else:
        raise DensityError("mu must be a GridDensity or a SampleBatch")
    return ConcentrationProfile(u, c, ts, measured, se, bound, float(alpha),
                                n_samples, label)


def _grid_halfspace_masses(mu: GridDensity, u: np.ndarray, ts: np.ndarray):
    """Median offset and masses of {x.u <= c + t} for a grid density.

    Axis-parallel directions are exact (piecewise-linear marginal CDF);
    generic directions are resolved at cell centers, an O(h) step function.
    """
    grid = mu.grid
    nonzero = np.flatnonzero(np.abs(u) > 1e-12)
    if len(nonzero) == 1:
        axis = int(nonzero[0])
        sign = float(np.sign(u[axis]))
        others = tuple(k for k in range(grid.dim) if k != axis)
        line = mu.values.sum(axis=others) if others else mu.values
        cdf = np.concatenate(([0.0], np.cumsum(line)))
        cdf /= cdf[-1]
        nodes = grid.axis_nodes(axis)
        if sign > 0:
            c = float(np.interp(0.5, cdf, nodes))
            measured = np.interp(c + ts, nodes, cdf)
        else:
            c = -float(np.interp(0.5, cdf, nodes))
            measured = 1.0 - np.interp(-c - ts, nodes, cdf)
        return c, measured
    centers = np.stack([cm.reshape(-1) for cm in grid.centers_mesh()], axis=1)
    proj = centers @ u
    w = mu.values.reshape(-1) * grid.cell_volume
    w = w / w.sum()
    order = np.argsort(proj, kind="stable")
    proj_sorted = proj[order]
    cum = np.cumsum(w[order])
    c = float(proj_sorted[np.searchsorted(cum, 0.5, side="left")])
    idx = np.searchsorted(proj_sorted, c + ts, side="right")
    cum_padded = np.concatenate(([0.0], cum))
    return c, cum_padded[idx]


def check_concentration(profile: ConcentrationProfile, name: str = "thm-1.2",
                        grid_m: int = 0, note: str = "") -> VerificationReport:
    """Pass when measured + 3 SE >= bound at every offset.

    Encoded as lhs = max(bound - measured - 3 SE) <= 0, so the default
    absolute tolerance 1e-6 is the only margin for exact (grid) profiles.
    """
    margin = profile.bound - profile.measured - 3.0 * profile.std_error
    lhs = float(margin.max())
    return make_report(name, lhs, 0.0, profile.alpha, grid_m=grid_m, note=note)


@dataclass(frozen=True, eq=False)
class LipschitzTailFit:
    """Least-squares fit of log tail mass against -(t/alpha)^2.

    Diagnostic only: rate < 1 means the observed tail is heavier than the
    reference profile exp(-(t/alpha)^2) on the fitted range.
    """

    ts: np.ndarray
    tails: np.ndarray
    alpha: float
    rate: float
    prefactor: float


def lipschitz_tail(values: np.ndarray, ts, alpha: float) -> LipschitzTailFit:
    """Empirical two-sided tails P(|v - median| >= t) with a log-linear fit
    against the profile C exp(-rate * (t/alpha)^2). Never asserts."""
    ts = _validate_ts(ts)
    v = np.asarray(values, dtype=float).reshape(-1)
    dev = np.abs(v - np.median(v))
    tails = np.array([(dev >= t).mean() for t in ts])
    usable = tails > 0
    if usable.sum() >= 2:
        x = (ts[usable] / alpha) ** 2
        y = np.log(tails[usable])
        slope, intercept = np.polyfit(x, y, 1)
        rate, prefactor = -float(slope), float(np.exp(intercept))
    else:
        rate, prefactor = float("nan"), float("nan")
    return LipschitzTailFit(ts, tails, float(alpha), rate, prefactor)


def covariance_ratio(mu, alpha: float) -> float:
    """Largest covariance eigenvalue divided by alpha^2.

    Grid densities include the within-cell uniform contribution h^2/12 per
    axis, so a one-cell density has the exact single-cell covariance.
    """
    if alpha <= 0:
        raise DensityError("alpha must be positive")
    if isinstance(mu, GridDensity):
        grid = mu.grid
        w = mu.values.reshape(-1) * grid.cell_volume
        w = w / w.sum()
        centers = np.stack([c.reshape(-1) for c in grid.centers_mesh()], axis=1)
        mean = w @ centers
        centered = centers - mean
        cov = (centered * w[:, None]).T @ centered
        cov += np.eye(grid.dim) * (grid.h ** 2 / 12.0)
    elif isinstance(mu, SampleBatch):
        pts = mu.points
        if len(pts) < 2:
            raise DensityError("need at least 2 samples for a covariance")
        cov = np.atleast_2d(np.cov(pts, rowvar=False))
    else:
        raise DensityError("mu must be a GridDensity or a SampleBatch")
    top = float(np.linalg.eigvalsh(cov)[-1])
    return top / (alpha * alpha)


def poincare_lsi_check(mu: GridDensity, curvature_bound: float, side: float,
                       test_functions) -> list:
    """Variance and entropy bounds against the gradient energy, with the
    explicit factor side^2 exp(curvature_bound side^2 / 4):

        Var(f)     <= (20/9)  factor  E|grad f|^2
        Ent(f^2)   <= (160/9) factor  E|grad f|^2   (f normalized in L2)

    test_functions are cell-center arrays shaped like mu.values. Returns a
    pair of reports per test function.
    """
    if not isinstance(mu, GridDensity):
        raise DensityError("poincare_lsi_check works on grid densities")
    if side <= 0 or curvature_bound < 0:
        raise DensityError("need side > 0 and curvature_bound >= 0")
    grid = mu.grid
    w = mu.values * grid.cell_volume
    total = w.sum()
    if total <= 0:
        raise DensityError("measure has zero mass")
    w = w / total
    factor = side * side * math.exp(curvature_bound * side * side / 4.0)
    reports = []
    for i, func in enumerate(test_functions):
        fvals = np.asarray(func, dtype=float)
        if fvals.shape != grid.shape:
            raise DensityError(f"test function {i} has shape {fvals.shape}, "
                               f"expected {grid.shape}")
        grads = np.gradient(fvals, grid.h)
        if grid.dim == 1:
            grads = [grads]
        energy = float(sum((gk * gk * w).sum() for gk in grads))
        mean = float((fvals * w).sum())
        var = float(((fvals - mean) ** 2 * w).sum())
        reports.append(make_report("cor-4.5-poincare", var,
                                   POINCARE_FACTOR * factor * energy,
                                   POINCARE_FACTOR * factor,
                                   grid_m=grid.cells_per_axis,
                                   note=f"test {i}"))
        nrm2 = float((fvals * fvals * w).sum())
        if nrm2 <= 0:
            reports.append(make_report("cor-4.5-lsi", 0.0, 0.0,
                                       LSI_FACTOR * factor,
                                       grid_m=grid.cells_per_axis,
                                       note=f"test {i}: zero function, skipped"))
            continue
        scaled_sq = fvals * fvals / nrm2
        ent_terms = np.where(scaled_sq > 0,
                             scaled_sq * np.log(np.where(scaled_sq > 0, scaled_sq, 1.0)),
                             0.0)
        entropy = float((ent_terms * w).sum())
        reports.append(make_report("cor-4.5-lsi", entropy,
                                   LSI_FACTOR * factor * energy / nrm2,
                                   LSI_FACTOR * factor,
                                   grid_m=grid.cells_per_axis,
                                   note=f"test {i}"))
    return reports


# ---------------------------------------------------------------------------
# dimension scaling of the equicorrelated construction


@dataclass(frozen=True)
class ScalingRow:
    n: int
    t_star: float
    predicted: float
    mass_fraction: float
    acceptance: float
    n_samples: int


@dataclass(frozen=True, eq=False)
class ScalingResult:
    """Per-dimension enlargement radii t*(n) with the sqrt(n / log n)
    reference curve calibrated at the smallest n."""

    rows: list
    kappa: float
    slope: float
    seed: int


def counterexample_scaling(ns, n_samples: int, seed: int) -> ScalingResult:
    """For each dimension n, the radius t*(n): the largest t for which the
    halfspace {sum x_i <= 0} enlarged by t (in the Euclidean ball metric,
    which reduces to the threshold t sqrt(n) for the row sum) still holds at
    most 2/3 of the mass. Row sums are streamed, never materialized as
    point matrices.
    """
    ns = sorted(int(n) for n in ns)
    if len(ns) < 2:
        raise DensityError("need at least two dimensions to fit a slope")
    if min(ns) < 64:
        raise DensityError("scaling experiment is stated for n >= 64")
    if n_samples < 1000:
        raise DensityError("need at least 1000 samples per dimension")
    rows = []
    for n in ns:
        sums = []
        accepted = 0
        candidates = 0
        for block, drawn in iter_equicorrelated_cube(n, seed):
            sums.append(block.sum(axis=1))
            accepted += len(block)
            candidates += drawn
            if accepted >= n_samples:
                break
        all_sums = np.concatenate(sums)[:n_samples]
        k = (2 * n_samples) // 3
        t_star = float(np.partition(all_sums, k)[k] / math.sqrt(n))
        mass_fraction = float((all_sums <= 0).mean())
        rows.append(ScalingRow(n, t_star, 0.0, mass_fraction,
                               accepted / candidates, n_samples))
    kappa = rows[0].t_star * math.sqrt(math.log(rows[0].n) / rows[0].n)
    rows = [ScalingRow(r.n, r.t_star,
                       kappa * math.sqrt(r.n / math.log(r.n)),
                       r.mass_fraction, r.acceptance, r.n_samples)
            for r in rows]
    log_n = np.log([r.n for r in rows])
    log_t = np.log([r.t_star for r in rows])
    slope = float(np.polyfit(log_n, log_t, 1)[0])
    return ScalingResult(rows, float(kappa), slope, int(seed))
