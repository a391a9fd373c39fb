"""Command line entry point.

Subcommands run seeded verification suites and write three artifacts into
the output directory: report.json (full payload, sorted keys), report.csv
(one row per check), and one SVG per concentration profile. Repeated runs
with the same configuration produce byte-identical reports except for the
timestamp field.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 bad
configuration or usage.

Configuration precedence: command line flags > JSON config file >
CUBE_TRANSPORT_SEED environment variable (seed only) > built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np
import scipy

from . import __version__
from .concentration import (alpha_theorem1, check_concentration,
                            counterexample_scaling, covariance_ratio,
                            halfspace_profile, lipschitz_tail,
                            poincare_lsi_check, r_from_m)
from .density import (ConvexPower, DensityError, Grid, GridDensity,
                      RestrictedGaussian, Uniform, build_density,
                      check_midpoint_log_concavity,
                      estimate_axis_convexity_ratio,
                      estimate_diag_second_derivative_bound, marginalize_last,
                      normalize, spec_from_dict, unit_cube_grid)
from .families import (draw_trig_coeffs, random_center_test_function,
                       random_logconcave_spec_1d, random_logconcave_spec_nd,
                       random_node_test_function, random_smooth_density,
                       trig_density)
from .functionals import (check_tire_le_entropy,
                          check_transport_entropy_sandwich, legendre_tire_bound,
                          relative_entropy)
from .knothe import (check_facet_preservation, check_theorem31, cost_split,
                     displacement_cost, knothe_map, pushforward_error,
                     tire_bracket)
from .reports import (CSV_HEADER, VerificationReport, make_report,
                      refinement_consistent)
from .sampler import sample_equicorrelated_cube, sample_grid
from .svg import write_profile_svg
from .transport1d import (check_lemma_lambda, check_prop_quadratic,
                          check_segment_bound, check_cheeger_lambda,
                          deficit_1d, log_gap, monotone_map,
                          quadratic_cost_1d)

MAX_TOTAL_CELLS = 1 << 24
MIN_SAMPLES = 1000
# pinned reference for the n=1024 enlargement radius of the scaling experiment
REFERENCE_T_STAR_1024 = 0.052

DEFAULTS = {
    "seed": 0,
    "out_dir": "cube-transport-out",
    "m": 64,
    "dim": 2,
    "pairs": 20,
    "n_samples": 100000,
    "t_max": 1.2,
    "t_count": 20,
    "dims": [2, 4],
    "ns": [256, 1024, 4096],
    "test_functions": 6,
    "plot": True,
    "threads": 1,
    "source": {"variant": "uniform"},
    "target": None,
}


class ConfigError(ValueError):
    pass


def load_config(path_or_none, overrides: dict) -> dict:
    cfg = dict(DEFAULTS)
    env_seed = os.environ.get("CUBE_TRANSPORT_SEED")
    if env_seed is not None:
        try:
            cfg["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"CUBE_TRANSPORT_SEED must be an integer: {env_seed!r}") from exc
    if path_or_none is not None:
        try:
            with open(path_or_none) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path_or_none}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: dict) -> None:
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed must be a nonnegative integer")
    if not isinstance(cfg["m"], int) or cfg["m"] < 2:
        raise ConfigError("m must be an integer >= 2")
    if not isinstance(cfg["dim"], int) or cfg["dim"] < 1:
        raise ConfigError("dim must be an integer >= 1")
    if cfg["m"] ** cfg["dim"] > MAX_TOTAL_CELLS:
        raise ConfigError(f"m^dim exceeds the cell budget 2^24 ({cfg['m']}^{cfg['dim']})")
    if not isinstance(cfg["pairs"], int) or cfg["pairs"] < 1:
        raise ConfigError("pairs must be an integer >= 1")
    if not isinstance(cfg["n_samples"], int) or cfg["n_samples"] < MIN_SAMPLES:
        raise ConfigError(f"n_samples must be an integer >= {MIN_SAMPLES}")
    if cfg["t_max"] <= 0:
        raise ConfigError("t_max must be positive")
    if not isinstance(cfg["t_count"], int) or cfg["t_count"] < 2:
        raise ConfigError("t_count must be an integer >= 2")
    if (not isinstance(cfg["dims"], list) or not cfg["dims"]
            or any((not isinstance(n, int)) or n < 1 for n in cfg["dims"])):
        raise ConfigError("dims must be a nonempty list of positive integers")
    if (not isinstance(cfg["ns"], list) or len(cfg["ns"]) < 2
            or any((not isinstance(n, int)) or n < 2 for n in cfg["ns"])):
        raise ConfigError("ns must be a list of at least two integers >= 2")
    if not isinstance(cfg["test_functions"], int) or cfg["test_functions"] < 1:
        raise ConfigError("test_functions must be an integer >= 1")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise ConfigError("threads must be an integer >= 1")
    for key in ("source", "target"):
        if cfg[key] is not None and not isinstance(cfg[key], dict):
            raise ConfigError(f"{key} must be a density spec object or null")


def _ts(cfg) -> np.ndarray:
    return np.linspace(0.0, cfg["t_max"], cfg["t_count"])


def _rng(cfg, label: str) -> np.random.Generator:
    # one independent stream per suite, keyed by seed and suite name
    name_tag = sum(ord(c) << (8 * i) for i, c in enumerate(label[:6]))
    return np.random.Generator(np.random.Philox(key=np.array(
        [cfg["seed"], name_tag], dtype=np.uint64)))


def _linear_target_1d(grid: Grid) -> GridDensity:
    return build_density(ConvexPower(0.0, (2.0 / grid.side,), 1.0), grid)


# ---------------------------------------------------------------------------
# suites


def suite_density_check(cfg) -> dict:
    grid = unit_cube_grid(cfg["dim"], cfg["m"])
    src_spec = spec_from_dict(cfg["source"]) if cfg["source"] else None
    if src_spec is None:
        raise ConfigError("density-check needs a source spec")
    tgt_spec = spec_from_dict(cfg["target"]) if cfg["target"] else None
    reports = []
    metrics = {}
    for tag, spec in (("source", src_spec), ("target", tgt_spec)):
        if spec is None:
            continue
        d = build_density(spec, grid)
        reports.append(make_report(f"mass-normalization-{tag}",
                                   abs(d.total_mass - 1.0), 0.0, 1.0,
                                   grid_m=cfg["m"], abs_tol=1e-12))
        ok, worst = check_midpoint_log_concavity(d)
        reports.append(make_report(f"midpoint-log-concavity-{tag}", worst, 0.0,
                                   1.0, grid_m=cfg["m"], abs_tol=1e-9,
                                   note="" if ok else "violated"))
        ratio = estimate_axis_convexity_ratio(d)
        metrics[f"axis_ratio_{tag}"] = ratio
        if cfg["m"] >= 3:
            curv = estimate_diag_second_derivative_bound(d)
            metrics[f"curvature_bound_{tag}"] = curv
            metrics[f"implied_ratio_{tag}"] = r_from_m(max(curv, 0.0), grid.side)
        if grid.dim >= 2:
            reports.append(make_report(f"marginal-ratio-monotone-{tag}",
                                       estimate_axis_convexity_ratio(marginalize_last(d)),
                                       ratio, 1.0, grid_m=cfg["m"], rel_tol=0.0,
                                       abs_tol=1e-9))
    return {"reports": reports, "metrics": metrics}


def suite_verify_1d(cfg) -> dict:
    rng = _rng(cfg, "v1d")
    reports = []
    metrics = {}
    # fixed anchor pair: uniform onto the linear density at high resolution
    anchor_grid = unit_cube_grid(1, 1024)
    f0 = build_density(Uniform(), anchor_grid)
    g0 = _linear_target_1d(anchor_grid)
    t0 = monotone_map(f0, g0)
    metrics["anchor_map_at_quarter"] = float(t0(0.25))
    metrics["anchor_cost"] = quadratic_cost_1d(f0, t0)
    metrics["anchor_deficit"] = deficit_1d(f0, g0, t0)
    metrics["anchor_entropy"] = relative_entropy(g0, f0)
    reports.append(check_prop_quadratic(f0, g0, 1.0, t0))
    reports.append(check_lemma_lambda(f0, g0, t0))
    # scalar inequality sweep
    xs = np.logspace(-3, 3, 10000)
    gaps = log_gap(xs)
    reports.append(make_report("eq-2.3", float(-gaps.min()), 0.0, 0.3,
                               abs_tol=1e-12))
    metrics["log_gap_at_2"] = float(log_gap(2.0))
    # random pairs at m and 2m
    grid = unit_cube_grid(1, cfg["m"])
    fine_grid = unit_cube_grid(1, 2 * cfg["m"])
    for i in range(cfg["pairs"]):
        spec = random_logconcave_spec_1d(rng, 0.0, 1.0)
        coeffs = draw_trig_coeffs(rng, 1)
        f = build_density(spec, grid)
        g = trig_density(coeffs, grid)
        ratio = estimate_axis_convexity_ratio(f)
        coarse_prop = check_prop_quadratic(f, g, ratio)
        coarse_lam = check_lemma_lambda(f, g)
        reports.extend([coarse_prop, coarse_lam])
        f2 = build_density(spec, fine_grid)
        g2 = trig_density(coeffs, fine_grid)
        fine_prop = check_prop_quadratic(f2, g2, estimate_axis_convexity_ratio(f2))
        reports.append(_refinement_report("prop-2.1-refinement", coarse_prop,
                                          fine_prop))
        # segment and gradient-energy checks on the same source
        a, b = np.sort(rng.uniform(0.0, 1.0, size=2))
        if b - a > 1e-3:
            reports.append(check_segment_bound(f, ratio, float(a), float(b)))
        reports.append(check_cheeger_lambda(f, ratio,
                                            random_node_test_function(rng, grid)))
    return {"reports": reports, "metrics": metrics}


def _refinement_report(name: str, coarse: VerificationReport,
                       fine: VerificationReport) -> VerificationReport:
    drift = coarse.rel_tol * max(abs(coarse.rhs), abs(fine.rhs)) + coarse.abs_tol
    loss = coarse.slack - fine.slack
    return VerificationReport(
        name=name, lhs=loss, rhs=drift, constant_used=1.0, slack=drift - loss,
        passed=refinement_consistent(coarse, fine), grid_m=fine.grid_m,
        rel_tol=0.0, abs_tol=0.0, note="slack drift under grid refinement")


def _product_target_2d(grid: Grid) -> GridDensity:
    mesh = grid.centers_mesh()
    vals = np.ones(grid.shape)
    for axis in range(grid.dim):
        vals = vals * 2.0 * (mesh[axis] - grid.origin[axis]) / grid.side
    return normalize(GridDensity(grid, vals))


def suite_verify_knothe(cfg) -> dict:
    rng = _rng(cfg, "vkn")
    reports = []
    metrics = {}
    # anchor: uniform onto the separable linear product on the square
    grid = unit_cube_grid(2, 64)
    f0 = build_density(Uniform(), grid)
    g0 = _product_target_2d(grid)
    t0 = knothe_map(f0, g0)
    metrics["anchor_cost"] = displacement_cost(t0, f0)
    metrics["anchor_tire"] = tire_bracket(f0, g0, t0)
    reports.append(check_theorem31(f0, g0, estimate_axis_convexity_ratio(f0), t0))
    reports.append(check_facet_preservation(t0))
    ks = pushforward_error(t0, f0, g0, cfg["n_samples"], cfg["seed"])
    reports.append(make_report("pushforward-ks", ks,
                               2.0 / np.sqrt(cfg["n_samples"]) + 2.0 * grid.h,
                               2.0, grid_m=64))
    base_cost, fiber_cost = cost_split(t0, f0)
    split_gap = abs(displacement_cost(t0, f0) - base_cost - fiber_cost)
    reports.append(make_report("cost-decomposition", split_gap, 0.0, 1.0,
                               grid_m=64, abs_tol=1e-9))
    # random pairs in 2d, one in 3d
    grids = [unit_cube_grid(2, min(cfg["m"], 32))] * cfg["pairs"] + [unit_cube_grid(3, 16)]
    for i, g_grid in enumerate(grids):
        spec = random_logconcave_spec_nd(rng, g_grid.dim, g_grid.origin, g_grid.side)
        f = build_density(spec, g_grid)
        g = random_smooth_density(rng, g_grid, amplitude=0.5)
        t = knothe_map(f, g)
        reports.append(check_theorem31(f, g, estimate_axis_convexity_ratio(f), t))
        reports.append(check_facet_preservation(t))
    return {"reports": reports, "metrics": metrics}


def suite_tire(cfg) -> dict:
    rng = _rng(cfg, "tir")
    reports = []
    metrics = {}
    # anchor: uniform onto linear in 1d, where the bracket meets the entropy
    grid = unit_cube_grid(1, 512)
    f0 = build_density(Uniform(), grid)
    g0 = _linear_target_1d(grid)
    reports.append(check_tire_le_entropy(f0, g0))
    metrics["anchor_tire"] = tire_bracket(f0, g0)
    metrics["anchor_entropy"] = relative_entropy(g0, f0)
    metrics["anchor_legendre"] = legendre_tire_bound(f0, g0)
    reports.append(make_report("eq-4.2", metrics["anchor_tire"],
                               metrics["anchor_legendre"], 1.0, grid_m=512))
    # random 1d and 2d pairs
    for i in range(cfg["pairs"]):
        if i % 2 == 0:
            g_grid = unit_cube_grid(1, 64)
            spec = random_logconcave_spec_1d(rng, 0.0, 1.0)
        else:
            g_grid = unit_cube_grid(2, 16)
            spec = random_logconcave_spec_nd(rng, 2, g_grid.origin, g_grid.side)
        f = build_density(spec, g_grid)
        g = random_smooth_density(rng, g_grid, amplitude=0.5)
        t = knothe_map(f, g)
        reports.append(check_tire_le_entropy(f, g, t))
        reports.append(make_report("eq-4.2", tire_bracket(f, g, t),
                                   legendre_tire_bound(f, g), 1.0,
                                   grid_m=g_grid.cells_per_axis))
    # exact-coupling sandwich at small scale
    sandwich_grid = unit_cube_grid(2, 8)
    for i in range(min(cfg["pairs"], 10)):
        spec = random_logconcave_spec_nd(rng, 2, sandwich_grid.origin,
                                         sandwich_grid.side)
        f = build_density(spec, sandwich_grid)
        g = random_smooth_density(rng, sandwich_grid, amplitude=0.5)
        reports.extend(check_transport_entropy_sandwich(
            f, g, estimate_axis_convexity_ratio(f)))
    return {"reports": reports, "metrics": metrics}


def _grid_m_for_dim(n: int) -> int:
    # keep total cells near 2^16 so sampling tables stay small
    return max(4, int(round((1 << 16) ** (1.0 / n))))


def suite_concentration(cfg) -> dict:
    reports = []
    metrics = {}
    profiles = []
    ts = _ts(cfg)
    rng = _rng(cfg, "con")
    seed = cfg["seed"]
    n_samples = cfg["n_samples"]
    # uniform measure: the dimension-free profile with alpha = 3
    uni_grid = unit_cube_grid(2, 64)
    uni = build_density(Uniform(), uni_grid)
    direction = np.array([1.0, 0.0])
    grid_profile = halfspace_profile(uni, direction, ts, 3.0, label="uniform-grid")
    profiles.append(grid_profile)
    reports.append(check_concentration(grid_profile, "cor-1.3", grid_m=64))
    batch = sample_grid(uni, n_samples, seed)
    sample_profile = halfspace_profile(batch, direction, ts, 3.0,
                                       label="uniform-samples")
    profiles.append(sample_profile)
    reports.append(check_concentration(sample_profile, "cor-1.3", grid_m=64,
                                       note="sampled"))
    # negative control: a strict alpha must fail
    control = halfspace_profile(uni, direction, ts, 0.1, label="negative-control")
    control_report = check_concentration(control, "negative-control-raw", grid_m=64)
    reports.append(make_report("negative-control",
                               1.0 if control_report.passed else 0.0, 0.0, 0.1,
                               grid_m=64, note="passes when the strict alpha fails"))
    metrics["covariance_ratio_uniform"] = covariance_ratio(uni, 3.0)
    # restricted Gaussians across dimensions
    for n in cfg["dims"]:
        m = _grid_m_for_dim(n)
        grid = unit_cube_grid(n, m)
        spec = RestrictedGaussian(tuple([0.5] * n),
                                  tuple(map(tuple, np.eye(n))))
        d = build_density(spec, grid)
        curv = estimate_diag_second_derivative_bound(d)
        metrics[f"curvature_bound_n{n}"] = curv
        alpha_t1 = alpha_theorem1(grid.side, max(curv, 0.0))
        alpha_ratio = 3.0 * r_from_m(max(curv, 0.0), grid.side)
        batch = sample_grid(d, n_samples, seed)
        u = np.zeros(n)
        u[0] = 1.0
        prof1 = halfspace_profile(batch, u, ts, alpha_t1, label=f"gaussian-n{n}-thm1")
        profiles.append(prof1)
        reports.append(check_concentration(prof1, "thm-1.1", grid_m=m,
                                           note=f"n={n}"))
        prof2 = halfspace_profile(batch, u, ts, alpha_ratio,
                                  label=f"gaussian-n{n}-ratio")
        profiles.append(prof2)
        reports.append(check_concentration(prof2, "thm-1.2", grid_m=m,
                                           note=f"n={n}"))
        metrics[f"covariance_ratio_n{n}"] = covariance_ratio(batch, alpha_t1)
        fit = lipschitz_tail(batch.points @ u, ts[1:], alpha_t1)
        metrics[f"tail_rate_n{n}"] = fit.rate
        metrics[f"tail_prefactor_n{n}"] = fit.prefactor
    # variance and entropy checks on three measures
    measures = [
        (build_density(Uniform(), unit_cube_grid(1, 1024)), 0.0, "uniform-1d"),
        (build_density(RestrictedGaussian((0.5,), ((4.0,),)),
                       unit_cube_grid(1, 256)), 4.0, "gaussian-1d"),
        (build_density(RestrictedGaussian((0.5, 0.5), tuple(map(tuple, 2.0 * np.eye(2)))),
                       unit_cube_grid(2, 32)), 2.0, "gaussian-2d"),
    ]
    anchor = measures[0][0]
    xs = anchor.grid.axis_centers()
    cos_anchor = np.cos(np.pi * xs)
    funcs = [cos_anchor] + [random_center_test_function(rng, anchor.grid)
                            for _ in range(cfg["test_functions"] - 1)]
    anchor_reports = poincare_lsi_check(anchor, 0.0, 1.0, funcs)
    reports.extend(anchor_reports)
    w = anchor.values * anchor.grid.cell_volume
    metrics["cos_variance"] = float((cos_anchor ** 2 * w).sum()
                                    - ((cos_anchor * w).sum()) ** 2)
    grad = np.gradient(cos_anchor, anchor.grid.h)
    metrics["cos_gradient_energy"] = float((grad * grad * w).sum())
    for d, curv, label in measures[1:]:
        funcs = [random_center_test_function(rng, d.grid)
                 for _ in range(cfg["test_functions"])]
        reports.extend(poincare_lsi_check(d, curv, d.grid.side, funcs))
    return {"reports": reports, "metrics": metrics, "profiles": profiles}


def suite_counterexample(cfg) -> dict:
    reports = []
    metrics = {}
    result = counterexample_scaling(cfg["ns"], cfg["n_samples"], cfg["seed"])
    scaling = []
    for row in result.rows:
        scaling.append({"n": row.n, "t_star": row.t_star,
                        "predicted": row.predicted,
                        "mass_fraction": row.mass_fraction,
                        "acceptance": row.acceptance,
                        "n_samples": row.n_samples})
        reports.append(make_report(f"rem-5.1-mass-n{row.n}",
                                   abs(row.mass_fraction - 0.5),
                                   3.0 / np.sqrt(row.n_samples), 3.0,
                                   rel_tol=0.0, abs_tol=0.0))
        metrics[f"acceptance_n{row.n}"] = row.acceptance
        metrics[f"t_star_n{row.n}"] = row.t_star
    reports.append(make_report("rem-5.1-slope", abs(result.slope - 0.5), 0.10,
                               0.5, rel_tol=0.0, abs_tol=0.0,
                               note=f"slope {result.slope:.4f}"))
    for row in result.rows:
        if row.n == 1024:
            rel_err = abs(row.t_star - REFERENCE_T_STAR_1024) / REFERENCE_T_STAR_1024
            reports.append(make_report("rem-5.1-t-star", rel_err, 0.15,
                                       REFERENCE_T_STAR_1024, rel_tol=0.0,
                                       abs_tol=0.0))
    metrics["kappa"] = result.kappa
    metrics["slope"] = result.slope
    return {"reports": reports, "metrics": metrics, "scaling": scaling}


SUITES = {
    "density-check": suite_density_check,
    "verify-1d": suite_verify_1d,
    "verify-knothe": suite_verify_knothe,
    "tire": suite_tire,
    "concentration": suite_concentration,
    "counterexample": suite_counterexample,
}


def run_all(cfg) -> dict:
    merged = {"reports": [], "metrics": {}, "profiles": [], "scaling": []}
    for name in ("density-check", "verify-1d", "verify-knothe", "tire",
                 "concentration", "counterexample"):
        out = SUITES[name](cfg)
        merged["reports"].extend(out.get("reports", []))
        for key, value in out.get("metrics", {}).items():
            merged["metrics"][f"{name}:{key}"] = value
        merged["profiles"].extend(out.get("profiles", []))
        merged["scaling"].extend(out.get("scaling", []))
    return merged


# ---------------------------------------------------------------------------
# emission


def emit_report(out_dir: str, command: str, cfg: dict, outcome: dict) -> bool:
    os.makedirs(out_dir, exist_ok=True)
    reports = outcome.get("reports", [])
    all_pass = all(r.passed for r in reports)
    payload = {
        "command": command,
        "config": cfg,
        "environment": {
            "package_version": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "reports": [r.to_dict() for r in reports],
        "metrics": outcome.get("metrics", {}),
        "scaling": outcome.get("scaling", []),
        "all_pass": all_pass,
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "report.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow(r.to_csv_row())
    if cfg.get("plot", True):
        for profile in outcome.get("profiles", []):
            slug = profile.label.replace(" ", "-") or "profile"
            write_profile_svg(profile, os.path.join(out_dir, f"profile-{slug}.svg"))
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        note = f"  ({r.note})" if r.note else ""
        print(f"[{status}] {r.name}: lhs={r.lhs:.6g} rhs={r.rhs:.6g} "
              f"slack={r.slack:.6g} m={r.grid_m}{note}")
    n_fail = sum(1 for r in reports if not r.passed)
    print(f"{len(reports) - n_fail}/{len(reports)} checks passed; "
          f"artifacts in {out_dir}")
    return all_pass


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cube-transport",
        description="Verification suites for transport maps on cube densities")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("density-check", "structural diagnostics of configured densities"),
        ("verify-1d", "monotone-map inequality suite on the interval"),
        ("verify-knothe", "triangular-map suite on squares and cubes"),
        ("tire", "transport functional bounds and the exact-coupling sandwich"),
        ("concentration", "halfspace profiles and variance/entropy checks"),
        ("counterexample", "dimension scaling of the equicorrelated construction"),
        ("all", "every suite in sequence"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--m", type=int, help="cells per axis for random suites")
        p.add_argument("--dim", type=int, help="dimension for density-check")
        p.add_argument("--pairs", type=int, help="random pairs per suite")
        p.add_argument("--samples", type=int, dest="n_samples",
                       help="sample count for empirical checks")
        p.add_argument("--out", dest="out_dir", help="output directory")
        p.add_argument("--threads", type=int,
                       help="accepted for symmetry; results never depend on it")
        p.add_argument("--dims", help="comma list of dimensions (concentration)")
        p.add_argument("--ns", help="comma list of dimensions (counterexample)")
        p.add_argument("--plot", dest="plot", action="store_true", default=None,
                       help="write SVG profiles (default)")
        p.add_argument("--no-plot", dest="plot", action="store_false",
                       help="skip SVG output")
    return parser


def _parse_int_list(text: str, flag: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag} must be a comma list of integers: {text!r}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "seed": args.seed,
        "m": args.m,
        "dim": args.dim,
        "pairs": args.pairs,
        "n_samples": args.n_samples,
        "out_dir": args.out_dir,
        "threads": args.threads,
        "plot": args.plot,
    }
    try:
        if args.dims is not None:
            overrides["dims"] = _parse_int_list(args.dims, "--dims")
        if args.ns is not None:
            overrides["ns"] = _parse_int_list(args.ns, "--ns")
        cfg = load_config(args.config, overrides)
        if args.command == "all":
            outcome = run_all(cfg)
        else:
            outcome = SUITES[args.command](cfg)
    except (ConfigError, DensityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    all_pass = emit_report(cfg["out_dir"], args.command, cfg, outcome)
    return 0 if all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
