"""Half-space concentration profiles, functional inequalities, scaling law."""

import numpy as np
import pytest

from cube_transport import (
    GridDensity,
    RestrictedGaussian,
    Uniform,
    alpha_theorem1,
    build_density,
    centered_cube_grid,
    check_concentration,
    counterexample_scaling,
    covariance_ratio,
    estimate_diag_second_derivative_bound,
    halfspace_profile,
    lipschitz_tail,
    normalize,
    poincare_lsi_check,
    r_from_m,
    sample_grid,
    unit_cube_grid,
)
from cube_transport.concentration import BASE_ALPHA, LSI_FACTOR, POINCARE_FACTOR


# ---------------------------------------------------------------- constants


def test_constants():
    assert BASE_ALPHA == 3.0
    assert POINCARE_FACTOR == pytest.approx(20.0 / 9.0)
    assert LSI_FACTOR == pytest.approx(160.0 / 9.0)


def test_alpha_flat_curvature():
    # M = 0 collapses to the base constant times the side
    assert alpha_theorem1(1.0, 0.0) == pytest.approx(3.0)
    assert alpha_theorem1(2.0, 0.0) == pytest.approx(6.0)


def test_alpha_grows_with_curvature():
    # alpha = 3 ell exp(M ell^2 / 8)
    assert alpha_theorem1(1.0, 8.0 * np.log(2.0)) == pytest.approx(6.0)
    assert alpha_theorem1(1.0, 4.0) > alpha_theorem1(1.0, 1.0)


def test_r_from_m():
    # R = exp(M ell^2 / 8)
    assert r_from_m(0.0) == pytest.approx(1.0)
    assert r_from_m(1.0) == pytest.approx(np.exp(1.0 / 8.0))
    assert r_from_m(2.0, side=0.5) == pytest.approx(np.exp(2.0 * 0.25 / 8.0))


# ---------------------------------------------------------------- profiles


def test_uniform_axis_profile_exact():
    # uniform on the unit square, direction e1: median 1/2,
    # mu(x1 <= 1/2 + t) = 1/2 + t, so 1 - measured = 1/2 - t
    d = build_density(Uniform(), unit_cube_grid(2, 64))
    ts = np.linspace(0.0, 0.45, 10)
    prof = halfspace_profile(d, np.array([1.0, 0.0]), ts, alpha=3.0)
    np.testing.assert_allclose(prof.measured, 0.5 + ts, atol=1e-12)
    assert prof.median_offset == pytest.approx(0.5, abs=1e-9)
    np.testing.assert_allclose(prof.bound, 1.0 - np.exp(-(ts / 3.0) ** 2), rtol=1e-12)


def test_uniform_profile_passes_base_alpha():
    d = build_density(Uniform(), unit_cube_grid(2, 64))
    ts = np.linspace(0.0, 1.2, 20)
    prof = halfspace_profile(d, np.array([1.0, 0.0]), ts, alpha=3.0)
    rep = check_concentration(prof)
    assert rep.passed


def test_uniform_fails_tiny_alpha():
    # negative control: alpha = 0.1 demands far more mass than exists
    d = build_density(Uniform(), unit_cube_grid(2, 64))
    ts = np.linspace(0.0, 1.2, 20)
    prof = halfspace_profile(d, np.array([1.0, 0.0]), ts, alpha=0.1)
    rep = check_concentration(prof)
    assert not rep.passed


def test_diagonal_direction_grid_profile():
    d = build_density(Uniform(), unit_cube_grid(2, 48))
    u = np.array([1.0, 1.0]) / np.sqrt(2.0)
    ts = np.linspace(0.0, 1.0, 12)
    prof = halfspace_profile(d, u, ts, alpha=3.0)
    assert np.all(np.diff(prof.measured) >= -1e-12)
    assert prof.measured[0] >= 0.5 - 0.05  # median cell quantization
    assert check_concentration(prof).passed


def test_sampled_profile_matches_grid_profile():
    d = build_density(RestrictedGaussian((0.5, 0.5), ((4.0, 0.0), (0.0, 4.0))),
                      unit_cube_grid(2, 32))
    ts = np.linspace(0.0, 0.6, 8)
    u = np.array([1.0, 0.0])
    grid_prof = halfspace_profile(d, u, ts, alpha=3.0)
    batch = sample_grid(d, 200000, seed=21)
    samp_prof = halfspace_profile(batch, u, ts, alpha=3.0)
    np.testing.assert_allclose(samp_prof.measured, grid_prof.measured, atol=0.01)
    assert samp_prof.std_error.max() > 0.0
    assert grid_prof.std_error.max() == 0.0


def test_gaussian_grid_profile_passes_paper_alpha():
    grid = unit_cube_grid(2, 64)
    d = build_density(RestrictedGaussian((0.5, 0.5), ((1.0, 0.0), (0.0, 1.0))), grid)
    mhat = estimate_diag_second_derivative_bound(d)
    assert mhat == pytest.approx(1.0, abs=1e-6)
    ts = np.linspace(0.0, 1.2, 20)
    for u in (np.array([1.0, 0.0]), np.array([1.0, 1.0]) / np.sqrt(2.0)):
        prof = halfspace_profile(d, u, ts, alpha=alpha_theorem1(1.0, mhat))
        assert check_concentration(prof, name="thm-1.1").passed
        prof2 = halfspace_profile(d, u, ts, alpha=3.0 * r_from_m(mhat))
        assert check_concentration(prof2, name="thm-1.2").passed


def test_lipschitz_tail_gaussian_rate():
    rng = np.random.default_rng(3)
    vals = rng.normal(0.0, 1.0, 200000)
    ts = np.linspace(0.1, 2.5, 15)
    fit = lipschitz_tail(vals, ts, alpha=np.sqrt(2.0))
    # P(|Z| > t) ~ exp(-t^2/2) up to polynomial factors; with
    # alpha = sqrt(2) the fitted rate is near 1
    assert 0.7 <= fit.rate <= 1.4


# ---------------------------------------------------------------- covariance


def test_covariance_ratio_uniform_1d():
    d = build_density(Uniform(), unit_cube_grid(1, 32))
    # Var = 1/12 exactly after the jitter correction; alpha = 3
    assert covariance_ratio(d, 3.0) == pytest.approx((1.0 / 12.0) / 9.0, abs=1e-12)


def test_covariance_ratio_samples_close_to_grid():
    d = build_density(Uniform(), unit_cube_grid(2, 16))
    batch = sample_grid(d, 100000, seed=5)
    grid_ratio = covariance_ratio(d, 3.0)
    samp_ratio = covariance_ratio(batch, 3.0)
    assert samp_ratio == pytest.approx(grid_ratio, rel=0.05)


# ---------------------------------------------------------------- poincare/lsi


def test_poincare_anchor_cosine():
    # f = cos(pi x) on uniform [0,1]: Var = 1/2, energy = pi^2/2,
    # ratio far below (20/9)
    grid = unit_cube_grid(1, 1024)
    d = build_density(Uniform(), grid)
    fn = np.cos(np.pi * grid.axis_centers(0))
    reps = poincare_lsi_check(d, 0.0, 1.0, [fn])
    poin = [r for r in reps if r.name == "cor-4.5-poincare"][0]
    lsi = [r for r in reps if r.name == "cor-4.5-lsi"][0]
    assert poin.passed and lsi.passed
    assert poin.lhs == pytest.approx(0.5, abs=1e-3)
    assert poin.rhs == pytest.approx((20.0 / 9.0) * np.pi**2 / 2.0, rel=1e-3)


def test_poincare_constant_not_violated_by_first_eigenfunction():
    # cos(pi x) is the extremal function: Var/energy = 1/pi^2 < 20/9
    grid = unit_cube_grid(1, 512)
    d = build_density(Uniform(), grid)
    fn = np.cos(np.pi * grid.axis_centers(0))
    reps = poincare_lsi_check(d, 0.0, 1.0, [fn])
    poin = reps[0]
    assert poin.lhs / (poin.rhs / ((20.0 / 9.0))) == pytest.approx(1.0 / np.pi**2, rel=5e-3)


def test_poincare_lsi_gaussian_measure():
    grid = centered_cube_grid(1, 256)
    d = build_density(RestrictedGaussian((0.0,), ((4.0,),)), grid)
    x = grid.axis_centers(0)
    fns = [np.sin(2.0 * np.pi * x), x**2, np.exp(x)]
    reps = poincare_lsi_check(d, 4.0, 1.0, fns)
    assert len(reps) == 6
    assert all(r.passed for r in reps)


def test_constant_function_skipped_in_lsi():
    grid = unit_cube_grid(1, 64)
    d = build_density(Uniform(), grid)
    reps = poincare_lsi_check(d, 0.0, 1.0, [np.ones(64)])
    # zero-energy functions produce trivially passing rows with a note
    assert all(r.passed for r in reps)


def test_poincare_2d_random_functions():
    rng = np.random.default_rng(8)
    grid = unit_cube_grid(2, 32)
    d = build_density(RestrictedGaussian((0.5, 0.5), ((2.0, 0.0), (0.0, 2.0))), grid)
    fns = [rng.standard_normal(grid.shape) for _ in range(3)]
    smooth = []
    for fn in fns:
        # smooth the noise so the gradient quadrature is meaningful
        k = np.ones(5) / 5.0
        sm = np.apply_along_axis(lambda v: np.convolve(v, k, mode="same"), 0, fn)
        sm = np.apply_along_axis(lambda v: np.convolve(v, k, mode="same"), 1, sm)
        smooth.append(sm)
    reps = poincare_lsi_check(d, 2.0, 1.0, smooth)
    assert all(r.passed for r in reps)


# ---------------------------------------------------------------- scaling


def test_counterexample_scaling_small():
    res = counterexample_scaling([256, 1024], n_samples=20000, seed=0)
    assert [r.n for r in res.rows] == [256, 1024]
    for row in res.rows:
        assert abs(row.mass_fraction - 0.5) <= 3.0 / np.sqrt(row.n_samples)
        assert row.acceptance > 0.99
    # width shrinks like sqrt(n / log n) in the predicted column
    assert res.rows[1].predicted > res.rows[0].predicted
    assert 0.3 <= res.slope <= 0.7


def test_scaling_is_reproducible():
    a = counterexample_scaling([128, 256], n_samples=5000, seed=3)
    b = counterexample_scaling([128, 256], n_samples=5000, seed=3)
    assert a.rows[0].t_star == b.rows[0].t_star
    assert a.slope == b.slope


def test_scaling_input_validation():
    with pytest.raises(ValueError):
        counterexample_scaling([256], n_samples=5000, seed=0)
    with pytest.raises(ValueError):
        counterexample_scaling([16, 32], n_samples=5000, seed=0)
    with pytest.raises(ValueError):
        counterexample_scaling([256, 512], n_samples=10, seed=0)
