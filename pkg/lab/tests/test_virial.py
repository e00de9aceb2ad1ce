import math

import numpy as np
import pytest
import sympy as sym

from controllers.evolution_controller import evolve
from controllers.functionals_controller import kinetic
from controllers.grid_controller import RadialField, RadialGrid
from controllers.ground_state_controller import compute_ground_state
from controllers.virial_controller import (
    blowup_functional_bound,
    build_cutoff,
    certify_cutoff,
    hessian_contraction_radial,
    morawetz,
    morawetz_rhs,
    pure_virial,
    pure_virial_rhs,
    verify_virial,
)
from models.evolution_model import EvolutionConfig, Termination
from models.params_model import ModelParams
from utils.errors import DomainError


@pytest.fixture(scope="module")
def wide_grid():
    return RadialGrid(3, 80.0, 1600)


@pytest.mark.parametrize("R", [2.0, 4.0, 8.0])
def test_cutoff_certificate(wide_grid, R):
    chi = build_cutoff(R, wide_grid)
    certificate = certify_cutoff(chi)
    assert certificate.passed
    assert certificate.inner_max_defect <= 1e-12
    assert certificate.convexity_margin <= 1e-12
    assert certificate.tail_max <= 1e-12

    r = wide_grid.nodes
    inner = r <= R
    np.testing.assert_allclose(chi.derivatives[0][inner], r[inner] ** 2, rtol=1e-12)
    np.testing.assert_allclose(chi.lap[inner], 6.0)


def test_cutoff_scale_constants_do_not_depend_on_R(wide_grid):
    constants = [np.array(certify_cutoff(build_cutoff(R, wide_grid)).scale_constants) for R in (2.0, 4.0, 8.0)]
    for other in constants[1:]:
        np.testing.assert_allclose(other[1:], constants[0][1:], rtol=2e-2)


def test_cutoff_derivative_consistent_with_finite_differences(wide_grid):
    chi = build_cutoff(4.0, wide_grid)
    for k in range(1, 4):
        fd = np.gradient(chi.derivatives[k - 1], wide_grid.nodes)
        np.testing.assert_allclose(fd[2:-2], chi.derivatives[k][2:-2], atol=5e-3 * np.max(np.abs(chi.derivatives[k])) + 1e-12)


def test_cutoff_must_fit_in_grid():
    with pytest.raises(DomainError):
        build_cutoff(4.0, RadialGrid(3, 30.0, 304))
    with pytest.raises(DomainError):
        build_cutoff(0.0, RadialGrid(3, 30.0, 304))


def test_hessian_contraction_matches_cartesian_tensor():
    x, y, r = sym.symbols("x y r", real=True)
    rho = sym.sqrt(x ** 2 + y ** 2)
    chi_r = r ** 4 / (1 + r ** 2)
    re_r = sym.exp(-(r ** 2))
    im_r = r ** 2 * sym.exp(-(r ** 2))

    chi_xy = chi_r.subs(r, rho)
    H_chi = sym.hessian(chi_xy, (x, y))
    H_re = sym.hessian(re_r.subs(r, rho), (x, y))
    H_im = sym.hessian(im_r.subs(r, rho), (x, y))
    cartesian = sym.lambdify((x, y), (H_re * H_chi * H_re).trace() + (H_im * H_chi * H_im).trace(), "numpy")

    radial = [sym.lambdify(r, expr, "numpy") for expr in (
        sym.diff(chi_r, r), sym.diff(chi_r, r, 2),
        sym.diff(re_r, r), sym.diff(re_r, r, 2),
        sym.diff(im_r, r), sym.diff(im_r, r, 2),
    )]
    points = np.array([(0.3, 0.4), (1.0, 0.2), (0.7, 1.1), (1.5, 1.5), (0.1, 1.3)])
    for px, py in points:
        pr = math.hypot(px, py)
        d1, d2, a1, a2, b1, b2 = (float(f(pr)) for f in radial)
        value = hessian_contraction_radial(d1, d2, pr, a1 + 1j * b1, a2 + 1j * b2, 2)
        expected = float(cartesian(px, py))
        assert value == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_morawetz_of_real_field_vanishes(gs_3d):
    chi = pure_virial(gs_3d.zeta.grid)
    assert morawetz(gs_3d.zeta, chi) == 0.0
    assert abs(morawetz(gs_3d.zeta * np.exp(0.3j), chi)) < 1e-12 * gs_3d.mass_z


def test_morawetz_against_closed_form():
    grid = RadialGrid(3, 8.0, 800)
    r = grid.nodes
    v = RadialField(grid, np.exp(1j * r - r ** 2))
    # Im(v' v̄) = |v|², so M = 2∫2r e^{-2r²} dx = 2π in three dimensions
    assert morawetz(v, pure_virial(grid)) == pytest.approx(2 * math.pi, rel=1e-8)


def test_pure_virial_rhs_matches_general_formula(params_3d):
    grid = RadialGrid(3, 10.0, 1000)
    v = RadialField(grid, 0.8 * np.exp(-grid.nodes ** 2))
    general = morawetz_rhs(v, pure_virial(grid), params_3d)
    specialised = pure_virial_rhs(v, params_3d)
    assert abs(general - specialised) < 1e-6 * 16 * kinetic(v)


def test_cutoff_rhs_equals_pure_rhs_inside_plateau(params_3d, wide_grid):
    R = 4.0
    r = wide_grid.nodes
    x = r / (R / 2)
    values = np.zeros(wide_grid.M)
    inside = x < 1
    values[inside] = np.exp(-1 / (1 - x[inside] ** 2))
    v = RadialField(wide_grid, values * np.exp(0.5j * r))
    localised = morawetz_rhs(v, build_cutoff(R, wide_grid), params_3d)
    pure = morawetz_rhs(v, pure_virial(wide_grid), params_3d)
    assert localised == pytest.approx(pure, rel=1e-10)
    assert morawetz(v, build_cutoff(R, wide_grid)) == pytest.approx(morawetz(v, pure_virial(wide_grid)), rel=1e-10)


@pytest.fixture(scope="module")
def focusing_run(params_3d):
    grid = RadialGrid(3, 12.0, 384)
    v0 = RadialField(grid, 0.8 * np.exp(-grid.nodes ** 2))
    return evolve(v0, EvolutionConfig(dt=1e-4, T=0.1, snapshot_stride=10), params_3d)


def test_virial_identity_pure_weight(focusing_run, params_3d):
    chi = pure_virial(focusing_run.snapshots[0].grid)
    report = verify_virial(focusing_run, chi, params_3d)
    assert report.R is None
    assert len(report.times) == len(focusing_run.snapshots) - 2
    assert report.max_relative_mismatch < 1e-2


def test_virial_identity_with_cutoff(focusing_run, params_3d):
    chi = build_cutoff(1.0, focusing_run.snapshots[0].grid)
    report = verify_virial(focusing_run, chi, params_3d)
    assert report.R == 1.0
    assert report.max_relative_mismatch < 1e-2


def test_virial_identity_for_standing_wave(gs_3d, params_3d):
    traj = evolve(gs_3d.zeta, EvolutionConfig(dt=1e-4, T=0.05, snapshot_stride=10), params_3d)
    report = verify_virial(traj, pure_virial(gs_3d.zeta.grid), params_3d)
    assert max(abs(value) for value in report.morawetz) < 1e-4 * gs_3d.kinetic_z
    assert report.max_relative_rhs < 5e-3


def test_virial_needs_three_snapshots(gs_3d, params_3d):
    traj = evolve(gs_3d.zeta, EvolutionConfig(dt=1e-4, T=2e-4, snapshot_stride=1), params_3d)
    traj.snapshots = traj.snapshots[:2]
    with pytest.raises(DomainError):
        verify_virial(traj, pure_virial(gs_3d.zeta.grid), params_3d)


def test_blowup_bound_for_standing_wave(gs_3d, params_3d):
    traj = evolve(gs_3d.zeta, EvolutionConfig(dt=1e-4, T=0.02, snapshot_stride=20), params_3d)
    report = blowup_functional_bound(traj, pure_virial(gs_3d.zeta.grid))
    assert report.max_abs_morawetz < 1e-4 * gs_3d.kinetic_z
    assert math.isfinite(report.empirical_constant)


@pytest.mark.slow
def test_virial_identity_with_cutoff_four(params_3d):
    grid = RadialGrid(3, 40.0, 1280)
    v0 = RadialField(grid, 0.8 * np.exp(-grid.nodes ** 2))
    traj = evolve(v0, EvolutionConfig(dt=1e-4, T=0.1, snapshot_stride=10), params_3d)
    chi = build_cutoff(4.0, grid)
    assert certify_cutoff(chi).passed
    assert verify_virial(traj, chi, params_3d).max_relative_mismatch < 1e-2


@pytest.mark.slow
def test_localised_virial_turns_negative_and_decreasing_above_threshold():
    params = ModelParams(N=3, b=1, q=5)
    grid = RadialGrid(3, 30.0, 1024)
    gs = compute_ground_state(params, grid)
    traj = evolve(gs.zeta * 1.03, EvolutionConfig(dt=1e-4, T=1.0, snapshot_stride=100), params)
    assert traj.terminated != Termination.COMPLETED
    assert traj.t_stop < 1.0

    report = blowup_functional_bound(traj, build_cutoff(2.0, grid))
    assert report.eventually_negative
    assert report.eventually_decreasing
    assert report.slope < 0
    assert report.decreasing_from is not None and report.decreasing_from < traj.t_stop
