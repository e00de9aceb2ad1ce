import math

import numpy as np
import pytest
from scipy.integrate import quad

from controllers.functionals_controller import (
    action,
    action_scaling_derivative,
    energy,
    functional_values,
    kinetic,
    mass,
    potential,
    rescale,
    weinstein,
)
from controllers.grid_controller import RadialField, RadialGrid, norm
from models.params_model import ModelParams
from utils.errors import DomainError


@pytest.fixture(scope="module")
def fine_grid_3d():
    return RadialGrid(3, 12.0, 384)


def test_mass_of_gaussian_in_plane():
    grid = RadialGrid(2, 8.0, 256)
    v = RadialField(grid, np.exp(-grid.nodes ** 2))
    assert mass(v) == pytest.approx(math.pi / 2, rel=1e-12)


def test_potential_against_adaptive_quadrature():
    grid = RadialGrid(2, 8.0, 256)
    params = ModelParams(N=2, b=1, q=3)
    v = RadialField(grid, np.exp(-grid.nodes ** 2))
    oracle, _ = quad(lambda r: 2 * math.pi * r * r * math.exp(-4 * r * r), 0, 8.0, epsabs=1e-14)
    assert potential(v, params) == pytest.approx(oracle, rel=1e-10)


def test_kinetic_of_gaussian_against_adaptive_quadrature(fine_grid_3d):
    v = RadialField(fine_grid_3d, np.exp(-fine_grid_3d.nodes ** 2))
    # Δe^{-r²} = (4r² - 6) e^{-r²} in three dimensions
    oracle, _ = quad(lambda r: 4 * math.pi * r * r * ((4 * r * r - 6) * math.exp(-r * r)) ** 2, 0, 12.0)
    assert kinetic(v) == pytest.approx(oracle, rel=1e-9)


def test_energy_and_action_split(params_2d, grid_2d, gaussian):
    v = gaussian(grid_2d, amplitude=0.7)
    values = functional_values(v, params_2d)
    assert values.energy == pytest.approx(energy(v, params_2d), rel=1e-14)
    assert values.action == pytest.approx(action(v, params_2d), rel=1e-14)
    assert values.action - values.energy == pytest.approx(values.mass, rel=1e-12)
    assert values.weinstein == pytest.approx(weinstein(v, params_2d), rel=1e-14)


def test_weinstein_undefined_for_zero_field(params_2d, grid_2d):
    with pytest.raises(DomainError):
        weinstein(RadialField.zeros(grid_2d), params_2d)


def test_scaling_laws_for_random_rescalings():
    params = ModelParams(N=3, b=1, q=5)
    grid = RadialGrid(3, 30.0, 1024)
    v = RadialField(grid, np.exp(-grid.nodes ** 2))
    m, k, p, K = mass(v), kinetic(v), potential(v, params), weinstein(v, params)
    rng = np.random.default_rng(11)
    N, b, q = params.N, params.b, params.q
    for _ in range(100):
        kappa, nu = rng.uniform(0.5, 2.0, size=2)
        w = rescale(v, kappa, nu)
        assert mass(w) == pytest.approx(kappa ** 2 * nu ** (-N) * m, rel=1e-6)
        assert kinetic(w) == pytest.approx(kappa ** 2 * nu ** (4 - N) * k, rel=1e-6)
        assert potential(w, params) == pytest.approx(kappa ** (1 + q) * nu ** (-N - b) * p, rel=1e-6)
        assert weinstein(w, params) == pytest.approx(K, rel=1e-6)


def test_rescale_matches_sampling_the_profile(grid_2d):
    v = RadialField(grid_2d, np.exp(-grid_2d.nodes ** 2))
    w = rescale(v, 1.5, 0.7)
    np.testing.assert_allclose(w.values.real, 1.5 * np.exp(-(0.7 * grid_2d.nodes) ** 2), atol=1e-8)


def test_rescale_identity_and_truncation(grid_2d, gaussian):
    v = gaussian(grid_2d)
    same = rescale(v, 1, 1)
    np.testing.assert_array_equal(same.values, v.values)
    assert same.values is not v.values

    shrunk = rescale(v, 1.0, 2.0)
    beyond = 2.0 * grid_2d.nodes > grid_2d.R_max
    assert np.all(shrunk.values[beyond] == 0)


def test_action_scaling_derivative_is_the_monomial_combination(params_2d, grid_2d, gaussian):
    v = gaussian(grid_2d, amplitude=1.3, width=0.8)
    m, k, p = mass(v), kinetic(v), potential(v, params_2d)
    # α = 1, β = 0 is d/dλ S(λv) = 2K + 2M - 2P
    assert action_scaling_derivative(v, params_2d, 1.0, 0.0) == pytest.approx(2 * k + 2 * m - 2 * p, rel=1e-12)


def test_action_scaling_derivative_vanishes_at_ground_state(gs_2d, params_2d):
    scale = gs_2d.potential_z
    for alpha, beta in [(1.0, 0.0), (0.0, 1.0), (0.5, -1.5)]:
        derivative = action_scaling_derivative(gs_2d.zeta, params_2d, alpha, beta)
        assert abs(derivative) < 1e-6 * scale


def test_action_stationary_along_random_radial_perturbations(gs_2d, params_2d):
    zeta = gs_2d.zeta
    grid = zeta.grid
    rng = np.random.default_rng(5)
    eps = 1e-4
    for _ in range(20):
        values = np.zeros(grid.M)
        for _ in range(3):
            centre, width = rng.uniform(0, 5), rng.uniform(0.3, 2)
            values += rng.normal() * np.exp(-((grid.nodes - centre) / width) ** 2)
        h = RadialField(grid, values) * (norm(zeta) / norm(RadialField(grid, values)))
        derivative = (action(zeta + eps * h, params_2d) - action(zeta - eps * h, params_2d)) / (2 * eps)
        # the second variation along h is of size ‖Δh‖² + ‖h‖², so a non-critical point would show O(1) slopes
        assert abs(derivative) < 1e-6 * (kinetic(h) + mass(h))
