import math

import numpy as np
import pytest

from controllers.evolution_controller import (
    absorbing_mask,
    detect_blowup,
    evolve,
    focusing_scale,
    growth_exponent,
    step,
)
from controllers.functionals_controller import kinetic, mass
from controllers.grid_controller import RadialField, RadialGrid, norm
from models.evolution_model import EvolutionConfig, Termination, Trajectory
from models.params_model import ModelParams
from utils.errors import DomainError, StepFailure


@pytest.fixture(scope="module")
def small_grid():
    return RadialGrid(2, 16.0, 256)


def test_zero_field_stays_zero(small_grid, params_2d):
    result = step(RadialField.zeros(small_grid), 1e-3, params_2d)
    assert not np.any(result.values)


def test_linear_flow_is_unitary(small_grid, params_2d, gaussian):
    v = gaussian(small_grid, phase=lambda r: r)
    m0 = mass(v)
    for _ in range(50):
        v = step(v, 1e-2, params_2d, nonlinear=False)
    assert mass(v) == pytest.approx(m0, rel=1e-12)


def test_time_reversal(small_grid, params_2d, gaussian):
    v0 = gaussian(small_grid, amplitude=0.8)
    v = v0
    for _ in range(20):
        v = step(v, 1e-3, params_2d)
    for _ in range(20):
        v = step(v, -1e-3, params_2d)
    assert norm(v - v0) <= 1e-10 * norm(v0)


def test_step_rejects_non_finite(small_grid, params_2d):
    values = np.zeros(small_grid.M)
    values[5] = np.inf
    with pytest.raises(StepFailure):
        step(RadialField(small_grid, values), 1e-3, params_2d)


def test_evolve_checks_dimension(small_grid, gaussian):
    with pytest.raises(DomainError):
        evolve(gaussian(small_grid), EvolutionConfig(T=1e-3, dt=1e-4), ModelParams(N=3, b=1, q=5))


def test_small_data_conservation(small_grid, params_2d, gaussian):
    config = EvolutionConfig(dt=1e-4, T=1.0, snapshot_stride=500)
    traj = evolve(gaussian(small_grid, amplitude=0.01), config, params_2d)
    assert traj.terminated == Termination.COMPLETED
    assert traj.steps == 10_000
    assert traj.t_stop == pytest.approx(1.0)
    assert traj.times[-1] == pytest.approx(1.0)
    assert traj.mass_drift < 1e-10
    assert traj.energy_drift < 1e-7


def test_energy_drift_is_second_order(small_grid, params_smooth, gaussian):
    v0 = gaussian(small_grid, amplitude=0.8)
    drifts = []
    for dt in (4e-3, 2e-3):
        traj = evolve(v0, EvolutionConfig(dt=dt, T=0.2, snapshot_stride=1), params_smooth)
        drifts.append(traj.energy_drift)
    assert drifts[0] / drifts[1] >= 3.0


def test_standing_wave(gs_smooth, params_smooth):
    zeta = gs_smooth.zeta
    config = EvolutionConfig(dt=1e-4, T=1.0, snapshot_stride=1000)
    traj = evolve(zeta, config, params_smooth)
    final = traj.snapshots[-1]
    expected = zeta.values * np.exp(1j * traj.times[-1])
    deviation = np.max(np.abs(final.values - expected)) / np.max(np.abs(zeta.values))
    assert deviation < 1e-3
    kinetic_series = np.asarray(traj.kinetic_series)
    assert np.max(np.abs(kinetic_series - kinetic_series[0])) < 1e-4 * kinetic_series[0]


@pytest.mark.slow
def test_supercritical_data_above_threshold_focuses(gs_3d, params_3d):
    config = EvolutionConfig(dt=2e-4, T=4.0, snapshot_stride=50)
    traj = evolve(gs_3d.zeta * 1.2, config, params_3d)
    report = detect_blowup(traj, config)
    assert report.kinetic_root_ratio >= config.blowup_factor
    assert traj.terminated in (Termination.BLOWUP_DETECTED, Termination.STEP_FAILURE)
    assert traj.t_stop < config.T


def test_absorbing_mask_only_damps_outer_layer(small_grid):
    mask = absorbing_mask(small_grid, 1e-3, 20.0)
    inner = small_grid.nodes < 0.9 * small_grid.R_max
    assert np.all(mask[inner] == 1)
    assert np.all(mask[~inner] <= 1)
    assert mask[-1] < 1


def test_absorbing_run_loses_mass_only_at_boundary(small_grid, params_2d, gaussian):
    config = EvolutionConfig(dt=1e-3, T=0.05, snapshot_stride=10, absorbing=True)
    traj = evolve(gaussian(small_grid, amplitude=0.1), config, params_2d)
    assert traj.mass_series[-1] <= traj.mass_series[0] * (1 + 1e-12)


def test_focusing_scale():
    assert focusing_scale(16.0, 1.0) == pytest.approx(2.0)
    assert math.isinf(focusing_scale(1.0, 0.0))


def test_growth_exponent_of_exponential_series():
    times = np.linspace(0, 1, 11)
    assert growth_exponent(times, np.exp(3 * times)) == pytest.approx(3.0, rel=1e-10)
    assert growth_exponent([0.0], [1.0]) is None


def _synthetic(kinetic_values, mass_value=1.0, dr=0.01):
    times = list(np.arange(len(kinetic_values)) * 0.1)
    return Trajectory(
        params=ModelParams(N=3, b=1, q=5),
        dr=dr,
        dt=0.1,
        times=times,
        mass_series=[mass_value] * len(kinetic_values),
        energy_series=[0.0] * len(kinetic_values),
        kinetic_series=list(kinetic_values),
    )


def test_detect_blowup_on_synthetic_series():
    config = EvolutionConfig()
    flat = detect_blowup(_synthetic([1.0] * 5), config)
    assert not flat.detected
    assert flat.kinetic_root_ratio == pytest.approx(1.0)

    growing = [1.0, 10.0, 1e2, 1e4, 1e8]
    report = detect_blowup(_synthetic(growing), config)
    # first flagged at k = 1e4: ratio 100, scale 0.1 < 16 dr
    assert report.detected
    assert report.t_detect == pytest.approx(0.3)
    assert report.kinetic_root_ratio == pytest.approx(1e4)
    assert any("strictly increasing" in note for note in report.notes)


def test_detect_blowup_requires_unresolved_scale():
    config = EvolutionConfig()
    report = detect_blowup(_synthetic([1.0, 1e4], dr=1e-6), config)
    assert not report.detected
    assert report.kinetic_root_ratio == pytest.approx(100.0)
    assert any("resolved" in note for note in report.notes)
