import numpy as np
import pytest

from controllers.grid_controller import RadialField, RadialGrid
from controllers.ground_state_controller import compute_ground_state
from models.params_model import ModelParams


@pytest.fixture(scope="session")
def params_2d():
    return ModelParams(N=2, b=1, q=4)


@pytest.fixture(scope="session")
def params_3d():
    return ModelParams(N=3, b=1, q=5)


@pytest.fixture(scope="session")
def grid_2d():
    return RadialGrid(2, 20.0, 640)


@pytest.fixture(scope="session")
def grid_3d():
    return RadialGrid(3, 12.0, 384)


@pytest.fixture(scope="session")
def gs_2d(params_2d, grid_2d):
    return compute_ground_state(params_2d, grid_2d)


@pytest.fixture(scope="session")
def gs_3d(params_3d, grid_3d):
    """Mass-supercritical, energy-subcritical: q_m = 13/3 < 5"""
    return compute_ground_state(params_3d, grid_3d)


@pytest.fixture(scope="session")
def gs_mass_critical():
    params = ModelParams(N=2, b=1, q=6)
    return compute_ground_state(params, RadialGrid(2, 16.0, 384))


@pytest.fixture
def gaussian():
    def make(grid, amplitude=1.0, width=1.0, phase=None):
        values = amplitude * np.exp(-((grid.nodes / width) ** 2))
        if phase is not None:
            values = values * np.exp(1j * phase(grid.nodes))
        return RadialField(grid, values)

    return make


@pytest.fixture(scope="session")
def params_smooth():
    """|x|² weight: smooth at the axis, mass-subcritical (q_m = 7)"""
    return ModelParams(N=2, b=2, q=6)


@pytest.fixture(scope="session")
def gs_smooth(params_smooth):
    return compute_ground_state(params_smooth, RadialGrid(2, 16.0, 384))
