import logging
import math

import numpy as np

from controllers.grid_controller import RadialField, integrate, laplacian
from controllers.params_controller import derived_exponents
from models.params_model import ModelParams
from models.report_model import FunctionalValues
from utils.errors import DomainError

logger = logging.getLogger(__name__)


def mass(v: RadialField) -> float:
    return integrate(v.grid, np.abs(v.values) ** 2)


def kinetic(v: RadialField) -> float:
    """‖Δv‖²"""
    return mass(laplacian(v))


def potential(v: RadialField, params: ModelParams) -> float:
    """∫ |v|^{1+q} |x|^b dx"""
    weight = v.grid.nodes ** params.b
    return integrate(v.grid, np.abs(v.values) ** (1 + params.q) * weight)


def energy(v: RadialField, params: ModelParams) -> float:
    return kinetic(v) - 2 / (1 + params.q) * potential(v, params)


def weinstein_from_values(mass_v: float, kinetic_v: float, potential_v: float, params: ModelParams) -> float:
    ex = derived_exponents(params)
    if potential_v == 0:
        return math.inf
    return math.sqrt(mass_v) ** ex.E * math.sqrt(kinetic_v) ** ex.D / potential_v


def weinstein(v: RadialField, params: ModelParams) -> float:
    """K(v) = ‖v‖^E ‖Δv‖^D / ∫|v|^{1+q}|x|^b; infinite when the potential vanishes"""
    if not np.any(v.values):
        raise DomainError("Weinstein functional is undefined for the zero field")
    return weinstein_from_values(mass(v), kinetic(v), potential(v, params), params)


def action(v: RadialField, params: ModelParams) -> float:
    return kinetic(v) + mass(v) - 2 / (1 + params.q) * potential(v, params)


def functional_values(v: RadialField, params: ModelParams) -> FunctionalValues:
    m, k, p = mass(v), kinetic(v), potential(v, params)
    return FunctionalValues(
        mass=m,
        kinetic=k,
        potential=p,
        energy=k - 2 / (1 + params.q) * p,
        weinstein=weinstein_from_values(m, k, p, params) if np.any(v.values) else math.inf,
        action=k + m - 2 / (1 + params.q) * p,
    )


def action_scaling_derivative(v: RadialField, params: ModelParams, alpha: float, beta: float) -> float:
    """
    d/dλ S(λ^α v(λ^β ·)) at λ = 1, from the monomial scaling laws of the three parts.
    Vanishes at a ground state for every (α, β).
    """
    N, b, q = params.N, params.b, params.q
    m, k, p = mass(v), kinetic(v), potential(v, params)
    return (
        2 * (alpha + beta * (2 - N / 2)) * k
        + 2 * (alpha - beta * N / 2) * m
        - 2 * (alpha * (1 + q) - beta * (N + b)) / (1 + q) * p
    )


def rescale(v: RadialField, kappa: float, nu: float) -> RadialField:
    """
    v^{κ,ν} = κ v(ν ·) on the same grid, evaluated through the element interpolant
    of v. Values at ν r_i >= R_max vanish.
    """
    if kappa == 1 and nu == 1:
        return RadialField(v.grid, v.values.copy())
    grid = v.grid
    return RadialField(grid, kappa * (grid.interpolation_matrix(nu * grid.nodes) @ v.values))
