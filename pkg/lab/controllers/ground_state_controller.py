import logging
import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from controllers.functionals_controller import (
    action,
    kinetic,
    mass,
    potential,
    rescale,
    weinstein,
)
from controllers.grid_controller import RadialField, RadialGrid, bilaplacian, norm
from controllers.params_controller import derived_exponents, require_regime
from models.ground_state_model import GroundState, GroundStateSettings
from models.params_model import ModelParams, Theorem
from utils.errors import DomainError, NumericalError, RegimeError

logger = logging.getLogger(__name__)

# window used to tell a stagnating Weinstein value from a cycling one
STAGNATION_WINDOW = 20
# a flat Weinstein value only ends the iteration once the profile change is this close to tol_profile
STAGNATION_SLACK = 1e3
CYCLING_WINDOW = 6
# ‖φ‖ = ‖Δφ‖ = 1 is enforced to this accuracy
NORMALIZATION_TOL = 1e-12
NORMALIZATION_MAX_ITER = 20


def default_init(grid: RadialGrid, width: float = 1.0) -> RadialField:
    return RadialField.from_function(grid, lambda r: np.exp(-((r / width) ** 2)))


def _resolvent(grid: RadialGrid, a: float, c: float):
    """a·Δ² + c·Id and its LU factorisation, computed once per solve"""
    if not (a > 0 and c > 0):
        raise RegimeError(
            f"a·Δ² + c·Id is not positive definite (a={a:g}, c={c:g}); energy-critical boundary or beyond"
        )
    operator = a * grid.bilaplacian_matrix + c * sp.identity(grid.M, format="csr")
    return operator, splu(operator.tocsc())


def _nonlinearity(u: np.ndarray, weight: np.ndarray, q: float) -> np.ndarray:
    return weight * np.abs(u) ** (q - 1) * u


def _fixed_point(grid, params, a, c, u0, max_iter, tol_profile, tol_weinstein, mixing, label):
    """
    Renormalised fixed point u <- m(u)^{q/(q-1)} (a·Δ² + c)^{-1} |x|^b|u|^{q-1}u with the
    stabilising factor m(u) = <(aΔ²+c)u, u> / <N(u), u>. Returns (u, iterations, K history).
    """
    operator, lu = _resolvent(grid, a, c)
    weight = grid.nodes ** params.b
    w = grid.weights
    power = params.q / (params.q - 1)
    u = np.real(u0).astype(float)
    history = []
    damped = False

    for k in range(1, max_iter + 1):
        nonlinear = _nonlinearity(u, weight, params.q)
        numerator = np.dot(w, u * (operator @ u))
        denominator = np.dot(w, u * nonlinear)
        if not (np.isfinite(denominator) and denominator > 0):
            raise NumericalError(
                f"{label}: fixed point diverged at iteration {k} (<N(u), u> = {denominator})",
                payload={"weinstein_history": history[-50:]},
            )
        update = (numerator / denominator) ** power * lu.solve(nonlinear)
        if damped:
            update = mixing * update + (1 - mixing) * u
        change = np.linalg.norm(np.sqrt(w) * (update - u)) / np.linalg.norm(np.sqrt(w) * update)
        u = update

        K = weinstein(RadialField(grid, u), params)
        if not np.isfinite(K) or K <= 0 or K < 1e-300:
            raise NumericalError(
                f"{label}: Weinstein value collapsed to {K} at iteration {k}; check the regime and the grid",
                payload={"weinstein_history": history[-50:]},
            )
        history.append(K)
        logger.debug(f"{label} iteration {k}: K={K:.15e} change={change:.3e}")

        if change < tol_profile:
            logger.info(f"{label}: converged after {k} iterations (profile change {change:.2e})")
            return u, k, history
        if len(history) > STAGNATION_WINDOW:
            recent = history[-STAGNATION_WINDOW:]
            if (max(recent) - min(recent)) <= tol_weinstein * K and change < STAGNATION_SLACK * tol_profile:
                logger.info(f"{label}: Weinstein value stagnated after {k} iterations")
                return u, k, history
        if not damped and len(history) > CYCLING_WINDOW:
            steps = np.diff(history[-CYCLING_WINDOW:])
            if np.sum(steps > 1e-14 * K) >= CYCLING_WINDOW // 2 and np.sum(steps < -1e-14 * K) >= 2:
                damped = True
                logger.warning(f"{label}: Weinstein value oscillates; switching to damped updates")

    raise NumericalError(
        f"{label}: no convergence after {max_iter} iterations",
        payload={"weinstein_history": history[-50:]},
    )


def normalize_minimizer(field: RadialField) -> tuple[RadialField, float]:
    """
    Rescale a minimiser to φ = κ field(ν ·) with ‖φ‖ = ‖Δφ‖ = 1. K is invariant under
    the rescaling, so C_opt is unchanged. Returns φ and the total ν.
    """
    nu = 1.0
    for _ in range(NORMALIZATION_MAX_ITER):
        scaled = rescale(field, 1.0, nu)
        phi = scaled * (1 / norm(scaled))
        k = kinetic(phi)
        if abs(k - 1) < NORMALIZATION_TOL:
            return phi, nu
        # ‖Δ·‖² of the mass-normalised field grows like ν⁴
        nu *= k ** -0.25
    if abs(k - 1) > 100 * NORMALIZATION_TOL:
        raise NumericalError(
            f"could not normalise the minimiser: ‖Δφ‖² = {k:.15g} after {NORMALIZATION_MAX_ITER} rescalings",
            payload={"nu": nu, "kinetic": k},
        )
    return phi, nu


def minimize_weinstein(
    params: ModelParams,
    grid: RadialGrid,
    init: RadialField | None = None,
    settings: GroundStateSettings | None = None,
    trace: dict | None = None,
) -> tuple[RadialField, float]:
    """
    Minimise K over radial fields. Returns φ with ‖φ‖ = ‖Δφ‖ = 1 together with
    C_opt = 1/K(φ).
    """
    settings = settings or GroundStateSettings()
    require_regime(params, Theorem.GN)
    ex = derived_exponents(params)
    if init is None:
        init = default_init(grid, settings.init_width)
    start = np.abs(init.values)
    if not np.any(start):
        raise DomainError("initial field for the minimisation is zero")

    start_field = RadialField(grid, start / norm(RadialField(grid, start)))
    k_start = weinstein(start_field, params)
    u, iterations, history = _fixed_point(
        grid, params, ex.D, ex.E, start,
        settings.max_iter, settings.tol_profile, settings.tol_weinstein, settings.mixing,
        label="minimize_weinstein",
    )
    phi, nu = normalize_minimizer(RadialField(grid, u))
    c_opt = 1 / weinstein(phi, params)
    logger.info(
        f"C_opt = {c_opt:.12g} for N={params.N}, b={params.b:g}, q={params.q:g} "
        f"(K from {k_start:.6g} to {1 / c_opt:.6g}, normalising scale ν-1 = {nu - 1:.2e})"
    )
    if trace is not None:
        trace.update(iterations=iterations, weinstein_history=history, nu=nu, k_start=k_start)
    return phi, c_opt


def euler_residual(zeta: RadialField, params: ModelParams) -> float:
    """Relative L² residual of ζ + Δ²ζ - |x|^b|ζ|^{q-1}ζ"""
    nonlinear = RadialField(zeta.grid, _nonlinearity(zeta.values, zeta.grid.nodes ** params.b, params.q))
    residual = zeta + bilaplacian(zeta) - nonlinear
    scale = norm(nonlinear)
    return norm(residual) / scale if scale > 0 else math.inf


def pohozaev_residuals_from_values(
    mass_v: float, kinetic_v: float, potential_v: float, params: ModelParams
) -> tuple[float, float]:
    ex = derived_exponents(params)
    if potential_v == 0:
        return math.inf, math.inf
    return (
        abs(potential_v - (1 + params.q) / ex.E * mass_v) / potential_v,
        abs(potential_v - (1 + params.q) / ex.D * kinetic_v) / potential_v,
    )


def pohozaev_residuals(zeta: RadialField, params: ModelParams) -> tuple[float, float]:
    return pohozaev_residuals_from_values(mass(zeta), kinetic(zeta), potential(zeta, params), params)


def sharp_constant_formula(mass_z: float, params: ModelParams) -> float:
    """C_opt = (1+q)/E (E/D)^{D/2} ‖ζ‖^{-(q-1)}"""
    ex = derived_exponents(params)
    return (1 + params.q) / ex.E * (ex.E / ex.D) ** (ex.D / 2) * math.sqrt(mass_z) ** (-(params.q - 1))


def ground_state_from_minimizer(
    phi: RadialField,
    c_opt: float,
    params: ModelParams,
    settings: GroundStateSettings | None = None,
    iterations: int = 0,
) -> GroundState:
    """
    Undo the two-parameter scaling φ = κ ζ(ν ·) with ν = (E/D)^{1/4},
    κ = ((E/D)^{b/4} E C_opt/(1+q))^{1/(q-1)}, then polish ζ on the grid.
    """
    settings = settings or GroundStateSettings()
    ex = derived_exponents(params)
    if ex.D <= 0 or ex.E <= 0:
        raise RegimeError(f"D = {ex.D:g}, E = {ex.E:g}: ground state rescaling needs D, E > 0")
    grid = phi.grid
    nu = (ex.E / ex.D) ** 0.25
    kappa = ((ex.E / ex.D) ** (params.b / 4) * ex.E * c_opt / (1 + params.q)) ** (1 / (params.q - 1))
    guess = rescale(phi, 1 / kappa, 1 / nu)
    values, polish_iterations, _ = _fixed_point(
        grid, params, 1.0, 1.0, guess.values.real,
        settings.polish_max_iter, settings.tol_profile, settings.tol_weinstein, settings.mixing,
        label="ground_state_polish",
    )
    zeta = RadialField(grid, values)

    m, k, p = mass(zeta), kinetic(zeta), potential(zeta, params)
    residual_euler = euler_residual(zeta, params)
    residual_poho = pohozaev_residuals_from_values(m, k, p, params)
    residual_identity = abs(k + m - p) / p
    residual_formula = abs(sharp_constant_formula(m, params) - c_opt) / c_opt
    if not (
        residual_euler < settings.tol_euler
        and max(residual_poho) < settings.tol_poho
        and residual_formula < settings.tol_formula
    ):
        raise NumericalError(
            f"ground state not certified on {grid}: Euler {residual_euler:.2e} (tol {settings.tol_euler:g}), "
            f"Pohozaev {residual_poho[0]:.2e}/{residual_poho[1]:.2e} (tol {settings.tol_poho:g}), "
            f"sharp formula {residual_formula:.2e} (tol {settings.tol_formula:g}); refine the grid",
            payload={
                "residual_euler": residual_euler,
                "residual_pohozaev": list(residual_poho),
                "residual_copt_formula": residual_formula,
            },
        )
    return GroundState(
        params=params,
        zeta=zeta,
        phi=phi,
        c_opt=c_opt,
        mass_z=m,
        kinetic_z=k,
        potential_z=p,
        energy_z=k - 2 / (1 + params.q) * p,
        action_z=action(zeta, params),
        residual_euler=residual_euler,
        residual_pohozaev=residual_poho,
        residual_identity=residual_identity,
        residual_copt_formula=residual_formula,
        phi_normalization_defect=abs(math.sqrt(kinetic(phi)) - 1),
        iterations=iterations + polish_iterations,
    )


def compute_ground_state(
    params: ModelParams,
    grid: RadialGrid,
    init: RadialField | None = None,
    settings: GroundStateSettings | None = None,
) -> GroundState:
    settings = settings or GroundStateSettings()
    trace = {}
    phi, c_opt = minimize_weinstein(params, grid, init, settings, trace=trace)
    state = ground_state_from_minimizer(phi, c_opt, params, settings, iterations=trace["iterations"])
    state.weinstein_history = trace["weinstein_history"]
    return state


def survey_minimizers(
    params: ModelParams,
    grid: RadialGrid,
    widths: list[float],
    settings: GroundStateSettings | None = None,
    rtol: float = 1e-6,
) -> list[GroundState]:
    """
    Run the minimisation from Gaussians of several widths. Distinct
    profiles are all kept; uniqueness of the minimiser is not assumed.
    """
    settings = settings or GroundStateSettings()
    found = []
    for width in widths:
        state = compute_ground_state(params, grid, default_init(grid, width), settings)
        duplicate = any(
            norm(state.zeta - other.zeta) <= rtol * norm(other.zeta) for other in found
        )
        if duplicate:
            logger.info(f"init width {width:g}: same profile as an earlier run")
            continue
        if found and not math.isclose(state.c_opt, found[0].c_opt, rel_tol=1e-8):
            logger.warning(
                f"init width {width:g}: distinct critical profile with C_opt {state.c_opt:.10g} "
                f"vs {found[0].c_opt:.10g}"
            )
        found.append(state)
    return found
