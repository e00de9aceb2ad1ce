import logging
import math

import numpy as np

from controllers.functionals_controller import kinetic, mass, potential
from controllers.grid_controller import RadialField
from controllers.params_controller import derived_exponents, is_critical, validate_regime
from models.evolution_model import Trajectory
from models.ground_state_model import GroundState
from models.params_model import ModelParams, Theorem
from models.report_model import Classification, DichotomyReport, FlowInvarianceReport, TrappingProfile
from utils.errors import RegimeError

logger = logging.getLogger(__name__)

EQUALITY_RTOL = 1e-8


def _power(x: float, a: float) -> float:
    # x^0 = 1, also for x = 0
    return 1.0 if a == 0 else x ** a


def threshold_quantities(mass_v: float, kinetic_v: float, energy_v: float, s_c: float):
    """
    (E^{s_c} M^{2-s_c}, ‖Δv‖^{s_c} ‖v‖^{2-s_c}); the first is None when the
    energy is negative and s_c is not an integer.
    """
    grad_mass = _power(math.sqrt(kinetic_v), s_c) * _power(math.sqrt(mass_v), 2 - s_c)
    if energy_v < 0 and not float(s_c).is_integer():
        return None, grad_mass
    return _power(energy_v, s_c) * _power(mass_v, 2 - s_c), grad_mass


def _below(lhs: float | None, rhs: float, rtol: float) -> bool | None:
    """True / False for a strict comparison, None when undefined or tied within rtol"""
    if lhs is None:
        return None
    if abs(lhs - rhs) <= rtol * max(abs(rhs), abs(lhs)):
        return None
    return lhs < rhs


def classify(
    v0: RadialField, gs: GroundState, params: ModelParams, rtol: float = EQUALITY_RTOL
) -> DichotomyReport:
    ex = derived_exponents(params)
    if not 0 <= ex.s_c <= 2:
        raise RegimeError(f"s_c = {ex.s_c:g} lies outside [0, 2]; the threshold comparison is not defined")
    notes = []

    m0, k0, p0 = mass(v0), kinetic(v0), potential(v0, params)
    e0 = k0 - 2 / (1 + params.q) * p0
    lhs_em, lhs_gm = threshold_quantities(m0, k0, e0, ex.s_c)
    rhs_em, rhs_gm = threshold_quantities(gs.mass_z, gs.kinetic_z, gs.energy_z, ex.s_c)
    if lhs_em is None:
        notes.append(
            f"E(v0) = {e0:.6g} < 0 with fractional s_c = {ex.s_c:g}: E(v0)^s_c is undefined"
        )

    energy_below = _below(lhs_em, rhs_em, rtol)
    grad_below = _below(lhs_gm, rhs_gm, rtol)
    classification = Classification.INDETERMINATE

    if energy_below is True and grad_below is True:
        report = validate_regime(params, Theorem.DICHOTOMY_GLOBAL)
        if not report.passed:
            notes.append(report.summary())
        elif is_critical(params.q, ex.q_e):
            classification = Classification.GLOBAL_UNIFORM_BOUND
        else:
            classification = Classification.GLOBAL
    elif energy_below is True and grad_below is False:
        report = validate_regime(params, Theorem.DICHOTOMY_BLOWUP)
        if not report.passed:
            notes.append(report.summary())
        elif is_critical(params.q, ex.q_m):
            classification = Classification.INFINITE_TIME_BLOWUP
        else:
            classification = Classification.BLOWUP
    elif energy_below is None or grad_below is None:
        notes.append("a threshold comparison is undefined or an equality within tolerance")
    else:
        notes.append("energy-mass quantity at or above the ground-state level")

    logger.info(f"classification {classification.value} (s_c = {ex.s_c:g})")
    return DichotomyReport(
        lhs_energy_mass=lhs_em,
        rhs_energy_mass=rhs_em,
        lhs_grad_mass=lhs_gm,
        rhs_grad_mass=rhs_gm,
        energy_below_threshold=energy_below,
        grad_mass_below=grad_below,
        classification=classification,
        notes=notes,
    )


def trapping_profile(v0: RadialField, gs: GroundState, params: ModelParams) -> TrappingProfile:
    """
    F(y) = y - ϰ y^{D/2} with ϰ = 2 C_opt ‖v0‖^E/(1+q) bounds E(v) from below in
    terms of y = ‖Δv‖². For D > 2 it peaks at τ = (2/(ϰD))^{2/(D-2)} with F(τ) = τ(1 - 2/D).
    """
    ex = derived_exponents(params)
    m0 = mass(v0)
    varkappa = 2 * gs.c_opt * math.sqrt(m0) ** ex.E / (1 + params.q)
    if ex.D <= 2 or ex.s_c <= 0:
        return TrappingProfile(varkappa=varkappa, tau=None, f_tau=None, tau_closed_form=None)
    tau = (2 / (varkappa * ex.D)) ** (2 / (ex.D - 2))
    closed = (gs.mass_z / m0) ** ((2 - ex.s_c) / ex.s_c) * gs.kinetic_z
    return TrappingProfile(varkappa=varkappa, tau=tau, f_tau=tau * (1 - 2 / ex.D), tau_closed_form=closed)


def trapping_function(y, varkappa: float, D: float):
    return y - varkappa * np.asarray(y) ** (D / 2)


def uniform_bound(mass_v0: float, gs: GroundState, params: ModelParams) -> float | None:
    """(M(ζ)/M(v0))^{(2-s_c)/(2 s_c)} ‖Δζ‖, the a priori bound on ‖Δv(t)‖ below threshold"""
    s_c = derived_exponents(params).s_c
    if s_c <= 0:
        return None
    return (gs.mass_z / mass_v0) ** ((2 - s_c) / (2 * s_c)) * gs.grad_z


def check_flow_invariance(
    traj: Trajectory, gs: GroundState, params: ModelParams, rtol: float = 1e-6
) -> FlowInvarianceReport:
    """
    Track ‖Δv(t)‖^{s_c}‖v0‖^{2-s_c} against the ground-state level and report
    the first snapshot on the other side of it.
    """
    ex = derived_exponents(params)
    s_c = ex.s_c
    threshold = _power(gs.grad_z, s_c) * _power(gs.norm_z, 2 - s_c)
    m0 = traj.mass_series[0]
    roots = np.sqrt(np.asarray(traj.kinetic_series))
    levels = np.array([_power(k, s_c) for k in roots]) * _power(math.sqrt(m0), 2 - s_c)
    times = np.asarray(traj.times)

    start = _below(levels[0], threshold, EQUALITY_RTOL)
    side = "at" if start is None else ("below" if start else "above")
    if side == "below":
        crossed = levels >= threshold
    elif side == "above":
        crossed = levels <= threshold
    else:
        crossed = np.abs(levels - threshold) > rtol * threshold
    first = float(times[np.argmax(crossed)]) if np.any(crossed) else None
    gap = float(np.max(np.abs(levels - levels[0])) / levels[0]) if levels[0] > 0 else 0.0

    bound = uniform_bound(m0, gs, params) if side == "below" else None
    bound_holds = bool(np.max(roots) <= bound * (1 + rtol)) if bound is not None else None

    trapping = None
    trapping_holds = None
    if side != "at" and traj.snapshots:
        trapping = trapping_profile(traj.snapshots[0], gs, params)
        lower = trapping_function(roots ** 2, trapping.varkappa, ex.D)
        energies = np.asarray(traj.energy_series)
        slack = rtol * np.maximum(np.abs(energies), roots ** 2)
        trapping_holds = bool(np.all(lower <= energies + slack))

    if first is not None:
        logger.warning(f"flow invariance: level crossed the ground-state value at t={first:.6g}")
    return FlowInvarianceReport(
        side=side,
        threshold=threshold,
        holds=first is None,
        first_violation_time=first,
        max_relative_gap=gap,
        uniform_bound=bound,
        uniform_bound_holds=bound_holds,
        sup_kinetic_root=float(np.max(roots)),
        trapping=trapping,
        trapping_holds=trapping_holds,
    )
