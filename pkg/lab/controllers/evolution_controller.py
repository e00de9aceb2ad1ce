import logging
import math

import numpy as np

from controllers.functionals_controller import kinetic, mass, potential
from controllers.grid_controller import RadialField, RadialGrid
from models.evolution_model import BlowupReport, EvolutionConfig, Termination, Trajectory
from models.params_model import ModelParams
from utils.errors import DomainError, StepFailure

logger = logging.getLogger(__name__)

# fraction of the radius covered by the optional absorbing layer
ABSORBING_FRACTION = 0.1


def linear_phase(grid: RadialGrid, dt: float) -> np.ndarray:
    """exp(-i dt λ²) on the eigenvalues λ of the discrete Laplacian"""
    eigenvalues, _ = grid.spectrum
    return np.exp(-1j * dt * eigenvalues ** 2)


def absorbing_mask(grid: RadialGrid, dt: float, strength: float) -> np.ndarray:
    start = (1 - ABSORBING_FRACTION) * grid.R_max
    depth = np.clip((grid.nodes - start) / (ABSORBING_FRACTION * grid.R_max), 0.0, 1.0)
    return np.exp(-dt * strength * np.sin(0.5 * math.pi * depth) ** 2)


def _rotate(values: np.ndarray, weight: np.ndarray, q: float, tau: float) -> np.ndarray:
    # |v| is invariant under i∂_t v = -|x|^b|v|^{q-1}v, so this substep is exact
    return values * np.exp(1j * tau * weight * np.abs(values) ** (q - 1))


def _strang(values, grid, dt, params, phase, nonlinear):
    weight = grid.nodes ** params.b
    if nonlinear:
        values = _rotate(values, weight, params.q, dt / 2)
    values = grid.apply_spectral(values, phase)
    if nonlinear:
        values = _rotate(values, weight, params.q, dt / 2)
    return values


def step(
    v: RadialField,
    dt: float,
    params: ModelParams,
    nonlinear: bool = True,
    phase: np.ndarray | None = None,
) -> RadialField:
    """
    One Strang step of i∂_t v = Δ²v - |x|^b|v|^{q-1}v: half nonlinear rotation,
    exact linear flow in the eigenbasis, half nonlinear rotation.
    A negative dt runs the scheme backwards.
    """
    if not v.is_finite():
        raise StepFailure("step called on a non-finite field")
    grid = v.grid
    if phase is None:
        phase = linear_phase(grid, dt)
    values = _strang(v.values, grid, dt, params, phase, nonlinear)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise StepFailure(
            f"non-finite value at node {bad} (r = {grid.nodes[bad]:.4g})",
            payload={"node": bad},
        )
    return RadialField(grid, values)


def focusing_scale(mass_v: float, kinetic_v: float) -> float:
    """(‖v‖/‖Δv‖)^{1/2}, the length scale of the two-parameter renormalisation"""
    if kinetic_v <= 0:
        return math.inf
    return (mass_v / kinetic_v) ** 0.25


def _blowup_condition(mass_v, kinetic_v, kinetic_0, dr, config: EvolutionConfig) -> bool:
    if kinetic_0 <= 0:
        return False
    grown = math.sqrt(kinetic_v / kinetic_0) >= config.blowup_factor
    return grown and focusing_scale(mass_v, kinetic_v) < config.resolution_guard * dr


def evolve(v0: RadialField, config: EvolutionConfig, params: ModelParams) -> Trajectory:
    grid = v0.grid
    if grid.N != params.N:
        raise DomainError(f"field lives on an N={grid.N} grid but params say N={params.N}")

    n_steps = max(1, math.ceil(config.T / config.dt - 1e-9))
    phase = linear_phase(grid, config.dt)
    mask = absorbing_mask(grid, config.dt, config.absorbing_strength) if config.absorbing else None
    traj = Trajectory(params=params, dr=grid.dr, dt=config.dt)

    def record(t, field, k):
        m = mass(field)
        traj.times.append(t)
        traj.snapshots.append(field)
        traj.mass_series.append(m)
        traj.kinetic_series.append(k)
        traj.energy_series.append(k - 2 / (1 + params.q) * potential(field, params))

    v = v0
    k0 = kinetic(v0)
    m0 = mass(v0)
    record(0.0, v0, k0)
    logger.info(
        f"evolve: {n_steps} steps of dt={config.dt:g} on {grid}, "
        f"mass {m0:.6g}, kinetic {k0:.6g}"
    )

    for n in range(1, n_steps + 1):
        t = n * config.dt
        try:
            v = step(v, config.dt, params, nonlinear=config.nonlinear, phase=phase)
        except StepFailure as exc:
            traj.terminated = Termination.STEP_FAILURE
            traj.failure = exc.detail
            logger.warning(f"evolve: step failure at t={t:.6g}: {exc.detail}")
            break
        if mask is not None:
            v = RadialField(grid, v.values * mask)
        traj.steps = n
        traj.t_stop = t

        k = kinetic(v)
        if n % config.snapshot_stride == 0 or n == n_steps:
            record(t, v, k)
        if config.stop_on_blowup and _blowup_condition(mass(v), k, k0, grid.dr, config):
            if traj.times[-1] != t:
                record(t, v, k)
            traj.terminated = Termination.BLOWUP_DETECTED
            logger.warning(
                f"evolve: ‖Δv‖ grew by {math.sqrt(k / k0):.3g}x and the focusing scale dropped "
                f"below {config.resolution_guard:g} dr at t={t:.6g}"
            )
            break

    logger.info(
        f"evolve: {traj.terminated.value} at t={traj.t_stop:.6g}, "
        f"mass drift {traj.mass_drift:.2e}, energy drift {traj.energy_drift:.2e}"
    )
    return traj


def growth_exponent(times, kinetic_series) -> float | None:
    """Least-squares slope of log ‖Δv‖² against t"""
    t = np.asarray(times, dtype=float)
    k = np.asarray(kinetic_series, dtype=float)
    keep = k > 0
    if np.count_nonzero(keep) < 2:
        return None
    slope, _ = np.polyfit(t[keep], np.log(k[keep]), 1)
    return float(slope)


def detect_blowup(traj: Trajectory, config: EvolutionConfig) -> BlowupReport:
    """
    Flag numerical singularity evidence: ‖Δv‖ grew by blowup_factor and the
    focusing scale fell below resolution_guard·dr. Never a proof of blow-up.
    """
    k = np.asarray(traj.kinetic_series, dtype=float)
    m = np.asarray(traj.mass_series, dtype=float)
    t = np.asarray(traj.times, dtype=float)
    limit = config.resolution_guard * traj.dr
    if k.size == 0 or k[0] <= 0:
        return BlowupReport(
            detected=False,
            kinetic_root_ratio=1.0,
            min_focusing_scale=math.inf,
            resolution_limit=limit,
            notes=["zero initial kinetic energy"] if k.size else ["empty trajectory"],
        )

    ratio = np.sqrt(k / k[0])
    with np.errstate(divide="ignore"):
        scale = np.where(k > 0, (m / np.where(k > 0, k, 1.0)) ** 0.25, np.inf)
    flags = (ratio >= config.blowup_factor) & (scale < limit)
    notes = []
    detected = bool(np.any(flags))
    t_detect = float(t[np.argmax(flags)]) if detected else None
    if detected:
        notes.append("numerical singularity evidence, not a proof")
    elif np.max(ratio) >= config.blowup_factor:
        notes.append("kinetic growth while the focusing scale stays resolved")
    if k.size > 2 and np.all(np.diff(k) > 0):
        notes.append("kinetic series strictly increasing over the run window")
    return BlowupReport(
        detected=detected,
        t_detect=t_detect,
        growth_exponent=growth_exponent(t, k),
        kinetic_root_ratio=float(np.max(ratio)),
        min_focusing_scale=float(np.min(scale)),
        resolution_limit=limit,
        notes=notes,
    )
