import logging
import math
from functools import lru_cache

import numpy as np
import sympy as sym

from controllers.functionals_controller import kinetic, mass, potential
from controllers.grid_controller import RadialField, RadialGrid, integrate, radial_derivatives
from controllers.params_controller import derived_exponents
from models.evolution_model import Trajectory
from models.params_model import ModelParams
from models.virial_model import BlowupBoundReport, CutoffCertificate, CutoffProfile, VirialReport
from utils.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

# χ'/r leaves 2 at r = 1 and reaches 0 at r = OUTER through a C^SMOOTHNESS smoothstep
SMOOTHNESS = 6
OUTER = 10.0
CERTIFY_TOL = 1e-12


def _as_array(value, like: np.ndarray) -> np.ndarray:
    return np.asarray(value, dtype=float) * np.ones_like(like)


@lru_cache(maxsize=None)
def _unit_profile(N: int):
    """
    Bridge of the unit cutoff on [1, OUTER], as numpy callables:
    ∂^k χ for k = 0..6, then Δχ, ∂_r²Δχ, Δ²χ, Δ³χ.
    χ'/r = 2(1 - S(t)), t = (r-1)/(OUTER-1), with S' ∝ t^6(1-t)^6, so χ'/r is
    non-increasing and χ'' - χ'/r = r(χ'/r)' <= 0 holds termwise.
    """
    r, s, t = sym.symbols("r s t", positive=True)
    n = SMOOTHNESS
    norm = sym.factorial(n) ** 2 / sym.factorial(2 * n + 1)
    step = sym.integrate(s ** n * (1 - s) ** n, (s, 0, t)) / norm
    width = OUTER - 1
    tr = (r - 1) / width
    g = 2 * (1 - step.subs(t, tr))
    # kept factored so its sign is exact in floating point
    dg = -2 / width * tr ** n * (1 - tr) ** n / norm

    chi1 = r * g
    chi0 = 1 + sym.integrate(sym.expand(chi1.subs(r, s)), (s, 1, r))
    derivatives = [chi0, chi1, g + r * dg]
    for _ in range(4):
        derivatives.append(sym.diff(derivatives[-1], r))

    def lap(f):
        return sym.diff(f, r, 2) + (N - 1) / r * sym.diff(f, r)

    lap1 = N * g + r * dg
    lap2 = lap(lap1)
    lap3 = lap(lap2)
    exprs = derivatives + [lap1, sym.diff(lap1, r, 2), lap2, lap3]
    return [sym.lambdify(r, expr, "numpy") for expr in exprs]


def build_cutoff(R: float, grid: RadialGrid) -> CutoffProfile:
    """χ_R = R² χ(r/R): r² on r <= R, constant on r >= 10R"""
    if not R > 0:
        raise DomainError(f"cutoff radius must be positive, got {R}")
    if OUTER * R > grid.R_max:
        raise DomainError(f"cutoff needs {OUTER:g}R <= R_max, got R={R:g}, R_max={grid.R_max:g}")
    funcs = _unit_profile(grid.N)
    r = grid.nodes
    x = r / R
    inner = x <= 1
    middle = (x > 1) & (x < OUTER)
    outer = x >= OUTER
    xm = x[middle]

    unit = np.zeros((11, grid.M))
    unit[0, inner] = x[inner] ** 2
    unit[1, inner] = 2 * x[inner]
    unit[2, inner] = 2.0
    unit[7, inner] = 2.0 * grid.N
    for row, func in enumerate(funcs):
        unit[row, middle] = _as_array(func(xm), xm)
    unit[0, outer] = float(funcs[0](OUTER))

    scales = [R ** (2 - k) for k in range(SMOOTHNESS + 1)]
    chi = CutoffProfile(
        R=R,
        N=grid.N,
        r=r,
        derivatives=np.array([unit[k] * scales[k] for k in range(SMOOTHNESS + 1)]),
        lap=unit[7],
        lap_dd=unit[8] / R ** 2,
        bilap=unit[9] / R ** 2,
        trilap=unit[10] / R ** 4,
    )
    certificate = certify_cutoff(chi)
    if not certificate.passed:
        raise NumericalError(
            f"cutoff bridge fails its checks at R={R:g}: inner defect {certificate.inner_max_defect:.2e}, "
            f"convexity margin {certificate.convexity_margin:.2e}, tail {certificate.tail_max:.2e}",
            payload=certificate.model_dump(),
        )
    logger.debug(f"cutoff R={R:g}: scale constants {certificate.scale_constants}")
    return chi


def pure_virial(grid: RadialGrid) -> CutoffProfile:
    r = grid.nodes
    derivatives = np.zeros((SMOOTHNESS + 1, grid.M))
    derivatives[0] = r ** 2
    derivatives[1] = 2 * r
    derivatives[2] = 2.0
    zero = np.zeros(grid.M)
    return CutoffProfile(
        R=None,
        N=grid.N,
        r=r,
        derivatives=derivatives,
        lap=np.full(grid.M, 2.0 * grid.N),
        lap_dd=zero,
        bilap=zero,
        trilap=zero,
    )


def certify_cutoff(chi: CutoffProfile, tol: float = CERTIFY_TOL) -> CutoffCertificate:
    r = chi.r
    R = chi.R if chi.R is not None else math.inf
    inner = r <= R
    tail = r >= OUTER * R
    d1_over_r = chi.d1 / r
    inner_defect = 0.0
    if np.any(inner):
        inner_defect = float(max(np.max(np.abs(chi.d2[inner] - 2)), np.max(np.abs(d1_over_r[inner] - 2))))
    margin = float(max(np.max(d1_over_r - 2), np.max(chi.d2 - d1_over_r)))
    tail_max = 0.0
    if np.any(tail):
        rows = np.vstack([chi.derivatives[1:], chi.lap, chi.lap_dd, chi.bilap, chi.trilap])
        tail_max = float(np.max(np.abs(rows[:, tail])))
    scale = chi.R if chi.R is not None else 1.0
    constants = [
        float(np.max(np.abs(chi.derivatives[k])) * scale ** (k - 2)) for k in range(SMOOTHNESS + 1)
    ]
    return CutoffCertificate(
        R=scale,
        inner_max_defect=inner_defect,
        convexity_margin=margin,
        tail_max=tail_max,
        scale_constants=constants,
        passed=inner_defect <= tol and margin <= tol and tail_max <= tol,
    )


def hessian_contraction_radial(d1, d2, r, v1, v2, N: int) -> np.ndarray:
    """
    ∂_jk χ ∂_ik v ∂_ij v̄ for radial χ and v, through
    (χ'/r) Σ_k|∇v_k|² + (χ''/r² - χ'/r³) Σ_k|x·∇v_k|²
    with Σ_k|∇v_k|² = |v''|² + (N-1)|v'|²/r² and Σ_k|x·∇v_k|² = r²|v''|².
    """
    grad_sum = np.abs(v2) ** 2 + (N - 1) * np.abs(v1) ** 2 / r ** 2
    x_sum = r ** 2 * np.abs(v2) ** 2
    return d1 / r * grad_sum + (d2 / r ** 2 - d1 / r ** 3) * x_sum


def morawetz(v: RadialField, chi: CutoffProfile) -> float:
    """2∫ χ'(r) Im(∂_r v v̄) dx"""
    v1, _ = radial_derivatives(v)
    return 2 * integrate(v.grid, chi.d1 * np.imag(v1 * np.conj(v.values)))


def morawetz_rhs(v: RadialField, chi: CutoffProfile, params: ModelParams) -> float:
    """Right side of the localised virial identity, reduced to radial derivatives"""
    grid = v.grid
    r = grid.nodes
    N, b, q = params.N, params.b, params.q
    v1, v2 = radial_derivatives(v)
    density = np.abs(v.values) ** 2
    slope = np.abs(v1) ** 2
    potential_weight = (q - 1) / (1 + q) * (chi.d2 + (N - 1 - 2 * b / (q - 1)) * chi.d1 / r)
    integrand = (
        2 * chi.lap_dd * slope
        - 0.5 * chi.trilap * density
        + chi.bilap * slope
        - 4 * hessian_contraction_radial(chi.d1, chi.d2, r, v1, v2, N)
        + potential_weight * np.abs(v.values) ** (1 + q) * r ** b
    )
    return -2 * integrate(grid, integrand)


def pure_virial_rhs(v: RadialField, params: ModelParams) -> float:
    """16(‖Δv‖² - D/(1+q) ∫|v|^{1+q}|x|^b), the identity for χ = r² with the discrete ‖Δv‖"""
    ex = derived_exponents(params)
    return 16 * (kinetic(v) - ex.D / (1 + params.q) * potential(v, params))


def verify_virial(traj: Trajectory, chi: CutoffProfile, params: ModelParams) -> VirialReport:
    """
    Centred differences of M_χ at the interior snapshot times against the
    identity's right side. Mismatches are relative to 16‖Δv(t)‖².
    """
    if len(traj.snapshots) < 3:
        raise DomainError("virial check needs at least three snapshots")
    t = np.asarray(traj.times)
    M = np.array([morawetz(v, chi) for v in traj.snapshots])
    scale = 16 * np.asarray(traj.kinetic_series)
    fd = (M[2:] - M[:-2]) / (t[2:] - t[:-2])
    rhs = np.array([morawetz_rhs(v, chi, params) for v in traj.snapshots[1:-1]])
    mismatch = np.abs(fd - rhs) / scale[1:-1]
    report = VirialReport(
        R=chi.R,
        times=t[1:-1].tolist(),
        morawetz=M[1:-1].tolist(),
        dmdt_fd=fd.tolist(),
        rhs=rhs.tolist(),
        mismatch=mismatch.tolist(),
        max_relative_mismatch=float(np.max(mismatch)),
        max_relative_rhs=float(np.max(np.abs(rhs) / scale[1:-1])),
    )
    logger.info(
        f"virial check (R={chi.R}): max mismatch {report.max_relative_mismatch:.2e} "
        f"over {len(report.times)} interior snapshots"
    )
    return report


def blowup_functional_bound(traj: Trajectory, chi: CutoffProfile) -> BlowupBoundReport:
    """
    Lower bound M_R(t) >= -C ‖∇χ_R‖∞ ‖v0‖^{3/2} ‖Δv(t)‖^{1/2}: reports the
    empirical C, and whether M_R is negative and decreasing over the second
    half of the run.
    """
    t = np.asarray(traj.times)
    M = np.array([morawetz(v, chi) for v in traj.snapshots])
    root_kinetic = np.sqrt(np.asarray(traj.kinetic_series))
    v0_norm = math.sqrt(mass(traj.snapshots[0]))
    denominator = chi.gradient_sup * v0_norm ** 1.5 * np.sqrt(root_kinetic)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(denominator > 0, -M / denominator, 0.0)

    half = len(M) // 2
    late_t, late = t[half:], M[half:]
    decreasing = bool(late.size >= 2 and np.all(np.diff(late) < 0))
    decreasing_from = None
    slope = None
    if decreasing:
        start = half
        while start > 0 and M[start] < M[start - 1]:
            start -= 1
        decreasing_from = float(t[start])
        slope = float(np.polyfit(late_t, late, 1)[0])
    return BlowupBoundReport(
        empirical_constant=float(np.max(ratios)),
        max_abs_morawetz=float(np.max(np.abs(M))),
        eventually_negative=bool(late.size and np.all(late < 0)),
        eventually_decreasing=decreasing,
        decreasing_from=decreasing_from,
        slope=slope,
    )
