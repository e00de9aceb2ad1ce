import logging
import math

import numpy as np
import pandas as pd

from controllers.functionals_controller import kinetic, mass, potential, weinstein_from_values
from controllers.grid_controller import (
    RadialField,
    RadialGrid,
    fractional_laplacian_power,
    grad_norm_sq,
    integrate,
    norm,
)
from controllers.params_controller import derived_exponents, radial_threshold, require_regime
from models.ground_state_model import GroundState
from models.params_model import ModelParams, Theorem
from models.report_model import CompactEmbeddingReport, CounterexampleReport, InequalitySuiteReport
from utils.config import ELEMENT_DEGREE
from utils.errors import DomainError, RegimeError

logger = logging.getLogger(__name__)

GN_TOL = 1e-6
DEFAULT_N_LIST = (4, 8, 16, 32)


def random_radial_samples(grid: RadialGrid, n_samples: int, seed: int, max_terms: int = 3) -> list[RadialField]:
    """
    Sums of Gaussians even in r (so smooth at the axis) with random centres,
    widths and complex amplitudes, tapered to zero over the last fifth of the grid.
    """
    rng = np.random.default_rng(seed)
    r = grid.nodes
    taper_start = 0.8 * grid.R_max
    taper = np.clip((grid.R_max - r) / (grid.R_max - taper_start), 0.0, 1.0)
    window = np.sin(0.5 * math.pi * taper) ** 2
    samples = []
    for _ in range(n_samples):
        values = np.zeros(grid.M, dtype=complex)
        for _ in range(rng.integers(1, max_terms + 1)):
            centre = rng.uniform(0.0, 0.4 * grid.R_max)
            width = rng.uniform(0.5, 3.0)
            amplitude = complex(rng.normal(), rng.normal())
            profile = np.exp(-((r - centre) / width) ** 2) + np.exp(-((r + centre) / width) ** 2)
            values += amplitude * profile
        samples.append(RadialField(grid, values * window))
    return samples


def check_gn(v: RadialField, gs: GroundState, params: ModelParams) -> float:
    """potential(v) / (C_opt ‖v‖^E ‖Δv‖^D); at most 1 by the sharp inequality"""
    if not np.any(v.values):
        raise DomainError("GN ratio is undefined for the zero field")
    K = weinstein_from_values(mass(v), kinetic(v), potential(v, params), params)
    return 1 / (gs.c_opt * K)


def check_strauss(v: RadialField, s: float) -> tuple[float, float]:
    """(max r^{(N-2s)/2}|v|, that value over ‖v‖^{1-s} ‖∇v‖^s), for 1/2 <= s < 1"""
    if not 0.5 <= s < 1:
        raise DomainError(f"Strauss order s must lie in [1/2, 1), got {s}")
    r = v.grid.nodes
    lhs = float(np.max(r ** ((v.grid.N - 2 * s) / 2) * v.modulus))
    if lhs == 0:
        return 0.0, 0.0
    rhs = norm(v) ** (1 - s) * math.sqrt(grad_norm_sq(v)) ** s
    return lhs, lhs / rhs


def check_strauss_fractional(v: RadialField, s: float) -> tuple[float, float]:
    """Same left side against ‖|∇|^s v‖, for 1/2 < s < N/2"""
    N = v.grid.N
    if not 0.5 < s < N / 2:
        raise DomainError(f"fractional Strauss order s must lie in (1/2, {N / 2:g}), got {s}")
    lhs = float(np.max(v.grid.nodes ** ((N - 2 * s) / 2) * v.modulus))
    if lhs == 0:
        return 0.0, 0.0
    return lhs, lhs / norm(fractional_laplacian_power(v, s))


def check_hardy(v: RadialField, s: float, r_exp: float = 2) -> float:
    """‖|x|^{-s} v‖_{r} / ‖|∇|^s v‖_{r}; only the L² frame is available"""
    if r_exp != 2:
        raise DomainError(f"Hardy check is implemented for r = 2 only, got r = {r_exp}")
    N = v.grid.N
    if not 0 < s < N / r_exp:
        raise DomainError(f"Hardy order s must lie in (0, {N / r_exp:g}), got {s}")
    if not np.any(v.values):
        return 0.0
    weighted = math.sqrt(integrate(v.grid, (v.modulus / v.grid.nodes ** s) ** 2))
    return weighted / norm(fractional_laplacian_power(v, s))


def _bump(x: np.ndarray) -> np.ndarray:
    """C^∞ bump supported in (0, 1)"""
    inside = (x > 0) & (x < 1)
    out = np.zeros_like(x, dtype=float)
    xi = x[inside]
    out[inside] = np.exp(-1 / (xi * (1 - xi)))
    return out


def translated_bumps(grid: RadialGrid, n_values) -> list[RadialField]:
    """ξ(· - n) supported in [n, n+1] for each n"""
    fields = []
    for n in n_values:
        if n < 0 or n + 1 > grid.R_max:
            raise DomainError(f"bump support [{n}, {n + 1}] leaves the grid (R_max = {grid.R_max:g})")
        fields.append(RadialField(grid, _bump(grid.nodes - n)))
    return fields


def bump_grid(N: int, n_values, dr: float = 0.01) -> RadialGrid:
    R_max = float(max(n_values) + 2)
    elements = int(math.ceil(R_max / (dr * ELEMENT_DEGREE)))
    return RadialGrid(N, R_max, elements * ELEMENT_DEGREE)


def counterexample_report(
    params: ModelParams, n_values=DEFAULT_N_LIST, grid: RadialGrid | None = None
) -> CounterexampleReport:
    """
    Growth of potential/(‖·‖^E ‖Δ·‖^D) over bumps translated to radius n. Below
    q = 1 + 2b/(N-1) the quotient diverges like n^{(N-1)(1-q)/2 + b}, so no GN
    constant exists there. Needs only (N, b, q), not a ground state.
    """
    if params.N < 2:
        raise RegimeError(f"translated bumps need N >= 2, got N={params.N}")
    if len(n_values) < 2:
        raise DomainError(f"need at least two translation radii, got {list(n_values)}")
    boundary = radial_threshold(params)
    grid = grid or bump_grid(params.N, n_values)
    quotients = []
    for bump in translated_bumps(grid, n_values):
        K = weinstein_from_values(mass(bump), kinetic(bump), potential(bump, params), params)
        quotients.append(1 / K)
    slope, _ = np.polyfit(np.log(np.asarray(n_values, dtype=float)), np.log(quotients), 1)
    expected = (params.N - 1) * (1 - params.q) / 2 + params.b
    logger.info(f"counterexample slope {slope:.4f} (predicted {expected:.4f}, q = {params.q:g} vs {boundary:g})")
    return CounterexampleReport(
        n_values=[float(n) for n in n_values],
        quotients=quotients,
        slope=float(slope),
        expected_slope=expected,
        radial_threshold=boundary,
        below_threshold=params.q < boundary,
    )


def _fit(x, y) -> float | None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > 0
    if np.count_nonzero(keep) < 2:
        return None
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def compact_embedding_split(
    params: ModelParams,
    grid: RadialGrid | None = None,
    n_values=DEFAULT_N_LIST,
    kind: str = "translated",
) -> CompactEmbeddingReport:
    """
    Split ∫|u_n|^{1+q}|x|^b over r < δ, δ <= r <= 1/δ and r > 1/δ with δ = 1/n
    for an H²-bounded sequence u_n, and fit the decay exponents.
    kind: translated bumps (weakly null), a fixed profile, or a vanishing amplitude.
    """
    require_regime(params, Theorem.COMPACT_EMBEDDING)
    grid = grid or bump_grid(params.N, n_values)
    r = grid.nodes
    if kind == "translated":
        sequence = translated_bumps(grid, n_values)
    elif kind == "fixed":
        sequence = [RadialField(grid, np.exp(-(r ** 2))) for _ in n_values]
    elif kind == "vanishing":
        sequence = [RadialField(grid, np.exp(-(r ** 2)) / n) for n in n_values]
    else:
        raise DomainError(f"unknown sequence kind {kind!r}")

    inner, middle, outer, total = [], [], [], []
    deltas = [1 / n for n in n_values]
    for u, delta in zip(sequence, deltas):
        if kind != "vanishing":
            u = u * (1 / math.sqrt(mass(u) + kinetic(u)))
        density = np.abs(u.values) ** (1 + params.q) * r ** params.b
        parts = [r < delta, (r >= delta) & (r <= 1 / delta), r > 1 / delta]
        values = [integrate(grid, np.where(part, density, 0.0)) for part in parts]
        inner.append(values[0])
        middle.append(values[1])
        outer.append(values[2])
        total.append(sum(values))

    decay = _fit(n_values, total)
    report = CompactEmbeddingReport(
        kind=kind,
        n_values=[float(n) for n in n_values],
        deltas=deltas,
        inner=inner,
        middle=middle,
        outer=outer,
        total=total,
        outer_exponent=_fit(deltas, outer),
        expected_outer_exponent=(params.q - 1) * (params.N - 1) / 2 - params.b,
        inner_exponent=_fit(deltas, inner),
        total_decay_exponent=-decay if decay is not None else None,
        middle_vanishes=bool(middle[-1] <= 1e-3 * max(max(middle), max(total))),
    )
    logger.info(
        f"compact embedding split ({kind}): outer exponent {report.outer_exponent} "
        f"vs {report.expected_outer_exponent:.4f}"
    )
    return report


def default_orders(N: int) -> tuple[float, float, float]:
    """Strauss, fractional Strauss and Hardy orders used by the suite"""
    fractional = (0.5 + N / 2) / 2
    hardy = 1.0 if N >= 3 else 0.5
    return 0.5, fractional, hardy


def run_inequality_suite(
    params: ModelParams,
    gs: GroundState,
    n_samples: int = 500,
    seed: int = 0,
) -> tuple[InequalitySuiteReport, pd.DataFrame]:
    """Evaluate every inequality on a seeded random family; returns the summary and per-sample ratios"""
    grid = gs.zeta.grid
    s_strauss, s_fractional, s_hardy = default_orders(params.N)
    rows = []
    for index, v in enumerate(random_radial_samples(grid, n_samples, seed)):
        rows.append({
            "sample": index,
            "gn_ratio": check_gn(v, gs, params),
            "strauss_ratio": check_strauss(v, s_strauss)[1],
            "strauss_fractional_ratio": check_strauss_fractional(v, s_fractional)[1],
            "hardy_ratio": check_hardy(v, s_hardy),
        })
    frame = pd.DataFrame(rows, columns=["sample", "gn_ratio", "strauss_ratio", "strauss_fractional_ratio", "hardy_ratio"])

    violations = int((frame["gn_ratio"] > 1 + GN_TOL).sum())
    if violations:
        logger.warning(f"GN inequality violated on {violations} of {n_samples} samples")
    report = InequalitySuiteReport(
        n_samples=n_samples,
        seed=seed,
        c_opt=gs.c_opt,
        gn_max_ratio=float(frame["gn_ratio"].max()) if n_samples else 0.0,
        gn_saturation=check_gn(gs.zeta, gs, params),
        gn_violations=violations,
        strauss_s=s_strauss,
        strauss_constant=float(frame["strauss_ratio"].max()) if n_samples else 0.0,
        strauss_fractional_s=s_fractional,
        strauss_fractional_constant=float(frame["strauss_fractional_ratio"].max()) if n_samples else 0.0,
        hardy_s=s_hardy,
        hardy_constant=float(frame["hardy_ratio"].max()) if n_samples else 0.0,
        hardy_ceiling=2 / (params.N - 2) if s_hardy == 1 and params.N >= 3 else None,
    )
    return report, frame
