import logging
import math

from models.params_model import ConstraintCheck, DerivedExponents, ModelParams, RegimeReport, Theorem
from utils.errors import RegimeError

logger = logging.getLogger(__name__)

# relative tolerance used to decide that q sits exactly on a critical exponent
CRITICAL_RTOL = 1e-12


def derived_exponents(params: ModelParams) -> DerivedExponents:
    """Scaling exponents D, E, the critical index s_c and the critical exponents q_m, q_e"""
    N, b, q = params.N, params.b, params.q
    D = (N * q - N - 2 * b) / 4
    return DerivedExponents(
        D=D,
        E=1 + q - D,
        s_c=N / 2 - (4 + b) / (q - 1),
        q_m=1 + (8 + 2 * b) / N,
        q_e=1 + (8 + 2 * b) / (N - 4) if N > 4 else math.inf,
    )


def radial_threshold(params: ModelParams) -> float:
    """Lower bound 1 + 2b/(N-1) coming from the radial Strauss estimates"""
    if params.N < 2:
        return math.inf
    return 1 + 2 * params.b / (params.N - 1)


def is_critical(q: float, q_crit: float) -> bool:
    return math.isfinite(q_crit) and math.isclose(q, q_crit, rel_tol=CRITICAL_RTOL)


def _check(name: str, passed: bool, detail: str) -> ConstraintCheck:
    return ConstraintCheck(name=name, passed=bool(passed), detail=detail)


def validate_regime(params: ModelParams, theorem: Theorem) -> RegimeReport:
    """
    Check the admissible parameter window of a theorem.
    Violations are returned as data; nothing is raised here.
    """
    theorem = Theorem(theorem)
    ex = derived_exponents(params)
    N, b, q = params.N, params.b, params.q
    checks = [_check("dimension", N >= 2, f"N = {N} {'>=' if N >= 2 else '<'} 2")]
    advisories = []

    if params.homogeneous:
        advisories.append("b = 0: homogeneous comparison mode (theorems are stated for b > 0)")

    lower = radial_threshold(params)
    if theorem == Theorem.GN:
        checks.append(_check(
            "radial lower bound",
            q > lower,
            f"q = {q:g} {'>' if q > lower else '<='} 1 + 2b/(N-1) = {lower:g}",
        ))
        checks.append(_check(
            "energy subcritical",
            q < ex.q_e,
            f"q = {q:g} {'<' if q < ex.q_e else '>='} q_e = {ex.q_e:g}",
        ))
    elif theorem == Theorem.COMPACT_EMBEDDING:
        effective = 1 + q - (2 * b / (N - 1) if N >= 2 else math.inf)
        upper = 2 + 8 / (N - 4) if N > 4 else math.inf
        checks.append(_check(
            "embedding window",
            2 < effective < upper,
            f"1 + q - 2b/(N-1) = {effective:g} must lie in (2, {upper:g})",
        ))
    else:
        floor = max(ex.q_m, lower)
        checks.append(_check(
            "threshold window lower",
            q >= floor or is_critical(q, floor),
            f"q = {q:g} vs max(q_m, 1 + 2b/(N-1)) = {floor:g}",
        ))
        checks.append(_check(
            "threshold window upper",
            q <= ex.q_e or is_critical(q, ex.q_e),
            f"q = {q:g} vs q_e = {ex.q_e:g}",
        ))
        if theorem == Theorem.DICHOTOMY_BLOWUP:
            checks.append(_check("q <= 9", q <= 9, f"q = {q:g} {'<=' if q <= 9 else '>'} 9"))
            if is_critical(q, ex.q_m):
                branch = "q = q_m: infinite-time blow-up branch"
                passed = True
            else:
                passed = q > ex.q_m
                branch = f"q = {q:g} {'>' if passed else '<'} q_m = {ex.q_m:g}: finite-time branch"
            checks.append(_check("mass supercritical or critical", passed, branch))
            if ex.q_e <= 9:
                advisories.append(
                    f"q_e = {ex.q_e:g} <= 9 (b <= 4(N-5)): the q <= 9 restriction may be relaxable; not certified"
                )

    report = RegimeReport(
        params=params,
        theorem=theorem,
        checks=checks,
        advisories=advisories,
        homogeneous_comparison=params.homogeneous,
    )
    for advisory in advisories:
        logger.info(advisory)
    return report


def require_regime(params: ModelParams, theorem: Theorem) -> RegimeReport:
    report = validate_regime(params, theorem)
    if not report.passed:
        raise RegimeError(report.summary(), payload=report.model_dump(mode="json"))
    return report
