from enum import Enum
from typing import List, Optional

from models.base_model import LabModel


class FunctionalValues(LabModel):
    mass: float
    kinetic: float
    potential: float
    energy: float
    weinstein: float
    action: float


class Classification(str, Enum):
    GLOBAL = "Global"
    GLOBAL_UNIFORM_BOUND = "GlobalUniformBound"
    BLOWUP = "Blowup"
    INFINITE_TIME_BLOWUP = "InfiniteTimeBlowup"
    INDETERMINATE = "Indeterminate"


class DichotomyReport(LabModel):
    lhs_energy_mass: Optional[float]
    rhs_energy_mass: Optional[float]
    lhs_grad_mass: float
    rhs_grad_mass: float
    energy_below_threshold: Optional[bool]
    grad_mass_below: Optional[bool]
    classification: Classification
    notes: List[str] = []


class TrappingProfile(LabModel):
    """Energy trapping function F(y) = y - varkappa y^{D/2} from the flow-invariance argument"""

    varkappa: float
    tau: Optional[float]
    f_tau: Optional[float]
    tau_closed_form: Optional[float]


class FlowInvarianceReport(LabModel):
    side: str  # "below" or "above" the ground-state grad-mass level
    threshold: float
    holds: bool
    first_violation_time: Optional[float]
    max_relative_gap: float
    uniform_bound: Optional[float]
    uniform_bound_holds: Optional[bool]
    sup_kinetic_root: float
    trapping: Optional[TrappingProfile] = None
    trapping_holds: Optional[bool] = None


class CompactEmbeddingReport(LabModel):
    kind: str  # translated | fixed | vanishing
    n_values: List[float]
    deltas: List[float]
    inner: List[float]  # ∫_{r<δ} |u|^{1+q}|x|^b
    middle: List[float]  # δ <= r <= 1/δ
    outer: List[float]  # r > 1/δ
    total: List[float]
    outer_exponent: Optional[float]  # fitted power of δ
    expected_outer_exponent: float  # (q-1)(N-1)/2 - b
    inner_exponent: Optional[float]
    total_decay_exponent: Optional[float]  # total ~ n^{-exponent}
    middle_vanishes: bool


class InequalitySuiteReport(LabModel):
    n_samples: int
    seed: int
    c_opt: float
    gn_max_ratio: float
    gn_saturation: float  # ratio at ζ
    gn_violations: int
    strauss_s: float
    strauss_constant: float
    strauss_fractional_s: float
    strauss_fractional_constant: float
    hardy_s: float
    hardy_constant: float
    hardy_ceiling: Optional[float]  # 2/(N-2) for s = 1, N >= 3


class CounterexampleReport(LabModel):
    n_values: List[float]
    quotients: List[float]  # potential / (‖·‖^E ‖Δ·‖^D) per bump
    slope: float  # fitted power of n
    expected_slope: float  # (N-1)(1-q)/2 + b
    radial_threshold: float
    below_threshold: bool
