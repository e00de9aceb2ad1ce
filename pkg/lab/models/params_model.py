from enum import Enum
from typing import List

from pydantic import ConfigDict, Field

from models.base_model import LabModel


class Theorem(str, Enum):
    GN = "GN"
    DICHOTOMY_GLOBAL = "Dichotomy-Global"
    DICHOTOMY_BLOWUP = "Dichotomy-Blowup"
    COMPACT_EMBEDDING = "CompactEmbedding"


class ModelParams(LabModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    N: int = Field(ge=1, description="spatial dimension")
    b: float = Field(ge=0, description="weight exponent of |x|^b")
    q: float = Field(gt=1, description="nonlinearity exponent")

    @property
    def homogeneous(self) -> bool:
        return self.b == 0


class DerivedExponents(LabModel):
    D: float
    E: float
    s_c: float
    q_m: float
    q_e: float  # math.inf when N <= 4

    @property
    def energy_critical_finite(self) -> bool:
        return self.q_e != float("inf")


class ConstraintCheck(LabModel):
    name: str
    passed: bool
    detail: str


class RegimeReport(LabModel):
    params: ModelParams
    theorem: Theorem
    checks: List[ConstraintCheck] = []
    advisories: List[str] = []
    homogeneous_comparison: bool = False

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def violations(self) -> List[ConstraintCheck]:
        return [check for check in self.checks if not check.passed]

    def summary(self) -> str:
        if self.passed:
            return f"{self.theorem.value}: all constraints hold"
        return f"{self.theorem.value}: " + "; ".join(c.detail for c in self.violations)
