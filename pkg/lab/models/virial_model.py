from typing import Any, List, Optional

import numpy as np
from pydantic import Field

from models.base_model import FieldModel, LabModel


class CutoffProfile(FieldModel):
    """
    Radial weight χ_R sampled at the grid nodes together with the radial
    derivatives the virial identity needs. R is None for the pure weight r².
    """

    R: Optional[float]
    N: int
    r: Any = Field(exclude=True)
    derivatives: Any = Field(exclude=True)  # rows k = 0..6: ∂_r^k χ_R
    lap: Any = Field(exclude=True)  # Δχ_R
    lap_dd: Any = Field(exclude=True)  # ∂_r² Δχ_R
    bilap: Any = Field(exclude=True)  # Δ²χ_R
    trilap: Any = Field(exclude=True)  # Δ³χ_R

    @property
    def d1(self) -> np.ndarray:
        return self.derivatives[1]

    @property
    def d2(self) -> np.ndarray:
        return self.derivatives[2]

    @property
    def gradient_sup(self) -> float:
        return float(np.max(np.abs(self.d1)))


class CutoffCertificate(LabModel):
    R: float
    inner_max_defect: float  # max |χ'' - 2|, |χ'/r - 2| on r <= R
    convexity_margin: float  # max over nodes of max{χ'/r - 2, χ'' - χ'/r}
    tail_max: float  # max |∂^k χ| on r >= 10R, k >= 1
    scale_constants: List[float]  # max |∂_r^k χ_R| R^{k-2}, k = 0..6
    passed: bool


class VirialReport(LabModel):
    R: Optional[float]
    times: List[float]
    morawetz: List[float]
    dmdt_fd: List[float]
    rhs: List[float]
    mismatch: List[float]  # |fd - rhs| / (16 ‖Δv‖²)
    max_relative_mismatch: float
    max_relative_rhs: float  # max |rhs| / (16 ‖Δv‖²)


class BlowupBoundReport(LabModel):
    empirical_constant: float  # max_t -M_R / (‖∇χ_R‖∞ ‖v0‖^{3/2} ‖Δv‖^{1/2})
    max_abs_morawetz: float
    eventually_negative: bool
    eventually_decreasing: bool
    decreasing_from: Optional[float] = None
    slope: Optional[float] = None
