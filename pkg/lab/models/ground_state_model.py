from typing import Any, List, Tuple

from pydantic import Field

from models.base_model import FieldModel, LabModel
from models.params_model import ModelParams


class GroundStateSettings(LabModel):
    max_iter: int = Field(5000, gt=0)
    tol_profile: float = Field(1e-10, gt=0)
    tol_weinstein: float = Field(1e-12, gt=0)
    tol_euler: float = Field(1e-6, gt=0)
    tol_poho: float = Field(1e-5, gt=0)
    tol_formula: float = Field(1e-6, gt=0)
    polish_max_iter: int = Field(2000, gt=0)
    init_width: float = Field(1.0, gt=0)
    mixing: float = Field(0.5, gt=0, le=1)


class GroundState(FieldModel):
    params: ModelParams
    zeta: Any = Field(exclude=True)
    phi: Any = Field(default=None, exclude=True)
    c_opt: float
    mass_z: float
    kinetic_z: float
    potential_z: float
    energy_z: float
    action_z: float
    residual_euler: float
    residual_pohozaev: Tuple[float, float]
    residual_identity: float  # ‖Δζ‖² + ‖ζ‖² against the potential
    residual_copt_formula: float
    phi_normalization_defect: float
    iterations: int
    weinstein_history: List[float] = Field(default=[], exclude=True)

    @property
    def norm_z(self) -> float:
        return self.mass_z ** 0.5

    @property
    def grad_z(self) -> float:
        return self.kinetic_z ** 0.5
