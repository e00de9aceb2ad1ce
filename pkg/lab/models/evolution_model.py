from enum import Enum
from typing import Any, List, Optional

from pydantic import Field

from models.base_model import FieldModel, LabModel
from models.params_model import ModelParams


class Termination(str, Enum):
    COMPLETED = "Completed"
    BLOWUP_DETECTED = "BlowupDetected"
    STEP_FAILURE = "StepFailure"


class EvolutionConfig(LabModel):
    dt: float = Field(1e-4, gt=0)
    T: float = Field(1.0, gt=0)
    snapshot_stride: int = Field(100, gt=0)
    blowup_factor: float = Field(10.0, gt=1)
    # smallest focusing scale still trusted, in units of dr
    resolution_guard: float = Field(16.0, gt=0)
    absorbing: bool = False
    absorbing_strength: float = Field(20.0, ge=0)
    nonlinear: bool = True
    stop_on_blowup: bool = True


class BlowupReport(LabModel):
    detected: bool
    t_detect: Optional[float] = None
    growth_exponent: Optional[float] = None
    kinetic_root_ratio: float  # max_t ‖Δv(t)‖ / ‖Δv(0)‖
    min_focusing_scale: float
    resolution_limit: float
    notes: List[str] = []


class Trajectory(FieldModel):
    params: ModelParams
    dr: float
    dt: float
    times: List[float] = []
    snapshots: List[Any] = Field(default=[], exclude=True)
    mass_series: List[float] = []
    energy_series: List[float] = []
    kinetic_series: List[float] = []
    terminated: Termination = Termination.COMPLETED
    t_stop: float = 0.0
    steps: int = 0
    failure: Optional[str] = None

    @property
    def mass_drift(self) -> float:
        m0 = self.mass_series[0]
        return max(abs(m - m0) for m in self.mass_series) / m0 if m0 else 0.0

    @property
    def energy_drift(self) -> float:
        e0 = self.energy_series[0]
        scale = abs(e0) or 1.0
        return max(abs(e - e0) for e in self.energy_series) / scale
