from typing import Any, Dict, Optional

from pydantic import ConfigDict, Field, field_validator

from models.base_model import LabModel
from models.evolution_model import EvolutionConfig
from models.ground_state_model import GroundStateSettings
from models.params_model import ModelParams
from utils.config import ELEMENT_DEGREE, TOOL_NAME, VERSION


class RunConfig(LabModel):
    """
    Fully resolved run configuration. Flat on purpose: every field is one
    KEY=value line of a config file or one CLI flag.
    """

    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="strings")

    N: int = Field(2, ge=1)
    b: float = Field(1.0, ge=0)
    q: float = Field(4.0, gt=1)

    r_max: float = Field(30.0, gt=0)
    m: int = Field(1024, ge=8)

    # ground state solver
    max_iter: int = Field(5000, gt=0)
    tol_profile: float = Field(1e-10, gt=0)
    tol_euler: float = Field(1e-6, gt=0)
    tol_poho: float = Field(1e-5, gt=0)
    tol_formula: float = Field(1e-6, gt=0)
    init_width: float = Field(1.0, gt=0)
    survey_widths: Optional[str] = None  # comma separated Gaussian widths

    # evolution
    dt: float = Field(1e-4, gt=0)
    t_final: float = Field(1.0, gt=0)
    snapshot_stride: int = Field(100, gt=0)
    blowup_factor: float = Field(10.0, gt=1)
    resolution_guard: float = Field(16.0, gt=0)
    absorbing: bool = False

    # initial datum: gaussian | gaussian:A:w | scaled-zeta:λ | snapshot:path
    init: str = "gaussian"

    cutoff_r: Optional[float] = Field(None, gt=0)  # None selects the pure weight r²
    classify_rtol: float = Field(1e-8, gt=0)

    seed: int = 0
    n_samples: int = Field(500, ge=0)
    # translation radii of the counterexample bumps, comma separated
    bump_n: str = "4,8,16,32"

    # sweep ranges, each "a:step:b" (inclusive) or a single value
    sweep_command: str = "groundstate"
    sweep_n: Optional[str] = None
    sweep_b: Optional[str] = None
    sweep_q: Optional[str] = None
    workers: Optional[int] = None

    output_dir: Optional[str] = None

    @field_validator("m")
    @classmethod
    def _whole_elements(cls, value: int) -> int:
        if value % ELEMENT_DEGREE:
            raise ValueError(f"must be a multiple of {ELEMENT_DEGREE}")
        return value

    @property
    def params(self) -> ModelParams:
        return ModelParams(N=self.N, b=self.b, q=self.q)

    @property
    def solver(self) -> GroundStateSettings:
        return GroundStateSettings(
            max_iter=self.max_iter,
            tol_profile=self.tol_profile,
            tol_euler=self.tol_euler,
            tol_poho=self.tol_poho,
            tol_formula=self.tol_formula,
            init_width=self.init_width,
        )

    @property
    def evolution(self) -> EvolutionConfig:
        return EvolutionConfig(
            dt=self.dt,
            T=self.t_final,
            snapshot_stride=self.snapshot_stride,
            blowup_factor=self.blowup_factor,
            resolution_guard=self.resolution_guard,
            absorbing=self.absorbing,
        )


class RunManifest(LabModel):
    tool: str = TOOL_NAME
    version: str = VERSION
    command: str
    config: RunConfig
    # report values are stored already JSON-encoded so a manifest parses back to itself
    outputs: Dict[str, Any] = {}
    files: Dict[str, str] = {}
    timings: Dict[str, float] = {}
    started_at: str
