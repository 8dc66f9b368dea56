import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PrivacyMode(str, Enum):
    ELEMENT_WISE = "element"
    ROW_WISE = "row"


class PrivacyParams(BaseModel):
    """Calibrated parameters of one release.

    Built by `privacy.noise.calibrate_element_wise` / `calibrate_row_wise`;
    constructing one by hand is allowed but `privacy.noise.check_calibration`
    will reject values that do not follow from the primaries.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: PrivacyMode
    epsilon: float = Field(gt=0)
    k: int = Field(ge=1)
    d: Optional[int] = Field(default=None, ge=1)
    alpha: Optional[float] = Field(default=None, gt=0)
    t: Optional[float] = Field(default=None, gt=0)
    t_multiplier: Optional[float] = Field(default=None, ge=1)
    c: float = Field(gt=0)
    b: float = Field(gt=0)
    sigma2: float = Field(gt=0)
    failure_bound: float = Field(ge=0, le=1)
    vacuous_bound: bool = False

    @model_validator(mode="after")
    def _check_shape(self) -> "PrivacyParams":
        if not all(math.isfinite(v) for v in (self.epsilon, self.c, self.b, self.sigma2)):
            raise ValueError("privacy parameters must be finite")
        if self.mode == PrivacyMode.ROW_WISE and (self.alpha is None or self.t is None):
            raise ValueError("row-wise parameters need alpha and t")
        return self


class RunManifest(BaseModel):
    """Everything needed to reproduce one CLI run."""

    model_config = ConfigDict(extra="forbid")

    schema_version: str
    command: str
    timestamp: str
    seed: int = Field(ge=0)
    experiment: Optional[str] = None
    mode: Optional[PrivacyMode] = None
    epsilon: Optional[float] = None
    k: Optional[int] = None
    d: Optional[int] = None
    n: Optional[int] = None
    alpha: Optional[float] = None
    t: Optional[float] = None
    t_multiplier: Optional[float] = None
    c: Optional[float] = None
    b: Optional[float] = None
    sigma2: Optional[float] = None
    failure_bound: Optional[float] = None
    vacuous_bound: Optional[bool] = None
    labels_passed_through: bool = False
    outputs: List[str] = Field(default_factory=list)
    # effective experiment settings, including ones that came from the environment
    settings: Dict[str, Any] = Field(default_factory=dict)


class ExperimentKind(str, Enum):
    TABLE1 = "table1"
    DISTANCE_RECOVERY = "distance_recovery"
    STD_CURVE = "std_curve"
    VERIFY = "verify"


class ExperimentReport(BaseModel):
    experiment: ExperimentKind
    config: Dict[str, Any]
    results: List[Dict[str, Any]]
    manifest: Optional[str] = None


class PropertyResult(BaseModel):
    suite: str
    name: str
    passed: bool
    observed: float
    bound: float
    trials: int
    detail: str = ""


# ---------- HTTP bodies ----------

class CalibrationRequest(BaseModel):
    mode: PrivacyMode = PrivacyMode.ELEMENT_WISE
    epsilon: Optional[float] = None
    k: int
    d: Optional[int] = None
    alpha: Optional[float] = None
    t_multiplier: Optional[float] = None


class RecoverRequest(BaseModel):
    zi: List[float]
    zj: List[float]
    k: int
    sigma2: float


class RecoverResponse(BaseModel):
    estimate: float
    clamped: float
    k: int
    sigma2: float


class ReleaseResponse(BaseModel):
    success: bool
    manifest: RunManifest
    released_csv: str


class StdCurvePoint(BaseModel):
    k: int
    mode: PrivacyMode
    b: float
    std: float
