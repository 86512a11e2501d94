"""Request/response models for the HTTP service.

Validation here is shape-level (types, required fields); numeric domain
rules live in the core modules and surface as structured 400/500 errors.
"""

from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ..fields import TailProfile

Family = Literal["rademacher", "uniform_sym", "gaussian", "pareto_log"]


class ProfileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Family
    p: Optional[float] = None
    q: Optional[float] = None
    mu: float = 0.0
    x0: Optional[float] = None

    def to_profile(self) -> TailProfile:
        return TailProfile(
            family=self.family, p=self.p, q=self.q, mu=self.mu, x0=self.x0
        )


class ErrorBody(BaseModel):
    type: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody


class HealthResponse(BaseModel):
    status: str
    version: str


class WeightsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float
    n: int = Field(ge=0)


class WeightsResponse(BaseModel):
    alpha: float
    k: List[int]
    log_weight: List[float]
    weight: List[float]


class SampleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    profile: ProfileModel
    seed: int = 0
    extent: Tuple[int, int]


class SampleResponse(BaseModel):
    extent: Tuple[int, int]
    values: List[List[float]]  # row k = 0..M, column l = 0..N


class Mean1DRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float
    n: Optional[int] = Field(default=None, ge=1)
    profile: Optional[ProfileModel] = None
    seed: int = 0
    values: Optional[List[float]] = None
    method: Literal["auto", "naive", "fft"] = "auto"


class Mean1DResponse(BaseModel):
    alpha: float
    n: List[int]
    mean: List[float]


class Mean2DRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float
    beta: float
    profile: ProfileModel
    seed: int = 0
    extent: Tuple[int, int]
    checkpoints: Union[Literal["dyadic"], List[Tuple[int, int]]] = "dyadic"
    method: Literal["separable", "naive"] = "separable"


class Mean2DRow(BaseModel):
    m: int
    n: int
    mean: float
    abs_dev_from_mu: float


class Mean2DResponse(BaseModel):
    alpha: float
    beta: float
    mu: float
    rows: List[Mean2DRow]


class VerdictRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Literal["prob", "complete", "as"]
    alpha: float
    beta: float
    profile: ProfileModel
    master_seed: int = 0
    threads: Optional[int] = None
    preset: Literal["quick", "full"] = "full"


class VerdictResponse(BaseModel):
    mode: str
    predicted: bool
    observed: Optional[bool]
    concordant: Optional[bool]
    statistics: dict


class CompleteSumRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float
    beta: Optional[float] = None  # omitted -> one-dimensional series
    profile: ProfileModel
    n_base: int = 128


class CompleteSumResponse(BaseModel):
    levels: Tuple[int, int, int]
    values: Tuple[float, float, float]
    increments: Tuple[float, float]
    increment_ratio: Optional[float]
    classification: str


class AppendixVerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gamma_grid: Optional[List[float]] = None
    n_base: int = 128


class MatrixRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    master_seed: int = 0
    preset: Literal["quick", "full"] = "quick"
    threads: Optional[int] = None
