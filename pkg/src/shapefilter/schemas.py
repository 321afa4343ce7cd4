"""Request and response models for the HTTP service."""
from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class TransferFunctionSpec(BaseModel):
    """Either a preset name or raw ascending coefficients."""

    preset: str | None = None
    num: list[float] | None = None
    den: list[float] | None = None

    @model_validator(mode="after")
    def _one_source(self):
        has_coeffs = self.num is not None or self.den is not None
        if self.preset is None and not has_coeffs:
            raise ValueError("provide a preset or num/den coefficients")
        if self.preset is not None and has_coeffs:
            raise ValueError("provide either a preset or coefficients, not both")
        return self


class SynthesizeRequest(BaseModel):
    tf: TransferFunctionSpec
    interpolation_points: list[float] | None = None


class SimulateRequest(BaseModel):
    tf: TransferFunctionSpec
    method: str = "spectral"
    T: float = Field(default=5.0, gt=0)
    L: int = Field(default=256, ge=1)
    seed: int = Field(default=0, ge=0)
    stream_id: int = Field(default=0, ge=0)
    trajectories: int = Field(default=1, ge=1)
    grid: int = Field(default=1000, ge=2)
    format: str = "csv"


class ErrorTableRequest(BaseModel):
    tf: TransferFunctionSpec
    T: float = Field(default=5.0, gt=0)
    orders: list[int] = Field(default=[4, 8, 16, 32, 64, 128, 256], min_length=1)
    w_form: str = "factored"
    format: str = "csv"


class OperatorRequest(BaseModel):
    name: str
    tf: TransferFunctionSpec | None = None
    T: float = Field(default=5.0, gt=0)
    L: int = Field(default=256, ge=1)
    w_form: str = "factored"
    format: str = "csv"


class PresetInfo(BaseModel):
    name: str
    num: list[float]
    den: list[float]
    description: str


class ErrorRow(BaseModel):
    L: int
    epsilon: float
    epsilon1: float
    epsilon2: float


class ErrorTableResponse(BaseModel):
    source: str
    T: float
    w_form: str
    kernel_norm_sq: float
    rows: list[ErrorRow]
    convergence_rate: float | None = None
