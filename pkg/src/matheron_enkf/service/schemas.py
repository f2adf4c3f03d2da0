"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str


class ExperimentRequest(BaseModel):
    """Knobs shared by the demo and sweep endpoints; mirrors ExperimentConfig."""

    d: int = 200
    m: int | None = None
    sigma: float = 1.0
    ell: float = 0.2
    tau: float = 0.2
    n_ens: int = 400
    seed: int = 0
    runs: int = 5
    methods: list[str] = Field(default_factory=lambda: ["gp", "enkf", "letkf"])
    perturb_obs: bool = False
    loc_radius: float | None = None
    obs_sites: Literal["even", "random"] = "even"
    n_draws: int = 20


class DemoRequest(ExperimentRequest):
    pass


class MethodResult(BaseModel):
    method: str
    post_mean: list[float]
    post_std: list[float]
    draws: list[list[float]]  # one inner list per draw, each of length d


class DemoResponse(BaseModel):
    positions: list[float]
    truth: list[float]
    obs_indices: list[int]
    obs_values: list[float]
    results: list[MethodResult]


class SweepRequest(ExperimentRequest):
    d: int = 800
    axis: Literal["observations", "dimensions"] = "observations"
    values: list[int] = Field(default_factory=list)


class TimingRecordModel(BaseModel):
    method: str
    axis: str
    axis_value: int
    fit_time_s: float
    predict_time_s: float
    rmse: float
    runs: int
    seed: int


class SweepResponse(BaseModel):
    records: list[TimingRecordModel]


class EquivalenceRequest(BaseModel):
    instances: int = 100
    seed: int = 0


class EquivalenceResponse(BaseModel):
    max_rel_diff: float
    n_instances: int
    threshold: float
    passed: bool


class MomentsCheckRequest(BaseModel):
    n_draws: int = 200_000
    seed: int = 0


class MomentsCheckResponse(BaseModel):
    passed: bool
    mean_abs_err: list[float]
    mean_tol: list[float]
    cov_fro_rel_err: float
    cov_rel_tol: float
    n_draws: int
