"""HTTP service exposing the analysis library.

Thin translation layer: endpoints validate request models, call the library,
and serialize results. Library contract violations surface as 422 responses,
numerical failures as 500 responses with kind "numerical".
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..ensemble_da import equivalence_suite
from ..errors import ContractViolationError, SingularCovarianceError
from ..experiment import (ExperimentConfig, make_problem, reference_joint,
                          solve_method, sweep)
from ..gaussian_core import moment_check
from .schemas import (DemoRequest, DemoResponse, EquivalenceRequest,
                      EquivalenceResponse, HealthResponse, MethodResult,
                      MomentsCheckRequest, MomentsCheckResponse, SweepRequest,
                      SweepResponse, TimingRecordModel)

EQUIVALENCE_THRESHOLD = 1e-9
MOMENT_COV_REL_TOL = 0.05

app = FastAPI(title="matheron-enkf", version=__version__)


@app.exception_handler(ContractViolationError)
async def _contract_violation(request: Request, exc: ContractViolationError):
    return JSONResponse(status_code=422,
                        content={"detail": str(exc), "kind": "contract"})


@app.exception_handler(SingularCovarianceError)
async def _singular_covariance(request: Request, exc: SingularCovarianceError):
    return JSONResponse(status_code=500,
                        content={"detail": str(exc), "kind": "numerical"})


def _config_from(req) -> ExperimentConfig:
    return ExperimentConfig(
        d=req.d,
        m=req.m,
        sigma=req.sigma,
        ell=req.ell,
        tau=req.tau,
        n_ens=req.n_ens,
        seed=req.seed,
        runs=req.runs,
        methods=tuple(req.methods),
        perturb_obs=req.perturb_obs,
        loc_radius=req.loc_radius,
        obs_sites=req.obs_sites,
        n_draws=req.n_draws,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/demo", response_model=DemoResponse)
def demo(req: DemoRequest) -> DemoResponse:
    cfg = _config_from(req)
    problem = make_problem(cfg)
    kriging = problem.kriging
    results = []
    for method in cfg.methods:
        mean, std, draws = solve_method(method, cfg, problem)
        results.append(MethodResult(
            method=method,
            post_mean=mean.tolist(),
            post_std=std.tolist(),
            draws=draws.T.tolist(),
        ))
    return DemoResponse(
        positions=kriging.grid.positions.tolist(),
        truth=kriging.truth.tolist(),
        obs_indices=kriging.grid.obs_indices.tolist(),
        obs_values=kriging.y_star.tolist(),
        results=results,
    )


@app.post("/sweep", response_model=SweepResponse)
def run_sweep(req: SweepRequest) -> SweepResponse:
    cfg = _config_from(req)
    records = sweep(req.axis, req.values, cfg)
    return SweepResponse(records=[
        TimingRecordModel(
            method=r.method,
            axis=r.sweep_axis,
            axis_value=r.axis_value,
            fit_time_s=r.fit_time_s,
            predict_time_s=r.predict_time_s,
            rmse=r.rmse,
            runs=r.runs,
            seed=r.seed,
        )
        for r in records
    ])


@app.post("/equivalence", response_model=EquivalenceResponse)
def equivalence(req: EquivalenceRequest) -> EquivalenceResponse:
    reports = equivalence_suite(req.instances, req.seed)
    worst = float(np.max(reports))
    return EquivalenceResponse(
        max_rel_diff=worst,
        n_instances=req.instances,
        threshold=EQUIVALENCE_THRESHOLD,
        passed=worst <= EQUIVALENCE_THRESHOLD,
    )


@app.post("/moments-check", response_model=MomentsCheckResponse)
def moments_check(req: MomentsCheckRequest) -> MomentsCheckResponse:
    joint, y_star = reference_joint()
    rng = np.random.default_rng(req.seed)
    result = moment_check(joint, y_star, req.n_draws, rng,
                          cov_rel_tol=MOMENT_COV_REL_TOL)
    return MomentsCheckResponse(
        passed=result.passed,
        mean_abs_err=result.mean_abs_err.tolist(),
        mean_tol=result.mean_tol.tolist(),
        cov_fro_rel_err=result.cov_fro_rel_err,
        cov_rel_tol=MOMENT_COV_REL_TOL,
        n_draws=result.n_draws,
    )
