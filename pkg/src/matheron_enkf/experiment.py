"""Benchmark harness: problem generation, solver runs, timing, and sweeps.

One seeded problem instance (truth, observation sites, observed values,
initial ensemble) is shared by every method so accuracy numbers are
comparable. Fit and predict phases are timed separately with a monotonic
clock, one warmup repetition discarded, medians reported. Problem setup,
including ensemble generation and the prior square root, is never timed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from statistics import median
from typing import Callable, NamedTuple

import numpy as np

from ._linalg import spd_sqrt
from .ensemble_da import EnkfConfig, Ensemble, enkf_analysis
from .errors import ContractViolationError
from .gaussian_core import GaussianBelief, JointGaussian, LinearObservation, make_joint
from .gp_kriging import (GRAM_JITTER_REL, GpFit, KernelParams, KrigingProblem,
                         gp_fit, gp_predict, gram, selection_operator)
from .letkf import GridGeometry, LocalizationConfig, letkf_analysis

METHODS = ("gp", "enkf", "letkf")
SWEEP_AXES = ("observations", "dimensions")
OBS_SITE_MODES = ("even", "random")

# Default sweep grids: observation counts at fixed d = 800, grid sizes at
# fixed m = 40.
DEFAULT_OBS_SWEEP = (40, 80, 160, 320)
DEFAULT_DIM_SWEEP = (200, 400, 600, 800)
DEFAULT_DIM_SWEEP_M = 40


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one benchmark problem and its solver runs.

    Attributes:
        d: grid size, >= 10.
        m: observation count; defaults to d // 5 when None.
        sigma: prior standard deviation.
        ell: kernel length-scale.
        tau: observation noise standard deviation.
        n_ens: ensemble size N, >= 2.
        seed: root seed; all randomness derives from it through named
            child streams.
        runs: timing repetitions, odd and >= 3.
        methods: subset of {"gp", "enkf", "letkf"}.
        perturb_obs: run the ensemble analysis with perturbed observations.
        loc_radius: localization radius; defaults to 2 * ell when None.
        obs_sites: "even" for evenly spaced observation sites, "random"
            for uniform-without-replacement sites.
        n_draws: posterior draws returned per method.
    """

    d: int
    m: int | None = None
    sigma: float = 1.0
    ell: float = 0.2
    tau: float = 0.2
    n_ens: int = 400
    seed: int = 0
    runs: int = 5
    methods: tuple[str, ...] = METHODS
    perturb_obs: bool = False
    loc_radius: float | None = None
    obs_sites: str = "even"
    n_draws: int = 20

    def __post_init__(self) -> None:
        if self.d < 10:
            raise ContractViolationError(f"d must be >= 10, got {self.d}")
        m = self.resolved_m
        if not 1 <= m <= self.d:
            raise ContractViolationError(
                f"m must satisfy 1 <= m <= d, got m={m}, d={self.d}")
        if self.n_ens < 2:
            raise ContractViolationError(f"n_ens must be >= 2, got {self.n_ens}")
        if self.runs < 3 or self.runs % 2 == 0:
            raise ContractViolationError(
                f"runs must be odd and >= 3, got {self.runs}")
        if not (0 <= self.seed < 2**64):
            raise ContractViolationError(
                f"seed must be a 64-bit nonnegative integer, got {self.seed}")
        methods = tuple(self.methods)
        if not methods or any(mth not in METHODS for mth in methods):
            raise ContractViolationError(
                f"methods must be a nonempty subset of {METHODS}, got {methods}")
        if len(set(methods)) != len(methods):
            raise ContractViolationError(f"methods repeat: {methods}")
        if self.obs_sites not in OBS_SITE_MODES:
            raise ContractViolationError(
                f"obs_sites must be one of {OBS_SITE_MODES}, got {self.obs_sites!r}")
        if self.n_draws < 0:
            raise ContractViolationError(f"n_draws must be >= 0, got {self.n_draws}")
        if self.loc_radius is not None and self.loc_radius <= 0:
            raise ContractViolationError(
                f"loc_radius must be > 0, got {self.loc_radius}")
        for name in ("sigma", "ell", "tau"):
            if float(getattr(self, name)) <= 0.0:
                raise ContractViolationError(
                    f"{name} must be > 0, got {getattr(self, name)}")
        object.__setattr__(self, "methods", methods)

    @property
    def resolved_m(self) -> int:
        return self.d // 5 if self.m is None else self.m

    @property
    def resolved_loc_radius(self) -> float:
        return 2.0 * self.ell if self.loc_radius is None else self.loc_radius


@dataclass(frozen=True)
class TimingRecord:
    """Median timings and accuracy for one method at one sweep point.

    Attributes:
        method: solver name.
        sweep_axis: "observations" or "dimensions".
        axis_value: the swept quantity's value (m or d).
        fit_time_s: median fit wall time over runs.
        predict_time_s: median predict wall time over runs.
        rmse: posterior-mean error against the generating truth.
        runs: timing repetitions behind the medians.
        seed: root seed of the underlying problem.
    """

    method: str
    sweep_axis: str
    axis_value: int
    fit_time_s: float
    predict_time_s: float
    rmse: float
    runs: int
    seed: int

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ContractViolationError(f"unknown method {self.method!r}")
        if self.sweep_axis not in SWEEP_AXES:
            raise ContractViolationError(f"unknown sweep axis {self.sweep_axis!r}")
        if self.fit_time_s < 0 or self.predict_time_s < 0:
            raise ContractViolationError("times must be >= 0")
        if self.rmse < 0:
            raise ContractViolationError("rmse must be >= 0")


class RunResult(NamedTuple):
    """Posterior summary plus the timing record for one method run."""

    mean: np.ndarray
    std: np.ndarray
    draws: np.ndarray
    record: TimingRecord


@dataclass(frozen=True)
class Problem:
    """A fully realized benchmark instance shared across methods.

    Attributes:
        kriging: grid, kernel, truth and observations.
        prior_root: symmetric square root of the jittered prior Gram matrix.
        ensemble0: initial ensemble, present when an ensemble method runs.
        perturb_stream: seed stream for observation perturbations.
        draw_stream: seed stream for posterior draws.
    """

    kriging: KrigingProblem
    prior_root: np.ndarray
    ensemble0: Ensemble | None
    perturb_stream: np.random.SeedSequence
    draw_stream: np.random.SeedSequence


def rmse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Root-mean-square difference between two equal-length vectors."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape or estimate.ndim != 1:
        raise ContractViolationError(
            f"rmse needs equal-length vectors, got {estimate.shape} and {truth.shape}")
    return float(np.sqrt(np.mean((estimate - truth) ** 2)))


def make_problem(cfg: ExperimentConfig) -> Problem:
    """Generate the shared problem instance for a config.

    Truth is one draw from the grid prior, observations are noisy point
    samples of it, and the initial ensemble (built only when an ensemble
    method is requested) draws from the same prior factor. Separate child
    streams per purpose keep every output reproducible from cfg.seed.
    """
    d, m = cfg.d, cfg.resolved_m
    streams = np.random.SeedSequence(cfg.seed).spawn(6)
    truth_s, obs_s, ens_s, perturb_s, draw_s, sites_s = streams
    positions = np.linspace(0.0, 1.0, d)
    if cfg.obs_sites == "even":
        obs_idx = np.round(np.linspace(0, d - 1, m)).astype(int)
    else:
        site_rng = np.random.default_rng(sites_s)
        obs_idx = np.sort(site_rng.choice(d, size=m, replace=False))
    geom = GridGeometry(positions=positions, obs_indices=obs_idx)
    params = KernelParams(sigma=cfg.sigma, ell=cfg.ell)
    jitter = GRAM_JITTER_REL * cfg.sigma**2
    prior_root = spd_sqrt(gram(geom, params, jitter))
    truth = prior_root @ np.random.default_rng(truth_s).standard_normal(d)
    y_star = truth[obs_idx] + cfg.tau * np.random.default_rng(obs_s).standard_normal(m)
    kriging = KrigingProblem(grid=geom, params=params, tau=cfg.tau,
                             truth=truth, y_star=y_star)
    ensemble0 = None
    if {"enkf", "letkf"} & set(cfg.methods):
        z = np.random.default_rng(ens_s).standard_normal((d, cfg.n_ens))
        ensemble0 = Ensemble(members=prior_root @ z)
    return Problem(kriging=kriging, prior_root=prior_root, ensemble0=ensemble0,
                   perturb_stream=perturb_s, draw_stream=draw_s)


def _ensemble_summary(analysis: Ensemble, n_draws: int):
    members = analysis.members
    mean = members.mean(axis=1)
    std = members.std(axis=1, ddof=1)
    draws = members[:, :min(n_draws, members.shape[1])].copy()
    return mean, std, draws


def _method_callables(method: str, cfg: ExperimentConfig, problem: Problem,
                      ) -> tuple[Callable, Callable]:
    kriging = problem.kriging
    if method == "gp":
        def fit() -> GpFit:
            return gp_fit(kriging)

        def predict(fitted: GpFit):
            rng = np.random.default_rng(problem.draw_stream)
            return gp_predict(fitted, kriging, cfg.n_draws, rng,
                              prior_root=problem.prior_root)

        return fit, predict
    if problem.ensemble0 is None:
        raise ContractViolationError(
            f"problem was generated without an ensemble; cannot run {method}")
    if method == "enkf":
        obs = LinearObservation(h=selection_operator(kriging.grid),
                                rho=cfg.tau, y_star=kriging.y_star)
        enkf_cfg = EnkfConfig(rho=cfg.tau, perturb_observations=cfg.perturb_obs)

        def fit() -> Ensemble:
            rng = None
            if cfg.perturb_obs:
                rng = np.random.default_rng(problem.perturb_stream)
            return enkf_analysis(problem.ensemble0, obs, enkf_cfg, rng)

        def predict(analysis: Ensemble):
            return _ensemble_summary(analysis, cfg.n_draws)

        return fit, predict
    if method == "letkf":
        loc = LocalizationConfig(radius=cfg.resolved_loc_radius)

        def fit() -> Ensemble:
            return letkf_analysis(problem.ensemble0, kriging.grid,
                                  kriging.y_star, cfg.tau, loc)

        def predict(analysis: Ensemble):
            return _ensemble_summary(analysis, cfg.n_draws)

        return fit, predict
    raise ContractViolationError(f"unknown method {method!r}")


def run_method(method: str, cfg: ExperimentConfig, problem: Problem | None = None,
               sweep_axis: str = "dimensions") -> RunResult:
    """Run one solver on the shared problem; time fit and predict phases.

    The fit phase is every observation-dependent precomputation
    (factorizations, gains, the ensemble analysis). The predict phase
    produces mean, pointwise std, and cfg.n_draws posterior draws on the
    full grid. Each phase is timed with a monotonic clock over cfg.runs
    repetitions after one discarded warmup; medians go into the record.
    Non-timing outputs are identical across repetitions because per-purpose
    generators restart from the same stream each repetition.

    Args:
        method: one of METHODS.
        cfg: experiment settings.
        problem: shared problem; generated from cfg when None.
        sweep_axis: which axis this run reports under.

    Returns:
        RunResult with (mean, std, draws, record).
    """
    if method not in METHODS:
        raise ContractViolationError(f"unknown method {method!r}")
    if sweep_axis not in SWEEP_AXES:
        raise ContractViolationError(f"unknown sweep axis {sweep_axis!r}")
    if problem is None:
        problem = make_problem(cfg)
    fit, predict = _method_callables(method, cfg, problem)
    fit_times: list[float] = []
    predict_times: list[float] = []
    outputs = None
    try:
        for rep in range(cfg.runs + 1):
            t0 = time.perf_counter()
            fitted = fit()
            t1 = time.perf_counter()
            outputs = predict(fitted)
            t2 = time.perf_counter()
            if rep > 0:
                fit_times.append(t1 - t0)
                predict_times.append(t2 - t1)
    except Exception as exc:
        if exc.args and isinstance(exc.args[0], str):
            exc.args = (f"{method}: {exc.args[0]}",) + exc.args[1:]
        raise
    mean, std, draws = outputs
    axis_value = cfg.resolved_m if sweep_axis == "observations" else cfg.d
    record = TimingRecord(
        method=method,
        sweep_axis=sweep_axis,
        axis_value=axis_value,
        fit_time_s=median(fit_times),
        predict_time_s=median(predict_times),
        rmse=rmse(mean, problem.kriging.truth),
        runs=cfg.runs,
        seed=cfg.seed,
    )
    return RunResult(mean=mean, std=std, draws=draws, record=record)


def solve_method(method: str, cfg: ExperimentConfig, problem: Problem | None = None,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run one solver once, untimed.

    Same fit and predict phases as run_method without warmup or repetition;
    outputs are bitwise identical to the timed path's.

    Args:
        method: one of METHODS.
        cfg: experiment settings.
        problem: shared problem; generated from cfg when None.

    Returns:
        Tuple (mean, std, draws).
    """
    if method not in METHODS:
        raise ContractViolationError(f"unknown method {method!r}")
    if problem is None:
        problem = make_problem(cfg)
    fit, predict = _method_callables(method, cfg, problem)
    try:
        return predict(fit())
    except Exception as exc:
        if exc.args and isinstance(exc.args[0], str):
            exc.args = (f"{method}: {exc.args[0]}",) + exc.args[1:]
        raise


def sweep(axis: str, values: list[int], cfg: ExperimentConfig,
          on_record: Callable[[TimingRecord], None] | None = None,
          ) -> list[TimingRecord]:
    """Run every configured method at each sweep value.

    axis "observations" varies m at fixed d; axis "dimensions" varies d at
    fixed m (cfg.m, else 40). Records are handed to on_record as they
    complete, so partial results survive a failure at a later point.

    Args:
        axis: sweep axis.
        values: nonempty, strictly ascending values for the axis.
        cfg: base configuration.
        on_record: optional per-record flush callback.

    Returns:
        One TimingRecord per (value, method), in execution order.
    """
    if axis not in SWEEP_AXES:
        raise ContractViolationError(f"unknown sweep axis {axis!r}")
    if not values:
        raise ContractViolationError("values must be nonempty")
    values = [int(v) for v in values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ContractViolationError(f"values must be strictly ascending, got {values}")
    records: list[TimingRecord] = []
    for value in values:
        if axis == "observations":
            point_cfg = replace(cfg, m=value)
        else:
            fixed_m = cfg.m if cfg.m is not None else DEFAULT_DIM_SWEEP_M
            point_cfg = replace(cfg, d=value, m=fixed_m)
        problem = make_problem(point_cfg)
        for method in point_cfg.methods:
            result = run_method(method, point_cfg, problem, sweep_axis=axis)
            records.append(result.record)
            if on_record is not None:
                on_record(result.record)
    return records


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs); inputs must be positive."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise ContractViolationError(
            f"need matching 1-D arrays with >= 2 points, got {xs.shape}, {ys.shape}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ContractViolationError("log-log slope needs positive values")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def reference_joint() -> tuple[JointGaussian, np.ndarray]:
    """The fixed 3-state / 2-observation joint used by the moment check.

    Built through make_joint from a hand-picked positive-definite prior and
    a rank-2 operator, so the joint is PSD by construction and every run of
    the Monte Carlo moment verification targets identical moments.

    Returns:
        Tuple (joint, y_star).
    """
    prior = GaussianBelief(
        mean=np.array([0.5, -0.3, 1.2]),
        cov=np.array([
            [1.0, 0.6, 0.2],
            [0.6, 1.5, 0.4],
            [0.2, 0.4, 0.8],
        ]),
    )
    y_star = np.array([0.9, -0.4])
    obs = LinearObservation(
        h=np.array([[1.0, 0.0, 0.0], [0.5, -1.0, 0.25]]),
        rho=0.3,
        y_star=y_star,
    )
    return make_joint(prior, obs), y_star
