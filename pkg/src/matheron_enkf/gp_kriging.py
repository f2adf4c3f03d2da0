"""Squared-exponential GP prior on a 1-D grid, exact regression, pathwise draws.

The exact solver routes through gaussian_core.condition so its correctness is
inherited rather than re-derived. A structured fit/predict pair operating on
the observed sub-kernel provides the same posterior mean and pointwise
standard deviation at benchmark scale, where forming the full joint would
drown the measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from ._linalg import spd_sqrt
from .errors import ContractViolationError
from .gaussian_core import (GaussianBelief, LinearObservation, condition,
                            make_joint, matheron_exact, sample)
from .letkf import GridGeometry

# Relative diagonal jitter for the full Gram matrix; squared-exponential
# kernels on fine grids are numerically rank-deficient without it.
GRAM_JITTER_REL = 1e-8


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel parameters.

    Attributes:
        sigma: prior standard deviation, > 0.
        ell: length-scale, > 0.
    """

    sigma: float
    ell: float

    def __post_init__(self) -> None:
        sigma = float(self.sigma)
        ell = float(self.ell)
        if not np.isfinite(sigma) or sigma <= 0.0:
            raise ContractViolationError(f"sigma must be > 0, got {sigma}")
        if not np.isfinite(ell) or ell <= 0.0:
            raise ContractViolationError(f"ell must be > 0, got {ell}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "ell", ell)


@dataclass(frozen=True)
class KrigingProblem:
    """A latent-field recovery instance on a 1-D grid.

    Attributes:
        grid: grid geometry with observed indices.
        params: kernel parameters.
        tau: observation noise standard deviation, > 0.
        truth: (D,) latent field the observations were generated from.
        y_star: (m,) observed values, ordered like grid.obs_indices.
    """

    grid: GridGeometry
    params: KernelParams
    tau: float
    truth: np.ndarray
    y_star: np.ndarray

    def __post_init__(self) -> None:
        tau = float(self.tau)
        if not np.isfinite(tau) or tau <= 0.0:
            raise ContractViolationError(f"tau must be > 0, got {tau}")
        truth = np.asarray(self.truth, dtype=float)
        if truth.shape != (self.grid.dim,):
            raise ContractViolationError(
                f"truth must have shape ({self.grid.dim},), got {truth.shape}")
        y_star = np.asarray(self.y_star, dtype=float)
        if y_star.shape != (self.grid.n_obs,):
            raise ContractViolationError(
                f"y_star must have shape ({self.grid.n_obs},), got {y_star.shape}")
        if not (np.all(np.isfinite(truth)) and np.all(np.isfinite(y_star))):
            raise ContractViolationError("truth or y_star contains non-finite entries")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "truth", truth)
        object.__setattr__(self, "y_star", y_star)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def n_obs(self) -> int:
        return self.grid.n_obs


def se_kernel(r1: float, r2: float, p: KernelParams) -> float:
    """sigma^2 exp(-(r1 - r2)^2 / (2 ell^2)); symmetric in its arguments."""
    delta = float(r1) - float(r2)
    return p.sigma**2 * float(np.exp(-(delta * delta) / (2.0 * p.ell**2)))


def _kernel_matrix(a: np.ndarray, b: np.ndarray, p: KernelParams) -> np.ndarray:
    delta = a[:, None] - b[None, :]
    return p.sigma**2 * np.exp(-(delta * delta) / (2.0 * p.ell**2))


def gram(grid: GridGeometry, p: KernelParams, jitter: float) -> np.ndarray:
    """Full kernel matrix on the grid plus jitter on the diagonal.

    Exactly symmetric: entry (i, j) and entry (j, i) are computed from the
    same squared difference.

    Args:
        grid: grid geometry (positions used).
        p: kernel parameters.
        jitter: nonnegative diagonal addition.

    Returns:
        (D, D) symmetric PSD matrix.
    """
    if jitter < 0.0:
        raise ContractViolationError(f"jitter must be >= 0, got {jitter}")
    k = _kernel_matrix(grid.positions, grid.positions, p)
    if jitter > 0.0:
        k[np.diag_indices_from(k)] += jitter
    return k


def selection_operator(grid: GridGeometry) -> np.ndarray:
    """Dense (m, D) row-selection matrix mapping a field to its observed entries."""
    h = np.zeros((grid.n_obs, grid.dim))
    h[np.arange(grid.n_obs), grid.obs_indices] = 1.0
    return h


def _exact_joint(problem: KrigingProblem):
    jitter = GRAM_JITTER_REL * problem.params.sigma**2
    prior = GaussianBelief(
        mean=np.zeros(problem.dim),
        cov=gram(problem.grid, problem.params, jitter),
    )
    obs = LinearObservation(
        h=selection_operator(problem.grid),
        rho=problem.tau,
        y_star=problem.y_star,
    )
    return make_joint(prior, obs)


def gp_fit_predict(problem: KrigingProblem) -> tuple[np.ndarray, np.ndarray]:
    """Exact posterior mean and pointwise std on the full grid.

    Implemented by building the joint over (field, observations) and calling
    gaussian_core.condition, so exactness is inherited from the reference
    conditioning path.

    Args:
        problem: kriging instance; m = 0 returns the prior.

    Returns:
        Tuple (mean, std), each (D,).
    """
    joint = _exact_joint(problem)
    post = condition(joint, problem.y_star)
    std = np.sqrt(np.clip(np.diag(post.cov), 0.0, None))
    return post.mean, std


def gp_posterior_draws(problem: KrigingProblem, count: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Posterior field draws via the pathwise route.

    Joint prior draws of (field, observation) are mapped through the exact
    pathwise update, never forming the posterior covariance.

    Args:
        problem: kriging instance.
        count: number of draws, >= 1.
        rng: numpy Generator; consumed.

    Returns:
        (D, count) matrix of posterior draws.
    """
    if count < 1:
        raise ContractViolationError(f"count must be >= 1, got {count}")
    joint = _exact_joint(problem)
    joint_belief = GaussianBelief(mean=joint.full_mean(), cov=joint.full_cov())
    draws = sample(joint_belief, count, rng)
    pair = (draws[:problem.dim, :], draws[problem.dim:, :])
    return matheron_exact(joint, pair, problem.y_star)


@dataclass(frozen=True)
class GpFit:
    """Precomputation for the structured solver: observed-block factor and weights.

    Attributes:
        factor: Cholesky factorization (scipy cho_factor tuple) of
            K_mm + (jitter + tau^2) I, or None when m = 0.
        alpha: (m,) solve of the factor against the observations.
        jitter: diagonal jitter used, absolute units.
    """

    factor: tuple | None
    alpha: np.ndarray
    jitter: float


def gp_fit(problem: KrigingProblem) -> GpFit:
    """Factor the observed-block kernel and solve for the mean weights.

    This is the whole observation-dependent precomputation of the structured
    solver: an m x m Cholesky factorization plus one solve.

    Args:
        problem: kriging instance.

    Returns:
        GpFit with the factorization and weights.
    """
    jitter = GRAM_JITTER_REL * problem.params.sigma**2
    m = problem.n_obs
    if m == 0:
        return GpFit(factor=None, alpha=np.zeros(0), jitter=jitter)
    obs_pos = problem.grid.obs_positions()
    k_mm = _kernel_matrix(obs_pos, obs_pos, problem.params)
    k_mm[np.diag_indices_from(k_mm)] += jitter + problem.tau**2
    factor = cho_factor(k_mm, lower=True)
    alpha = cho_solve(factor, problem.y_star)
    return GpFit(factor=factor, alpha=alpha, jitter=jitter)


def gp_predict(fit: GpFit, problem: KrigingProblem, count: int,
               rng: np.random.Generator | None = None,
               prior_root: np.ndarray | None = None,
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Posterior mean, pointwise std, and pathwise draws from a fit.

    Mean and std agree with gp_fit_predict to floating-point roundoff; the
    cross-kernel carries the same diagonal jitter as the full Gram so both
    paths run identical algebra. Draws map joint prior samples through the
    fitted factor, reusing ``prior_root`` (a symmetric square root of the
    jittered full Gram) when supplied so no full-grid factorization happens
    here.

    Args:
        fit: output of gp_fit for this problem.
        problem: kriging instance.
        count: number of posterior draws, >= 0.
        rng: required when count > 0.
        prior_root: optional (D, D) square root of the jittered Gram.

    Returns:
        Tuple (mean, std, draws) with draws of shape (D, count).
    """
    if count < 0:
        raise ContractViolationError(f"count must be >= 0, got {count}")
    d = problem.dim
    m = problem.n_obs
    sigma2 = problem.params.sigma**2
    prior_var = sigma2 + fit.jitter
    if m == 0:
        mean = np.zeros(d)
        std = np.full(d, np.sqrt(prior_var))
        if count == 0:
            return mean, std, np.zeros((d, 0))
        if rng is None:
            raise ContractViolationError("count > 0 needs an rng")
        root = prior_root if prior_root is not None else _prior_root(problem)
        return mean, std, root @ rng.standard_normal((d, count))
    k_dm = _kernel_matrix(problem.grid.positions, problem.grid.obs_positions(),
                          problem.params)
    # The full Gram carries jitter at observed points' own entries; match it.
    k_dm[problem.grid.obs_indices, np.arange(m)] += fit.jitter
    mean = k_dm @ fit.alpha
    # gp_fit factors with lower=True, so factor[0]'s lower triangle is L.
    lower = solve_triangular(fit.factor[0], k_dm.T, lower=True)
    var = prior_var - np.einsum("ij,ij->j", lower, lower)
    std = np.sqrt(np.clip(var, 0.0, None))
    if count == 0:
        return mean, std, np.zeros((d, 0))
    if rng is None:
        raise ContractViolationError("count > 0 needs an rng")
    root = prior_root if prior_root is not None else _prior_root(problem)
    field = root @ rng.standard_normal((d, count))
    noisy = field[problem.grid.obs_indices, :] + problem.tau * rng.standard_normal((m, count))
    draws = field + k_dm @ cho_solve(fit.factor, problem.y_star[:, None] - noisy)
    return mean, std, draws


def _prior_root(problem: KrigingProblem) -> np.ndarray:
    jitter = GRAM_JITTER_REL * problem.params.sigma**2
    return spd_sqrt(gram(problem.grid, problem.params, jitter))
