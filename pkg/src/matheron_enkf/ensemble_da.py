"""Ensemble representation, regularized moments, and the stochastic ensemble analysis.

Two update routes live here on purpose. :func:`enkf_analysis` forms an
explicit gain from ensemble statistics and applies it to every member.
:func:`empirical_matheron` applies the pathwise update member by member with
the same statistics substituted for the exact moments, sharing no gain code
with the first route. Their elementwise agreement is the package's flagship
property and :func:`equivalence_report` measures it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import max_rel_diff, solve_spd, sym
from .errors import ContractViolationError
from .gaussian_core import LinearObservation

# Observation-space problems taller than this multiple of N use the
# member-space (dual) solve; see ensemble_gain.
_DUAL_RATIO = 2


@dataclass(frozen=True)
class Ensemble:
    """A D x N matrix whose columns are ensemble members.

    Attributes:
        members: (D, N) array, N >= 2.
    """

    members: np.ndarray

    def __post_init__(self) -> None:
        members = np.asarray(self.members, dtype=float)
        if members.ndim != 2:
            raise ContractViolationError(
                f"members must be 2-D, got shape {members.shape}")
        if members.shape[1] < 2:
            raise ContractViolationError(
                f"need at least 2 members, got {members.shape[1]}")
        if not np.all(np.isfinite(members)):
            raise ContractViolationError("members contain non-finite entries")
        object.__setattr__(self, "members", members)

    @property
    def dim(self) -> int:
        return self.members.shape[0]

    @property
    def size(self) -> int:
        return self.members.shape[1]


@dataclass(frozen=True)
class EnsembleMoments:
    """Empirical mean and scaled deviations of an ensemble.

    Attributes:
        mean: (D,) empirical mean.
        deviations: (D, N) centered members scaled by 1/sqrt(N-1), so
            deviations @ deviations.T is the empirical covariance.
        xi: nonnegative ridge; the implied covariance adds xi^2 I.
    """

    mean: np.ndarray
    deviations: np.ndarray
    xi: float

    def covariance(self) -> np.ndarray:
        """Regularized empirical covariance: deviations @ deviations.T + xi^2 I."""
        d = self.deviations.shape[0]
        return sym(self.deviations @ self.deviations.T) + self.xi ** 2 * np.eye(d)


@dataclass(frozen=True)
class EnkfConfig:
    """Regularizers and mode switches for the ensemble analysis.

    Attributes:
        xi: state-space ridge, >= 0. Regularizes the implied state covariance
            only; it does not enter the gain.
        upsilon: observation-ensemble regularizer, >= 0.
        rho: observation noise standard deviation, >= 0.
        perturb_observations: when True, each member's predicted observation
            is perturbed with independent N(0, rho^2 I) noise inside the
            innovation, which makes the analysis ensemble covariance unbiased
            for the exact conditional covariance as N grows. The gain always
            uses unperturbed statistics. Default False: the plain update,
            whose spread is slightly overconfident.
    """

    xi: float = 0.0
    upsilon: float = 0.0
    rho: float = 0.0
    perturb_observations: bool = False

    def __post_init__(self) -> None:
        for name in ("xi", "upsilon", "rho"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise ContractViolationError(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)

    @property
    def gamma2(self) -> float:
        """Innovation regularizer gamma^2 = upsilon^2 + rho^2, never stored."""
        return self.upsilon ** 2 + self.rho ** 2


def moments(ens: Ensemble, xi: float) -> EnsembleMoments:
    """Empirical mean and 1/sqrt(N-1)-scaled deviations.

    Args:
        ens: ensemble with N >= 2 members.
        xi: nonnegative ridge recorded on the result.

    Returns:
        EnsembleMoments whose deviations rows sum to zero.
    """
    xi = float(xi)
    if xi < 0.0 or not np.isfinite(xi):
        raise ContractViolationError(f"xi must be >= 0, got {xi}")
    n = ens.size
    mean = ens.members.mean(axis=1)
    deviations = (ens.members - mean[:, None]) / np.sqrt(n - 1)
    return EnsembleMoments(mean=mean, deviations=deviations, xi=xi)


def apply_observation(ens: Ensemble, obs: LinearObservation, cfg: EnkfConfig,
                      rng: np.random.Generator | None = None) -> Ensemble:
    """Predicted observation ensemble Y with columns H x_i.

    With cfg.perturb_observations on, adds independent N(0, rho^2 I) noise
    per column (rho taken from cfg). rho = 0 perturbs nothing.

    Args:
        ens: state ensemble.
        obs: linear observation model (its operator is used; noise scale and
            target come from cfg and the caller).
        cfg: analysis configuration.
        rng: required when perturbation is on and cfg.rho > 0.

    Returns:
        Ensemble of predicted observations, shape (D_y, N).
    """
    if obs.state_dim != ens.dim:
        raise ContractViolationError(
            f"observation operator expects state dim {obs.state_dim}, "
            f"ensemble has dim {ens.dim}")
    predicted = obs.h @ ens.members
    if cfg.perturb_observations and cfg.rho > 0.0:
        if rng is None:
            raise ContractViolationError(
                "perturbed observations need an rng")
        predicted = predicted + cfg.rho * rng.standard_normal(predicted.shape)
    return Ensemble(members=predicted)


def ensemble_gain(mx: EnsembleMoments, my: EnsembleMoments,
                  cfg: EnkfConfig) -> np.ndarray:
    """Empirical gain K = Xd Yd^T (Yd Yd^T + gamma^2 I)^-1.

    Xd and Yd are the scaled state and observation deviations and
    gamma^2 = upsilon^2 + rho^2. When the observation dimension exceeds
    twice the member count, the algebraically identical member-space form
    Xd (Yd^T Yd + gamma^2 I)^-1 Yd^T is solved instead, which costs
    O(N^3) rather than O(D_y^3). The state ridge xi never enters.

    Args:
        mx: state-ensemble moments, deviations (D_x, N).
        my: observation-ensemble moments, deviations (D_y, N).
        cfg: supplies gamma^2.

    Returns:
        (D_x, D_y) gain matrix.
    """
    xd, yd = mx.deviations, my.deviations
    if xd.shape[1] != yd.shape[1]:
        raise ContractViolationError(
            f"state and observation ensembles disagree on member count: "
            f"{xd.shape[1]} vs {yd.shape[1]}")
    n = xd.shape[1]
    d_y = yd.shape[0]
    gamma2 = cfg.gamma2
    if gamma2 > 0.0 and d_y > _DUAL_RATIO * n:
        # Member-space route. Yd^T Yd alone is always rank-deficient
        # (deviations sum to zero), so this route needs gamma^2 > 0.
        inner = yd.T @ yd + gamma2 * np.eye(n)
        return xd @ solve_spd(inner, yd.T)
    outer = sym(yd @ yd.T) + gamma2 * np.eye(d_y)
    cross = xd @ yd.T
    return solve_spd(outer, cross.T).T


def enkf_analysis(ens: Ensemble, obs: LinearObservation, cfg: EnkfConfig,
                  rng: np.random.Generator | None = None) -> Ensemble:
    """Stochastic ensemble analysis X' = X + K (Y* - Y).

    Y* has the observed value in every column. Y is the predicted
    observation ensemble; with cfg.perturb_observations on it carries
    per-member noise (see apply_observation) while the gain is still formed
    from the unperturbed statistics.

    Args:
        ens: prior ensemble.
        obs: observation model and target y*.
        cfg: regularizers and perturbation mode.
        rng: required when perturbation is on and cfg.rho > 0.

    Returns:
        Analysis ensemble of the same shape.
    """
    mx = moments(ens, cfg.xi)
    clean = Ensemble(members=obs.h @ ens.members)
    my = moments(clean, 0.0)
    gain = ensemble_gain(mx, my, cfg)
    if cfg.perturb_observations and cfg.rho > 0.0:
        if rng is None:
            raise ContractViolationError("perturbed observations need an rng")
        predicted = clean.members + cfg.rho * rng.standard_normal(clean.members.shape)
    else:
        predicted = clean.members
    innovation = obs.y_star[:, None] - predicted
    return Ensemble(members=ens.members + gain @ innovation)


def empirical_matheron(ens: Ensemble, obs: LinearObservation, cfg: EnkfConfig,
                       rng: np.random.Generator | None = None) -> Ensemble:
    """Pathwise update per member with empirical statistics substituted.

    Each member moves by Cxy Cyy^-1 (y* - y_i) where Cxy = Xd Yd^T and
    Cyy = Yd Yd^T + gamma^2 I are assembled from the ensemble and y_i is the
    member's predicted observation. Deliberately shares no code with
    enkf_analysis or ensemble_gain: statistics are recomputed inline and the
    solve uses an LU factorization, so agreement between the two routes is
    evidence about the algebra rather than about one shared implementation.

    Args:
        ens: prior ensemble.
        obs: observation model and target y*.
        cfg: regularizers and perturbation mode.
        rng: required when perturbation is on and cfg.rho > 0.

    Returns:
        Analysis ensemble of the same shape.
    """
    if obs.state_dim != ens.dim:
        raise ContractViolationError(
            f"observation operator expects state dim {obs.state_dim}, "
            f"ensemble has dim {ens.dim}")
    x = ens.members
    n = x.shape[1]
    # Inline moments: mean and 1/sqrt(N-1)-scaled deviations.
    x_mean = x.sum(axis=1) / n
    x_dev = (x - x_mean[:, None]) / np.sqrt(n - 1)
    y_members = obs.h @ x
    y_mean = y_members.sum(axis=1) / n
    y_dev = (y_members - y_mean[:, None]) / np.sqrt(n - 1)
    gamma2 = cfg.upsilon ** 2 + cfg.rho ** 2
    cov_xy = x_dev @ y_dev.T
    cov_yy = y_dev @ y_dev.T + gamma2 * np.eye(y_dev.shape[0])
    if cfg.perturb_observations and cfg.rho > 0.0:
        if rng is None:
            raise ContractViolationError("perturbed observations need an rng")
        y_members = y_members + cfg.rho * rng.standard_normal(y_members.shape)
    if not np.any(cov_xy):
        # Degenerate ensemble: zero cross-covariance moves nothing.
        return Ensemble(members=x.copy())
    residual = obs.y_star[:, None] - y_members
    updated = x + cov_xy @ np.linalg.solve(cov_yy, residual)
    return Ensemble(members=updated)


def equivalence_report(ens: Ensemble, obs: LinearObservation, cfg: EnkfConfig,
                       rng_seed: int | None = None) -> float:
    """Run both analysis routes on identical inputs; report their disagreement.

    The report is the largest absolute elementwise difference normalized by
    the larger output scale. With perturbation on, both routes receive
    freshly seeded generators from the same seed so their noise is identical.

    Args:
        ens: prior ensemble.
        obs: observation model and target.
        cfg: analysis configuration.
        rng_seed: seed for the perturbation noise (only used when the
            perturbed mode is on).

    Returns:
        Max relative difference between the two analysis ensembles.
    """
    rng_a = rng_b = None
    if cfg.perturb_observations and cfg.rho > 0.0:
        rng_a = np.random.default_rng(rng_seed)
        rng_b = np.random.default_rng(rng_seed)
    a = enkf_analysis(ens, obs, cfg, rng_a)
    b = empirical_matheron(ens, obs, cfg, rng_b)
    return max_rel_diff(a.members, b.members)


def random_instance(rng: np.random.Generator, *, max_dx: int = 50,
                    max_dy: int = 25, max_n: int = 20,
                    perturb: bool = False) -> tuple[Ensemble, LinearObservation, EnkfConfig]:
    """A random well-posed analysis instance for equivalence sweeps.

    State and observation dimensions, member count, operator entries,
    targets and all three regularizers are drawn at random; the noise scales
    stay in [0.05, 1] so every instance is comfortably solvable.

    Args:
        rng: numpy Generator; consumed.
        max_dx: largest state dimension.
        max_dy: largest observation dimension.
        max_n: largest member count.
        perturb: build the instance in perturbed-observation mode.

    Returns:
        Tuple (ensemble, observation, config).
    """
    d_x = int(rng.integers(1, max_dx + 1))
    d_y = int(rng.integers(1, max_dy + 1))
    n = int(rng.integers(2, max_n + 1))
    members = rng.standard_normal((d_x, n))
    h = rng.standard_normal((d_y, d_x))
    y_star = rng.standard_normal(d_y)
    rho, upsilon, xi = rng.uniform(0.05, 1.0, size=3)
    obs = LinearObservation(h=h, rho=float(rho), y_star=y_star)
    cfg = EnkfConfig(xi=float(xi), upsilon=float(upsilon), rho=float(rho),
                     perturb_observations=perturb)
    return Ensemble(members=members), obs, cfg


def equivalence_suite(n_instances: int, seed: int) -> np.ndarray:
    """Equivalence reports over seeded random instances.

    Args:
        n_instances: number of instances, >= 1.
        seed: root seed; instance i uses an independent child stream.

    Returns:
        (n_instances,) array of max relative differences.
    """
    if n_instances < 1:
        raise ContractViolationError(
            f"n_instances must be >= 1, got {n_instances}")
    streams = np.random.SeedSequence(seed).spawn(n_instances)
    reports = np.empty(n_instances)
    for i, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        ens, obs, cfg = random_instance(rng)
        reports[i] = equivalence_report(ens, obs, cfg)
    return reports
