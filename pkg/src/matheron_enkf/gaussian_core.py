"""Exact Gaussian beliefs, linear observation, conditioning and pathwise updates.

Everything downstream (ensemble analysis, localized transforms, kriging) is
checked against this module: it is the slow, exact reference. The pathwise
update :func:`matheron_exact` maps joint prior draws to posterior draws with
the same linear map that :func:`condition` applies to moments, so both routes
must agree and the test suite holds them to that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import solve_spd, spd_sqrt, sym
from .errors import ContractViolationError

# Eigenvalues above -PSD_TOL * scale count as nonnegative.
PSD_TOL = 1e-10


def _as_vector(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractViolationError(f"{name} must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    return x


def _as_covariance(c, dim: int, name: str) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (dim, dim):
        raise ContractViolationError(
            f"{name} must have shape ({dim}, {dim}), got {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    if c.size == 0:
        return c
    scale = max(1.0, float(np.max(np.abs(c))))
    if not np.allclose(c, c.T, rtol=0.0, atol=1e-12 * scale):
        raise ContractViolationError(f"{name} is not symmetric")
    c = sym(c)
    smallest = float(np.min(np.linalg.eigvalsh(c)))
    if smallest < -PSD_TOL * scale:
        raise ContractViolationError(
            f"{name} is not positive semidefinite (smallest eigenvalue {smallest:.3e})")
    return c


@dataclass(frozen=True)
class GaussianBelief:
    """Gaussian distribution N(mean, cov) over a D-dimensional state.

    Attributes:
        mean: (D,) mean vector.
        cov: (D, D) symmetric PSD covariance. Symmetrized on construction.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = _as_vector(self.mean, "mean")
        cov = _as_covariance(self.cov, mean.shape[0], "cov")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class LinearObservation:
    """Linear observation model y = H x + eps, eps ~ N(0, rho^2 I), target y*.

    Attributes:
        h: (D_y, D_x) observation operator.
        rho: observation noise standard deviation, >= 0.
        y_star: (D_y,) observed value the analysis conditions on.
    """

    h: np.ndarray
    rho: float
    y_star: np.ndarray

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2:
            raise ContractViolationError(f"h must be 2-D, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ContractViolationError("h contains non-finite entries")
        rho = float(self.rho)
        if not np.isfinite(rho) or rho < 0.0:
            raise ContractViolationError(f"rho must be >= 0, got {rho}")
        y_star = _as_vector(self.y_star, "y_star")
        if y_star.shape[0] != h.shape[0]:
            raise ContractViolationError(
                f"y_star must have length {h.shape[0]}, got {y_star.shape[0]}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "y_star", y_star)

    @property
    def obs_dim(self) -> int:
        return self.h.shape[0]

    @property
    def state_dim(self) -> int:
        return self.h.shape[1]


@dataclass(frozen=True)
class JointGaussian:
    """Joint Gaussian over (x, y) stored in block form.

    The lower-left block is never stored: ``cov_yx`` is a transpose view of
    ``cov_xy``.

    Attributes:
        mean_x: (D_x,) state mean.
        mean_y: (D_y,) predicted observation mean.
        cov_xx: (D_x, D_x) state covariance.
        cov_xy: (D_x, D_y) cross covariance.
        cov_yy: (D_y, D_y) observation covariance (noise included).
    """

    mean_x: np.ndarray
    mean_y: np.ndarray
    cov_xx: np.ndarray
    cov_xy: np.ndarray
    cov_yy: np.ndarray

    def __post_init__(self) -> None:
        mean_x = _as_vector(self.mean_x, "mean_x")
        mean_y = _as_vector(self.mean_y, "mean_y")
        dx, dy = mean_x.shape[0], mean_y.shape[0]
        cov_xx = _as_covariance(self.cov_xx, dx, "cov_xx")
        cov_yy = _as_covariance(self.cov_yy, dy, "cov_yy")
        cov_xy = np.asarray(self.cov_xy, dtype=float)
        if cov_xy.shape != (dx, dy):
            raise ContractViolationError(
                f"cov_xy must have shape ({dx}, {dy}), got {cov_xy.shape}")
        if not np.all(np.isfinite(cov_xy)):
            raise ContractViolationError("cov_xy contains non-finite entries")
        object.__setattr__(self, "mean_x", mean_x)
        object.__setattr__(self, "mean_y", mean_y)
        object.__setattr__(self, "cov_xx", cov_xx)
        object.__setattr__(self, "cov_xy", cov_xy)
        object.__setattr__(self, "cov_yy", cov_yy)

    @property
    def cov_yx(self) -> np.ndarray:
        """Transpose view of cov_xy; never stored separately."""
        return self.cov_xy.T

    @property
    def dim_x(self) -> int:
        return self.mean_x.shape[0]

    @property
    def dim_y(self) -> int:
        return self.mean_y.shape[0]

    def full_mean(self) -> np.ndarray:
        """Stacked (D_x + D_y,) mean of the joint."""
        return np.concatenate([self.mean_x, self.mean_y])

    def full_cov(self) -> np.ndarray:
        """Stacked (D_x + D_y, D_x + D_y) covariance of the joint."""
        top = np.hstack([self.cov_xx, self.cov_xy])
        bottom = np.hstack([self.cov_yx, self.cov_yy])
        return sym(np.vstack([top, bottom]))


def make_joint(prior: GaussianBelief, obs: LinearObservation) -> JointGaussian:
    """Joint Gaussian over state and observation implied by a linear model.

    With x ~ N(m, C) and y = H x + eps, eps ~ N(0, rho^2 I):
    mean_y = H m, cov_xy = C H^T, cov_yy = H C H^T + rho^2 I.

    Args:
        prior: state belief.
        obs: linear observation model; obs.state_dim must equal prior.dim.

    Returns:
        The joint distribution of (x, y).
    """
    if obs.state_dim != prior.dim:
        raise ContractViolationError(
            f"observation operator expects state dim {obs.state_dim}, "
            f"prior has dim {prior.dim}")
    ch = prior.cov @ obs.h.T
    cov_yy = sym(obs.h @ ch + obs.rho ** 2 * np.eye(obs.obs_dim))
    return JointGaussian(
        mean_x=prior.mean,
        mean_y=obs.h @ prior.mean,
        cov_xx=prior.cov,
        cov_xy=ch,
        cov_yy=cov_yy,
    )


def condition(joint: JointGaussian, y_star: np.ndarray) -> GaussianBelief:
    """Exact conditional of x given y = y_star.

    mean = m_x + C_xy C_yy^-1 (y* - m_y)
    cov  = C_xx - C_xy C_yy^-1 C_yx, symmetrized as (A + A^T) / 2.

    Args:
        joint: joint Gaussian over (x, y).
        y_star: (D_y,) observed value. May be empty, in which case the
            state marginal is returned unchanged.

    Returns:
        The conditional belief over x.
    """
    y_star = _as_vector(y_star, "y_star")
    if y_star.shape[0] != joint.dim_y:
        raise ContractViolationError(
            f"y_star must have length {joint.dim_y}, got {y_star.shape[0]}")
    if joint.dim_y == 0:
        return GaussianBelief(mean=joint.mean_x, cov=joint.cov_xx)
    # One factorization serves both the mean and the covariance solve.
    rhs = np.hstack([(y_star - joint.mean_y)[:, None], joint.cov_yx])
    solved = solve_spd(joint.cov_yy, rhs)
    mean = joint.mean_x + joint.cov_xy @ solved[:, 0]
    cov = sym(joint.cov_xx - joint.cov_xy @ solved[:, 1:])
    return GaussianBelief(mean=mean, cov=cov)


def kalman_gain(prior_cov: np.ndarray, obs: LinearObservation) -> np.ndarray:
    """Gain K = C H^T (H C H^T + rho^2 I)^-1, shape (D_x, D_y).

    Args:
        prior_cov: (D_x, D_x) prior state covariance.
        obs: linear observation model.

    Returns:
        The gain matrix mapping innovations to state increments.
    """
    prior_cov = np.asarray(prior_cov, dtype=float)
    if prior_cov.shape != (obs.state_dim, obs.state_dim):
        raise ContractViolationError(
            f"prior_cov must have shape ({obs.state_dim}, {obs.state_dim}), "
            f"got {prior_cov.shape}")
    ch = prior_cov @ obs.h.T
    innovation_cov = sym(obs.h @ ch + obs.rho ** 2 * np.eye(obs.obs_dim))
    return solve_spd(innovation_cov, ch.T).T


def sample(belief: GaussianBelief, count: int, rng: np.random.Generator,
           jitter: float = 0.0) -> np.ndarray:
    """Draw ``count`` i.i.d. samples, returned as columns of a (D, count) array.

    Uses the symmetric PSD square root of (cov + jitter * I), so semidefinite
    covariances sample without failure. Deterministic given the generator.

    Args:
        belief: distribution to sample.
        count: number of draws, >= 1.
        rng: numpy Generator; consumed.
        jitter: nonnegative diagonal addition before factorization.

    Returns:
        (D, count) array whose columns are independent draws.
    """
    if count < 1:
        raise ContractViolationError(f"count must be >= 1, got {count}")
    if jitter < 0.0:
        raise ContractViolationError(f"jitter must be >= 0, got {jitter}")
    cov = belief.cov if jitter == 0.0 else belief.cov + jitter * np.eye(belief.dim)
    root = spd_sqrt(cov)
    z = rng.standard_normal((belief.dim, count))
    return belief.mean[:, None] + root @ z


def matheron_exact(joint: JointGaussian, paired_draw: tuple[np.ndarray, np.ndarray],
                   y_star: np.ndarray) -> np.ndarray:
    """Pathwise update: map a joint prior draw (x, y) to x + C_xy C_yy^-1 (y* - y).

    A pure affine map; the caller guarantees (x, y) was drawn from the joint
    law. The output is then a draw from the exact conditional, matching
    :func:`condition` in distribution.

    Args:
        joint: joint Gaussian over (x, y).
        paired_draw: tuple (x, y) with x of shape (D_x,) or (D_x, n) and y of
            shape (D_y,) or (D_y, n); columns are paired draws.
        y_star: (D_y,) observed value.

    Returns:
        Updated draw(s), same shape as x.
    """
    x, y = paired_draw
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    y_star = _as_vector(y_star, "y_star")
    if x.shape[0] != joint.dim_x:
        raise ContractViolationError(
            f"x draw must have leading dim {joint.dim_x}, got {x.shape}")
    if y.shape[0] != joint.dim_y or y.ndim != x.ndim:
        raise ContractViolationError(
            f"y draw must have leading dim {joint.dim_y} and match x, got {y.shape}")
    if y_star.shape[0] != joint.dim_y:
        raise ContractViolationError(
            f"y_star must have length {joint.dim_y}, got {y_star.shape[0]}")
    if joint.dim_y == 0:
        return x.copy()
    if x.ndim == 1:
        residual = y_star - y
    else:
        residual = y_star[:, None] - y
    return x + joint.cov_xy @ solve_spd(joint.cov_yy, residual)


@dataclass(frozen=True)
class MomentCheck:
    """Comparison of empirical pathwise-draw moments against exact conditioning.

    Attributes:
        mean_abs_err: (D_x,) |empirical mean - exact mean| per coordinate.
        mean_tol: (D_x,) allowed deviation (z * exact std / sqrt(n_draws)).
        cov_fro_rel_err: Frobenius-relative covariance error.
        n_draws: number of draws used.
        passed: True when every coordinate and the covariance are in tolerance.
    """

    mean_abs_err: np.ndarray
    mean_tol: np.ndarray
    cov_fro_rel_err: float
    n_draws: int
    passed: bool


def moment_check(joint: JointGaussian, y_star: np.ndarray, n_draws: int,
                 rng: np.random.Generator, *, mean_z: float = 4.0,
                 cov_rel_tol: float = 0.05) -> MomentCheck:
    """Sample the pathwise route and compare moments to exact conditioning.

    Draws ``n_draws`` joint samples, pushes them through the pathwise update,
    and checks the empirical mean coordinate-wise within ``mean_z`` standard
    errors and the empirical covariance within ``cov_rel_tol`` relative
    Frobenius error of the exact conditional.

    Args:
        joint: joint Gaussian over (x, y).
        y_star: (D_y,) observed value.
        n_draws: number of joint draws, >= 2.
        rng: numpy Generator; consumed.
        mean_z: mean tolerance in standard-error units.
        cov_rel_tol: covariance tolerance, relative Frobenius norm.

    Returns:
        A MomentCheck record.
    """
    if n_draws < 2:
        raise ContractViolationError(f"n_draws must be >= 2, got {n_draws}")
    exact = condition(joint, y_star)
    joint_belief = GaussianBelief(mean=joint.full_mean(), cov=joint.full_cov())
    draws = sample(joint_belief, n_draws, rng)
    post = matheron_exact(
        joint, (draws[:joint.dim_x, :], draws[joint.dim_x:, :]), y_star)
    emp_mean = post.mean(axis=1)
    centered = post - emp_mean[:, None]
    emp_cov = (centered @ centered.T) / (n_draws - 1)
    std = np.sqrt(np.clip(np.diag(exact.cov), 0.0, None))
    mean_tol = mean_z * std / np.sqrt(n_draws)
    mean_abs_err = np.abs(emp_mean - exact.mean)
    denom = float(np.linalg.norm(exact.cov))
    if denom == 0.0:
        cov_rel = float(np.linalg.norm(emp_cov))
    else:
        cov_rel = float(np.linalg.norm(emp_cov - exact.cov) / denom)
    passed = bool(np.all(mean_abs_err <= mean_tol) and cov_rel <= cov_rel_tol)
    return MomentCheck(
        mean_abs_err=mean_abs_err,
        mean_tol=mean_tol,
        cov_fro_rel_err=cov_rel,
        n_draws=n_draws,
        passed=passed,
    )
