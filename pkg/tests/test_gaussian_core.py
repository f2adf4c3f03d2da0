"""Tests for exact joint construction, conditioning, gain, and pathwise updates."""

import numpy as np
import pytest

from matheron_enkf.errors import ContractViolationError
from matheron_enkf.gaussian_core import (GaussianBelief, JointGaussian,
                                         LinearObservation, condition,
                                         kalman_gain, make_joint,
                                         matheron_exact, moment_check, sample)


def scalar_joint():
    prior = GaussianBelief(mean=[0.0], cov=[[1.0]])
    obs = LinearObservation(h=[[1.0]], rho=1.0, y_star=[2.0])
    return make_joint(prior, obs)


def random_setup(rng, d_x=None, d_y=None):
    d_x = d_x or int(rng.integers(1, 21))
    d_y = d_y or int(rng.integers(1, 21))
    a = rng.standard_normal((d_x, d_x))
    prior = GaussianBelief(mean=rng.standard_normal(d_x),
                           cov=a @ a.T + 0.5 * np.eye(d_x))
    obs = LinearObservation(h=rng.standard_normal((d_y, d_x)),
                            rho=float(rng.uniform(0.1, 1.0)),
                            y_star=rng.standard_normal(d_y))
    return prior, obs


class TestValidation:
    def test_asymmetric_cov_rejected(self):
        with pytest.raises(ContractViolationError):
            GaussianBelief(mean=[0.0, 0.0], cov=[[1.0, 0.5], [0.1, 1.0]])

    def test_indefinite_cov_rejected(self):
        with pytest.raises(ContractViolationError):
            GaussianBelief(mean=[0.0, 0.0], cov=[[1.0, 2.0], [2.0, 1.0]])

    def test_negative_rho_rejected(self):
        with pytest.raises(ContractViolationError):
            LinearObservation(h=[[1.0]], rho=-0.1, y_star=[0.0])

    def test_y_star_length_must_match_h(self):
        with pytest.raises(ContractViolationError):
            LinearObservation(h=[[1.0, 0.0]], rho=0.1, y_star=[0.0, 1.0])

    def test_cov_yx_is_transpose_view(self):
        joint = scalar_joint()
        np.testing.assert_array_equal(joint.cov_yx, joint.cov_xy.T)


class TestMakeJoint:
    def test_scalar_blocks(self):
        joint = scalar_joint()
        np.testing.assert_allclose(joint.cov_yy, [[2.0]])
        np.testing.assert_allclose(joint.cov_xy, [[1.0]])

    def test_identity_noiseless(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((4, 4))
        cov = a @ a.T + np.eye(4)
        mean = rng.standard_normal(4)
        prior = GaussianBelief(mean=mean, cov=cov)
        obs = LinearObservation(h=np.eye(4), rho=0.0, y_star=np.zeros(4))
        joint = make_joint(prior, obs)
        np.testing.assert_allclose(joint.cov_yy, cov, rtol=1e-12)
        np.testing.assert_allclose(joint.mean_y, mean, rtol=1e-12)

    def test_row_selection_with_noise(self):
        prior = GaussianBelief(mean=np.zeros(2), cov=np.eye(2))
        obs = LinearObservation(h=[[1.0, 0.0]], rho=0.5, y_star=[0.0])
        joint = make_joint(prior, obs)
        np.testing.assert_allclose(joint.cov_yy, [[1.25]])

    def test_dimension_mismatch(self):
        prior = GaussianBelief(mean=np.zeros(2), cov=np.eye(2))
        obs = LinearObservation(h=np.ones((1, 3)), rho=0.1, y_star=[0.0])
        with pytest.raises(ContractViolationError):
            make_joint(prior, obs)


class TestCondition:
    def test_scalar_posterior(self):
        post = condition(scalar_joint(), [2.0])
        np.testing.assert_allclose(post.mean, [1.0])
        np.testing.assert_allclose(post.cov, [[0.5]])

    def test_zero_cross_covariance_returns_prior(self):
        joint = JointGaussian(mean_x=[1.0], mean_y=[0.0], cov_xx=[[2.0]],
                              cov_xy=[[0.0]], cov_yy=[[3.0]])
        post = condition(joint, [5.0])
        np.testing.assert_allclose(post.mean, [1.0])
        np.testing.assert_allclose(post.cov, [[2.0]])

    def test_exact_observation_pins_state(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((3, 3))
        prior = GaussianBelief(mean=rng.standard_normal(3),
                               cov=a @ a.T + np.eye(3))
        v = np.array([0.3, -1.0, 2.0])
        obs = LinearObservation(h=np.eye(3), rho=0.0, y_star=v)
        post = condition(make_joint(prior, obs), v)
        np.testing.assert_allclose(post.mean, v, atol=1e-8)
        np.testing.assert_allclose(post.cov, np.zeros((3, 3)), atol=1e-8)

    def test_empty_observation_returns_marginal(self):
        prior = GaussianBelief(mean=[1.0, 2.0], cov=np.eye(2))
        obs = LinearObservation(h=np.zeros((0, 2)), rho=0.1, y_star=np.zeros(0))
        post = condition(make_joint(prior, obs), np.zeros(0))
        np.testing.assert_allclose(post.mean, [1.0, 2.0])
        np.testing.assert_allclose(post.cov, np.eye(2))

    def test_output_cov_symmetric_psd(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            prior, obs = random_setup(rng)
            post = condition(make_joint(prior, obs), obs.y_star)
            np.testing.assert_array_equal(post.cov, post.cov.T)
            assert np.min(np.linalg.eigvalsh(post.cov)) >= -1e-10 * max(
                1.0, np.max(np.abs(post.cov)))

    def test_translation_of_prior_translates_posterior(self):
        rng = np.random.default_rng(6)
        prior, obs = random_setup(rng, d_x=5, d_y=3)
        shift = rng.standard_normal(5)
        post = condition(make_joint(prior, obs), obs.y_star)
        shifted_prior = GaussianBelief(mean=prior.mean + shift, cov=prior.cov)
        shifted_target = obs.y_star + obs.h @ shift
        shifted_obs = LinearObservation(h=obs.h, rho=obs.rho,
                                        y_star=shifted_target)
        shifted_post = condition(make_joint(shifted_prior, shifted_obs),
                                 shifted_target)
        np.testing.assert_allclose(shifted_post.mean, post.mean + shift,
                                   rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(shifted_post.cov, post.cov,
                                   rtol=1e-10, atol=1e-12)


class TestKalmanGain:
    def test_noiseless_identity_gain(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((4, 4))
        cov = a @ a.T + np.eye(4)
        obs = LinearObservation(h=np.eye(4), rho=0.0, y_star=np.zeros(4))
        np.testing.assert_allclose(kalman_gain(cov, obs), np.eye(4),
                                   rtol=1e-9, atol=1e-9)

    def test_scalar_gain(self):
        obs = LinearObservation(h=[[1.0]], rho=1.0, y_star=[0.0])
        np.testing.assert_allclose(kalman_gain(np.array([[1.0]]), obs), [[0.5]])

    def test_uninformative_observation(self):
        rng = np.random.default_rng(8)
        a = rng.standard_normal((3, 3))
        cov = a @ a.T + np.eye(3)
        obs = LinearObservation(h=rng.standard_normal((2, 3)), rho=1e6,
                                y_star=np.zeros(2))
        assert np.max(np.abs(kalman_gain(cov, obs))) < 1e-5

    def test_gain_update_matches_condition(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            prior, obs = random_setup(rng)
            gain = kalman_gain(prior.cov, obs)
            mean = prior.mean + gain @ (obs.y_star - obs.h @ prior.mean)
            cov = prior.cov - gain @ (obs.h @ prior.cov)
            post = condition(make_joint(prior, obs), obs.y_star)
            scale = max(1.0, np.max(np.abs(post.mean)))
            assert np.max(np.abs(mean - post.mean)) <= 1e-10 * scale
            cscale = max(1.0, np.max(np.abs(post.cov)))
            assert np.max(np.abs(cov - post.cov)) <= 1e-10 * cscale


class TestSample:
    def test_degenerate_cov_returns_mean(self):
        belief = GaussianBelief(mean=[1.0, -2.0], cov=np.zeros((2, 2)))
        draws = sample(belief, 7, np.random.default_rng(0))
        np.testing.assert_allclose(draws, np.array([[1.0], [-2.0]]) @ np.ones((1, 7)))

    def test_monte_carlo_moments(self):
        belief = GaussianBelief(mean=[0.0], cov=[[1.0]])
        draws = sample(belief, 100_000, np.random.default_rng(10))
        assert abs(draws.mean()) <= 4.0 / np.sqrt(100_000)
        assert abs(draws.var(ddof=1) - 1.0) <= 0.05

    def test_seed_determinism(self):
        belief = GaussianBelief(mean=np.zeros(3), cov=np.eye(3))
        a = sample(belief, 5, np.random.default_rng(11))
        b = sample(belief, 5, np.random.default_rng(11))
        np.testing.assert_array_equal(a, b)

    def test_count_must_be_positive(self):
        belief = GaussianBelief(mean=[0.0], cov=[[1.0]])
        with pytest.raises(ContractViolationError):
            sample(belief, 0, np.random.default_rng(0))


class TestMatheronExact:
    def test_zero_cross_covariance_is_identity(self):
        joint = JointGaussian(mean_x=[0.0], mean_y=[0.0], cov_xx=[[1.0]],
                              cov_xy=[[0.0]], cov_yy=[[2.0]])
        x = np.array([3.0])
        out = matheron_exact(joint, (x, np.array([-1.0])), np.array([4.0]))
        np.testing.assert_allclose(out, x)

    def test_fully_correlated_interpolates_to_target(self):
        joint = JointGaussian(mean_x=[0.0], mean_y=[0.0], cov_xx=[[1.0]],
                              cov_xy=[[1.0]], cov_yy=[[1.0]])
        for x in (-2.0, 0.3, 5.0):
            out = matheron_exact(joint, (np.array([x]), np.array([x])),
                                 np.array([0.7]))
            np.testing.assert_allclose(out, [0.7], rtol=1e-12)

    def test_batched_matches_single(self):
        rng = np.random.default_rng(12)
        prior, obs = random_setup(rng, d_x=4, d_y=2)
        joint = make_joint(prior, obs)
        xs = rng.standard_normal((4, 6))
        ys = rng.standard_normal((2, 6))
        batch = matheron_exact(joint, (xs, ys), obs.y_star)
        for k in range(6):
            single = matheron_exact(joint, (xs[:, k], ys[:, k]), obs.y_star)
            np.testing.assert_allclose(batch[:, k], single, rtol=1e-12)

    def test_moment_matching(self):
        rng = np.random.default_rng(13)
        prior, obs = random_setup(rng, d_x=2, d_y=2)
        joint = make_joint(prior, obs)
        result = moment_check(joint, obs.y_star, 50_000,
                              np.random.default_rng(14))
        assert result.passed, (result.mean_abs_err, result.cov_fro_rel_err)

    def test_moment_check_requires_two_draws(self):
        joint = scalar_joint()
        with pytest.raises(ContractViolationError):
            moment_check(joint, np.array([2.0]), 1, np.random.default_rng(0))
