import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgd_adversary.objectives import (ObjectiveError, eval_local, global_constants, grad_local,
                                      make_objective, objective_from_config, paper_quadratic)


def random_spec(rng, n, p):
    A = []
    for _ in range(n):
        Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
        A.append(Q @ np.diag(rng.uniform(0.1, 5.0, p)) @ Q.T)
        A[-1] = 0.5 * (A[-1] + A[-1].T)
    return make_objective(np.array(A), rng.standard_normal((n, p)))


def central_difference(spec, i, x, h=1e-5):
    g = np.zeros_like(x)
    for d in range(x.size):
        e = np.zeros_like(x)
        e[d] = h
        g[d] = (eval_local(spec, i, x + e) - eval_local(spec, i, x - e)) / (2 * h)
    return g


class TestPaperQuadratic:
    def test_constants(self):
        spec = paper_quadratic(10, 1)
        mu, lip, x_star = global_constants(spec)
        assert (mu, lip) == (1.0, 1.0)
        np.testing.assert_array_equal(x_star, [0.0])

    def test_gradient_scalar(self):
        np.testing.assert_array_equal(grad_local(paper_quadratic(10, 1), 4, [3.0]), [3.0])

    def test_share_decomposition_sums_to_global(self):
        spec = paper_quadratic(4, 2, decomposition="share")
        x = np.array([1.0, -2.0])
        assert spec.global_value(x) == pytest.approx(0.5 * x @ x)
        assert global_constants(spec)[:2] == (1.0, 1.0)

    def test_invalid(self):
        with pytest.raises(ObjectiveError):
            paper_quadratic(0, 1)
        with pytest.raises(ObjectiveError):
            paper_quadratic(2, 1, decomposition="half")


class TestLocals:
    def test_identity_gradient(self):
        spec = make_objective([np.eye(2)], [[0.0, 0.0]])
        np.testing.assert_array_equal(grad_local(spec, 1, [2.0, -1.0]), [2.0, -1.0])

    def test_gradient_vanishes_at_local_minimizer(self):
        spec = make_objective([np.diag([2.0, 1.0])], [[1.0, 0.0]])
        np.testing.assert_array_equal(grad_local(spec, 1, [1.0, 0.0]), [0.0, 0.0])

    def test_eval_values(self):
        spec = make_objective([np.eye(2)], [[0.0, 0.0]])
        assert eval_local(spec, 1, [0.0, 0.0]) == 0.0
        assert eval_local(spec, 1, [1.0, 1.0]) == 1.0
        spec = make_objective([np.diag([3.0, 1.0])], [[1.0, -2.0]])
        assert eval_local(spec, 1, [1.0, -2.0]) == 0.0

    def test_index_errors(self):
        spec = paper_quadratic(3, 1)
        for bad in (0, 4):
            with pytest.raises(ObjectiveError):
                grad_local(spec, bad, [0.0])
            with pytest.raises(ObjectiveError):
                eval_local(spec, bad, [0.0])

    def test_rejects_non_spd(self):
        with pytest.raises(ObjectiveError, match="positive definite"):
            make_objective([np.diag([1.0, 0.0])], [[0.0, 0.0]])
        with pytest.raises(ObjectiveError, match="symmetric"):
            make_objective([[[1.0, 0.5], [0.0, 1.0]]], [[0.0, 0.0]])

    def test_summed_curvature(self):
        spec = make_objective([[[1.0]], [[2.0]]], [[0.0], [0.0]])
        mu, lip, x_star = global_constants(spec)
        assert (mu, lip) == pytest.approx((3.0, 3.0))
        np.testing.assert_allclose(x_star, [0.0], atol=1e-15)

    def test_single_diagonal(self):
        mu, lip, x_star = global_constants(make_objective([np.diag([1.0, 4.0])], [[0.0, 0.0]]))
        assert (mu, lip) == pytest.approx((1.0, 4.0))
        np.testing.assert_allclose(x_star, [0.0, 0.0], atol=1e-15)

    def test_explicit_config(self):
        spec = objective_from_config({"kind": "explicit", "locals": [
            {"A": [[2.0]], "b": [1.0]}, {"A": [[1.0]], "b": [4.0]}]})
        np.testing.assert_allclose(spec.x_star, [2.0])
        with pytest.raises(ObjectiveError):
            objective_from_config({"kind": "explicit", "locals": [{"A": [[1.0]], "b": [0.0], "c": 1}]})


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n, p = rng.integers(1, 5), rng.integers(1, 6)
        spec = random_spec(rng, n, p)
        for i in range(1, n + 1):
            for _ in range(5):
                x = rng.uniform(-3, 3, p)
                g = grad_local(spec, i, x)
                fd = central_difference(spec, i, x)
                assert np.linalg.norm(fd - g) <= 1e-6 * max(np.linalg.norm(g), 1e-3)


@st.composite
def specs_and_points(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    n, p = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    return random_spec(rng, n, p), rng.uniform(-5, 5, p), rng.uniform(-5, 5, p)


@settings(max_examples=100, deadline=None)
@given(specs_and_points())
def test_strong_convexity_and_lipschitz(data):
    spec, x, y = data
    f, g = spec.global_value, spec.global_grad
    d = x - y
    assert f(x) >= f(y) + g(y) @ d + 0.5 * spec.mu * d @ d - 1e-9 * max(1.0, abs(f(x)))
    assert np.linalg.norm(g(x) - g(y)) <= spec.lip * np.linalg.norm(d) + 1e-9 * max(1.0, np.linalg.norm(d))


@settings(max_examples=100, deadline=None)
@given(specs_and_points())
def test_x_star_is_stationary(data):
    spec = data[0]
    assert np.linalg.norm(spec.global_grad(spec.x_star)) <= 1e-10 * max(1.0, np.abs(spec.A).max() * np.abs(spec.b).max() * spec.n)
