import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from accelreg.errors import DomainError, StepSizeError
from accelreg.filters import GradientDescent, Nesterov, NuMethod, default_method, evaluate
from accelreg.kernels import Linear, gram
from accelreg.solvers import (
    predict,
    run,
    run_gd,
    run_heavy_ball,
    run_momentum,
    run_nesterov,
    spectral_solution,
)
from accelreg.spectral import sym_eig


def random_psd(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, 2 * n))
    return A @ A.T / (2 * n)


def test_gd_first_step():
    M, y = random_psd(4, 0), np.arange(1.0, 5.0)
    h = run_gd(M, y, 0.1, 3, kappa2=5.0)
    assert np.array_equal(h.u[0], np.zeros(4))
    assert np.allclose(h.u[1], 0.1 * y)


def test_gd_identity_fixed_point():
    y = np.array([1.0, -2.0, 3.0])
    h = run_gd(np.eye(3), y, 1.0, 5)
    assert all(np.allclose(h.u[t], y) for t in range(1, 6))


@pytest.mark.parametrize(
    "runner, expected",
    [
        (lambda M, y: run_gd(M, y, 1.0, 2), 1.5),
        (lambda M, y: run_nesterov(M, y, 1.0, 1.0, 3), 11 / 6),
        (lambda M, y: run_heavy_ball(M, y, 1.0, 1.0, 1), 1.2),
    ],
)
def test_scalar_examples(runner, expected):
    h = runner(np.array([[0.5]]), np.array([1.0]))
    assert h.final[0] == pytest.approx(expected, abs=1e-14)


def test_heavy_ball_first_step_and_residual():
    h = run_heavy_ball(np.array([[0.5]]), np.array([1.0]), 1.0, 1.0, 1)
    assert 1 - 0.5 * h.u[1][0] == pytest.approx(0.4)
    M, y = random_psd(3, 1), np.ones(3)
    assert np.allclose(run_heavy_ball(M, y, 1.0, 4.0, 1).u[1], 0.3 * y)


def test_nesterov_first_step():
    M, y = random_psd(5, 2), np.ones(5)
    assert np.allclose(run_nesterov(M, y, 0.2, 1.0, 1).u[1], 0.2 * y)


@pytest.mark.parametrize("name", ["gd", "nu", "nesterov"])
@pytest.mark.parametrize("n", [5, 20, 100])
def test_oracle_equivalence(name, n):
    M = random_psd(n, n)
    y = np.random.default_rng(n + 1).standard_normal(n)
    method = default_method(name, float(np.linalg.eigvalsh(M)[-1]) * (1 + 1e-9))
    h = run(method, M, y, 50)
    e = sym_eig(M, psd=True)
    for t in (1, 7, 50):
        assert np.linalg.norm(h.u[t] - spectral_solution(method, t, e, y)) <= 1e-8 * np.linalg.norm(y)


@pytest.mark.parametrize("name", ["gd", "nu", "nesterov"])
def test_diagonal_spectral_solution(name):
    d = np.array([0.9, 0.3, 0.01])
    method = default_method(name, 1.0)
    y = np.array([1.0, 2.0, 3.0])
    g, _ = evaluate(method, d, 12)
    assert np.allclose(spectral_solution(method, 12, sym_eig(np.diag(d)), y), g * y, atol=1e-13)


def test_spectral_solution_t0_and_gd_t1():
    e = sym_eig(random_psd(4, 5))
    y = np.ones(4)
    method = GradientDescent(alpha=0.3, kappa2=3.0)
    assert np.array_equal(spectral_solution(method, 0, e, y), np.zeros(4))
    assert np.allclose(spectral_solution(method, 1, e, y), 0.3 * y)


@pytest.mark.parametrize("kind", ["heavy_ball", "nesterov"])
def test_zero_momentum_reduces_to_gd(kind):
    M, y = random_psd(10, 7), np.random.default_rng(8).standard_normal(10)
    alpha = 0.8 / np.linalg.eigvalsh(M)[-1]
    gd = run_gd(M, y, alpha, 30, kappa2=1 / alpha)
    if kind == "heavy_ball":
        other = run_momentum(M, y, 30, lambda t: (alpha, 0.0))
    else:
        other = run_nesterov(M, y, alpha, 1.0, 30, momentum=lambda t: 0.0)
    assert np.allclose(gd.u, other.u, rtol=0, atol=1e-14)


def test_windowed_history_matches_full():
    M, y = random_psd(6, 9), np.ones(6)
    method = NuMethod(nu=1.0, kappa2=float(np.linalg.eigvalsh(M)[-1]))
    full = run(method, M, y, 20)
    lean = run(method, M, y, 20, keep_history=False)
    assert lean.u.shape == (2, 6)
    assert np.array_equal(lean.at(20), full.u[20]) and np.array_equal(lean.at(19), full.u[19])
    with pytest.raises(IndexError):
        lean.at(5)


def test_divergence_detected():
    M = np.diag([1.0, 0.5])
    with pytest.raises(StepSizeError):
        run_momentum(M, np.ones(2), 500, lambda t: (3.0, 0.0))


def test_shape_mismatch():
    with pytest.raises(DomainError):
        run_gd(np.eye(3), np.ones(2), 1.0, 3)
    with pytest.raises(DomainError):
        predict(np.ones((4, 3)), np.ones(2), 3)


def test_predict_basics():
    K = random_psd(5, 10) * 5
    u = np.arange(5.0)
    assert np.array_equal(predict(np.ones((3, 5)), np.zeros(5), 5), np.zeros(3))
    assert np.allclose(predict(K, u, 5), (K / 5) @ u)


def test_noiseless_interpolation():
    # linear kernel, N = n = 20 points in 20 dimensions: K positive definite
    Q = np.linalg.qr(np.random.default_rng(11).standard_normal((20, 20)))[0]
    X = Q * np.linspace(1.0, 3.0, 20)
    w = np.random.default_rng(12).standard_normal(20)
    f = X @ w
    K, _ = gram(X, Linear())
    M = K / 20
    lam = np.linalg.eigvalsh(M)
    assert lam[0] > 0
    h = run_gd(M, f, 1.0 / lam[-1], 2000, keep_history=False)
    assert np.max(np.abs(predict(K, h.final, 20) - f)) <= 1e-3


@given(seed=st.integers(0, 10**6), t=st.integers(1, 25))
@settings(max_examples=20, deadline=None)
def test_feature_space_consistency(seed, t):
    rng = np.random.default_rng(seed)
    n, p = 8, 3
    X = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    Z = rng.standard_normal((4, p))
    K, _ = gram(X, Linear())
    k2 = float(np.linalg.eigvalsh(K / n)[-1]) + 1e-12
    alpha = 1.0 / k2
    # w_{t+1} = w_t + alpha (X^T y - X^T X w_t) / n
    w = np.zeros(p)
    for _ in range(t):
        w = w + alpha * X.T @ (y - X @ w) / n
    u = run_gd(K / n, y, alpha, t, kappa2=k2, keep_history=False).final
    assert np.allclose(Z @ w, predict(Z @ X.T, u, n), atol=1e-9 * max(1.0, np.abs(Z @ w).max()))


def test_nesterov_rejects_small_beta():
    with pytest.raises(DomainError):
        run_nesterov(np.eye(2), np.ones(2), 0.5, 0.5, 3)


def test_run_rejects_unknown_method():
    with pytest.raises(DomainError):
        run(object(), np.eye(2), np.ones(2), 3)


@pytest.mark.parametrize("method", [GradientDescent(alpha=0.5, kappa2=2.0), Nesterov(alpha=0.4, kappa2=2.0)])
def test_dispatch_keeps_method(method):
    assert run(method, np.eye(2), np.ones(2), 2).method == method
