import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.interpolate import CubicSpline

from condper.errors import DomainError, UnsupportedInputError, ValidationError
from condper.signals import TWO_PI, SignalSpec, TimeSeries, generate
from condper.spline import evaluate, evaluate_derivative, fit, solve_tridiagonal, sup_derivative


def cos3():
    return fit(generate(SignalSpec("cosine", 3, points=300)))


def test_tridiagonal_against_dense_solve():
    rng = np.random.default_rng(0)
    n = 30
    lower, upper = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = 4 + rng.uniform(0, 1, n)
    rhs = rng.normal(size=n)
    A = np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)
    assert np.allclose(solve_tridiagonal(lower, diag, upper, rhs), np.linalg.solve(A, rhs))


def test_affine_data_is_reproduced():
    t = np.linspace(0, TWO_PI, 17)
    f = fit(TimeSeries(t, 1.5 * t - 2))
    grid = np.linspace(0, TWO_PI, 1001)
    assert np.allclose(f(grid), 1.5 * grid - 2, atol=1e-9)
    assert np.allclose(evaluate_derivative(f, grid), 1.5, atol=1e-9)
    assert sup_derivative(f) == pytest.approx(1.5, abs=1e-9)
    mids = (t[:-1] + t[1:]) / 2
    assert np.allclose(f(mids), 1.5 * mids - 2, atol=1e-9)


def test_cosine_fit_accuracy():
    f = cos3()
    grid = np.linspace(0, TWO_PI, 3000)
    err = np.abs(f(grid) - np.cos(3 * grid))
    derr = np.abs(f.derivative(grid) + 3 * np.sin(3 * grid))
    # zero end curvature costs accuracy only next to the two endpoints
    inner = (grid >= 0.02 * TWO_PI) & (grid <= 0.98 * TWO_PI)
    assert err[inner].max() < 1e-5
    assert derr[inner].max() < 1e-3
    assert err.max() < 5e-4
    assert derr.max() < 0.1
    assert abs(sup_derivative(f) - 3) < 0.03


def test_matches_scipy_natural_spline():
    rng = np.random.default_rng(5)
    t = np.sort(rng.uniform(0, TWO_PI, 25))
    t[0], t[-1] = 0.0, TWO_PI
    y = rng.normal(size=25)
    ours = fit(TimeSeries(t, y))
    ref = CubicSpline(t, y, bc_type="natural")
    grid = np.linspace(0, TWO_PI, 777)
    assert np.allclose(ours(grid), ref(grid), atol=1e-10)
    assert np.allclose(ours.derivative(grid), ref(grid, 1), atol=1e-9)


def test_horner_recomputation():
    f = fit(generate(SignalSpec("triangle", 2, noise_sigma=0.2, points=40, seed=2)))
    rng = np.random.default_rng(1)
    ts = rng.uniform(0, TWO_PI, 1000)
    idx = np.clip(np.searchsorted(f.knots, ts, side="right") - 1, 0, len(f.knots) - 2)
    a, b, c, d = f.coefficients[idx].T
    h = ts - f.knots[idx]
    assert np.allclose(f(ts), a + h * (b + h * (c + h * d)), atol=1e-12, rtol=0)


def test_knots_rescaled_onto_full_circle():
    s = TimeSeries(np.linspace(1.0, 2.0, 9), np.arange(9.0) ** 2)
    f = fit(s)
    assert f.knots[0] == 0 and f.knots[-1] == pytest.approx(TWO_PI)
    assert f(0.0) == pytest.approx(0.0) and f(TWO_PI) == pytest.approx(64.0)


def test_zero_curvature_at_both_ends():
    f = fit(generate(SignalSpec("cosine", 2, points=60)))
    assert abs(f.second_derivative(np.array([0.0]))[0]) < 1e-9
    assert abs(f.second_derivative(np.array([TWO_PI]))[0]) < 1e-9


def test_cubic_with_flat_end_curvature_is_exact():
    # a cubic with zero curvature at both ends is affine
    t = np.linspace(0, TWO_PI, 40)
    y = 0.3 * t + 1.0
    f = fit(TimeSeries(t, y))
    grid = np.linspace(0, TWO_PI, 999)
    assert np.allclose(f(grid), 0.3 * grid + 1.0, atol=1e-8)


def test_errors():
    with pytest.raises(UnsupportedInputError):
        fit(TimeSeries.uniform([1.0, 2.0, 3.0]))
    f = cos3()
    with pytest.raises(DomainError):
        evaluate(f, TWO_PI + 1e-6)
    with pytest.raises(DomainError):
        evaluate_derivative(f, -1e-6)
    with pytest.raises(ValidationError):
        TimeSeries([0.0, 1.0, 1.0, 2.0], [0.0, 1.0, 2.0, 3.0])


def test_constant_has_zero_sup_derivative():
    assert sup_derivative(fit(TimeSeries.uniform([4.0] * 12))) < 1e-9


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=30))
def test_interpolation_and_smoothness(values):
    s = TimeSeries.uniform(values)
    f = fit(s)
    assert np.allclose(f(s.times), s.values, atol=1e-10)
    inner = f.knots[1:-1]
    eps = 1e-9
    scale = 1 + np.max(np.abs(values))
    assert np.allclose(f(inner - eps), f(inner + eps), atol=1e-7 * scale)
    assert np.allclose(f.derivative(inner - eps), f.derivative(inner + eps), atol=1e-6 * scale)
    grid = np.linspace(0, TWO_PI, 500)
    assert np.all(np.abs(f.derivative(grid)) <= f.sup_derivative() * (1 + 1e-12) + 1e-12)
