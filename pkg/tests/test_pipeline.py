import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from condper.errors import NoDominantFrequency, ValidationError
from condper.experiments import trial_seed
from condper.pipeline import (
    PipelineConfig,
    conditional_score,
    noise_stability_bound,
    periodicity_score,
    stability_rhs_periodicity,
)
from condper.signals import TWO_PI, SignalSpec, TimeSeries, generate
from condper.spline import fit

REPORT_KEYS = ["score", "w1", "w2", "f1_is", "f2_is", "tau", "M", "K", "N", "pca_bound", "diagram"]


def cos(w, points=300, noise=0.0, seed=0):
    return generate(SignalSpec("cosine", w, noise_sigma=noise, points=points, seed=seed))


def test_matched_cosines_score_high():
    r = conditional_score(cos(3), cos(3), PipelineConfig(epsilon=0.05))
    assert r.w1 == r.w2 == 3
    assert r.score >= 0.9
    assert r.M == 42 and r.N == 50
    # frozen regression value of this run
    assert r.score == pytest.approx(0.925582798523, abs=1e-9)


def test_equal_cycles_reduce_to_self_score():
    f = cos(3)
    cfg = PipelineConfig(M=12)
    assert abs(conditional_score(f, cos(3, noise=0.0), cfg).score - periodicity_score(f, cfg).score) <= 1e-12


def test_self_score_of_cosine():
    assert periodicity_score(cos(5, points=500), PipelineConfig(epsilon=0.05)).score >= 0.9


def _distant_pair_mean(points=200):
    scores = []
    for seed in range(20):
        a = cos(2, points, 0.05, trial_seed(seed, 0))
        b = cos(17, points, 0.05, trial_seed(seed, 1))
        scores.append(conditional_score(a, b, PipelineConfig(M=16)).score)
    return float(np.mean(scores))


@pytest.mark.xfail(strict=True, reason="mean score is about 0.80 for this pair; see the decisions ledger")
def test_dissimilar_pair_scores_below_half():
    assert _distant_pair_mean() < 0.5


def test_dissimilar_pair_scores_below_matched_pair():
    matched = np.mean([
        conditional_score(cos(2, 200, 0.05, trial_seed(s, 0)), cos(2, 200, 0.05, trial_seed(s, 1)),
                          PipelineConfig(M=16)).score
        for s in range(20)
    ])
    assert _distant_pair_mean() < matched - 0.05


def test_constant_series_has_no_dominant_frequency():
    noisy_const = TimeSeries.uniform(1 + 1e-6 * np.random.default_rng(0).normal(size=300))
    with pytest.raises(NoDominantFrequency):
        periodicity_score(noisy_const, PipelineConfig(M=10))
    with pytest.raises(NoDominantFrequency) as info:
        conditional_score(cos(3), TimeSeries.uniform(np.full(300, 2.0)), PipelineConfig(M=10))
    assert info.value.series == "second" and "second" in str(info.value)


@pytest.mark.parametrize("window", [3, 5])
def test_short_monthly_series_is_accepted(window):
    months = generate(SignalSpec("cosine", 5, noise_sigma=0.1, points=72, seed=3))
    r = periodicity_score(months, PipelineConfig(epsilon=0.75, sma_window=window))
    assert r.w1 == 5 and 0 <= r.score <= 1


def test_role_swap_only_flips_labels():
    a, b = cos(3, noise=0.05, seed=1), cos(7, noise=0.05, seed=2)
    cfg = PipelineConfig(M=10)
    r1, r2 = conditional_score(a, b, cfg), conditional_score(b, a, cfg)
    assert (r1.w1, r1.w2, r1.tau, r1.score) == (r2.w1, r2.w2, r2.tau, r2.score)
    assert (r1.f1_is, r1.f2_is) == ("first", "second")
    assert (r2.f1_is, r2.f2_is) == ("second", "first")


@settings(max_examples=15)
@given(st.integers(1, 4), st.integers(0, 6), st.integers(2, 12))
def test_report_invariants(w1, gap, M):
    a, b = cos(w1, 200), cos(w1 + gap, 200)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = conditional_score(a, b, PipelineConfig(M=M, N=60))
    assert r.w2 >= r.w1
    assert r.tau == TWO_PI / (r.w2 * (r.M + 1))
    assert 0 <= r.score <= 1 and r.pca_bound >= 0


def test_json_layout():
    r = conditional_score(cos(3), cos(5), PipelineConfig(M=8))
    data = json.loads(r.to_json())
    assert list(data) == REPORT_KEYS
    assert data["diagram"] and all(len(p) == 2 for p in data["diagram"])
    for key in ("score", "tau", "pca_bound"):
        assert data[key] == float(f"{data[key]:.12g}")
    assert r.to_json() == conditional_score(cos(3), cos(5), PipelineConfig(M=8)).to_json()


def test_config_validation():
    with pytest.raises(ValidationError):
        PipelineConfig()
    with pytest.raises(ValidationError):
        PipelineConfig(M=4, epsilon=0.1)
    with pytest.raises(ValidationError):
        PipelineConfig(M=1, K=3)
    with pytest.raises(ValidationError):
        PipelineConfig(M=4, sma_window=4)
    with pytest.raises(ValidationError):
        conditional_score(cos(3), cos(3), PipelineConfig(epsilon=100.0, K=3))


def test_small_point_override_warns():
    with pytest.warns(UserWarning, match="below the minimum"):
        conditional_score(cos(3), cos(3), PipelineConfig(M=5, N=10))


def test_stability_rhs_examples():
    const = fit(TimeSeries.uniform([1.0] * 20))
    assert stability_rhs_periodicity(const, 10, 5, 6) == 0
    f = fit(cos(3))
    assert stability_rhs_periodicity(f, 10, 5, 5) == 0
    expected = 4 * math.sqrt(11 / 3) * (TWO_PI / 5 - TWO_PI / 6) * math.sqrt(10) * 3
    assert stability_rhs_periodicity(f, 10, 5, 6) == pytest.approx(expected, rel=0.02)
    with pytest.raises(ValidationError):
        stability_rhs_periodicity(f, 10, 6, 5)


def test_noise_bound_examples():
    assert noise_stability_bound(0, 0.25, 16) == 0
    assert noise_stability_bound(0.05, 0.25, 16) == pytest.approx(0.9522, abs=1e-4)
    assert noise_stability_bound(0.1, 0.25, 16) == pytest.approx(2 * noise_stability_bound(0.05, 0.25, 16))
    with pytest.raises(ValidationError):
        noise_stability_bound(0.1, 1.0, 3)


def test_precision_convergence_across_dimensions():
    a, b = cos(3), cos(7)
    scores = {M: conditional_score(a, b, PipelineConfig(M=M)).score for M in range(9, 61)}
    spreads = []
    for eps in (0.1, 0.05, 0.02):
        m0 = math.ceil(TWO_PI / (7 * eps))
        vals = [s for M, s in scores.items() if M >= m0]
        spreads.append(max(vals) - min(vals))
    assert spreads[0] >= spreads[1] >= spreads[2]
    assert spreads[2] < 0.05
