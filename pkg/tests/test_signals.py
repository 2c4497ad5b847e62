import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from condper.errors import ValidationError
from condper.signals import (
    TWO_PI,
    SignalSpec,
    TimeSeries,
    generate,
    max_sma_window,
    parse_generator,
    read_csv,
    sma_smooth,
    waveform,
    write_csv,
)
from oracles import truncated_moving_average


def test_cosine_starts_at_one_and_hits_one_at_a_full_cycle():
    s = generate(SignalSpec("cosine", 3, points=300))
    assert s.values[0] == 1.0
    # 2*pi/3 is not a sample of the 300-point inclusive grid; check the waveform there
    assert abs(waveform(np.array([TWO_PI / 3]), "cosine", 3)[0] - 1.0) < 1e-9
    assert abs(s.values[-1] - 1.0) < 1e-9


def test_noisy_generation_is_reproducible():
    spec = SignalSpec("cosine", 3, noise_sigma=0.05, points=300, seed=11)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.times, b.times)
    assert not np.array_equal(a.values, generate(SignalSpec("cosine", 3, points=300)).values)


def test_square_wave_is_balanced():
    s = generate(SignalSpec("square", 7, points=300))
    oracle = np.where(np.cos(7 * np.linspace(0, TWO_PI, 300)) >= 0, 1.0, -1.0)
    assert np.array_equal(s.values, oracle)
    assert abs(s.values.mean()) < 0.05


def test_triangle_range_and_cycles():
    t = np.linspace(0, TWO_PI, 2001)
    v = waveform(t, "triangle", 4)
    assert v.max() == pytest.approx(1.0) and v.min() == pytest.approx(-1.0, abs=1e-2)
    assert v[0] == pytest.approx(1.0)
    # four troughs on the interval
    troughs = np.flatnonzero((v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:]))
    assert troughs.size == 4


def test_damping_envelope_is_linear():
    s = generate(SignalSpec("damped_cosine", 1, damping=0.5, points=5))
    assert s.values[0] == pytest.approx(1.0)
    assert s.values[-1] == pytest.approx(0.5)
    assert s.values[2] == pytest.approx(-0.75)


@given(st.integers(1, 20), st.floats(0.1, 5), st.integers(2, 400))
def test_noiseless_cosine_matches_closed_form(w, amp, P):
    s = generate(SignalSpec("cosine", w, amplitude=amp, points=P))
    assert np.allclose(s.values, amp * np.cos(w * s.times), atol=1e-12, rtol=0)
    assert s.times[0] == 0 and s.times[-1] == pytest.approx(TWO_PI)


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(family="sine", cycles=2), "family"),
        (dict(family="cosine", cycles=0), "cycles"),
        (dict(family="cosine", cycles=2, points=1), "points"),
        (dict(family="cosine", cycles=2, damping=1.0), "damping"),
        (dict(family="cosine", cycles=2, noise_sigma=-0.1), "noise_sigma"),
        (dict(family="cosine", cycles=2, amplitude=0), "amplitude"),
        (dict(family="cosine", cycles=2, seed=-1), "seed"),
    ],
)
def test_invalid_spec_names_the_field(kwargs, field):
    with pytest.raises(ValidationError, match=field):
        SignalSpec(**kwargs)


def test_sma_examples():
    s = TimeSeries.uniform([0, 3, 0, 3, 0])
    assert sma_smooth(s, 3).values.tolist() == [1.5, 1, 2, 1, 1.5]
    assert np.array_equal(sma_smooth(s, 1).values, s.values)
    c = TimeSeries.uniform([2.5] * 9)
    assert np.allclose(sma_smooth(c, 7).values, 2.5)


@pytest.mark.parametrize("window", [2, 4, 7])
def test_sma_rejects_even_or_oversized_windows(window):
    with pytest.raises(ValidationError):
        sma_smooth(TimeSeries.uniform([1.0, 2, 3, 4, 5]), window)


@given(
    st.lists(st.floats(-100, 100), min_size=2, max_size=40),
    st.integers(0, 20),
    st.floats(-50, 50),
)
def test_sma_properties(values, half, shift):
    window = min(2 * half + 1, len(values) if len(values) % 2 else len(values) - 1)
    s = TimeSeries.uniform(values)
    out = sma_smooth(s, window)
    assert np.array_equal(out.times, s.times)
    assert np.allclose(out.values, truncated_moving_average(values, window), atol=1e-9)
    shifted = sma_smooth(s.with_values(s.values + shift), window)
    assert np.allclose(shifted.values, out.values + shift, atol=1e-9)


@pytest.mark.parametrize("P, w1, expected", [(300, 3, 33), (300, 2, 49), (3, 3, 1)])
def test_max_sma_window(P, w1, expected):
    assert max_sma_window(P, w1) == expected


@given(st.integers(1, 2000), st.integers(1, 50))
def test_max_sma_window_is_largest_odd(P, w1):
    if w1 > P:
        return
    w = max_sma_window(P, w1)
    assert w % 2 == 1 and w >= 1
    assert w <= max(1, P // (3 * w1)) and w + 2 > P // (3 * w1)


def test_time_series_validation():
    with pytest.raises(ValidationError):
        TimeSeries([0.0], [1.0])
    with pytest.raises(ValidationError):
        TimeSeries([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValidationError):
        TimeSeries([0.0, 7.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        TimeSeries([0.0, 1.0], [1.0])


def test_parse_generator_grammar():
    spec = parse_generator("tri:4:2.5:0.3", points=100, noise=0.1, seed=3)
    assert (spec.family, spec.cycles, spec.amplitude, spec.damping) == ("triangle", 4, 2.5, 0.3)
    assert (spec.points, spec.noise_sigma, spec.seed) == (100, 0.1, 3)
    with pytest.raises(ValidationError):
        parse_generator("cos", 100)
    with pytest.raises(ValidationError):
        parse_generator("cos:x", 100)


def test_csv_round_trip_and_variants(tmp_path):
    s = generate(SignalSpec("cosine", 2, noise_sigma=0.1, points=50, seed=1))
    buf = io.StringIO()
    write_csv(s, buf)
    back = read_csv(io.StringIO(buf.getvalue()))
    assert np.allclose(back.values, s.values, rtol=1e-11) and np.allclose(back.times, s.times, rtol=1e-11)

    path = tmp_path / "v.csv"
    path.write_text("value\n1\n2\n3\n4\n")
    v = read_csv(path)
    assert v.values.tolist() == [1, 2, 3, 4] and v.times[-1] == pytest.approx(TWO_PI)

    months = read_csv(io.StringIO("".join(f"{m},{m % 12}\n" for m in range(1, 73))))
    assert len(months) == 72 and months.times[0] == 0 and months.times[-1] == pytest.approx(TWO_PI)


@pytest.mark.parametrize("text", ["", "t,value\n", "1,2,3\n4,5,6\n", "0,1\n1,abc\n", "0,1\n1\n"])
def test_malformed_csv_is_rejected(text):
    with pytest.raises(ValidationError):
        read_csv(io.StringIO(text))
