"""Dominant cycle-count estimation from the FFT periodogram."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spline as _spline
from .errors import NoDominantFrequency, ValidationError
from .signals import TWO_PI, TimeSeries

_ENERGY_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class PeriodEstimate:
    """Estimated number of cycles ``w`` on [0, 2*pi].

    ``spectrum`` rows are ``(frequency index, power)`` for indices
    ``0..resample // 2``.
    """

    w: int
    peak_power: float
    spectrum: np.ndarray

    @property
    def cycle_length(self) -> float:
        return TWO_PI / self.w


def periodogram(values) -> np.ndarray:
    """Squared FFT magnitudes for frequency indices ``0..len(values) // 2``."""
    coeffs = np.fft.rfft(np.asarray(values, dtype=float))
    return np.abs(coeffs) ** 2


def estimate_period(series: TimeSeries, resample: int | None = None) -> PeriodEstimate:
    """Cycle count of the strongest non-DC frequency.

    The series is spline-fitted and resampled at ``resample`` uniform points on
    ``[0, 2*pi)`` (default: the series length) so that bin ``k`` corresponds
    to exactly ``k`` cycles. Ties go to the smaller index.
    """
    if resample is None:
        resample = len(series)
    if int(resample) != resample or resample < 8:
        raise ValidationError(f"resample: must be an integer >= 8, got {resample!r}")
    resample = int(resample)
    f = _spline.fit(series)
    grid = np.arange(resample) * (TWO_PI / resample)
    samples = f(grid)
    power = periodogram(samples)
    total = resample * float(np.sum(samples**2))
    ac = power[1:]
    if ac.size == 0 or total <= 0 or float(np.max(ac)) < _ENERGY_FLOOR * total:
        raise NoDominantFrequency("no power outside the DC bin (constant signal?)")
    w = int(np.argmax(ac)) + 1
    spectrum = np.column_stack([np.arange(power.size, dtype=float), power])
    spectrum.setflags(write=False)
    return PeriodEstimate(w=w, peak_power=float(ac[w - 1]), spectrum=spectrum)
