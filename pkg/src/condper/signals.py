"""Discrete time series, synthetic generators and moving-average smoothing.

All series live on ``[0, 2*pi]``. Generated series use the inclusive uniform
grid ``numpy.linspace(0, 2*pi, P)`` so that the first sample sits at 0 and the
last at ``2*pi``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi
FAMILIES = ("cosine", "damped_cosine", "square", "triangle")

_FAMILY_ALIASES = {
    "cos": "cosine",
    "cosine": "cosine",
    "damped": "damped_cosine",
    "damped_cosine": "damped_cosine",
    "dcos": "damped_cosine",
    "square": "square",
    "sq": "square",
    "triangle": "triangle",
    "tri": "triangle",
}


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A univariate signal sampled at strictly increasing times in [0, 2*pi]."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times)
        values = _frozen(self.values)
        if times.ndim != 1 or values.ndim != 1:
            raise ValidationError("times and values must be one-dimensional")
        if times.shape != values.shape:
            raise ValidationError(
                f"times and values differ in length ({times.size} vs {values.size})"
            )
        if times.size < 2:
            raise ValidationError("a time series needs at least 2 samples")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValidationError("times and values must be finite")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("times must be strictly increasing")
        if times[0] < 0 or times[-1] > TWO_PI + 1e-12:
            raise ValidationError("times must lie in [0, 2*pi]")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def uniform(cls, values) -> "TimeSeries":
        """Place ``values`` on the inclusive uniform grid over [0, 2*pi]."""
        values = np.asarray(values, dtype=float)
        return cls(np.linspace(0.0, TWO_PI, values.size), values)

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.times, values)


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of a synthetic test signal.

    ``damping`` is the fraction of amplitude lost over [0, 2*pi] (linear
    envelope) and ``noise_sigma`` is the Gaussian noise standard deviation
    expressed as a fraction of ``amplitude``.
    """

    family: str = "cosine"
    cycles: int = 1
    amplitude: float = 1.0
    damping: float = 0.0
    noise_sigma: float = 0.0
    points: int = 300
    seed: int = 0

    def __post_init__(self):
        family = _FAMILY_ALIASES.get(str(self.family).lower())
        if family is None:
            raise ValidationError(
                f"family: unknown signal family {self.family!r}; expected one of {FAMILIES}"
            )
        object.__setattr__(self, "family", family)
        if int(self.cycles) != self.cycles or self.cycles < 1:
            raise ValidationError(f"cycles: must be a positive integer, got {self.cycles!r}")
        if not self.amplitude > 0:
            raise ValidationError(f"amplitude: must be positive, got {self.amplitude!r}")
        if not 0 <= self.damping < 1:
            raise ValidationError(f"damping: must lie in [0, 1), got {self.damping!r}")
        if not self.noise_sigma >= 0:
            raise ValidationError(f"noise_sigma: must be nonnegative, got {self.noise_sigma!r}")
        if int(self.points) != self.points or self.points < 2:
            raise ValidationError(f"points: must be an integer >= 2, got {self.points!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError(f"seed: must be an unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "cycles", int(self.cycles))
        object.__setattr__(self, "points", int(self.points))
        object.__setattr__(self, "seed", int(self.seed))


def waveform(t, family: str, cycles: int, amplitude: float = 1.0, damping: float = 0.0):
    """Noise-free waveform value(s) at time(s) ``t``.

    Square and triangle waves share the phase of ``cos(cycles * t)``: both
    start at ``+amplitude``. At a square-wave jump the left-hand value is used.
    """
    family = _FAMILY_ALIASES.get(str(family).lower(), family)
    t = np.asarray(t, dtype=float)
    if family in ("cosine", "damped_cosine"):
        base = np.cos(cycles * t)
    else:
        # position within the current cycle, in [0, 1)
        phase = np.mod(cycles * t / TWO_PI, 1.0)
        if family == "square":
            base = np.where((phase <= 0.25) | (phase > 0.75), 1.0, -1.0)
        elif family == "triangle":
            base = 4.0 * np.abs(phase - 0.5) - 1.0
        else:
            raise ValidationError(f"family: unknown signal family {family!r}")
    envelope = 1.0 - damping * t / TWO_PI
    return amplitude * envelope * base


def generate(spec: SignalSpec) -> TimeSeries:
    """Sample ``spec`` on the uniform grid and add seeded Gaussian noise."""
    times = np.linspace(0.0, TWO_PI, spec.points)
    values = waveform(times, spec.family, spec.cycles, spec.amplitude, spec.damping)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        values = values + rng.normal(0.0, spec.noise_sigma * spec.amplitude, spec.points)
    return TimeSeries(times, values)


def sma_smooth(series: TimeSeries, window: int) -> TimeSeries:
    """Centered simple moving average with the window truncated at the ends.

    Output value ``i`` is the mean of the inputs whose index lies within
    ``window // 2`` of ``i``.
    """
    n = len(series)
    if int(window) != window or window < 1:
        raise ValidationError(f"window: must be a positive integer, got {window!r}")
    window = int(window)
    if window > n:
        raise ValidationError(f"window: {window} exceeds the series length {n}")
    if window % 2 == 0:
        raise ValidationError(f"window: must be odd to stay symmetric, got {window}")
    if window == 1:
        return series
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(series.values)))
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half, n - 1) + 1
    return series.with_values((csum[hi] - csum[lo]) / (hi - lo))


def max_sma_window(P: int, w1: int) -> int:
    """Largest odd window not exceeding a third of one cycle of ``P / w1`` samples."""
    if w1 < 1 or P < w1:
        raise ValidationError(f"need P >= w1 >= 1, got P={P}, w1={w1}")
    limit = P // (3 * w1)
    if limit % 2 == 0:
        limit -= 1
    return max(limit, 1)


def parse_generator(text: str, points: int, noise: float = 0.0, seed: int = 0) -> SignalSpec:
    """Parse ``family:cycles[:amplitude[:damping]]`` into a :class:`SignalSpec`."""
    parts = text.split(":")
    if not 2 <= len(parts) <= 4:
        raise ValidationError(
            f"generator {text!r}: expected family:cycles[:amplitude[:damping]]"
        )
    try:
        cycles = int(parts[1])
        amplitude = float(parts[2]) if len(parts) > 2 else 1.0
        damping = float(parts[3]) if len(parts) > 3 else 0.0
    except ValueError:
        raise ValidationError(f"generator {text!r}: non-numeric field") from None
    return SignalSpec(
        family=parts[0],
        cycles=cycles,
        amplitude=amplitude,
        damping=damping,
        noise_sigma=noise,
        points=points,
        seed=seed,
    )


def _parse_rows(rows: Iterable[list[str]], source: str) -> TimeSeries:
    rows = [[cell.strip() for cell in row] for row in rows if any(c.strip() for c in row)]
    if not rows:
        raise ValidationError(f"{source}: no data rows")
    width = len(rows[0])
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]  # header
    if width not in (1, 2):
        raise ValidationError(f"{source}: expected 1 or 2 columns, found {width}")
    data = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValidationError(f"{source}: row {lineno} has {len(row)} columns, expected {width}")
        try:
            data.append([float(c) for c in row])
        except ValueError:
            raise ValidationError(f"{source}: row {lineno} is not numeric: {row!r}") from None
    arr = np.array(data, dtype=float)
    if arr.shape[0] < 2:
        raise ValidationError(f"{source}: need at least 2 data rows")
    if width == 1:
        return TimeSeries.uniform(arr[:, 0])
    times = arr[:, 0]
    if times[0] < 0 or times[-1] > TWO_PI:
        # map the sampled span affinely onto [0, 2*pi]
        span = times[-1] - times[0]
        if span <= 0:
            raise ValidationError(f"{source}: times must be strictly increasing")
        times = (times - times[0]) * (TWO_PI / span)
    return TimeSeries(times, arr[:, 1])


def read_csv(path_or_text: Union[str, Path, io.TextIOBase]) -> TimeSeries:
    """Read a series from CSV.

    Accepts ``t,value`` rows or single-column ``value`` rows (uniform grid), with
    an optional header. Times outside [0, 2*pi] are rescaled onto it.
    """
    if isinstance(path_or_text, io.TextIOBase):
        return _parse_rows(csv.reader(path_or_text), "<stream>")
    path = Path(path_or_text)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            return _parse_rows(csv.reader(fh), str(path))
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read ({exc.strerror})") from None
    except UnicodeDecodeError:
        raise ValidationError(f"{path}: not valid UTF-8") from None


def write_csv(series: TimeSeries, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "value"])
    for t, v in zip(series.times, series.values):
        writer.writerow([f"{t:.12g}", f"{v:.12g}"])
