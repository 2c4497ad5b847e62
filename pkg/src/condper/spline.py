"""Natural cubic spline interpolation on [0, 2*pi].

The fit rescales the sample times so the first sample lands on 0 and the last
on ``2*pi``; evaluation never extrapolates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedInputError, ValidationError
from .signals import TWO_PI, TimeSeries

_DOMAIN_SLACK = 1e-12


def solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas algorithm for a tridiagonal system.

    ``lower[i]`` multiplies ``x[i-1]`` and ``upper[i]`` multiplies ``x[i+1]`` in
    row ``i``; ``lower[0]`` and ``upper[-1]`` are ignored.
    """
    n = len(diag)
    c = np.empty(n)
    d = np.empty(n)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / denom if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


@dataclass(frozen=True, eq=False)
class SplineSignal:
    """Piecewise cubic ``a + b*x + c*x**2 + d*x**3`` with ``x = t - knots[i]``.

    ``coefficients`` has shape ``(len(knots) - 1, 4)`` holding ``(a, b, c, d)``.
    """

    knots: np.ndarray
    coefficients: np.ndarray

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.domain
        if np.any(~np.isfinite(t)) or np.any(t < lo - _DOMAIN_SLACK) or np.any(t > hi + _DOMAIN_SLACK):
            bad = t[(t < lo - _DOMAIN_SLACK) | (t > hi + _DOMAIN_SLACK) | ~np.isfinite(t)]
            raise DomainError(
                f"t={bad.flat[0]!r} outside the spline domain [{lo}, {hi}]; no extrapolation"
            )
        idx = np.searchsorted(self.knots, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.knots) - 2)
        return t, idx

    def __call__(self, t):
        t, idx = self._locate(t)
        a, b, c, d = self.coefficients[idx].T
        x = t - self.knots[idx]
        out = a + x * (b + x * (c + x * d))
        return float(out) if out.ndim == 0 else out

    def derivative(self, t):
        t, idx = self._locate(t)
        _, b, c, d = self.coefficients[idx].T
        x = t - self.knots[idx]
        out = b + x * (2.0 * c + 3.0 * x * d)
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, t):
        t, idx = self._locate(t)
        _, _, c, d = self.coefficients[idx].T
        x = t - self.knots[idx]
        out = 2.0 * c + 6.0 * x * d
        return float(out) if out.ndim == 0 else out

    def sup_derivative(self) -> float:
        """Upper bound on ``|f'|`` over the domain.

        Takes the max over a grid of 10 points per interval together with the
        endpoints and the interior critical point of each quadratic piece.
        """
        h = np.diff(self.knots)
        _, b, c, d = self.coefficients.T
        frac = np.linspace(0.0, 1.0, 11)
        x = h[:, None] * frac[None, :]
        grid = b[:, None] + x * (2.0 * c[:, None] + 3.0 * x * d[:, None])
        best = float(np.max(np.abs(grid)))
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = np.where(d != 0, -c / (3.0 * d), -1.0)
        inside = (xc > 0) & (xc < h)
        if np.any(inside):
            xi = xc[inside]
            vals = b[inside] + xi * (2.0 * c[inside] + 3.0 * xi * d[inside])
            best = max(best, float(np.max(np.abs(vals))))
        return best


def fit(series: TimeSeries) -> SplineSignal:
    """Natural cubic spline through all samples, rescaled onto [0, 2*pi]."""
    t = np.asarray(series.times, dtype=float)
    y = np.asarray(series.values, dtype=float)
    n = t.size
    if n < 4:
        raise UnsupportedInputError(f"cubic spline fit needs at least 4 samples, got {n}")
    if np.any(np.diff(t) <= 0):
        raise ValidationError("sample times must be distinct and increasing")
    knots = (t - t[0]) * (TWO_PI / (t[-1] - t[0]))
    knots[-1] = TWO_PI
    h = np.diff(knots)
    slope = np.diff(y) / h

    # second derivatives m[1..n-2]; natural ends m[0] = m[n-1] = 0
    m = np.zeros(n)
    diag = 2.0 * (h[:-1] + h[1:])
    rhs = 6.0 * (slope[1:] - slope[:-1])
    m[1:-1] = solve_tridiagonal(h[:-1], diag, h[1:], rhs)

    coeffs = np.empty((n - 1, 4))
    coeffs[:, 0] = y[:-1]
    coeffs[:, 1] = slope - h * (2.0 * m[:-1] + m[1:]) / 6.0
    coeffs[:, 2] = m[:-1] / 2.0
    coeffs[:, 3] = (m[1:] - m[:-1]) / (6.0 * h)
    knots.setflags(write=False)
    coeffs.setflags(write=False)
    return SplineSignal(knots, coeffs)


def evaluate(signal: SplineSignal, t):
    return signal(t)


def evaluate_derivative(signal: SplineSignal, t):
    return signal.derivative(t)


def sup_derivative(signal: SplineSignal) -> float:
    return signal.sup_derivative()
