"""Cross-recurrence matrices and percent determinism (%DET).

This is the multi-parameter baseline the conditional score is compared with:
it needs a lag, an embedding dimension, a distance threshold ``tol`` and a
minimum diagonal length ``min_dl``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .embedding import PointCloud, as_cloud
from .errors import ValidationError
from .pca import fit_pca, project
from .signals import TimeSeries, sma_smooth


@dataclass(frozen=True, eq=False)
class CrossRecurrenceMatrix:
    """``cells[i, j]`` is True iff ``distances[i, j] < tol``."""

    cells: np.ndarray
    distances: np.ndarray
    tol: float

    @property
    def n1(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n2(self) -> int:
        return int(self.cells.shape[1])


@dataclass(frozen=True)
class DetResult:
    percent_det: float
    recurrence_count: int
    diagonal_histogram: dict = field(default_factory=dict)
    min_dl: int = 2

    @property
    def empty(self) -> bool:
        return self.recurrence_count == 0


def cross_recurrence(a, b, tol: float) -> CrossRecurrenceMatrix:
    a, b = as_cloud(a), as_cloud(b)
    if a.dimension != b.dimension:
        raise ValidationError(f"clouds live in different dimensions ({a.dimension} vs {b.dimension})")
    if not tol > 0:
        raise ValidationError(f"tol: must be positive, got {tol!r}")
    dist = cdist(a.points, b.points)
    cells = dist < tol
    dist.setflags(write=False)
    cells.setflags(write=False)
    return CrossRecurrenceMatrix(cells=cells, distances=dist, tol=float(tol))


def diagonal_runs(cells: np.ndarray) -> Counter:
    """Histogram of maximal runs of ones along every constant-offset diagonal."""
    cells = np.asarray(cells, dtype=bool)
    n1, n2 = cells.shape
    hist: Counter = Counter()
    for offset in range(-(n1 - 1), n2):
        diag = np.diagonal(cells, offset=offset).astype(np.int8)
        if not diag.any():
            continue
        edges = np.diff(np.concatenate(([0], diag, [0])))
        starts = np.flatnonzero(edges == 1)
        stops = np.flatnonzero(edges == -1)
        hist.update((stops - starts).tolist())
    return hist


def percent_determinism(matrix: CrossRecurrenceMatrix, min_dl: int = 2) -> DetResult:
    """Fraction of recurrence points on diagonal runs of length >= ``min_dl``."""
    if int(min_dl) != min_dl or min_dl < 1:
        raise ValidationError(f"min_dl: must be a positive integer, got {min_dl!r}")
    cells = matrix.cells if isinstance(matrix, CrossRecurrenceMatrix) else np.asarray(matrix, bool)
    total = int(np.count_nonzero(cells))
    if total == 0:
        return DetResult(0.0, 0, {}, int(min_dl))
    hist = diagonal_runs(cells)
    on_lines = sum(length * count for length, count in hist.items() if length >= min_dl)
    return DetResult(on_lines / total, total, dict(sorted(hist.items())), int(min_dl))


def delay_embed(values, M: int, lag: int) -> PointCloud:
    """Index-lagged states ``(x[i], x[i+lag], ..., x[i+M*lag])``.

    Windows running past the end are dropped.
    """
    x = np.asarray(values, dtype=float)
    if int(M) != M or M < 1:
        raise ValidationError(f"M: must be a positive integer, got {M!r}")
    if int(lag) != lag or lag < 1:
        raise ValidationError(f"lag: must be a positive integer, got {lag!r}")
    count = x.size - M * lag
    if count < 2:
        raise ValidationError(
            f"series of length {x.size} too short for M={M}, lag={lag} (needs > {M * lag + 1})"
        )
    idx = np.arange(count)[:, None] + lag * np.arange(M + 1)[None, :]
    return PointCloud(x[idx])


def min_tolerance(sigma: float) -> float:
    """Smallest noise-robust recurrence threshold, five noise standard deviations."""
    if sigma < 0:
        raise ValidationError(f"sigma: must be nonnegative, got {sigma!r}")
    return 5.0 * float(sigma)


def det_matrix(
    f1: TimeSeries,
    f2: TimeSeries,
    M: int,
    tau_index: int,
    tol: float,
    K: int = 2,
    sma_window: int | None = None,
) -> CrossRecurrenceMatrix:
    """Cross-recurrence of the top-``K`` PCA projections of both delay embeddings.

    Each embedding is projected onto its own principal components.
    """
    if len(f1) != len(f2):
        raise ValidationError(f"series lengths differ ({len(f1)} vs {len(f2)})")
    if K > M + 1:
        raise ValidationError(f"K={K} exceeds the embedding dimension M+1={M + 1}")
    clouds = []
    for series in (f1, f2):
        if sma_window is not None:
            series = sma_smooth(series, sma_window)
        cloud = delay_embed(series.values, M, tau_index)
        clouds.append(project(fit_pca(cloud), cloud, K))
    return cross_recurrence(clouds[0], clouds[1], tol)


def det_pipeline(
    f1: TimeSeries,
    f2: TimeSeries,
    M: int,
    tau_index: int,
    tol: float,
    min_dl: int,
    K: int = 2,
    sma_window: int | None = None,
) -> DetResult:
    return percent_determinism(det_matrix(f1, f2, M, tau_index, tol, K, sma_window), min_dl)


def write_matrix_text(matrix: CrossRecurrenceMatrix, fh) -> None:
    """One line of ``0``/``1`` characters per matrix row."""
    for row in np.asarray(matrix.cells, dtype=bool):
        fh.write("".join("1" if c else "0" for c in row))
        fh.write("\n")
