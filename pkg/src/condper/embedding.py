"""Sliding-window embeddings and point-cloud preprocessing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError, ValidationError
from .signals import TWO_PI
from .spline import SplineSignal


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``count`` points in ``dimension``-dimensional Euclidean space."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValidationError(f"a point cloud needs shape (N>=1, D>=1), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.count


def as_cloud(cloud) -> PointCloud:
    return cloud if isinstance(cloud, PointCloud) else PointCloud(cloud)


@dataclass(frozen=True)
class EmbeddingConfig:
    """Parameters of a conditional sliding-window embedding.

    Points live in ``R^(M+1)``; the lag is pinned to ``2*pi / (w2 * (M + 1))``
    so that one window spans (almost) one cycle of the more periodic series.
    """

    M: int
    N: int
    w1: int
    w2: int

    def __post_init__(self):
        for name in ("M", "N", "w1", "w2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValidationError(f"{name}: must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.w2 < self.w1:
            raise ValidationError(
                f"w2 must be >= w1 (f2 at least as periodic as f1), got w1={self.w1}, w2={self.w2}"
            )

    @property
    def tau(self) -> float:
        return TWO_PI / (self.w2 * (self.M + 1))


def _window_matrix(f: SplineSignal, starts: np.ndarray, M: int, tau: float) -> np.ndarray:
    offsets = tau * np.arange(M + 1)
    t = np.mod(starts[:, None] + offsets[None, :], TWO_PI)
    return np.asarray(f(t.ravel())).reshape(t.shape)


def swe(f: SplineSignal, M: int, tau: float, N: int, T_end: float) -> PointCloud:
    """Sliding windows ``(f(t), f(t+tau), ..., f(t+M*tau))`` for ``N`` starts.

    Start times are uniform on ``[0, T_end)``; reads past ``2*pi`` wrap around.
    """
    if int(M) != M or M < 1:
        raise ValidationError(f"M: must be a positive integer, got {M!r}")
    if int(N) != N or N < 1:
        raise ValidationError(f"N: must be a positive integer, got {N!r}")
    if not tau > 0:
        raise ValidationError(f"tau: must be positive, got {tau!r}")
    if not T_end > 0:
        raise ValidationError(f"T_end: must be positive, got {T_end!r}")
    starts = np.arange(int(N)) * (T_end / int(N))
    return PointCloud(_window_matrix(f, starts, int(M), float(tau)))


def conditional_swe(f1: SplineSignal, config: EmbeddingConfig) -> PointCloud:
    """Embedding of ``f1`` over one of its cycles with the lag set by ``w2``."""
    return swe(f1, config.M, config.tau, config.N, TWO_PI / config.w1)


def min_embedding_dimension(epsilon: float, w2: int) -> int:
    """Smallest ``M`` guaranteeing scores at larger dimensions agree to ~``epsilon``."""
    if not epsilon > 0:
        raise ValidationError(f"epsilon: must be positive, got {epsilon!r}")
    if int(w2) != w2 or w2 < 1:
        raise ValidationError(f"w2: must be a positive integer, got {w2!r}")
    return max(1, math.ceil(TWO_PI / (w2 * epsilon)))


def min_embedding_points(P: int, w1: int, w2: int) -> int:
    """Point count ``ceil(P / w1) - delta`` (at least 4).

    ``delta`` counts the samples of the inclusive uniform ``P``-point grid on
    [0, 2*pi] that fall in ``[0, pi / w2]``.
    """
    if not (1 <= w1 <= P):
        raise ValidationError(f"need P >= w1 >= 1, got P={P}, w1={w1}")
    if w2 < w1:
        raise ValidationError(f"need w2 >= w1, got w1={w1}, w2={w2}")
    grid = np.linspace(0.0, TWO_PI, int(P))
    delta = int(np.count_nonzero(grid <= math.pi / w2 * (1 + 1e-12)))
    return max(4, math.ceil(P / w1) - delta)


def mean_shift_denoise(cloud, angle_threshold: float = math.pi / 16) -> PointCloud:
    """Replace each point by the mean of itself and its angular neighbours.

    Two points are neighbours when the angle between them (as vectors from the
    origin) is below ``angle_threshold``. A single averaging pass.
    """
    cloud = as_cloud(cloud)
    X = cloud.points
    norms = np.linalg.norm(X, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DegeneratePointError(
            f"point {int(zero[0])} has zero norm; its angle is undefined", index=int(zero[0])
        )
    U = X / norms[:, None]
    angles = np.arccos(np.clip(U @ U.T, -1.0, 1.0))
    neighbours = angles < angle_threshold
    np.fill_diagonal(neighbours, True)
    weights = neighbours.astype(float)
    return PointCloud((weights @ X) / weights.sum(axis=1)[:, None])


def center_normalize(cloud) -> PointCloud:
    """Subtract the centroid, then scale every point onto the unit sphere."""
    cloud = as_cloud(cloud)
    Y = cloud.points - cloud.points.mean(axis=0)
    norms = np.linalg.norm(Y, axis=1)
    bad = np.flatnonzero(norms <= 1e-12)
    if bad.size:
        raise DegeneratePointError(
            f"point {int(bad[0])} coincides with the centroid; cannot normalize",
            index=int(bad[0]),
        )
    return PointCloud(Y / norms[:, None])
