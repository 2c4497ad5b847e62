"""Principal component analysis by symmetric eigendecomposition."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .embedding import PointCloud, as_cloud
from .errors import ComputationError, ValidationError


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Fitted principal axes.

    ``components`` rows are orthonormal, ordered by descending eigenvalue;
    ``eigenvalues`` holds the full spectrum of the population covariance
    (divided by N) so that tail sums are available for stability bounds.
    """

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.mean.size)

    @property
    def K(self) -> int:
        return int(self.components.shape[0])


def fit_pca(cloud) -> PcaModel:
    cloud = as_cloud(cloud)
    if cloud.count < 2:
        raise ValidationError(f"PCA needs at least 2 points, got {cloud.count}")
    X = cloud.points
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = (Xc.T @ Xc) / cloud.count
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order].T
    evals = np.where(evals < 0, 0.0, evals)
    # deterministic sign: largest-magnitude coordinate positive
    pivot = np.argmax(np.abs(evecs), axis=1)
    signs = np.sign(evecs[np.arange(evecs.shape[0]), pivot])
    signs[signs == 0] = 1.0
    evecs = evecs * signs[:, None]
    for arr in (mean, evecs, evals):
        arr.setflags(write=False)
    return PcaModel(mean=mean, components=evecs, eigenvalues=evals)


def _check_k(model: PcaModel, K: int) -> int:
    if int(K) != K or K < 1:
        raise ValidationError(f"K: must be a positive integer, got {K!r}")
    if K > model.dimension:
        raise ValidationError(f"K={K} exceeds the data dimension {model.dimension}")
    return int(K)


def project(model: PcaModel, cloud, K: int) -> PointCloud:
    """Coordinates of the centred points along the top ``K`` components."""
    K = _check_k(model, K)
    cloud = as_cloud(cloud)
    if cloud.dimension != model.dimension:
        raise ValidationError(
            f"cloud dimension {cloud.dimension} does not match the model ({model.dimension})"
        )
    return PointCloud((cloud.points - model.mean) @ model.components[:K].T)


def pca_score_bound(model: PcaModel, K: int) -> float:
    """``sqrt(8/3) * (sum of squared discarded eigenvalues) ** (1/4)``."""
    K = _check_k(model, K)
    tail = model.eigenvalues[K:]
    return math.sqrt(8.0 / 3.0) * float(np.sum(tail**2)) ** 0.25


def variance_captured(model: PcaModel, K: int) -> float:
    K = _check_k(model, K)
    total = float(np.sum(model.eigenvalues))
    if total <= 0:
        raise ComputationError("cloud has zero total variance")
    return float(np.sum(model.eigenvalues[:K])) / total


def write_scree_csv(model: PcaModel, fh) -> None:
    """Rows ``component_index,eigenvalue,cumulative_fraction`` (1-based index)."""
    total = float(np.sum(model.eigenvalues))
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["component_index", "eigenvalue", "cumulative_fraction"])
    running = 0.0
    for i, lam in enumerate(model.eigenvalues, start=1):
        running += float(lam)
        frac = running / total if total > 0 else 0.0
        writer.writerow([i, f"{lam:.12g}", f"{frac:.12g}"])
