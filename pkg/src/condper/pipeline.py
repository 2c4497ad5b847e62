"""End-to-end conditional periodicity scoring.

Order of operations: smooth both series, fit splines, estimate cycle counts,
assign roles (``f1`` has the longer cycle), build the conditional
sliding-window embedding of ``f1``, optionally mean-shift it, project onto the
top principal components, normalise onto the unit circle/sphere and take the
maximum H1 persistence over ``sqrt(3)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import spline as _spline
from .embedding import (
    EmbeddingConfig,
    center_normalize,
    conditional_swe,
    mean_shift_denoise,
    min_embedding_dimension,
    min_embedding_points,
)
from .errors import NoDominantFrequency, ValidationError
from .pca import fit_pca, pca_score_bound, project
from .signals import TimeSeries, max_sma_window, sma_smooth
from .spectrum import estimate_period
from .spline import SplineSignal
from .tda import PersistenceDiagram, score_from_cloud

ROLE_LABELS = ("first", "second")


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for one scoring run.

    Exactly one of ``M`` and ``epsilon`` must be given; with ``epsilon`` the
    dimension is derived from the estimated ``w2``. ``N`` and ``sma_window``
    default to the minimum-point and one-third-cycle rules.
    """

    M: Optional[int] = None
    epsilon: Optional[float] = None
    N: Optional[int] = None
    K: int = 2
    sma_window: Optional[int] = None
    mean_shift: bool = True
    angle_threshold: float = math.pi / 16
    resample: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if (self.M is None) == (self.epsilon is None):
            raise ValidationError("exactly one of M and epsilon must be set")
        if self.M is not None and (int(self.M) != self.M or self.M < 1):
            raise ValidationError(f"M: must be a positive integer, got {self.M!r}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValidationError(f"epsilon: must be positive, got {self.epsilon!r}")
        if self.N is not None and (int(self.N) != self.N or self.N < 1):
            raise ValidationError(f"N: must be a positive integer, got {self.N!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ValidationError(f"K: must be a positive integer, got {self.K!r}")
        if self.M is not None and self.K > self.M + 1:
            raise ValidationError(f"K={self.K} exceeds M+1={self.M + 1}")
        if self.sma_window is not None and (
            int(self.sma_window) != self.sma_window or self.sma_window < 1 or self.sma_window % 2 == 0
        ):
            raise ValidationError(f"sma_window: must be a positive odd integer, got {self.sma_window!r}")
        if not 0 < self.angle_threshold <= math.pi:
            raise ValidationError(f"angle_threshold: must lie in (0, pi], got {self.angle_threshold!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError(f"seed: must be an unsigned integer, got {self.seed!r}")


@dataclass(frozen=True, eq=False)
class ScoreReport:
    score: float
    w1: int
    w2: int
    f1_is: str
    f2_is: str
    tau: float
    M: int
    K: int
    N: int
    diagram: PersistenceDiagram
    pca_bound: float
    config_echo: PipelineConfig = field(default_factory=lambda: PipelineConfig(M=1))

    def to_dict(self) -> dict:
        return {
            "score": _sig(self.score),
            "w1": self.w1,
            "w2": self.w2,
            "f1_is": self.f1_is,
            "f2_is": self.f2_is,
            "tau": _sig(self.tau),
            "M": self.M,
            "K": self.K,
            "N": self.N,
            "pca_bound": _sig(self.pca_bound),
            "diagram": [[_sig(b), _sig(d)] for b, d in self.diagram.pairs],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _sig(x: float) -> float:
    return float(f"{float(x):.12g}")


def _estimate(series: TimeSeries, label: str, resample):
    try:
        return estimate_period(series, resample).w
    except NoDominantFrequency as exc:
        raise NoDominantFrequency(f"{label} series: {exc}", series=label) from None


def conditional_score(fi: TimeSeries, fj: TimeSeries, config: PipelineConfig) -> ScoreReport:
    """Conditional periodicity score of the less periodic input given the other."""
    inputs = (fi, fj)
    smoothed = []
    for label, series in zip(ROLE_LABELS, inputs):
        window = config.sma_window
        if window is None:
            window = max_sma_window(len(series), _estimate(series, label, config.resample))
        elif window > len(series):
            raise ValidationError(f"sma_window={window} exceeds the {label} series length {len(series)}")
        smoothed.append(sma_smooth(series, window))

    fits = [_spline.fit(s) for s in smoothed]
    ws = [_estimate(s, label, config.resample) for label, s in zip(ROLE_LABELS, smoothed)]
    # f1 is the series with the longer cycle; ties keep the input order
    first = 0 if ws[0] <= ws[1] else 1
    second = 1 - first
    w1, w2 = ws[first], ws[second]

    M = config.M if config.M is not None else min_embedding_dimension(config.epsilon, w2)
    if config.K > M + 1:
        raise ValidationError(f"K={config.K} exceeds M+1={M + 1} (M derived from epsilon)")
    P = len(inputs[first])
    bound = min_embedding_points(P, w1, w2)
    N = config.N if config.N is not None else bound
    if N < bound:
        warnings.warn(f"N={N} is below the minimum point count {bound}", stacklevel=2)

    return _score_spline(
        fits[first], EmbeddingConfig(M=M, N=N, w1=w1, w2=w2), config,
        roles=(ROLE_LABELS[first], ROLE_LABELS[second]),
    )


def _score_spline(f1: SplineSignal, emb: EmbeddingConfig, config: PipelineConfig, roles) -> ScoreReport:
    cloud = conditional_swe(f1, emb)
    if config.mean_shift:
        cloud = mean_shift_denoise(cloud, config.angle_threshold)
    model = fit_pca(cloud)
    Y = center_normalize(project(model, cloud, config.K))
    value = score_from_cloud(Y)
    return ScoreReport(
        score=value.score,
        w1=emb.w1,
        w2=emb.w2,
        f1_is=roles[0],
        f2_is=roles[1],
        tau=emb.tau,
        M=emb.M,
        K=config.K,
        N=emb.N,
        diagram=value.diagram,
        pca_bound=pca_score_bound(model, config.K),
        config_echo=config,
    )


def score_with_cycles(f1: SplineSignal, w1: int, w2: int, config: PipelineConfig) -> ScoreReport:
    """Score a fitted ``f1`` against a known cycle count ``w2`` (no estimation)."""
    M = config.M if config.M is not None else min_embedding_dimension(config.epsilon, w2)
    N = config.N if config.N is not None else min_embedding_points(len(f1.knots), w1, w2)
    return _score_spline(f1, EmbeddingConfig(M=M, N=N, w1=w1, w2=w2), config, ROLE_LABELS)


def periodicity_score(f: TimeSeries, config: PipelineConfig) -> ScoreReport:
    """Self-conditioned score, which reduces to the ordinary periodicity score."""
    return conditional_score(f, f, config)


def stability_rhs_periodicity(f1: SplineSignal, M: int, w21: int, w22: int) -> float:
    """Right-hand side of the score stability bound under a change of ``w2``.

    The unknown derivative values are replaced by ``sup |f1'|``, which can
    only loosen the bound.
    """
    if w21 < 1 or w22 < w21:
        raise ValidationError(f"need w22 >= w21 >= 1, got w21={w21}, w22={w22}")
    gap = abs(2 * math.pi / w21 - 2 * math.pi / w22)
    return 4.0 * math.sqrt((M + 1) / 3.0) * gap * math.sqrt(M) * f1.sup_derivative()


def noise_stability_bound(sigma: float, delta: float, M: int) -> float:
    """Score change exceeded with probability at most ``delta`` under noise ``sigma``."""
    if sigma < 0:
        raise ValidationError(f"sigma: must be nonnegative, got {sigma!r}")
    if not 0 < delta < 1:
        raise ValidationError(f"delta: must lie in (0, 1), got {delta!r}")
    return 4.0 * sigma * math.sqrt((M + 1) / (3.0 * delta))


def config_dict(config: PipelineConfig) -> dict:
    return asdict(config)
