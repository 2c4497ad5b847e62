"""Conditional periodicity scores for pairs of univariate time series."""

from .embedding import (
    EmbeddingConfig,
    PointCloud,
    center_normalize,
    conditional_swe,
    mean_shift_denoise,
    min_embedding_dimension,
    min_embedding_points,
    swe,
)
from .errors import (
    CondperError,
    ComputationError,
    ContractError,
    DegeneratePointError,
    DomainError,
    NoDominantFrequency,
    UnsupportedInputError,
    ValidationError,
)
from .pca import PcaModel, fit_pca, pca_score_bound, project, variance_captured
from .pipeline import (
    PipelineConfig,
    ScoreReport,
    conditional_score,
    noise_stability_bound,
    periodicity_score,
    stability_rhs_periodicity,
)
from .rqa import (
    CrossRecurrenceMatrix,
    DetResult,
    cross_recurrence,
    det_pipeline,
    min_tolerance,
    percent_determinism,
)
from .signals import SignalSpec, TimeSeries, generate, max_sma_window, read_csv, sma_smooth
from .spectrum import PeriodEstimate, estimate_period
from .spline import SplineSignal, fit as fit_spline, sup_derivative
from .tda import (
    PersistenceDiagram,
    bottleneck_distance,
    hausdorff_distance,
    max_persistence,
    score_from_cloud,
    vr_persistence_h1,
)

__version__ = "0.1.0"
