"""Seeded, parallel experiment sweeps over synthetic signal pairs.

Every trial derives its RNG seeds from ``(base_seed, trial_index)`` with a
splitmix64 mix, so results do not depend on the worker count or schedule.
Trials whose computation fails (for instance no dominant frequency under heavy
noise) are counted but left out of the cell statistics.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from .embedding import min_embedding_dimension
from .errors import ComputationError, ValidationError
from .pipeline import PipelineConfig, conditional_score
from .rqa import det_pipeline
from .signals import SignalSpec, generate

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(base: int, index: int) -> int:
    return splitmix64((int(base) + int(index)) & _MASK64)


@dataclass(frozen=True)
class CellSummary:
    n: int
    failed: int
    mean: float
    ci_low: float
    ci_high: float


def summarize(values: Sequence[float], failed: int = 0, level: float = 0.95) -> CellSummary:
    """Mean and Student-t confidence interval with ``n - 1`` degrees of freedom."""
    x = np.asarray([v for v in values if v is not None], dtype=float)
    n = int(x.size)
    if n == 0:
        return CellSummary(0, failed, math.nan, math.nan, math.nan)
    mean = float(x.mean())
    if n < 2:
        return CellSummary(n, failed, mean, math.nan, math.nan)
    sem = float(x.std(ddof=1)) / math.sqrt(n)
    half = float(stats.t.ppf(0.5 + level / 2, n - 1)) * sem
    return CellSummary(n, failed, mean, mean - half, mean + half)


def default_jobs() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def run_trials(fn: Callable, tasks: Iterable, jobs: int | None = None) -> list:
    """``[fn(t) for t in tasks]``, fanned out over ``jobs`` processes in order."""
    tasks = list(tasks)
    jobs = default_jobs() if jobs is None else int(jobs)
    if jobs < 1:
        raise ValidationError(f"jobs: must be >= 1, got {jobs}")
    if jobs == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


@dataclass(frozen=True)
class PairTask:
    """One synthetic pair plus the scoring parameters applied to it."""

    family: str
    w1: int
    w2: int
    noise: float
    points: int
    seed1: int
    seed2: int
    damping: float = 0.0
    M: int | None = None
    epsilon: float | None = None
    N: int | None = None
    K: int = 2
    sma_window: int | None = None

    def series(self):
        a = generate(SignalSpec(self.family, self.w1, damping=self.damping, noise_sigma=self.noise,
                                points=self.points, seed=self.seed1))
        b = generate(SignalSpec(self.family, self.w2, damping=self.damping, noise_sigma=self.noise,
                                points=self.points, seed=self.seed2))
        return a, b

    def config(self) -> PipelineConfig:
        return PipelineConfig(M=self.M, epsilon=self.epsilon, N=self.N, K=self.K,
                              sma_window=self.sma_window)


def score_trial(task: PairTask) -> float | None:
    a, b = task.series()
    try:
        return conditional_score(a, b, task.config()).score
    except ComputationError:
        return None


@dataclass(frozen=True)
class DetTask:
    pair: PairTask
    taus: tuple
    tol: float
    min_dl: int
    sma_window: int | None


def det_trial(task: DetTask) -> tuple:
    """%DET for one pair at each index lag in ``task.taus``."""
    a, b = task.pair.series()
    return tuple(
        det_pipeline(a, b, task.pair.M, tau, task.tol, task.min_dl, K=task.pair.K,
                     sma_window=task.sma_window).percent_det
        for tau in task.taus
    )


def _pair_seeds(seed: int, i: int) -> tuple[int, int]:
    return trial_seed(seed, 2 * i), trial_seed(seed, 2 * i + 1)


def _summaries(results: list, samples: int) -> list[CellSummary]:
    out = []
    for start in range(0, len(results), samples):
        cell = results[start:start + samples]
        ok = [v for v in cell if v is not None]
        out.append(summarize(ok, failed=len(cell) - len(ok)))
    return out


def sweep_periodicity(w1: int, w2_values: Sequence[int], *, samples: int, seed: int = 0,
                      M: int | None = None, epsilon: float | None = None, noise: float = 0.05,
                      points: int = 200, family: str = "cosine", K: int = 2,
                      sma_window: int | None = None, jobs: int | None = None) -> list[dict]:
    """Mean score with 95% CI for each ``w2``.

    Trial ``i`` reuses the same pair of noise seeds in every ``w2`` cell, so
    differences between cells are not masked by sampling noise.
    """
    _check_samples(samples)
    tasks = [
        PairTask(family, w1, w2, noise, points, *_pair_seeds(seed, i), M=M, epsilon=epsilon,
                 K=K, sma_window=sma_window)
        for w2 in w2_values for i in range(samples)
    ]
    cells = _summaries(run_trials(score_trial, tasks, jobs), samples)
    return [dict(w1=w1, w2=w2, **_cell(c)) for w2, c in zip(w2_values, cells)]


def sweep_noise(families: Sequence[str], noise_levels: Sequence[float], damping_levels: Sequence[float],
                *, samples: int, seed: int = 0, w1: int = 3, w2: int = 7, M: int | None = None,
                epsilon: float | None = None, points: int = 300, K: int = 2,
                sma_window: int | None = None, jobs: int | None = None) -> list[dict]:
    """Score robustness across signal families, damping and noise levels."""
    _check_samples(samples)
    grid = [(f, d, s) for f in families for d in damping_levels for s in noise_levels]
    tasks = [
        PairTask(f, w1, w2, s, points, *_pair_seeds(seed, i), damping=d, M=M, epsilon=epsilon,
                 K=K, sma_window=sma_window)
        for f, d, s in grid for i in range(samples)
    ]
    cells = _summaries(run_trials(score_trial, tasks, jobs), samples)
    return [dict(family=f, damping=d, noise=s, **_cell(c)) for (f, d, s), c in zip(grid, cells)]


def sweep_dimension(dims: Sequence[int], *, seed: int = 0, w1: int = 3, w2: int = 7,
                    epsilons: Sequence[float] = (0.1, 0.05, 0.02), noise: float = 0.05,
                    points: int = 300, N: int | None = None, family: str = "cosine", K: int = 2,
                    sma_window: int | None = 9, jobs: int | None = None) -> dict:
    """Score of one fixed pair against the embedding dimension.

    ``N`` defaults to ``points``. Returns the per-dimension scores plus the
    minimum dimension for every ``epsilon``.
    """
    s1, s2 = _pair_seeds(seed, 0)
    N = points if N is None else N
    tasks = [PairTask(family, w1, w2, noise, points, s1, s2, M=m, N=N, K=K, sma_window=sma_window)
             for m in dims]
    scores = run_trials(score_trial, tasks, jobs)
    markers = [(float(e), min_embedding_dimension(e, w2)) for e in epsilons]
    return {
        "scores": [dict(M=m, score=s) for m, s in zip(dims, scores)],
        "markers": [dict(epsilon=e, M=m) for e, m in markers],
    }


def compare_det(w1: int, w2_values: Sequence[int], *, samples: int, seed: int = 0,
                dims: Sequence[int] = (16, 17, 18), taus: Sequence[int] = (2, 3, 4),
                tol: float = 0.9, min_dl: int = 15, noise: float = 0.05, points: int = 200,
                K: int = 2, sma_window: int | None = None, det_sma_window: int | None = 11,
                jobs: int | None = None) -> list[dict]:
    """Mean score per ``(M, w2)`` next to mean %DET per ``(M, tau, w2)``.

    Score rows carry ``tau_index = 0`` since the score fixes its own lag.
    """
    _check_samples(samples)
    taus = tuple(int(t) for t in taus)
    keys = [(m, w2) for m in dims for w2 in w2_values]
    pairs = [
        PairTask("cosine", w1, w2, noise, points, *_pair_seeds(seed, i), M=m, K=K,
                 sma_window=sma_window)
        for m, w2 in keys for i in range(samples)
    ]
    score_cells = _summaries(run_trials(score_trial, pairs, jobs), samples)
    det_results = run_trials(det_trial, [DetTask(p, taus, tol, min_dl, det_sma_window) for p in pairs], jobs)

    rows = []
    for (m, w2), cell in zip(keys, score_cells):
        rows.append(dict(measure="score", M=m, tau_index=0, w2=w2, **_cell(cell)))
    for k, (m, w2) in enumerate(keys):
        block = det_results[k * samples:(k + 1) * samples]
        for j, tau in enumerate(taus):
            rows.append(dict(measure="det", M=m, tau_index=tau, w2=w2,
                             **_cell(summarize([r[j] for r in block]))))
    return rows


def _check_samples(samples: int) -> None:
    if int(samples) != samples or samples < 1:
        raise ValidationError(f"samples: must be a positive integer, got {samples!r}")


def _cell(c: CellSummary) -> dict:
    return dict(n=c.n, failed=c.failed, mean=c.mean, ci_low=c.ci_low, ci_high=c.ci_high)
