"""Support-size estimators: the interval-partitioned Chebyshev estimator and baselines."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._kernels import backend
from .chebyshev import MAX_DEGREE, shifted_polynomial
from .predictors import Predictor
from .sampling import SampleCounts

DEFAULT_DEGREE_CONSTANT = 0.45
DEFAULT_THRESHOLD_CONSTANT = 0.5
_BOUNDARY_RTOL = 1e-12
_LOG_FACT = np.array([math.lgamma(k + 1.0) for k in range(MAX_DEGREE + 1)])

CHEBYSHEV = "chebyshev"
COUNT_DISTINCT = "count-distinct"


def default_degree(n: int, constant: float = DEFAULT_DEGREE_CONSTANT) -> int:
    """``floor(constant * ln n)``, at least 1."""
    return max(1, math.floor(constant * math.log(n)))


@dataclass(frozen=True)
class IntervalEstimate:
    j: int
    left: float
    right: float
    mode: str
    estimate: float
    occupancy: int

    @property
    def capacity(self) -> float:
        """``1 / left``: most elements an interval can hold."""
        return 1.0 / self.left

    @property
    def sanity_ok(self) -> bool:
        return 0.0 <= self.estimate <= self.capacity * (1.0 + _BOUNDARY_RTOL)


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    clamped_estimate: float
    base_used: float
    degree: int
    distinct_seen: int
    n: int
    sample_size: float
    intervals: tuple[IntervalEstimate, ...] = field(repr=False)

    @property
    def failing(self) -> list[int]:
        return [iv.j for iv in self.intervals if not iv.sanity_ok]

    @property
    def failing_fraction(self) -> float:
        """Failing intervals over intervals holding at least one seen element."""
        occupied = [iv for iv in self.intervals if iv.occupancy > 0]
        if not occupied:
            return 0.0
        return sum(not iv.sanity_ok for iv in occupied) / len(occupied)

    def substituted_estimate(self) -> float:
        """Total with each failing interval replaced by its distinct count (diagnostics only)."""
        return math.fsum(iv.estimate if iv.sanity_ok else iv.occupancy for iv in self.intervals)


def clamp_estimate(estimate: float, distinct_seen: int, n: int) -> float:
    return float(min(n, max(distinct_seen, estimate)))


def sanity_check(intervals) -> tuple[bool, list[int]]:
    """All intervals have ``0 <= S_j <= 1/l_j``; also returns the failing indices."""
    bad = [iv.j for iv in intervals if not iv.sanity_ok]
    return not bad, bad


def top_interval(n: int, b: float) -> int:
    """``floor(log_b n)``, robust to rounding in the logarithm."""
    j = max(0, math.floor(math.log(n) / math.log(b)))
    while b ** (j + 1) <= n * (1 + _BOUNDARY_RTOL):
        j += 1
    while j > 0 and b ** j > n * (1 + _BOUNDARY_RTOL):
        j -= 1
    return j


def interval_index(pred: np.ndarray, n: int, b: float) -> np.ndarray:
    """``floor(log_b(n * pred))`` clamped to ``[0, floor(log_b n)]``.

    Intervals are half-open ``[b^j/n, b^(j+1)/n)``: a prediction on a boundary
    (up to a relative 1e-12) belongs to the higher interval.
    """
    x = np.maximum(np.asarray(pred, dtype=np.float64) * n, 1.0)
    j = np.floor(np.log(x) / math.log(b)).astype(np.int64)
    j = np.maximum(j, 0)
    tol = x * (1 + _BOUNDARY_RTOL)
    j += b ** (j + 1.0) <= tol
    j -= (j > 0) & (b ** j.astype(np.float64) > tol)
    return np.minimum(j, top_interval(n, b))


def _check_counts(counts: SampleCounts) -> float:
    if counts.total == 0:
        raise ValueError("no samples: the estimators need N >= 1")
    return counts.effective_size


def learned_estimate(counts: SampleCounts, pred: Predictor | np.ndarray, n: int, b: float,
                     L: int, threshold: float = DEFAULT_THRESHOLD_CONSTANT) -> EstimateReport:
    """Interval-partitioned Chebyshev estimate of the support size.

    Parameters
    ----------
    counts : SampleCounts
        Observed counts; ``counts.effective_size`` is used as ``N``.
    pred : Predictor or ndarray
        Predictor, or predictions aligned with ``counts.ids``.
    n : int
        Minimum-mass parameter (every nonzero probability is at least ``1/n``).
    b : float
        Interval base, ``b > 1``.
    L : int
        Polynomial degree.
    threshold : float
        Intervals with ``b^j/n <= threshold * ln(n) / N`` use the polynomial
        correction; the rest count distinct elements.

    Returns
    -------
    EstimateReport
    """
    N = _check_counts(counts)
    if not b > 1.0:
        raise ValueError("base b must exceed 1")
    poly = shifted_polynomial(L, b * b)
    values = pred.predict(counts.ids) if isinstance(pred, Predictor) else np.asarray(pred, float)
    j = interval_index(np.maximum(values, 1.0 / n), n, b)
    top = top_interval(n, b)
    js = np.arange(top + 1)
    powers = float(b) ** js.astype(np.float64)
    cheb = powers / n <= threshold * math.log(n) / N
    log_scale = math.log(n) - js * math.log(b)
    sums, occ = backend.interval_sums(counts.counts, j, cheb, poly.log_abs, poly.sign, _LOG_FACT,
                                      log_scale, math.log(N), top + 1)
    intervals = tuple(
        IntervalEstimate(int(q), float(powers[q] / n), float(powers[q] * b / n),
                         CHEBYSHEV if cheb[q] else COUNT_DISTINCT, float(sums[q]), int(occ[q]))
        for q in range(top + 1)
    )
    total = math.fsum(sums)
    return EstimateReport(total, clamp_estimate(total, counts.distinct, n), float(b), L,
                          counts.distinct, n, N, intervals)


@dataclass(frozen=True)
class BaseSelection:
    b_final: float
    b_min: float | None
    trace: tuple[tuple[float, float], ...]   # (base, failing fraction)
    degenerate: bool = False


def select_base(counts: SampleCounts, pred: Predictor | np.ndarray, n: int, L: int,
                b_start: int = 2, b_max: int | None = None,
                threshold: float = DEFAULT_THRESHOLD_CONSTANT) -> BaseSelection:
    """Smallest integer base ``>= b_start`` whose intervals all pass, doubled.

    If nothing up to ``b_max`` (default ``n``) passes, the single-interval base
    ``n + 1`` is returned with ``degenerate=True``.
    """
    b_max = n if b_max is None else b_max
    values = pred.predict(counts.ids) if isinstance(pred, Predictor) else np.asarray(pred, float)
    trace = []
    for b in range(int(b_start), int(b_max) + 1):
        frac = learned_estimate(counts, values, n, b, L, threshold).failing_fraction
        trace.append((float(b), frac))
        if frac == 0.0:
            return BaseSelection(2.0 * b, float(b), tuple(trace))
    warnings.warn("no base passed the sanity check; falling back to a single interval",
                  RuntimeWarning, stacklevel=2)
    return BaseSelection(float(n + 1), None, tuple(trace), degenerate=True)


def wy_estimate(counts: SampleCounts, n: int, L: int,
                threshold: float = DEFAULT_THRESHOLD_CONSTANT) -> EstimateReport:
    """Single-interval Chebyshev estimate without a predictor.

    The polynomial is small on ``[1/n, threshold * ln(n) / N]``.  When that
    interval reaches past probability 1 the sample is large enough that the
    distinct count is returned instead.
    """
    N = _check_counts(counts)
    top_p = threshold * math.log(n) / N
    j = np.zeros(counts.distinct, dtype=np.int64)
    if top_p >= 1.0:
        iv = IntervalEstimate(0, 1.0 / n, 1.0, COUNT_DISTINCT, float(counts.distinct), counts.distinct)
        est = float(counts.distinct)
        return EstimateReport(est, clamp_estimate(est, counts.distinct, n), math.nan, L,
                              counts.distinct, n, N, (iv,))
    R = max(top_p * n, 1.0 + 1e-6)
    poly = shifted_polynomial(L, R)
    sums, occ = backend.interval_sums(counts.counts, j, np.array([True]), poly.log_abs, poly.sign,
                                      _LOG_FACT, np.array([math.log(n)]), math.log(N), 1)
    est = float(sums[0])
    iv = IntervalEstimate(0, 1.0 / n, R / n, CHEBYSHEV, est, int(occ[0]))
    return EstimateReport(est, clamp_estimate(est, counts.distinct, n), math.nan, L,
                          counts.distinct, n, N, (iv,))


def cr_estimate(counts: SampleCounts, pred: Predictor | np.ndarray, n: int) -> float:
    """Mean of ``1 / max(pred(i), 1/n)`` over all sample occurrences."""
    if counts.total == 0:
        raise ValueError("no samples")
    values = pred.predict(counts.ids) if isinstance(pred, Predictor) else np.asarray(pred, float)
    inv = 1.0 / np.maximum(values, 1.0 / n)
    return math.fsum(counts.counts * inv) / counts.total


def naive_estimate(counts: SampleCounts) -> int:
    return counts.distinct
