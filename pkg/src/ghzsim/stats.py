"""Estimators and tests used to validate the protocol against exact predictions:
parity correlators with standard errors, KS uniformity tests on arcs, cost
summaries with exact integer accounting, and the hemisphere centroid check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import TWO_PI, Arc, wrap_angle

KOLMOGOROV_SERIES_TERMS = 100


class ArcMembershipError(ValueError):
    """A sample handed to ks_uniform_arc lies outside the arc."""


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    stderr: float
    n: int


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class CostSummary:
    mean: float
    stderr: float
    max: int
    histogram: dict[int, int]
    n: int
    total: int


@dataclass(frozen=True)
class CentroidResult:
    deviation: tuple[float, float, float]
    tolerance: float
    passed: bool


def parity_estimator(samples, subset) -> EstimatorResult:
    """Mean and stderr of the product of outcomes over a player subset.

    samples: array-like of shape (N, n) with entries in {-1, +1};
    subset: nonempty iterable of 1-based player indices.
    """
    arr = np.asarray(samples)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("need a nonempty (N, n) sample array")
    idx = sorted(set(int(i) for i in subset))
    if not idx:
        raise ValueError("subset must be nonempty")
    if idx[0] < 1 or idx[-1] > arr.shape[1]:
        raise ValueError(f"subset {idx} out of range for n={arr.shape[1]}")
    cols = [i - 1 for i in idx]
    prods = arr[:, cols].prod(axis=1).astype(np.int64)
    n = prods.shape[0]
    mean = float(prods.mean())
    if n > 1:
        # products are +/-1, so the second moment is exactly 1
        var = (n - n * mean * mean) / (n - 1)
        stderr = math.sqrt(max(0.0, var) / n)
    else:
        stderr = 0.0
    return EstimatorResult(mean=mean, stderr=stderr, n=n)


def ks_statistic_uniform01(samples01: np.ndarray) -> float:
    """Sup-distance between the empirical CDF and the uniform CDF on [0, 1]."""
    u = np.sort(np.asarray(samples01, dtype=float))
    n = u.shape[0]
    if n == 0:
        raise ValueError("need at least one sample")
    grid = np.arange(1, n + 1, dtype=float) / n
    d_plus = float(np.max(grid - u))
    d_minus = float(np.max(u - (grid - 1.0 / n)))
    return max(d_plus, d_minus, 0.0)


def kolmogorov_pvalue(d: float, n: int) -> float:
    """Asymptotic Kolmogorov tail probability Q(sqrt(n) * d), 100-term series.

    Adequate for n >= 1e3, which is the regime every caller works in.
    """
    lam = math.sqrt(n) * d
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, KOLMOGOROV_SERIES_TERMS + 1):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 == 1 else -term
    return min(1.0, max(0.0, 2.0 * total))


def ks_uniform01(samples01) -> KsResult:
    """One-sample KS test of values in [0, 1] against the uniform CDF."""
    arr = np.asarray(samples01, dtype=float)
    d = ks_statistic_uniform01(arr)
    return KsResult(statistic=d, p_value=kolmogorov_pvalue(d, arr.shape[0]))


def arc_membership_fraction(samples, arc: Arc) -> float:
    """Fraction of angle samples inside the closed arc."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("need a nonempty 1-d array of angles")
    d = np.mod(arr - arc.center, TWO_PI)
    d = np.where(d > math.pi, d - TWO_PI, d)
    return float(np.mean(np.abs(d) <= arc.half_width))


def ks_uniform_arc(samples, arc: Arc) -> KsResult:
    """KS test of angle samples against the uniform distribution on an arc.

    Every sample must lie inside the (closed) arc; an outside sample raises
    ArcMembershipError, which is itself a protocol-failure signal.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("need a nonempty 1-d array of angles")
    d = np.mod(arr - arc.center, TWO_PI)
    d = np.where(d > math.pi, d - TWO_PI, d)  # signed offsets in (-pi, pi]
    outside = np.abs(d) > arc.half_width
    if np.any(outside):
        bad = float(arr[np.argmax(outside)])
        raise ArcMembershipError(
            f"{int(np.count_nonzero(outside))} samples outside arc "
            f"(first: {bad!r}, center={arc.center!r}, half_width={arc.half_width!r})"
        )
    rel = np.clip((d + arc.half_width) / arc.width, 0.0, 1.0)
    return ks_uniform01(rel)


def cost_summary(bit_counts) -> CostSummary:
    """Summary statistics of exact per-run bit counts.

    Accumulation is integer-exact: mean * n reproduces the integer total.
    """
    arr = np.asarray(bit_counts)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("need a nonempty collection of bit counts")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("bit counts must be integers")
    n = int(arr.shape[0])
    total = int(arr.sum(dtype=np.int64))
    mean = total / n
    if n > 1:
        sq = int((arr.astype(np.int64) ** 2).sum(dtype=np.int64))
        var = (sq - n * mean * mean) / (n - 1)
        stderr = math.sqrt(max(0.0, var) / n)
    else:
        stderr = 0.0
    values, counts = np.unique(arr, return_counts=True)
    hist = {int(v): int(c) for v, c in zip(values, counts)}
    return CostSummary(mean=mean, stderr=stderr, max=int(arr.max()), histogram=hist, n=n, total=total)


def hemisphere_centroid(samples, d: np.ndarray) -> CentroidResult:
    """Per-coordinate deviation of the sample mean from d/2.

    The centroid of a uniformly sampled unit hemisphere sits at half its axis
    vector; pass/fail uses the 5/sqrt(N) tolerance per coordinate.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] == 0:
        raise ValueError("need a nonempty (N, 3) array of unit vectors")
    n = arr.shape[0]
    mean = arr.mean(axis=0)
    dev = np.abs(mean - 0.5 * np.asarray(d, dtype=float))
    tol = 5.0 / math.sqrt(n)
    return CentroidResult(
        deviation=(float(dev[0]), float(dev[1]), float(dev[2])),
        tolerance=tol,
        passed=bool(np.all(dev <= tol)),
    )


def report_row(test_name: str, n, k_or_subset, count: int, statistic: float,
               target: float, tolerance: float, passed: bool) -> tuple:
    """One CSV report row: (test_name, n, k_or_subset, N, statistic, target, tolerance, pass)."""
    return (test_name, n, k_or_subset, count, statistic, target, tolerance, passed)
