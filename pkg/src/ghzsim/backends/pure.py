"""Pure-Python batch backend: loops over the single-run reference functions.

This is the semantic ground truth. The compiled backend mirrors it draw for
draw and expression for expression; any divergence is a bug there, not here.
"""

from __future__ import annotations

import numpy as np

from ..ghz import MeasurementSetting, simulate_once
from ..lemma1 import lemma1_sample
from ..randomness import GhzSharedRandomness, RandTree
from ..uvs import uvs_run


def uvs_batch(stream: np.random.Generator, angles: tuple, k: int,
              count: int) -> tuple[np.ndarray, np.ndarray]:
    """`count` arc-sampling runs: (output angles float64, total bits int64)."""
    n = len(angles)
    thetas = np.empty(count, dtype=np.float64)
    bits = np.empty(count, dtype=np.int64)
    for i in range(count):
        rt = RandTree.sample(n, stream)
        theta, transcript = uvs_run(angles, k, rt)
        thetas[i] = theta
        bits[i] = transcript.total_bits
    return thetas, bits


def ghz_batch(stream: np.random.Generator, angles: tuple,
              count: int) -> tuple[np.ndarray, np.ndarray]:
    """`count` protocol runs: (outcome matrix (count, n) int8, bits int64)."""
    setting = MeasurementSetting(angles)
    n = setting.n
    outcomes = np.empty((count, n), dtype=np.int8)
    bits = np.empty(count, dtype=np.int64)
    for i in range(count):
        shared = GhzSharedRandomness.sample(n, stream)
        record = simulate_once(setting, shared)
        outcomes[i, :] = record.outcomes
        bits[i] = record.bits_used
    return outcomes, bits


def lemma1_batch(stream: np.random.Generator, count: int) -> np.ndarray:
    """`count` draws of the halved two-point mixture sum, float64."""
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = lemma1_sample(stream)
    return out
