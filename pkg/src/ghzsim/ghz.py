"""Classical simulation of equatorial product measurements on the n-party
GHZ state, using shared randomness plus a finite expected number of
communicated bits.

One run works in stages: the first n-1 players feed their angles into two
independent arc-sampling runs at half-width pi/2, giving player n two angles
theta_1, theta_2 uniform on the arc around the (wrapped) prefix angle sum.
Player n lifts each to a unit vector uniform on the hemisphere around the
embedded arc center with its private latitude draws, then answers with the
two-vector sign rule against its own reflected measurement vector, corrected
by the product of the shared sign bits. Players 1..n-1 output their shared
sign bits directly. The product of all outputs has expectation equal to the
cosine of the full angle sum while every proper subset product is unbiased.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backends
from .geometry import dot, embed_equatorial, hemisphere_point, sgn
from .randomness import GhzSharedRandomness, resolve_seed
from .stats import CostSummary, EstimatorResult, cost_summary, parity_estimator
from .uvs import expected_cost_exact, uvs_run

UVS_PRECISION = 1  # both inner sampling runs use half-width pi/2


@dataclass(frozen=True)
class MeasurementSetting:
    """Measurement angles alpha_1 .. alpha_n, one per player, n >= 2."""

    angles: tuple[float, ...]

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.angles)
        if len(angles) < 2:
            raise ValueError("the protocol needs at least two players")
        if not all(math.isfinite(a) for a in angles):
            raise ValueError("all measurement angles must be finite")
        object.__setattr__(self, "angles", angles)

    @property
    def n(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class RunRecord:
    """Outcome vector (entries are +/-1, player order) and the exact number
    of bits communicated in the run."""

    outcomes: tuple[int, ...]
    bits_used: int


def toner_bacon_sign(l1: np.ndarray, l2: np.ndarray, a: np.ndarray) -> int:
    """Sign of the summed projections of two unit vectors onto a third.

    For l1, l2 uniform on the closed hemisphere around a unit vector d, the
    expectation of the result is dot(d, a) exactly; this converts the
    hemisphere pair into the desired cosine correlation.
    """
    return sgn(dot(l1, a) + dot(l2, a))


def simulate_once(setting: MeasurementSetting, shared: GhzSharedRandomness) -> RunRecord:
    """One protocol run with explicitly supplied shared randomness.

    Deterministic given (setting, shared). Kept in lockstep with the batch
    backends, which replay exactly this computation.
    """
    if shared.n != setting.n:
        raise ValueError(f"randomness for n={shared.n} used with an n={setting.n} setting")
    prefix = setting.angles[:-1]
    theta1, tr1 = uvs_run(prefix, UVS_PRECISION, shared.tree1)
    theta2, tr2 = uvs_run(prefix, UVS_PRECISION, shared.tree2)
    lam1 = hemisphere_point(theta1, shared.u1)
    lam2 = hemisphere_point(theta2, shared.u2)
    a_n = embed_equatorial(setting.angles[-1], negate_second=True)
    b_prod = 1
    for b in shared.signs:
        b_prod *= b
    o_n = b_prod * toner_bacon_sign(lam1, lam2, a_n)
    return RunRecord(outcomes=(*shared.signs, o_n), bits_used=tr1.total_bits + tr2.total_bits)


def expected_bits(n: int) -> int:
    """Exact expected communication of one run: two inner runs over n-1
    players at precision 1, i.e. 2 * (n*n - 3) bits for n >= 2."""
    if n < 2:
        raise ValueError("the protocol needs at least two players")
    return 2 * expected_cost_exact(n - 1, UVS_PRECISION)


@dataclass(frozen=True)
class RunEstimate:
    """Aggregated Monte Carlo estimates over N independent runs."""

    n: int
    angles: tuple[float, ...]
    seed: int
    N: int
    correlator: EstimatorResult
    subset_correlators: dict[tuple[int, ...], EstimatorResult]
    bits: CostSummary

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "angles": list(self.angles),
            "seed": self.seed,
            "N": self.N,
            "correlator": self.correlator.mean,
            "stderr": self.correlator.stderr,
            "subset_correlators": {
                ",".join(str(i) for i in subset): {"mean": est.mean, "stderr": est.stderr}
                for subset, est in sorted(self.subset_correlators.items())
            },
            "mean_bits": self.bits.mean,
            "max_bits": self.bits.max,
        }


def estimate_run(setting: MeasurementSetting, N: int, seed: int | None = None,
                 subsets: tuple = (), workers: int = 1,
                 backend: str = "auto") -> RunEstimate:
    """Run the protocol N times and estimate correlators and bit costs.

    Randomness is derived from (seed, batch index) in fixed-size batches and
    results reduce in batch order, so the estimate is reproducible and
    independent of the worker count.
    """
    if N < 1:
        raise ValueError("need at least one run")
    seed = resolve_seed(seed)
    outcomes, bits = backends.run_ghz_batches(setting.angles, N, seed,
                                              workers=workers, backend=backend)
    correlator = parity_estimator(outcomes, range(1, setting.n + 1))
    subset_correlators = {}
    for subset in subsets:
        key = tuple(sorted(int(i) for i in subset))
        subset_correlators[key] = parity_estimator(outcomes, key)
    return RunEstimate(
        n=setting.n,
        angles=setting.angles,
        seed=seed,
        N=N,
        correlator=correlator,
        subset_correlators=subset_correlators,
        bits=cost_summary(bits),
    )
