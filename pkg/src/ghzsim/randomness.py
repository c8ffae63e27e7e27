"""Shared-randomness plumbing: labeled streams, exact coin-flip sampling, RandTree.

All protocol randomness is consumed as a sequence of doubles from a
counter-seeded PCG64 stream, so that the compiled kernels and the pure-Python
path draw identical values in identical order. Streams are addressed by
(seed, label, index) through SeedSequence spawn keys; distinct addresses give
statistically independent streams and every party holding the seed derives
the same values (public-coin model).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

DEFAULT_SEED = 0
SEED_ENV_VAR = "GHZSIM_SEED"

# Monte Carlo work is split into fixed-size batches; batch index i always maps
# to stream (seed, label, i) and results reduce in batch order, so worker
# count cannot change any output.
BATCH_SIZE = 1 << 15

# Stream labels (first spawn-key component).
STREAM_UVS = 1
STREAM_GHZ = 2
STREAM_LEMMA1 = 3
STREAM_ANGLES = 4
STREAM_HEMISPHERE = 5
STREAM_TEST = 9


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream addressed by (seed, *key)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def resolve_seed(seed: int | None) -> int:
    """Explicit seed, else the GHZSIM_SEED environment override, else 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def geometric_index(stream: np.random.Generator) -> int:
    """Number of tails before the first head in fair coin flips: P(j) = 2^-(j+1).

    Exact: each double carries 53 fair coin flips (its binary expansion), and
    the count of leading zero flips is read off the exponent. A zero double
    means 53 tails; continue with the next double.
    """
    j = 0
    while True:
        u = stream.random()
        if u > 0.0:
            return j - math.frexp(u)[1]
        j += 53


def sign_bit(stream: np.random.Generator) -> int:
    """Uniform sign in {-1, +1} from one double."""
    return 1 if stream.random() < 0.5 else -1


def uniform_angle(stream: np.random.Generator) -> float:
    return 2.0 * math.pi * stream.random()


def uniform_pm1(stream: np.random.Generator) -> float:
    return 2.0 * stream.random() - 1.0


def random_angles(seed: int, count: int, *tag: int) -> tuple[float, ...]:
    """Reproducible measurement angles from the angle stream at (seed, *tag)."""
    stream = make_stream(seed, STREAM_ANGLES, *tag)
    return tuple(uniform_angle(stream) for _ in range(count))


@dataclass(frozen=True)
class RandTree:
    """Public per-run randomness for one UVS invocation over n players.

    Internal node at level m in {2..n} holds a geometric index j_m and a sign
    b_m; every player leaf holds a uniform angle delta. Values are drawn once,
    in a fixed documented order, and then read by all parties, so the same
    (seed, path) always yields the same value and distinct paths are fed by
    disjoint draws.

    js, bs are stored in draw order, level n first; deltas in player order.
    """

    js: tuple[int, ...]
    bs: tuple[int, ...]
    deltas: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.deltas)

    def j_at(self, level: int) -> int:
        """Geometric index at internal node level m, 2 <= m <= n."""
        return self.js[self.n - level]

    def b_at(self, level: int) -> int:
        return self.bs[self.n - level]

    def delta_of(self, player: int) -> float:
        """Leaf offset of a player (1-based)."""
        return self.deltas[player - 1]

    @classmethod
    def sample(cls, n: int, stream: np.random.Generator) -> "RandTree":
        """Draw a tree for n players. Draw order (mirrored by the compiled
        kernels): (j_m, b_m) for m = n down to 2, then delta_1 .. delta_n."""
        if n < 1:
            raise ValueError("RandTree needs n >= 1 players")
        js = []
        bs = []
        for _ in range(n - 1):
            js.append(geometric_index(stream))
            bs.append(sign_bit(stream))
        deltas = [uniform_angle(stream) for _ in range(n)]
        return cls(js=tuple(js), bs=tuple(bs), deltas=tuple(deltas))


@dataclass(frozen=True)
class GhzSharedRandomness:
    """Everything one simulation run consumes besides the measurement angles.

    Two independent RandTrees (one per UVS run over the first n-1 players),
    the shared sign bits b_1 .. b_{n-1}, and the last player's private
    latitude variables u1, u2 on [-1, 1].
    """

    tree1: RandTree
    tree2: RandTree
    signs: tuple[int, ...]
    u1: float
    u2: float

    @property
    def n(self) -> int:
        return len(self.signs) + 1

    @classmethod
    def sample(cls, n: int, stream: np.random.Generator) -> "GhzSharedRandomness":
        """Draw order (mirrored by the compiled kernels): tree1, tree2,
        b_1 .. b_{n-1}, u1, u2. The two trees use disjoint positions of the
        run's stream and are therefore independent."""
        if n < 2:
            raise ValueError("the simulation protocol needs n >= 2 players")
        tree1 = RandTree.sample(n - 1, stream)
        tree2 = RandTree.sample(n - 1, stream)
        signs = tuple(sign_bit(stream) for _ in range(n - 1))
        u1 = uniform_pm1(stream)
        u2 = uniform_pm1(stream)
        return cls(tree1=tree1, tree2=tree2, signs=signs, u1=u1, u2=u2)

    @classmethod
    def from_seed(cls, n: int, seed: int, run_index: int = 0) -> "GhzSharedRandomness":
        return cls.sample(n, make_stream(seed, STREAM_GHZ, run_index))
