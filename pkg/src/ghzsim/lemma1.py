"""Mixture-of-uniforms sampler whose output is exactly uniform on [0, 1].

The construction: pick an integer i >= 0 with probability 2^-(i+1) and a
uniform sign r; draw two independent uniforms on [0, 2^-i] (r = -1) or on
[1 - 2^-i, 1] (r = +1) and return their average. Each component's density is
a triangle of width 2^-i pinned to the matching end of [0, 1], and the
geometric mixture of the triangles sums to the constant density 1.

The induction step of the angle-sampling protocol relies on this identity:
the averaged pair is the normalized position of the combined angle inside its
target arc, so uniformity here is what makes the recursion close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .randomness import geometric_index, sign_bit


@dataclass(frozen=True)
class MixtureIndex:
    """Component label: geometric index i >= 0 and a side r in {-1, +1}."""

    i: int
    r: int

    def __post_init__(self):
        if self.i < 0:
            raise ValueError("mixture index must be >= 0")
        if self.r not in (-1, 1):
            raise ValueError("mixture side must be -1 or +1")


def sample_mixture_index(stream: np.random.Generator) -> MixtureIndex:
    """Draw (i, r): i geometric with P(i=m) = 2^-(m+1) via exact fair coin
    flips (uncapped), r an independent uniform sign."""
    return MixtureIndex(i=geometric_index(stream), r=sign_bit(stream))


def sample_component_pair(idx: MixtureIndex, stream: np.random.Generator) -> tuple[float, float]:
    """Two independent uniforms on [0, 2^-i] (r=-1) or [1 - 2^-i, 1] (r=+1).

    For i beyond ~1074 the interval width underflows to 0 and the samples
    collapse to the endpoint; probability < 2^-1000, accepted.
    """
    width = math.ldexp(1.0, -idx.i)
    if idx.r == -1:
        t1 = width * stream.random()
        t2 = width * stream.random()
    else:
        t1 = 1.0 - width * stream.random()
        t2 = 1.0 - width * stream.random()
    return t1, t2


def lemma1_sample(stream: np.random.Generator) -> float:
    """One draw of the mixture: the averaged pair (t1 + t2) / 2, uniform on [0, 1]."""
    idx = sample_mixture_index(stream)
    t1, t2 = sample_component_pair(idx, stream)
    return 0.5 * (t1 + t2)


def component_density(i: int, r: int, x: float) -> float:
    """Density at x of the averaged pair for a fixed component (i, r).

    For r = -1 this is the triangle 2^(2(i+1)) * x on [0, 2^-(i+1)] and
    2^(i+2) - 2^(2(i+1)) * x on [2^-(i+1), 2^-i], zero elsewhere; r = +1 is
    the mirror image about x = 1/2.
    """
    if i < 0:
        raise ValueError("component index must be >= 0")
    if r not in (-1, 1):
        raise ValueError("component side must be -1 or +1")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if r == 1:
        return component_density(i, -1, 1.0 - x)
    width = math.ldexp(1.0, -i)
    slope = math.ldexp(1.0, 2 * (i + 1))
    if x <= 0.5 * width:
        return slope * x
    if x <= width:
        return math.ldexp(1.0, i + 2) - slope * x
    return 0.0


def component_cdf(i: int, r: int, x: float) -> float:
    """Closed-form CDF of the (i, r) component; used as a KS reference."""
    if r not in (-1, 1):
        raise ValueError("component side must be -1 or +1")
    if r == 1:
        return 1.0 - component_cdf(i, -1, 1.0 - x)
    width = math.ldexp(1.0, -i)
    if x <= 0.0:
        return 0.0
    if x >= width:
        return 1.0
    half_peak = math.ldexp(1.0, 2 * i + 1)  # 2^(2i+1)
    if x <= 0.5 * width:
        return half_peak * x * x
    return 1.0 - half_peak * (width - x) * (width - x)


def mixture_density(x: float, i_max: int) -> float:
    """Mixture density truncated at component i_max.

    Sum over i <= i_max of 2^-(i+1) * (component_density(i,-1,x) +
    component_density(i,+1,x)) / 2. Components with i > i_max have no support
    strictly inside (2^-i_max, 1 - 2^-i_max), so the truncated sum equals 1
    there exactly.
    """
    if i_max < 0:
        raise ValueError("i_max must be >= 0")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    terms = []
    for i in range(i_max + 1):
        w = math.ldexp(1.0, -(i + 1))
        terms.append(w * 0.5 * (component_density(i, -1, x) + component_density(i, 1, x)))
    return math.fsum(terms)


def density_grid_rows(i_max: int, points: int) -> list[tuple[float, float, int]]:
    """(x, density, i_max) rows on an even interior grid, for CSV dumps."""
    xs = np.linspace(0.0, 1.0, points + 2)[1:-1]
    return [(float(x), mixture_density(float(x), i_max), i_max) for x in xs]
