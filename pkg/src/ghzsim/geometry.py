"""Angles on the circle, arcs, and the unit-sphere constructions used by the protocol.

Angles are plain floats in radians; the canonical representative of an angle
lives in [0, 2*pi). Arcs are connected subsets of the circle given by a center
and a half-width. Unit vectors on S^2 are numpy arrays of shape (3,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(x: float) -> float:
    """Reduce an angle to its canonical representative in [0, 2*pi).

    Periodic by construction: wrap_angle(x + 2*pi*m) == wrap_angle(x) up to
    the float rounding of the input itself. Rejects non-finite input.
    """
    if not math.isfinite(x):
        raise ValueError(f"angle must be finite, got {x!r}")
    r = math.fmod(x, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        r -= TWO_PI
    return r


def angular_distance(a: float, b: float) -> float:
    """Shortest distance between two angles along the circle, in [0, pi]."""
    d = wrap_angle(a - b)
    if d > math.pi:
        d = TWO_PI - d
    return d


@dataclass(frozen=True)
class Arc:
    """Connected arc {center + x : |x| <= half_width} on the circle.

    The center is stored canonically; boundaries are closed. half_width must
    lie in (0, pi], so an arc covers at most the full circle.
    """

    center: float
    half_width: float

    def __post_init__(self):
        if not (0.0 < self.half_width <= math.pi):
            raise ValueError(f"half_width must be in (0, pi], got {self.half_width}")
        object.__setattr__(self, "center", wrap_angle(self.center))

    def contains(self, t: float) -> bool:
        return angular_distance(t, self.center) <= self.half_width

    @property
    def width(self) -> float:
        return 2.0 * self.half_width

    def rel_position(self, t: float) -> float:
        """Map an angle inside the arc to [0, 1], measured from the left edge.

        Wrap-aware; the caller is responsible for membership (see
        stats.ks_uniform_arc for the checked variant).
        """
        d = wrap_angle(t - self.center)
        if d > math.pi:
            d -= TWO_PI  # signed offset in (-pi, pi]
        r = (d + self.half_width) / self.width
        return min(max(r, 0.0), 1.0)


def arc_contains(a: Arc, t: float) -> bool:
    """True iff the canonical angular distance from t to a.center is <= a.half_width."""
    return a.contains(t)


def sgn(x: float) -> int:
    """Sign with range {-1, +1}; the measure-zero tie at 0 resolves to +1."""
    if not math.isfinite(x):
        raise ValueError(f"sgn of non-finite value {x!r}")
    return 1 if x >= 0.0 else -1


def embed_equatorial(t: float, negate_second: bool = False) -> np.ndarray:
    """Embed a circle angle as a unit vector on the equator of S^2.

    Returns (cos t, sin t, 0), or (cos t, -sin t, 0) when negate_second is
    set (the reflected form used for the last player's measurement vector).
    """
    s = -math.sin(t) if negate_second else math.sin(t)
    return np.array([math.cos(t), s, 0.0])


def hemisphere_point(theta: float, u: float) -> np.ndarray:
    """Unit vector with longitude theta and z-coordinate u.

    With phi = arccos(u) this is the standard spherical parametrization
    (cos theta sin phi, sin theta sin phi, cos phi). For theta uniform on an
    arc of half-width pi/2 centered at c and u uniform on [-1, 1], the result
    is uniform on the closed hemisphere around embed_equatorial(c).

    Parameters
    ----------
    theta : float
        Longitude, radians.
    u : float
        Latitude variable in [-1, 1]; becomes the z-coordinate.
    """
    if not -1.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [-1, 1], got {u}")
    sin_phi = math.sqrt(max(0.0, 1.0 - u * u))
    return np.array([math.cos(theta) * sin_phi, math.sin(theta) * sin_phi, u])


def hemisphere_points(thetas: np.ndarray, us: np.ndarray) -> np.ndarray:
    """Vectorized hemisphere_point; returns an array of shape (N, 3)."""
    thetas = np.asarray(thetas, dtype=float)
    us = np.asarray(us, dtype=float)
    if np.any(us < -1.0) or np.any(us > 1.0):
        raise ValueError("u values must lie in [-1, 1]")
    sin_phi = np.sqrt(np.maximum(0.0, 1.0 - us * us))
    return np.stack([np.cos(thetas) * sin_phi, np.sin(thetas) * sin_phi, us], axis=-1)


def dot(a: np.ndarray, b: np.ndarray) -> float:
    # fixed evaluation order keeps the pure path bit-identical to the kernels
    return float(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])


def norm3(a: np.ndarray) -> float:
    return math.sqrt(float(a[0]) ** 2 + float(a[1]) ** 2 + float(a[2]) ** 2)
