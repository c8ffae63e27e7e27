"""Exact reference predictions for equatorial product measurements on the
n-party GHZ state.

Two independent routes compute the outcome distribution: a closed form in the
sum of the measurement angles, and a full Born-rule tensor contraction of the
state with the measurement eigenbases. Agreement of the two is itself a
checked invariant; simulation output is validated against either.

Outcome encoding: outcomes are +/-1 per player. An n-player joint outcome is
indexed by an integer whose most significant bit belongs to player 1, with
bit value 0 meaning +1 and bit value 1 meaning -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_MAX_PLAYERS = 20
BORN_MAX_PLAYERS = 12

_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class OutcomeDistribution:
    """A probability vector over the 2**n joint outcomes of n players."""

    n: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one player")
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} probabilities, got shape {p.shape}")
        if np.any(p < -1e-15):
            raise ValueError("negative probability")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities do not sum to 1")
        object.__setattr__(self, "probs", p)

    def sign(self, index: int, player: int) -> int:
        """Outcome of a 1-based player in the joint outcome `index`."""
        bit = (index >> (self.n - player)) & 1
        return 1 - 2 * bit

    def correlator(self, subset=None) -> float:
        """Expectation of the product of outcomes over a 1-based player subset."""
        if subset is None:
            players = range(1, self.n + 1)
        else:
            players = sorted(set(int(i) for i in subset))
            if not players:
                raise ValueError("subset must be nonempty")
            if players[0] < 1 or players[-1] > self.n:
                raise ValueError(f"subset {players} out of range for n={self.n}")
        idx = np.arange(1 << self.n)
        signs = np.ones(1 << self.n)
        for player in players:
            signs = signs * (1 - 2 * ((idx >> (self.n - player)) & 1))
        return float(np.dot(self.probs, signs))

    def outcome_label(self, index: int) -> str:
        """Printable form, player 1 first, e.g. '+-+'."""
        return "".join("+" if self.sign(index, p) == 1 else "-" for p in range(1, self.n + 1))

    def rows(self) -> list[tuple[str, float]]:
        """(outcome label, probability) pairs in index order, for CSV output."""
        return [(self.outcome_label(i), float(self.probs[i])) for i in range(1 << self.n)]


def exact_correlation(angles) -> float:
    """Full n-party correlator: the cosine of the angle sum."""
    return math.cos(math.fsum(float(a) for a in angles))


def exact_distribution(angles) -> OutcomeDistribution:
    """Closed-form outcome distribution.

    Each joint probability is 2**-n * (1 + s * cos(sum of angles)) where s is
    the product of the outcome signs, so only the overall parity of the
    outcome pattern matters.
    """
    alphas = [float(a) for a in angles]
    n = len(alphas)
    if n < 1:
        raise ValueError("need at least one angle")
    if n > EXACT_MAX_PLAYERS:
        raise ValueError(f"n={n} exceeds the supported maximum {EXACT_MAX_PLAYERS}")
    c = math.cos(math.fsum(alphas))
    idx = np.arange(1 << n)
    parity = np.ones(1 << n)
    for player in range(1, n + 1):
        parity = parity * (1 - 2 * ((idx >> (n - player)) & 1))
    probs = math.ldexp(1.0, -n) * (1.0 + parity * c)
    return OutcomeDistribution(n=n, probs=probs)


def _measurement_basis(alpha: float) -> np.ndarray:
    """Eigenvector matrix of the equatorial observable at azimuth alpha.

    Column o (0 for outcome +1, 1 for outcome -1) is the eigenvector of
    cos(alpha) X + sin(alpha) Y with eigenvalue (-1)**o.
    """
    phase = complex(math.cos(alpha), math.sin(alpha))
    return _SQRT_HALF * np.array([[1.0, 1.0], [phase, -phase]], dtype=complex)


def born_rule_distribution(angles) -> OutcomeDistribution:
    """Outcome distribution from first principles: amplitudes of the GHZ state
    in the product of the single-player measurement eigenbases.

    Kept deliberately independent of exact_distribution; the two must agree
    to near machine precision and the acceptance checks compare them.
    """
    alphas = [float(a) for a in angles]
    n = len(alphas)
    if n < 1:
        raise ValueError("need at least one angle")
    if n > BORN_MAX_PLAYERS:
        raise ValueError(f"n={n} exceeds the supported maximum {BORN_MAX_PLAYERS}")
    state = np.zeros((2,) * n, dtype=complex)
    state[(0,) * n] = _SQRT_HALF
    state[(1,) * n] = _SQRT_HALF
    for axis in range(n):
        basis = _measurement_basis(alphas[axis])
        # amplitude[o, ...] = sum_s conj(basis[s, o]) * state[s, ...]
        state = np.tensordot(basis.conj().T, state, axes=([1], [axis]))
        state = np.moveaxis(state, 0, axis)
    probs = np.abs(state.reshape(-1)) ** 2
    return OutcomeDistribution(n=n, probs=probs)
