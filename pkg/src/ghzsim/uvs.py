"""Uniform Vector Sampling: one simultaneous message per player lets a referee
output an angle uniform on the arc of half-width pi/2^k centered at the sum of
the players' inputs.

Structure. The n-player instance is a chain of two-way splits: the node at
level m in {2..n} holds public randomness (j_m, b_m) and combines the result
for players 1..m-1 with player m's single-player message, both produced at the
raised precision level of the node below. Flattened, player m >= 2 sends a
base-case message at level k + sum_{l=m..n} (j_l + 1) and player 1 shares
player 2's level. The referee adds the base angles plus per-node shifts
b_m * (pi/2^kappa_m) * (1 - 2^-j_m); averaging the two normalized positions
inside their sub-arcs is exactly the uniform mixture of lemma1, which makes
the final angle uniform on the target arc.

Cost. Each message is sent in exactly bit_length = level bits (the referee
knows every level from the public randomness). Solving the cost recursion
exactly gives n*k + n^2 + n - 2 expected bits; cost_recursion_check verifies
the closed form against the recursion numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import TWO_PI, Arc, wrap_angle
from .randomness import RandTree

# Levels at or beyond this make the arc width degenerate in double precision;
# the base case then degenerates to the grid origin. Reaching it requires a
# j-chain summing past ~1000, probability < 2^-1000.
_LEVEL_CAP = 1024


@dataclass(frozen=True)
class Message:
    """One player's message: the grid index t, sent in exactly bit_length bits."""

    sender: int
    t: int
    bit_length: int

    def __post_init__(self):
        if self.sender < 1:
            raise ValueError("sender is a 1-based player index")
        if self.bit_length < 1:
            raise ValueError("bit_length must be >= 1")
        if not 0 <= self.t < (1 << self.bit_length):
            raise ValueError(f"t={self.t} does not fit in {self.bit_length} bits")


@dataclass(frozen=True)
class Transcript:
    """The n messages of one protocol run, in player order."""

    messages: tuple[Message, ...]

    @property
    def n(self) -> int:
        return len(self.messages)

    @property
    def total_bits(self) -> int:
        return sum(m.bit_length for m in self.messages)

    def to_json_dict(self, run_id: int, k: int) -> dict:
        return {
            "run_id": run_id,
            "n": self.n,
            "k": k,
            "messages": [
                {"sender": m.sender, "t": m.t, "bit_length": m.bit_length}
                for m in self.messages
            ],
            "total_bits": self.total_bits,
        }


def _grid_index(alpha: float, level: int, delta: float) -> int:
    """Smallest natural i with delta + i * pi/2^(level-1) inside the closed arc
    [alpha - pi/2^level, alpha + pi/2^level].

    The step equals the arc width, so of the 2^level grid points exactly one
    lands inside (two when a boundary is hit). Computed in closed form; the
    final choice goes through the same closed-boundary membership predicate a
    brute-force scan would use, so ties and float jitter resolve identically.
    Kept in lockstep with the compiled kernel; edit both together.
    """
    if level >= _LEVEL_CAP:
        return 0
    half = math.ldexp(math.pi, -level)
    step = 2.0 * half
    m = math.ldexp(1.0, level)
    center = wrap_angle(alpha)
    x = wrap_angle(delta - (alpha - half))
    w = m - x / step
    base = math.floor(w)
    n_points = 1 << level
    best = -1
    for off in (0, 1, 2):
        c = (base + off) % n_points
        point = wrap_angle(delta + c * step)
        d = wrap_angle(point - center)
        if d > math.pi:
            d = TWO_PI - d
        if d <= half and (best < 0 or c < best):
            best = c
    if best >= 0:
        return best
    # float pathology: no candidate passed the closed test; take the nearest
    best_d = math.inf
    for off in (0, 1, 2):
        c = (base + off) % n_points
        point = wrap_angle(delta + c * step)
        d = wrap_angle(point - center)
        if d > math.pi:
            d = TWO_PI - d
        if d < best_d:
            best_d = d
            best = c
    return best


def base_message(alpha: float, k: int, delta: float, sender: int = 1) -> Message:
    """Single-player message at precision level k given public offset delta.

    The returned index t < 2^k satisfies: delta + t * pi/2^(k-1) wraps into
    the arc of half-width pi/2^k around alpha, and t is the smallest natural
    with that property (boundary ties go to the smaller index).
    """
    if k < 1:
        raise ValueError("precision level k must be >= 1")
    return Message(sender=sender, t=_grid_index(alpha, k, delta), bit_length=k)


def base_combine(delta: float, msg: Message, k: int) -> float:
    """Referee's base-case output theta = delta + t * pi/2^(k-1), wrapped.

    Over a uniform delta the output is uniform on the arc the sender targeted.
    """
    if k < 1:
        raise ValueError("precision level k must be >= 1")
    if msg.t >= (1 << k):
        raise ValueError(f"message index {msg.t} out of range for level {k}")
    step = 2.0 * math.ldexp(math.pi, -k)
    return wrap_angle(delta + msg.t * step)


def effective_k_schedule(n: int, k: int, j_chain: tuple[int, ...] | list[int]) -> list[int]:
    """Per-player precision levels implied by the j-chain, player order.

    j_chain lists j_m for levels m = n down to 2 (RandTree draw order).
    Player m >= 2 sends at level k + sum_{l=m..n} (j_l + 1); player 1 shares
    player 2's level; for n = 1 the schedule is [k].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(j_chain) != n - 1:
        raise ValueError(f"expected {n - 1} j values for n={n}, got {len(j_chain)}")
    if n == 1:
        return [k]
    # kappa[i] = level of the node covering players 1..(n-i); kappa[0] = k
    kappa = [k]
    for j in j_chain:
        kappa.append(kappa[-1] + j + 1)
    levels = [0] * n
    levels[0] = kappa[n - 1]
    for player in range(2, n + 1):
        levels[player - 1] = kappa[n - player + 1]
    return levels


def uvs_messages(angles: list[float] | tuple[float, ...], k: int, rt: RandTree) -> Transcript:
    """All players' messages for one run.

    Player i's message depends only on angles[i-1] and the shared tree: its
    level comes from the public j-chain and its offset is the player's leaf.
    """
    n = len(angles)
    if n < 1:
        raise ValueError("need at least one player")
    if k < 1:
        raise ValueError("precision level k must be >= 1")
    if rt.n != n:
        raise ValueError(f"RandTree is for {rt.n} players, got {n} angles")
    levels = effective_k_schedule(n, k, rt.js)
    msgs = tuple(
        base_message(angles[i], levels[i], rt.deltas[i], sender=i + 1) for i in range(n)
    )
    return Transcript(messages=msgs)


def uvs_combine(transcript: Transcript, k: int, rt: RandTree) -> float:
    """Referee's output angle for a transcript produced with the same (k, rt).

    Always lands in the closed arc of half-width pi/2^k around the wrapped
    angle sum; over the tree's distribution it is uniform on that arc.
    Kept in lockstep with the compiled kernel; edit both together.
    """
    n = rt.n
    if transcript.n != n:
        raise ValueError(f"transcript has {transcript.n} messages, tree expects {n}")
    levels = effective_k_schedule(n, k, rt.js)
    for msg, lvl, sender in zip(transcript.messages, levels, range(1, n + 1)):
        if msg.sender != sender or msg.bit_length != lvl:
            raise ValueError("transcript does not match the shared randomness")
    theta = base_combine(rt.deltas[0], transcript.messages[0], levels[0])
    for player in range(2, n + 1):
        node_level = levels[player - 1] - rt.j_at(player) - 1  # kappa_m of this node
        base = base_combine(rt.deltas[player - 1], transcript.messages[player - 1], levels[player - 1])
        shift = rt.b_at(player) * math.ldexp(math.pi, -node_level) * (
            1.0 - math.ldexp(1.0, -rt.j_at(player))
        )
        theta = wrap_angle(theta + base + shift)
    return theta


def uvs_run(angles: list[float] | tuple[float, ...], k: int, rt: RandTree) -> tuple[float, Transcript]:
    """Messages plus combined output for one run of the protocol."""
    transcript = uvs_messages(angles, k, rt)
    return uvs_combine(transcript, k, rt), transcript


def target_arc(angles: list[float] | tuple[float, ...], k: int) -> Arc:
    """The arc the referee's output is uniform on."""
    return Arc(center=wrap_angle(math.fsum(angles)), half_width=math.ldexp(math.pi, -k))


def expected_cost_exact(n: int, k: int) -> int:
    """Exact expected total message length of UVS(n, k): n*k + n^2 + n - 2.

    This is the unique solution of the cost recursion with the single-player
    cost equal to k; it exceeds the headline bound n(n+k) by n - 2 while
    keeping the O(n^2) scaling.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    if n == 1:
        return k
    return n * k + n * n + n - 2


def theorem_bound(n: int, k: int) -> int:
    """The headline cost bound n(n + k)."""
    return n * (n + k)


def cost_recursion_check(n_max: int, k_max: int, j_terms: int = 200) -> float:
    """Max residual of the cost recursion over 2 <= n <= n_max, 1 <= k <= k_max.

    Evaluates l(n,k) = sum_j 2^-(j+1) * (l(n-1, k+j+1) + l(1, k+j+1)) with the
    closed form substituted on both sides, truncating the j-sum at j_terms.
    """
    if n_max < 1 or k_max < 1:
        raise ValueError("n_max and k_max must be >= 1")
    worst = 0.0
    for n in range(2, n_max + 1):
        for k in range(1, k_max + 1):
            terms = [
                math.ldexp(1.0, -(j + 1))
                * (expected_cost_exact(n - 1, k + j + 1) + expected_cost_exact(1, k + j + 1))
                for j in range(j_terms + 1)
            ]
            residual = abs(expected_cost_exact(n, k) - math.fsum(terms))
            worst = max(worst, residual)
    return worst
