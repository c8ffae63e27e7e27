"""The end-to-end verification suite.

Each criterion_* function runs one family of checks at its normative sample
count and returns CheckRows; run_all chains them in order. The CLI `verify`
subcommand and the acceptance test file both call these functions, so the
command line and the test suite can never drift apart.

`scale` divides sample counts for quick exploratory runs. Fixed tolerances
are calibrated for the full counts, so scaled runs are non-normative and may
fail statistically; scale=1 is the contract.

Seeds: every check derives its own stream from (master seed, criterion
coordinates), so runs are reproducible, checks are mutually independent, and
adding a check never shifts the randomness of existing ones.
"""

from __future__ import annotations

import math
import time
from itertools import combinations

import numpy as np

from . import backends
from .geometry import dot, embed_equatorial, hemisphere_points
from .ghz import MeasurementSetting, estimate_run, expected_bits
from .lemma1 import mixture_density
from .oracle import born_rule_distribution, exact_correlation, exact_distribution
from .randomness import STREAM_ANGLES, STREAM_HEMISPHERE, make_stream, random_angles, uniform_angle
from .reports import CheckRow
from .stats import (
    arc_membership_fraction,
    cost_summary,
    hemisphere_centroid,
    ks_uniform01,
    ks_uniform_arc,
)
from .uvs import cost_recursion_check, expected_cost_exact, target_arc, theorem_bound

KS_P_MIN = 0.001
CORRELATOR_TOL = 5e-3
DENSITY_TOL = 1e-12
ORACLE_TOL = 1e-12
RECURSION_TOL = 1e-9
STDERR_MULTIPLE = 5.0


def _derive_seed(seed: int, *key: int) -> int:
    """A 64-bit seed for the check addressed by (seed, *key)."""
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _scaled(N: int, scale: int) -> int:
    if scale < 1:
        raise ValueError("scale must be >= 1")
    return max(100, N // scale)


def criterion_1_full_correlation(seed: int = 0, workers: int = 1, backend: str = "auto",
                                 scale: int = 1) -> list[CheckRow]:
    """Empirical full-product correlator vs the cosine of the angle sum."""
    N = _scaled(10**6, scale)
    rows = []
    for n in (2, 3, 5, 8):
        for v in range(3):
            angles = random_angles(seed, n, 1, n, v)
            est = estimate_run(MeasurementSetting(angles), N,
                               seed=_derive_seed(seed, 1, n, v),
                               workers=workers, backend=backend)
            target = exact_correlation(angles)
            ok = abs(est.correlator.mean - target) <= CORRELATOR_TOL
            rows.append(CheckRow("full_correlator", n, "full", N,
                                 est.correlator.mean, target, CORRELATOR_TOL, ok))
    return rows


def criterion_2_vanishing_marginals(seed: int = 0, workers: int = 1, backend: str = "auto",
                                    scale: int = 1) -> list[CheckRow]:
    """Every proper nonempty subset correlator is zero (n = 3, all 6 subsets)."""
    N = _scaled(10**6, scale)
    angles = random_angles(seed, 3, 2)
    subsets = [s for r in (1, 2) for s in combinations((1, 2, 3), r)]
    est = estimate_run(MeasurementSetting(angles), N, seed=_derive_seed(seed, 2),
                       subsets=tuple(subsets), workers=workers, backend=backend)
    rows = []
    for subset in subsets:
        mean = est.subset_correlators[subset].mean
        label = ",".join(str(i) for i in subset)
        rows.append(CheckRow("subset_correlator", 3, label, N,
                             mean, 0.0, CORRELATOR_TOL, abs(mean) <= CORRELATOR_TOL))
    return rows


def criterion_3_uvs_output_law(seed: int = 0, workers: int = 1, backend: str = "auto",
                               scale: int = 1) -> list[CheckRow]:
    """Arc membership in 100% of runs and KS uniformity on the arc."""
    N = _scaled(10**5, scale)
    rows = []
    for n in (1, 2, 3, 4):
        for k in (1, 2, 3):
            angles = random_angles(seed, n, 3, n, k)
            thetas, _ = backends.run_uvs_batches(angles, k, N,
                                                 seed=_derive_seed(seed, 3, n, k),
                                                 workers=workers, backend=backend)
            arc = target_arc(angles, k)
            frac = arc_membership_fraction(thetas, arc)
            rows.append(CheckRow("uvs_membership", n, k, N, frac, 1.0, 0.0, frac == 1.0))
            p = ks_uniform_arc(thetas, arc).p_value if frac == 1.0 else 0.0
            rows.append(CheckRow("uvs_ks_pvalue", n, k, N, p, KS_P_MIN, 0.0, p >= KS_P_MIN))
    return rows


def criterion_4_lemma1(seed: int = 0, workers: int = 1, backend: str = "auto",
                       scale: int = 1) -> list[CheckRow]:
    """The halved mixture sum is uniform on [0,1]; its truncated density is 1."""
    N = _scaled(10**6, scale)
    samples = backends.run_lemma1_batches(N, seed=_derive_seed(seed, 4),
                                          workers=workers, backend=backend)
    ks = ks_uniform01(samples)
    rows = [CheckRow("lemma1_ks_pvalue", 1, "-", N, ks.p_value, KS_P_MIN, 0.0,
                     ks.p_value >= KS_P_MIN)]
    i_max = 40
    lo = math.ldexp(1.0, -i_max)
    grid = np.linspace(lo, 1.0 - lo, 1001)[1:-1]
    dev = max(abs(mixture_density(float(x), i_max) - 1.0) for x in grid)
    rows.append(CheckRow("lemma1_density_flat", 1, i_max, len(grid), dev, 0.0,
                         DENSITY_TOL, dev <= DENSITY_TOL))
    return rows


def criterion_5_communication_cost(seed: int = 0, workers: int = 1, backend: str = "auto",
                                   scale: int = 1) -> list[CheckRow]:
    """Exact single-player cost, mean cost vs closed form, recursion residual,
    slack vs the headline bound, and quadratic scaling."""
    rows = []
    N1 = _scaled(10**4, scale)
    for k in (1, 2, 3):
        angles = random_angles(seed, 1, 5, 1, k)
        _, bits = backends.run_uvs_batches(angles, k, N1,
                                           seed=_derive_seed(seed, 5, 1, k),
                                           workers=workers, backend=backend)
        dev = float(np.max(np.abs(bits - k)))
        rows.append(CheckRow("uvs_single_player_bits", 1, k, N1, dev, 0.0, 0.0, dev == 0.0))
    N = _scaled(10**5, scale)
    for n in (2, 3, 4):
        for k in (1, 2, 3):
            angles = random_angles(seed, n, 5, n, k)
            _, bits = backends.run_uvs_batches(angles, k, N,
                                               seed=_derive_seed(seed, 5, n, k),
                                               workers=workers, backend=backend)
            cs = cost_summary(bits)
            exact = float(expected_cost_exact(n, k))
            tol = STDERR_MULTIPLE * cs.stderr
            rows.append(CheckRow("uvs_mean_bits", n, k, N, cs.mean, exact, tol,
                                 abs(cs.mean - exact) <= tol))
    residual = cost_recursion_check(10, 3)
    rows.append(CheckRow("cost_recursion_residual", 10, 3, 0, residual, 0.0,
                         RECURSION_TOL, residual <= RECURSION_TOL))
    slack_dev = 0
    for n in range(2, 17):
        for k in (1, 2, 3):
            slack = expected_cost_exact(n, k) - theorem_bound(n, k)
            slack_dev = max(slack_dev, abs(slack - (n - 2)))
    rows.append(CheckRow("cost_slack_is_n_minus_2", 16, "2..16", 0, float(slack_dev),
                         0.0, 0.0, slack_dev == 0))
    quad_dev = 0
    for n in range(2, 15):
        d2 = (expected_cost_exact(n + 2, 1) - 2 * expected_cost_exact(n + 1, 1)
              + expected_cost_exact(n, 1))
        quad_dev = max(quad_dev, abs(d2 - 2))
    rows.append(CheckRow("cost_quadratic_scaling", 16, 1, 0, float(quad_dev),
                         0.0, 0.0, quad_dev == 0))
    return rows


def criterion_6_protocol_cost(seed: int = 0, workers: int = 1, backend: str = "auto",
                              scale: int = 1) -> list[CheckRow]:
    """Simulation cost: mean bits vs the exact value; n = 2 is deterministic."""
    N = _scaled(10**5, scale)
    rows = []
    for n in range(2, 7):
        angles = random_angles(seed, n, 6, n)
        est = estimate_run(MeasurementSetting(angles), N, seed=_derive_seed(seed, 6, n),
                           workers=workers, backend=backend)
        exact = float(expected_bits(n))
        tol = STDERR_MULTIPLE * est.bits.stderr
        ok = abs(est.bits.mean - exact) <= tol if n > 2 else est.bits.mean == exact
        rows.append(CheckRow("ghz_mean_bits", n, "-", N, est.bits.mean, exact, tol, ok))
        if n == 2:
            dev = max(abs(b - 2) for b in est.bits.histogram)
            rows.append(CheckRow("ghz_bits_constant_2", 2, "-", N, float(dev),
                                 0.0, 0.0, dev == 0))
    return rows


def criterion_7_oracle_equivalence(seed: int = 0, workers: int = 1, backend: str = "auto",
                                   scale: int = 1) -> list[CheckRow]:
    """Born-rule tensor contraction vs the closed-form distribution."""
    rows = []
    start = time.perf_counter()
    for n in range(2, 7):
        worst = 0.0
        for v in range(20):
            angles = random_angles(seed, n, 7, n, v)
            born = born_rule_distribution(angles)
            exact = exact_distribution(angles)
            worst = max(worst, float(np.max(np.abs(born.probs - exact.probs))))
        rows.append(CheckRow("oracle_entrywise_diff", n, "-", 20, worst, 0.0,
                             ORACLE_TOL, worst <= ORACLE_TOL))
    elapsed = time.perf_counter() - start
    rows.append(CheckRow("oracle_runtime_seconds", "2..6", "-", 100, elapsed, 1.0,
                         0.0, elapsed < 1.0))
    return rows


def criterion_8_sign_rule(seed: int = 0, workers: int = 1, backend: str = "auto",
                          scale: int = 1) -> list[CheckRow]:
    """The two-vector sign rule over uniform hemisphere pairs reproduces the
    inner product, with full hemisphere membership and the centroid at d/2."""
    N = _scaled(10**6, scale)
    pair_stream = make_stream(seed, STREAM_ANGLES, 8)
    rows = []
    min_member = 1.0
    max_centroid_dev = 0.0
    centroid_tol = 5.0 / math.sqrt(2 * N)
    for pair in range(10):
        c = uniform_angle(pair_stream)
        alpha_n = uniform_angle(pair_stream)
        d = embed_equatorial(c)
        a = embed_equatorial(alpha_n, negate_second=True)
        stream = make_stream(seed, STREAM_HEMISPHERE, pair)
        u = stream.random((4, N))
        thetas = c - math.pi / 2.0 + math.pi * u[:2]
        lats = 2.0 * u[2:] - 1.0
        lam1 = hemisphere_points(thetas[0], lats[0])
        lam2 = hemisphere_points(thetas[1], lats[1])
        signs = np.where(lam1 @ a + lam2 @ a >= 0.0, 1.0, -1.0)
        mean = float(signs.mean())
        target = dot(d, a)
        rows.append(CheckRow("sign_rule_mean", 2, pair, N, mean, target,
                             CORRELATOR_TOL, abs(mean - target) <= CORRELATOR_TOL))
        member = float(np.mean(np.concatenate([lam1 @ d, lam2 @ d]) >= 0.0))
        min_member = min(min_member, member)
        centroid = hemisphere_centroid(np.concatenate([lam1, lam2]), d)
        max_centroid_dev = max(max_centroid_dev, max(centroid.deviation))
    rows.append(CheckRow("hemisphere_membership", 2, "0..9", 2 * N, min_member,
                         1.0, 0.0, min_member == 1.0))
    rows.append(CheckRow("hemisphere_centroid_dev", 2, "0..9", 2 * N, max_centroid_dev,
                         0.0, centroid_tol, max_centroid_dev <= centroid_tol))
    return rows


def criterion_9_determinism(seed: int = 0, workers: int = 1, backend: str = "auto",
                            scale: int = 1) -> list[CheckRow]:
    """Byte-identical reports from identical seeds, independent of workers."""
    from . import cli  # deferred: cli imports this module lazily for `verify`

    N = _scaled(2 * 10**5, scale)
    rows = []
    for fmt in ("json", "csv"):
        sim = [cli.build_simulate_report(n=3, angles=random_angles(seed, 3, 9),
                                         samples=N, seed=_derive_seed(seed, 9, 1),
                                         workers=w, backend=backend, fmt=fmt)[1]
               for w in (1, 4)]
        same = sim[0] == sim[1]
        rows.append(CheckRow(f"determinism_simulate_{fmt}", 3, "workers 1 vs 4", N,
                             float(same), 1.0, 0.0, same))
    uvs = [cli.build_uvs_report(n=3, k=2, samples=N, seed=_derive_seed(seed, 9, 2),
                                workers=w, backend=backend, fmt="json")[1]
           for w in (1, 4)]
    same = uvs[0] == uvs[1]
    rows.append(CheckRow("determinism_uvs_json", 3, "workers 1 vs 4", N,
                         float(same), 1.0, 0.0, same))
    return rows


CRITERIA = {
    1: criterion_1_full_correlation,
    2: criterion_2_vanishing_marginals,
    3: criterion_3_uvs_output_law,
    4: criterion_4_lemma1,
    5: criterion_5_communication_cost,
    6: criterion_6_protocol_cost,
    7: criterion_7_oracle_equivalence,
    8: criterion_8_sign_rule,
    9: criterion_9_determinism,
}


def run_all(seed: int = 0, workers: int = 1, backend: str = "auto", scale: int = 1,
            criteria=None) -> list[CheckRow]:
    wanted = sorted(CRITERIA) if criteria is None else sorted(set(criteria))
    rows = []
    for c in wanted:
        if c not in CRITERIA:
            raise ValueError(f"unknown criterion {c}; valid: {sorted(CRITERIA)}")
        rows.extend(CRITERIA[c](seed=seed, workers=workers, backend=backend, scale=scale))
    return rows


def all_passed(rows) -> bool:
    return all(r.passed for r in rows)
