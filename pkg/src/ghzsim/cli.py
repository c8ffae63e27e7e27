"""Command-line experiment runner.

Subcommands expose each layer of the package: `simulate` (the full
protocol), `uvs` (the arc sampler and its communication cost), `lemma1`
(the mixture sampler and its density), `oracle` (exact quantum
predictions), `bench` (cost sweep over n), and `verify` (the complete
acceptance suite).

Reports carry no timestamps or environment data, so a config and seed fully
determine the output bytes; `--workers` changes wall time only. Exit codes:
0 when every embedded check passes, 1 when any statistical check fails,
2 on usage errors.

The build_*_report helpers return (passed, rendered_text) and are reused by
the acceptance suite, which keeps CLI behavior and verified behavior
identical by construction.
"""

from __future__ import annotations

import argparse
import math
import sys
from itertools import combinations

import numpy as np

from . import backends
from .ghz import MeasurementSetting, estimate_run, expected_bits
from .lemma1 import density_grid_rows, mixture_density
from .oracle import born_rule_distribution, exact_correlation, exact_distribution
from .randomness import STREAM_UVS, RandTree, make_stream, random_angles, resolve_seed
from .reports import (
    CheckRow,
    bits_stats_dict,
    render_csv,
    render_json,
    report_dict,
    write_text,
)
from .stats import arc_membership_fraction, cost_summary, ks_uniform01, ks_uniform_arc
from .uvs import expected_cost_exact, target_arc, theorem_bound, uvs_run

KS_P_MIN = 0.001
STDERR_MULTIPLE = 5.0
DENSITY_TOL = 1e-12
ORACLE_TOL = 1e-12


class UsageError(ValueError):
    """Invalid configuration; maps to exit code 2."""


def parse_angles(text: str, n: int | None, seed: int) -> tuple[float, ...]:
    """Explicit comma-separated radians, or 'random:<count>' drawn from the
    seed's angle stream. An explicit list must match --n when both are given."""
    if text.startswith("random:"):
        try:
            count = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad angle spec {text!r}; expected random:<count>") from None
        if count < 1:
            raise UsageError("random:<count> needs count >= 1")
        if n is not None and n != count:
            raise UsageError(f"--n {n} conflicts with {text!r}")
        return random_angles(seed, count, 0)
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"bad angle list {text!r}; expected comma-separated radians") from None
    if not all(math.isfinite(v) for v in values):
        raise UsageError("angles must be finite")
    if n is not None and len(values) != n:
        raise UsageError(f"--n {n} but {len(values)} angles given")
    return values


def parse_subsets(text: str | None, n: int) -> tuple[tuple[int, ...], ...]:
    """Subset spec: 'proper' for every nonempty proper subset, or
    semicolon-separated comma lists of 1-based players, e.g. '1,2;1,3'."""
    if not text:
        return ()
    if text == "proper":
        if n > 12:
            raise UsageError("subset enumeration limited to n <= 12")
        return tuple(s for r in range(1, n) for s in combinations(range(1, n + 1), r))
    subsets = []
    for chunk in text.split(";"):
        try:
            subset = tuple(sorted(int(x) for x in chunk.split(",")))
        except ValueError:
            raise UsageError(f"bad subset {chunk!r}") from None
        if not subset or subset[0] < 1 or subset[-1] > n:
            raise UsageError(f"subset {chunk!r} out of range for n={n}")
        subsets.append(subset)
    return tuple(subsets)


def _render(command: str, config: dict, rows: list[CheckRow], fmt: str,
            total_bits_stats=None, extra=None) -> str:
    if fmt == "csv":
        return render_csv(r.to_csv_row() for r in rows)
    return render_json(report_dict(command, config, rows, total_bits_stats, extra))


def build_simulate_report(n: int, angles: tuple[float, ...], samples: int, seed: int,
                          workers: int = 1, backend: str = "auto", fmt: str = "json",
                          subsets: tuple = ()) -> tuple[bool, str]:
    """Full-protocol run report.

    Correlator checks gate at 5 standard errors, so the pass column is
    meaningful at any sample count (the acceptance suite separately pins the
    normative absolute tolerances at its fixed counts).
    """
    setting = MeasurementSetting(angles)
    est = estimate_run(setting, samples, seed=seed, subsets=subsets,
                       workers=workers, backend=backend)
    rows = []
    target = exact_correlation(angles)
    tol = STDERR_MULTIPLE * max(est.correlator.stderr, 1e-15)
    rows.append(CheckRow("full_correlator", n, "full", samples, est.correlator.mean,
                         target, tol, abs(est.correlator.mean - target) <= tol))
    for subset, sub_est in sorted(est.subset_correlators.items()):
        label = ",".join(str(i) for i in subset)
        tol = STDERR_MULTIPLE * max(sub_est.stderr, 1e-15)
        rows.append(CheckRow("subset_correlator", n, label, samples, sub_est.mean,
                             0.0, tol, abs(sub_est.mean) <= tol))
    bits_target = float(expected_bits(n))
    tol = STDERR_MULTIPLE * est.bits.stderr
    rows.append(CheckRow("mean_bits", n, "-", samples, est.bits.mean, bits_target, tol,
                         abs(est.bits.mean - bits_target) <= tol))
    config = {"n": n, "angles": list(angles), "samples": samples, "seed": seed}
    text = _render("simulate", config, rows, fmt, bits_stats_dict(est.bits),
                   extra={"run": est.to_json_dict()} if fmt == "json" else None)
    return all(r.passed for r in rows), text


def build_uvs_report(n: int, k: int, samples: int, seed: int, workers: int = 1,
                     backend: str = "auto", fmt: str = "json",
                     angles: tuple[float, ...] | None = None,
                     transcripts: int = 0) -> tuple[bool, str]:
    """Arc-sampler report: membership, uniformity on the target arc, and
    communication cost against the exact closed form."""
    if angles is None:
        angles = random_angles(seed, n, 0)
    elif len(angles) != n:
        raise UsageError(f"--n {n} but {len(angles)} angles given")
    thetas, bits = backends.run_uvs_batches(angles, k, samples, seed,
                                            workers=workers, backend=backend)
    arc = target_arc(angles, k)
    frac = arc_membership_fraction(thetas, arc)
    rows = [CheckRow("membership", n, k, samples, frac, 1.0, 0.0, frac == 1.0)]
    p = ks_uniform_arc(thetas, arc).p_value if frac == 1.0 else 0.0
    rows.append(CheckRow("ks_pvalue", n, k, samples, p, KS_P_MIN, 0.0, p >= KS_P_MIN))
    cs = cost_summary(bits)
    exact = float(expected_cost_exact(n, k))
    tol = STDERR_MULTIPLE * cs.stderr
    ok = abs(cs.mean - exact) <= tol if n > 1 else cs.mean == exact
    rows.append(CheckRow("mean_bits", n, k, samples, cs.mean, exact, tol, ok))
    extra = None
    if fmt == "json":
        extra = {"arc": {"center": arc.center, "half_width": arc.half_width}}
        if transcripts > 0:
            stream = make_stream(seed, STREAM_UVS, 0)
            dumps = []
            for run_id in range(min(transcripts, samples)):
                rt = RandTree.sample(n, stream)
                _, tr = uvs_run(angles, k, rt)
                dumps.append(tr.to_json_dict(run_id=run_id, k=k))
            extra["transcripts"] = dumps
    config = {"n": n, "k": k, "angles": list(angles), "samples": samples, "seed": seed}
    text = _render("uvs", config, rows, fmt, bits_stats_dict(cs), extra)
    return all(r.passed for r in rows), text


def build_lemma1_report(samples: int, seed: int, workers: int = 1, backend: str = "auto",
                        fmt: str = "json", i_max: int = 40,
                        grid_points: int = 0) -> tuple[bool, str]:
    """Mixture-sampler report: KS uniformity of the halved sum and flatness
    of the truncated density on the interior where truncation is exact."""
    draws = backends.run_lemma1_batches(samples, seed, workers=workers, backend=backend)
    ks = ks_uniform01(draws)
    rows = [CheckRow("ks_pvalue", 1, "-", samples, ks.p_value, KS_P_MIN, 0.0,
                     ks.p_value >= KS_P_MIN)]
    lo = math.ldexp(1.0, -i_max)
    grid = np.linspace(lo, 1.0 - lo, 1001)[1:-1]
    dev = max(abs(mixture_density(float(x), i_max) - 1.0) for x in grid)
    rows.append(CheckRow("density_flat", 1, i_max, len(grid), dev, 0.0, DENSITY_TOL,
                         dev <= DENSITY_TOL))
    passed = all(r.passed for r in rows)
    if fmt == "csv" and grid_points > 0:
        dump = density_grid_rows(i_max, grid_points)
        return passed, render_csv(dump, header=("x", "density", "i_max"))
    extra = None
    if fmt == "json" and grid_points > 0:
        extra = {"density_grid": [[x, d] for x, d, _ in density_grid_rows(i_max, grid_points)]}
    config = {"samples": samples, "seed": seed, "i_max": i_max}
    return passed, _render("lemma1", config, rows, fmt, None, extra)


def build_oracle_report(angles: tuple[float, ...], method: str = "both",
                        fmt: str = "json") -> tuple[bool, str]:
    """Exact outcome distribution table, optionally cross-checking the two
    independent computations against each other."""
    if method not in ("formula", "tensor", "both"):
        raise UsageError(f"unknown method {method!r}")
    n = len(angles)
    dist = exact_distribution(angles) if method != "tensor" else born_rule_distribution(angles)
    rows = []
    passed = True
    if method == "both":
        born = born_rule_distribution(angles)
        diff = float(np.max(np.abs(born.probs - dist.probs)))
        passed = diff <= ORACLE_TOL
        rows.append(CheckRow("oracle_entrywise_diff", n, "-", 1 << n, diff, 0.0,
                             ORACLE_TOL, passed))
    if fmt == "csv":
        return passed, render_csv(dist.rows(), header=("outcome", "probability"))
    config = {"n": n, "angles": list(angles), "method": method}
    extra = {
        "outcomes": [[label, p] for label, p in dist.rows()],
        "correlator": dist.correlator(),
    }
    return passed, _render("oracle", config, rows, fmt, None, extra)


def build_bench_report(n_lo: int, n_hi: int, k: int, samples: int, seed: int,
                       workers: int = 1, backend: str = "auto",
                       fmt: str = "csv") -> tuple[bool, str]:
    """Cost sweep: one row per n with empirical mean bits, the exact closed
    form, the headline bound n(n+k), and the n-2 slack between them."""
    if n_lo < 1 or n_hi < n_lo:
        raise UsageError(f"bad n range {n_lo}..{n_hi}")
    table = []
    rows = []
    for n in range(n_lo, n_hi + 1):
        angles = random_angles(seed, n, 0, n)
        _, bits = backends.run_uvs_batches(angles, k, samples, seed,
                                           workers=workers, backend=backend)
        cs = cost_summary(bits)
        exact = float(expected_cost_exact(n, k))
        bound = float(theorem_bound(n, k))
        tol = STDERR_MULTIPLE * cs.stderr
        ok = abs(cs.mean - exact) <= tol if n > 1 else cs.mean == exact
        table.append((n, k, samples, cs.mean, cs.stderr, exact, bound, exact - bound, ok))
        rows.append(CheckRow("mean_bits", n, k, samples, cs.mean, exact, tol, ok))
    passed = all(r.passed for r in rows)
    if fmt == "csv":
        header = ("n", "k", "N", "mean_bits", "stderr", "exact", "bound", "slack", "pass")
        return passed, render_csv(table, header=header)
    config = {"n_range": f"{n_lo}..{n_hi}", "k": k, "samples": samples, "seed": seed}
    return passed, _render("bench", config, rows, "json")


def build_verify_report(seed: int, workers: int = 1, backend: str = "auto",
                        fmt: str = "json", scale: int = 1,
                        criteria=None) -> tuple[bool, str]:
    """The full acceptance suite as a report. scale > 1 shrinks sample counts
    for a quick look and is non-normative: fixed tolerances assume scale=1."""
    from . import acceptance  # deferred: acceptance reuses the builders above

    rows = acceptance.run_all(seed=seed, workers=workers, backend=backend,
                              scale=scale, criteria=criteria)
    config = {"seed": seed, "scale": scale,
              "criteria": sorted(acceptance.CRITERIA) if criteria is None else sorted(set(criteria))}
    return acceptance.all_passed(rows), _render("verify", config, rows, fmt)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected LO..HI") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzsim",
        description="Simulate equatorial GHZ measurements classically and verify "
                    "the simulation against exact quantum predictions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default: GHZSIM_SEED env var, else 0)")
    common.add_argument("--workers", type=int, default=1,
                        help="parallel workers; never changes results")
    common.add_argument("--backend", choices=("auto", "compiled", "pure"), default="auto")
    common.add_argument("--output", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="run the n-player protocol and estimate correlators")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--angles", default=None,
                   help="comma-separated radians or random:<count>")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--subsets", default=None,
                   help="'proper' or semicolon-separated player lists, e.g. 1,2;1,3")

    p = sub.add_parser("uvs", parents=[common],
                       help="run the arc sampler and check its law and cost")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--angles", default=None)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--transcripts", type=int, default=0,
                   help="include this many per-run message transcripts (json only)")

    p = sub.add_parser("lemma1", parents=[common],
                       help="sample the two-point mixture and check uniformity")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--i-max", type=int, default=40, dest="i_max")
    p.add_argument("--grid-points", type=int, default=0, dest="grid_points",
                   help="dump the truncated density on this many grid points")

    p = sub.add_parser("oracle", parents=[common],
                       help="exact outcome distribution for given angles")
    p.add_argument("--angles", required=True)
    p.add_argument("--method", choices=("formula", "tensor", "both"), default="both")

    p = sub.add_parser("bench", parents=[common],
                       help="communication cost sweep over a range of n")
    p.add_argument("--n-range", default="2..12", dest="n_range")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--samples", type=int, default=10**5)

    p = sub.add_parser("verify", parents=[common],
                       help="run the full acceptance suite")
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion numbers (default: all)")
    p.add_argument("--scale", type=int, default=1,
                   help="divide sample counts by this factor (non-normative)")

    return parser


def run_experiment(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    if args.command == "simulate":
        if args.angles is None:
            if args.n is None:
                raise UsageError("simulate needs --angles or --n")
            angles = random_angles(seed, args.n, 0)
        else:
            angles = parse_angles(args.angles, args.n, seed)
        n = len(angles)
        subsets = parse_subsets(args.subsets, n)
        passed, text = build_simulate_report(n, angles, args.samples, seed,
                                             workers=args.workers, backend=args.backend,
                                             fmt=args.fmt, subsets=subsets)
    elif args.command == "uvs":
        angles = None if args.angles is None else parse_angles(args.angles, args.n, seed)
        passed, text = build_uvs_report(args.n, args.k, args.samples, seed,
                                        workers=args.workers, backend=args.backend,
                                        fmt=args.fmt, angles=angles,
                                        transcripts=args.transcripts)
    elif args.command == "lemma1":
        passed, text = build_lemma1_report(args.samples, seed, workers=args.workers,
                                           backend=args.backend, fmt=args.fmt,
                                           i_max=args.i_max, grid_points=args.grid_points)
    elif args.command == "oracle":
        angles = parse_angles(args.angles, None, seed)
        passed, text = build_oracle_report(angles, method=args.method, fmt=args.fmt)
    elif args.command == "bench":
        n_lo, n_hi = _parse_range(args.n_range)
        passed, text = build_bench_report(n_lo, n_hi, args.k, args.samples, seed,
                                          workers=args.workers, backend=args.backend,
                                          fmt=args.fmt)
    elif args.command == "verify":
        criteria = None
        if args.criteria:
            try:
                criteria = [int(c) for c in args.criteria.split(",")]
            except ValueError:
                raise UsageError(f"bad criteria list {args.criteria!r}") from None
        passed, text = build_verify_report(seed, workers=args.workers,
                                           backend=args.backend, fmt=args.fmt,
                                           scale=args.scale, criteria=criteria)
    else:  # pragma: no cover - argparse enforces the choices
        raise UsageError(f"unknown command {args.command!r}")
    write_text(args.output, text)
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run_experiment(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
