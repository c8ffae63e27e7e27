"""Classical simulation of equatorial measurements on n-party GHZ states.

The building blocks, bottom up:

- geometry: angles, arcs, and the sphere embeddings the protocol lives on.
- randomness: seeded streams, the shared random tree, exact geometric draws.
- lemma1: the two-point mixture whose halved sum is uniform on [0, 1]; this
  is the distributional identity the recursive sampler rests on.
- uvs: the communication protocol proper; one message per player lets a
  referee sample uniformly from an arc around the players' angle sum, with
  exact per-message bit accounting.
- ghz: the full simulation; two arc-sampling runs plus a hemisphere sign
  rule reproduce the GHZ correlations with finite expected communication.
- oracle: exact quantum predictions to validate against.
- stats, reports, acceptance, cli: measurement, serialization, and the
  end-to-end verification suite.
"""

from .geometry import Arc, angular_distance, embed_equatorial, hemisphere_point, wrap_angle
from .ghz import (
    MeasurementSetting,
    RunEstimate,
    RunRecord,
    estimate_run,
    expected_bits,
    simulate_once,
    toner_bacon_sign,
)
from .lemma1 import lemma1_sample, mixture_density
from .oracle import born_rule_distribution, exact_correlation, exact_distribution
from .randomness import DEFAULT_SEED, GhzSharedRandomness, RandTree, make_stream, resolve_seed
from .uvs import (
    Transcript,
    expected_cost_exact,
    target_arc,
    theorem_bound,
    uvs_combine,
    uvs_messages,
    uvs_run,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "DEFAULT_SEED",
    "GhzSharedRandomness",
    "MeasurementSetting",
    "RandTree",
    "RunEstimate",
    "RunRecord",
    "Transcript",
    "angular_distance",
    "born_rule_distribution",
    "embed_equatorial",
    "estimate_run",
    "exact_correlation",
    "exact_distribution",
    "expected_bits",
    "expected_cost_exact",
    "hemisphere_point",
    "lemma1_sample",
    "make_stream",
    "mixture_density",
    "resolve_seed",
    "simulate_once",
    "target_arc",
    "theorem_bound",
    "toner_bacon_sign",
    "uvs_combine",
    "uvs_messages",
    "uvs_run",
    "wrap_angle",
    "__version__",
]
