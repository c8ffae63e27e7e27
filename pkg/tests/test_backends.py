"""Backend parity and deterministic batching.

The compiled kernels promise bit-identical output to the pure-Python
reference: same draws, same expression grouping, same rounding. Parity is
asserted on raw uint64 views so that even sign-of-zero differences would
surface. Batching must make results independent of worker count and of how
a total is split into calls.
"""

import numpy as np
import pytest

from ghzsim import backends
from ghzsim.backends import (
    _batch_layout,
    active_backend_name,
    compiled_available,
    get_backend,
    run_ghz_batches,
    run_lemma1_batches,
    run_uvs_batches,
)
from ghzsim.randomness import BATCH_SIZE, STREAM_TEST, make_stream

needs_compiled = pytest.mark.skipif(
    not compiled_available(), reason="compiled kernels not built"
)

only_pure = pytest.mark.skipif(
    compiled_available(), reason="compiled kernels are available here"
)


def bits_of(arr):
    return np.ascontiguousarray(arr, dtype=np.float64).view(np.uint64)


class TestBackendSelection:
    def test_auto_resolves(self):
        assert active_backend_name("auto") in ("pure", "compiled")
        assert get_backend("auto") is not None

    def test_pure_always_available(self):
        from ghzsim.backends import pure

        assert get_backend("pure") is pure

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            get_backend("fancy")

    @needs_compiled
    def test_auto_prefers_compiled(self):
        assert active_backend_name("auto") == "compiled"

    @only_pure
    def test_compiled_request_fails_loudly_when_missing(self):
        with pytest.raises(RuntimeError):
            get_backend("compiled")


@needs_compiled
class TestBitExactParity:
    @pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (3, 2), (5, 3)])
    def test_uvs(self, n, k):
        angles = tuple(0.3 + 0.9 * i for i in range(n))
        for seed in (0, 1, 12345):
            p_thetas, p_bits = get_backend("pure").uvs_batch(
                make_stream(seed, STREAM_TEST, 0), angles, k, 4000
            )
            c_thetas, c_bits = get_backend("compiled").uvs_batch(
                make_stream(seed, STREAM_TEST, 0), angles, k, 4000
            )
            np.testing.assert_array_equal(bits_of(p_thetas), bits_of(c_thetas))
            np.testing.assert_array_equal(p_bits, c_bits)

    @pytest.mark.parametrize("angles", [(0.7, -0.2), (0.4, 1.9, 3.3), (0.1, 0.2, 0.3, 2.8, 5.5)])
    def test_ghz(self, angles):
        for seed in (0, 7):
            p_out, p_bits = get_backend("pure").ghz_batch(
                make_stream(seed, STREAM_TEST, 1), angles, 4000
            )
            c_out, c_bits = get_backend("compiled").ghz_batch(
                make_stream(seed, STREAM_TEST, 1), angles, 4000
            )
            np.testing.assert_array_equal(p_out, c_out)
            np.testing.assert_array_equal(p_bits, c_bits)

    def test_lemma1(self):
        for seed in (0, 3, 99):
            p = get_backend("pure").lemma1_batch(make_stream(seed, STREAM_TEST, 2), 20000)
            c = get_backend("compiled").lemma1_batch(make_stream(seed, STREAM_TEST, 2), 20000)
            np.testing.assert_array_equal(bits_of(p), bits_of(c))

    def test_run_helpers_agree_across_backends(self):
        total = 3000
        for kind, run in (("uvs", lambda b: run_uvs_batches((0.5, 1.5), 2, total, 11, backend=b)),
                          ("ghz", lambda b: run_ghz_batches((0.5, 1.5), total, 11, backend=b)),
                          ("lemma1", lambda b: run_lemma1_batches(total, 11, backend=b))):
            pure_out = run("pure")
            comp_out = run("compiled")
            if isinstance(pure_out, tuple):
                for a, b in zip(pure_out, comp_out):
                    np.testing.assert_array_equal(a, b)
            else:
                np.testing.assert_array_equal(pure_out, comp_out)


class TestBatchLayout:
    def test_partitions_exactly(self):
        for total in (1, 100, BATCH_SIZE, BATCH_SIZE + 1, 3 * BATCH_SIZE + 17):
            layout = _batch_layout(total)
            assert sum(size for _, size in layout) == total
            assert all(1 <= size <= BATCH_SIZE for _, size in layout)
            assert [i for i, _ in layout] == list(range(len(layout)))

    def test_batch_indices_address_streams(self):
        # a split total must equal one call: the i-th batch always reads
        # stream (seed, label, i) regardless of how work is grouped
        total = BATCH_SIZE + 137
        thetas, bits = run_uvs_batches((0.4, 2.2), 1, total, seed=13)
        from ghzsim.randomness import STREAM_UVS

        backend = get_backend("auto")
        t0, b0 = backend.uvs_batch(make_stream(13, STREAM_UVS, 0), (0.4, 2.2), 1, BATCH_SIZE)
        t1, b1 = backend.uvs_batch(make_stream(13, STREAM_UVS, 1), (0.4, 2.2), 1, 137)
        np.testing.assert_array_equal(thetas, np.concatenate([t0, t1]))
        np.testing.assert_array_equal(bits, np.concatenate([b0, b1]))


class TestWorkerInvariance:
    def test_uvs(self):
        args = ((0.9, 1.1, 0.2), 1, BATCH_SIZE + 500, 17)
        t1, b1 = run_uvs_batches(*args, workers=1)
        t4, b4 = run_uvs_batches(*args, workers=4)
        np.testing.assert_array_equal(bits_of(t1), bits_of(t4))
        np.testing.assert_array_equal(b1, b4)

    def test_ghz(self):
        args = ((0.9, 1.1), BATCH_SIZE + 500, 19)
        o1, b1 = run_ghz_batches(*args, workers=1)
        o3, b3 = run_ghz_batches(*args, workers=3)
        np.testing.assert_array_equal(o1, o3)
        np.testing.assert_array_equal(b1, b3)

    def test_lemma1(self):
        v1 = run_lemma1_batches(BATCH_SIZE + 500, 23, workers=1)
        v2 = run_lemma1_batches(BATCH_SIZE + 500, 23, workers=2)
        np.testing.assert_array_equal(bits_of(v1), bits_of(v2))


class TestOutputShapes:
    def test_uvs(self):
        thetas, bits = run_uvs_batches((1.0,), 2, 500, seed=29)
        assert thetas.shape == (500,) and thetas.dtype == np.float64
        assert bits.shape == (500,) and bits.dtype == np.int64
        assert np.all(bits == 2)  # single player always sends exactly k bits

    def test_ghz(self):
        outcomes, bits = run_ghz_batches((1.0, 2.0, 3.0), 500, seed=31)
        assert outcomes.shape == (500, 3) and outcomes.dtype == np.int8
        assert set(np.unique(outcomes)) <= {-1, 1}
        assert bits.shape == (500,)

    def test_lemma1(self):
        vals = run_lemma1_batches(500, seed=37)
        assert vals.shape == (500,)
        assert float(vals.min()) >= 0.0 and float(vals.max()) <= 1.0
