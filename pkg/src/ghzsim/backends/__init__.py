"""Backend selection and the deterministic batch driver.

Two interchangeable backends produce Monte Carlo samples: a compiled
extension (`ghzsim.backends._kernels`) and a pure-Python reference
(`ghzsim.backends.pure`). Both consume the underlying bit stream draw for
draw in the same order and evaluate the same floating-point expressions with
the same operation grouping, so their outputs are bit-identical; the test
suite asserts this whenever the compiled module is importable.

Work is split into fixed-size batches. Batch i always draws from the stream
addressed by (seed, kind label, i), and per-batch results are concatenated in
batch index order, so the aggregate output is a pure function of (seed, N)
regardless of how many workers participate or which backend ran.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..randomness import BATCH_SIZE, STREAM_GHZ, STREAM_LEMMA1, STREAM_UVS, make_stream

_BACKEND_NAMES = ("auto", "compiled", "pure")

_compiled = None
_compiled_error: str | None = None
_compiled_tried = False


def _try_compiled():
    global _compiled, _compiled_error, _compiled_tried
    if not _compiled_tried:
        _compiled_tried = True
        try:
            from . import _kernels
            _compiled = _kernels
        except ImportError as exc:
            _compiled_error = str(exc)
    return _compiled


def compiled_available() -> bool:
    return _try_compiled() is not None


def get_backend(name: str = "auto"):
    """Resolve a backend name to its module.

    "auto" prefers the compiled extension and silently falls back to the pure
    implementation; "compiled" raises if the extension is not importable.
    """
    if name not in _BACKEND_NAMES:
        raise ValueError(f"unknown backend {name!r}; expected one of {_BACKEND_NAMES}")
    if name in ("auto", "compiled"):
        mod = _try_compiled()
        if mod is not None:
            return mod
        if name == "compiled":
            raise RuntimeError(f"compiled backend unavailable: {_compiled_error}")
    from . import pure
    return pure


def active_backend_name(name: str = "auto") -> str:
    """The concrete backend "auto" (or an explicit name) resolves to."""
    return "compiled" if get_backend(name) is not get_backend("pure") else "pure"


def _batch_layout(total: int) -> list[tuple[int, int]]:
    """(batch index, batch size) pairs covering `total` samples."""
    if total < 1:
        raise ValueError("need at least one sample")
    layout = []
    index = 0
    remaining = total
    while remaining > 0:
        size = min(BATCH_SIZE, remaining)
        layout.append((index, size))
        index += 1
        remaining -= size
    return layout


def _batch_task(backend_name: str, kind: str, args: tuple, seed: int, label: int,
                index: int, count: int):
    # module-level so it pickles for process pools
    fn = getattr(get_backend(backend_name), kind + "_batch")
    stream = make_stream(seed, label, index)
    return fn(stream, *args, count)


def _run_batches(kind: str, args: tuple, label: int, total: int, seed: int,
                 workers: int, backend: str) -> list:
    get_backend(backend)  # fail fast on bad names before any work is queued
    layout = _batch_layout(total)
    if workers <= 1 or len(layout) == 1:
        return [_batch_task(backend, kind, args, seed, label, i, c) for i, c in layout]
    tasks = [(backend, kind, args, seed, label, i, c) for i, c in layout]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # executor.map preserves submission order: reduction stays batch-ordered
        return list(pool.map(_batch_task, *zip(*tasks)))


def run_uvs_batches(angles, k: int, total: int, seed: int, workers: int = 1,
                    backend: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """`total` arc-sampling runs; returns (output angles, per-run bit counts)."""
    angles = tuple(float(a) for a in angles)
    parts = _run_batches("uvs", (angles, int(k)), STREAM_UVS, total, seed, workers, backend)
    thetas = np.concatenate([p[0] for p in parts])
    bits = np.concatenate([p[1] for p in parts])
    return thetas, bits


def run_ghz_batches(angles, total: int, seed: int, workers: int = 1,
                    backend: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """`total` protocol runs; returns (outcome matrix (N, n) of +/-1, bit counts)."""
    angles = tuple(float(a) for a in angles)
    parts = _run_batches("ghz", (angles,), STREAM_GHZ, total, seed, workers, backend)
    outcomes = np.concatenate([p[0] for p in parts])
    bits = np.concatenate([p[1] for p in parts])
    return outcomes, bits


def run_lemma1_batches(total: int, seed: int, workers: int = 1,
                       backend: str = "auto") -> np.ndarray:
    """`total` draws of the halved two-point mixture sum on [0, 1]."""
    parts = _run_batches("lemma1", (), STREAM_LEMMA1, total, seed, workers, backend)
    return np.concatenate(parts)
