# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled batch kernels.

Every function mirrors ghzsim.backends.pure draw for draw and floating-point
expression for expression (same operation order, same grouping), so outputs
are bit-identical to the pure backend on the same stream. The module is
compiled with contraction disabled; do not enable -ffast-math or FMA
contraction. When editing, change the pure reference first, then this file.

Grid index arithmetic stays in doubles throughout: candidate indices are
integer-valued doubles and the (base + off) mod 2^level step is built from a
Sterbenz-exact subtraction plus a correctly rounded sum, which reproduces
exactly what the reference computes with arbitrary-precision integers once
those integers are rounded to double for the final angle products.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport M_PI, INFINITY, cos, sin, sqrt, fmod, floor, ldexp, frexp, isfinite
from numpy.random cimport bitgen_t

cdef double TWO_PI = 2.0 * M_PI
cdef long long LEVEL_CAP = 1024  # matches the reference cap

cdef const char *_CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object stream) except NULL:
    """Borrow the raw bit generator from a numpy Generator."""
    capsule = stream.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, _CAPSULE_NAME):
        raise ValueError("stream does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, _CAPSULE_NAME)


cdef inline double _next(bitgen_t *rng) noexcept nogil:
    return rng.next_double(rng.state)


cdef inline long long _geom(bitgen_t *rng) noexcept nogil:
    # tails before the first head; the exponent of a uniform double counts
    # its leading zero bits exactly
    cdef long long j = 0
    cdef double u
    cdef int e
    while True:
        u = _next(rng)
        if u > 0.0:
            frexp(u, &e)
            return j - e
        j += 53


cdef inline long long _sign(bitgen_t *rng) noexcept nogil:
    return 1 if _next(rng) < 0.5 else -1


cdef inline double _wrap(double x) noexcept nogil:
    cdef double r = fmod(x, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r -= TWO_PI
    return r


cdef inline double _candidate(double base, double m, int off) noexcept nogil:
    # (base + off) mod m for integer-valued doubles 0 <= base <= m, off in
    # {0,1,2}; exact in the wrap branch, correctly rounded otherwise, which
    # is precisely double(exact integer) in both branches
    cdef double d = (base - m) + off
    cdef double c
    if d >= 0.0:
        c = d
        while c >= m:
            c -= m
        return c
    return base + off


cdef double _grid_index(double alpha, long long level, double delta) noexcept nogil:
    # mirror of the reference closed-form index; returns the index as an
    # integer-valued double
    cdef double half, step, m, center, x, w, base, c, point, d, best, best_d
    cdef int off
    if level >= LEVEL_CAP:
        return 0.0
    half = ldexp(M_PI, -<int>level)
    step = 2.0 * half
    m = ldexp(1.0, <int>level)
    center = _wrap(alpha)
    x = _wrap(delta - (alpha - half))
    w = m - x / step
    base = floor(w)
    best = -1.0
    for off in range(3):
        c = _candidate(base, m, off)
        point = _wrap(delta + c * step)
        d = _wrap(point - center)
        if d > M_PI:
            d = TWO_PI - d
        if d <= half and (best < 0.0 or c < best):
            best = c
    if best >= 0.0:
        return best
    best_d = INFINITY
    for off in range(3):
        c = _candidate(base, m, off)
        point = _wrap(delta + c * step)
        d = _wrap(point - center)
        if d > M_PI:
            d = TWO_PI - d
        if d < best_d:
            best_d = d
            best = c
    return best


cdef inline double _base_combine(double delta, double t, long long k) noexcept nogil:
    cdef double step = 2.0 * ldexp(M_PI, -<int>k)
    return _wrap(delta + t * step)


cdef double _uvs_run(bitgen_t *rng, double[::1] angles, long long k,
                     long long[::1] js, long long[::1] bs, double[::1] deltas,
                     long long[::1] kappa, long long[::1] levels, double[::1] ts,
                     long long *bits_out) noexcept nogil:
    """One full sampling run over n = len(angles) players at precision k.

    Draw order: (j, b) per chain node from the top level down, then one
    uniform angle per player. Scratch buffers have length n (js/bs use the
    first n-1 slots).
    """
    cdef Py_ssize_t n = angles.shape[0]
    cdef Py_ssize_t i, p
    cdef long long j, b, node_level, bits
    cdef double theta, base, shift
    for i in range(n - 1):
        js[i] = _geom(rng)
        bs[i] = _sign(rng)
    for i in range(n):
        deltas[i] = TWO_PI * _next(rng)
    kappa[0] = k
    for i in range(n - 1):
        kappa[i + 1] = kappa[i] + js[i] + 1
    levels[0] = kappa[n - 1]
    for p in range(2, n + 1):
        levels[p - 1] = kappa[n - p + 1]
    bits = 0
    for i in range(n):
        ts[i] = _grid_index(angles[i], levels[i], deltas[i])
        bits += levels[i]
    theta = _base_combine(deltas[0], ts[0], levels[0])
    for p in range(2, n + 1):
        j = js[n - p]
        b = bs[n - p]
        node_level = levels[p - 1] - j - 1
        base = _base_combine(deltas[p - 1], ts[p - 1], levels[p - 1])
        shift = b * ldexp(M_PI, -<int>node_level) * (1.0 - ldexp(1.0, -<int>j))
        theta = _wrap(theta + base + shift)
    bits_out[0] = bits
    return theta


def _check_angles(angles_arr):
    if not np.all(np.isfinite(angles_arr)):
        raise ValueError("all angles must be finite")


def uvs_batch(object stream, tuple angles, long long k, Py_ssize_t count):
    """`count` arc-sampling runs: (output angles float64, total bits int64)."""
    cdef Py_ssize_t n = len(angles)
    if n < 1:
        raise ValueError("need at least one player")
    if k < 1:
        raise ValueError("precision level k must be >= 1")
    if count < 0:
        raise ValueError("count must be >= 0")
    angs = np.asarray(angles, dtype=np.float64)
    _check_angles(angs)
    thetas = np.empty(count, dtype=np.float64)
    bits = np.empty(count, dtype=np.int64)
    cdef double[::1] a = angs
    cdef double[::1] th = thetas
    cdef long long[::1] bi = bits
    cdef long long[::1] js = np.empty(n, dtype=np.int64)
    cdef long long[::1] bs = np.empty(n, dtype=np.int64)
    cdef double[::1] deltas = np.empty(n, dtype=np.float64)
    cdef long long[::1] kappa = np.empty(n, dtype=np.int64)
    cdef long long[::1] levels = np.empty(n, dtype=np.int64)
    cdef double[::1] ts = np.empty(n, dtype=np.float64)
    cdef bitgen_t *rng = _bitgen(stream)
    cdef Py_ssize_t r
    cdef long long used = 0
    with nogil:
        for r in range(count):
            th[r] = _uvs_run(rng, a, k, js, bs, deltas, kappa, levels, ts, &used)
            bi[r] = used
    return thetas, bits


def ghz_batch(object stream, tuple angles, Py_ssize_t count):
    """`count` protocol runs: (outcome matrix (count, n) int8, bits int64)."""
    cdef Py_ssize_t n = len(angles)
    if n < 2:
        raise ValueError("the protocol needs at least two players")
    if count < 0:
        raise ValueError("count must be >= 0")
    angs = np.asarray(angles, dtype=np.float64)
    _check_angles(angs)
    cdef Py_ssize_t m = n - 1
    outcomes = np.empty((count, n), dtype=np.int8)
    bits = np.empty(count, dtype=np.int64)
    cdef double[::1] prefix = angs[:m]
    cdef signed char[:, ::1] out = outcomes
    cdef long long[::1] bi = bits
    cdef long long[::1] js = np.empty(m, dtype=np.int64)
    cdef long long[::1] bs = np.empty(m, dtype=np.int64)
    cdef double[::1] deltas = np.empty(m, dtype=np.float64)
    cdef long long[::1] kappa = np.empty(m, dtype=np.int64)
    cdef long long[::1] levels = np.empty(m, dtype=np.int64)
    cdef double[::1] ts = np.empty(m, dtype=np.float64)
    cdef bitgen_t *rng = _bitgen(stream)
    cdef double alpha_n = angs[n - 1]
    # matches embed_equatorial(alpha_n, negate_second=True)
    cdef double a0 = cos(alpha_n)
    cdef double a1 = -sin(alpha_n)
    cdef double a2 = 0.0
    cdef Py_ssize_t r, i
    cdef long long used1 = 0
    cdef long long used2 = 0
    cdef long long b_prod, o_n, s
    cdef double theta1, theta2, u1, u2, v, sp1, sp2, sval
    cdef double l10, l11, l12, l20, l21, l22
    with nogil:
        for r in range(count):
            theta1 = _uvs_run(rng, prefix, 1, js, bs, deltas, kappa, levels, ts, &used1)
            theta2 = _uvs_run(rng, prefix, 1, js, bs, deltas, kappa, levels, ts, &used2)
            b_prod = 1
            for i in range(m):
                s = _sign(rng)
                out[r, i] = <signed char>s
                b_prod *= s
            u1 = 2.0 * _next(rng) - 1.0
            u2 = 2.0 * _next(rng) - 1.0
            v = 1.0 - u1 * u1
            if v < 0.0:
                v = 0.0
            sp1 = sqrt(v)
            v = 1.0 - u2 * u2
            if v < 0.0:
                v = 0.0
            sp2 = sqrt(v)
            l10 = cos(theta1) * sp1
            l11 = sin(theta1) * sp1
            l12 = u1
            l20 = cos(theta2) * sp2
            l21 = sin(theta2) * sp2
            l22 = u2
            sval = (l10 * a0 + l11 * a1 + l12 * a2) + (l20 * a0 + l21 * a1 + l22 * a2)
            o_n = b_prod * (1 if sval >= 0.0 else -1)
            out[r, n - 1] = <signed char>o_n
            bi[r] = used1 + used2
    return outcomes, bits


def lemma1_batch(object stream, Py_ssize_t count):
    """`count` draws of the halved two-point mixture sum, float64."""
    if count < 0:
        raise ValueError("count must be >= 0")
    samples = np.empty(count, dtype=np.float64)
    cdef double[::1] out = samples
    cdef bitgen_t *rng = _bitgen(stream)
    cdef Py_ssize_t r
    cdef long long i, side
    cdef double width, t1, t2
    with nogil:
        for r in range(count):
            i = _geom(rng)
            side = _sign(rng)
            width = ldexp(1.0, -<int>i)
            if side == -1:
                t1 = width * _next(rng)
                t2 = width * _next(rng)
            else:
                t1 = 1.0 - width * _next(rng)
                t2 = 1.0 - width * _next(rng)
            out[r] = 0.5 * (t1 + t2)
    return samples
