# cython: boundscheck=False, wraparound=False, initializedcheck=False, language_level=3
"""Compiled walk-operator kernels.

Same contract and same floating-point evaluation order as _kernels_py, so the
two backends produce bitwise identical results; only the speed differs.  See
_kernels_py for the derivation of the entrywise closed form.
"""

import numpy as np


cdef void _fill_walk(double[:, ::1] q, double[::1] row, Py_ssize_t x, Py_ssize_t y) noexcept nogil:
    # row receives the (x, y) row of U(q) in row-major (x', y') order.
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t xp, yp
    cdef double t1, g, base
    t1 = 4.0 * q[y, x]
    for xp in range(n):
        g = q[y, xp] * q[xp, y]
        base = t1 * g
        for yp in range(n):
            row[xp * n + yp] = base * q[xp, yp]
    for xp in range(n):
        row[xp * n + y] -= 2.0 * (q[y, x] * q[y, xp])
    for yp in range(n):
        row[x * n + yp] -= 2.0 * (q[x, y] * q[x, yp])
    row[x * n + y] += 1.0


def assemble_walk(q_in) -> np.ndarray:
    """Dense one-step walk operator from a sqrt-transition table."""
    q_arr = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef double[:, ::1] q = q_arr
    cdef Py_ssize_t n = q.shape[0]
    out_arr = np.empty((n * n, n * n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t x, y
    with nogil:
        for x in range(n):
            for y in range(n):
                _fill_walk(q, out[x * n + y], x, y)
    return out_arr


def accumulate_walk(q_batch_in, weights_in, out_in, out_sq_in=None) -> None:
    """Add sum_b weights[b] * U(q_batch[b]) into ``out_in`` in place.

    ``out_in`` (and ``out_sq_in`` when given) must be C-contiguous float64
    (n^2, n^2) arrays; they are mutated.  Accumulation runs strictly in batch
    order, one fused assemble-and-add pass per sample, so no per-sample
    operator is ever materialized.
    """
    qb_arr = np.ascontiguousarray(q_batch_in, dtype=np.float64)
    w_arr = np.ascontiguousarray(weights_in, dtype=np.float64)
    if qb_arr.ndim != 3 or qb_arr.shape[1] != qb_arr.shape[2]:
        raise ValueError(f"expected (B, n, n) batch, got shape {qb_arr.shape}")
    if w_arr.shape[0] != qb_arr.shape[0]:
        raise ValueError("one weight per sample required")
    cdef double[:, :, ::1] qb = qb_arr
    cdef double[::1] w = w_arr
    cdef double[:, ::1] out = out_in
    cdef bint has_sq = out_sq_in is not None
    # Cython memoryviews cannot be conditionally unset under nogil, so route
    # the unused case at a harmless dummy buffer guarded by has_sq.
    sq_arr = out_sq_in if has_sq else np.empty((1, 1), dtype=np.float64)
    cdef double[:, ::1] out_sq = sq_arr
    cdef Py_ssize_t n = qb.shape[1]
    cdef Py_ssize_t B = qb.shape[0]
    if out.shape[0] != n * n or out.shape[1] != n * n:
        raise ValueError("out must be (n^2, n^2)")
    scratch_arr = np.empty(n * n, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr
    cdef Py_ssize_t b, x, y, k, row
    cdef double wb, val
    with nogil:
        for b in range(B):
            wb = w[b]
            for x in range(n):
                for y in range(n):
                    row = x * n + y
                    _fill_walk(qb[b], scratch, x, y)
                    for k in range(n * n):
                        val = scratch[k]
                        out[row, k] += wb * val
                        if has_sq:
                            out_sq[row, k] += wb * (val * val)
