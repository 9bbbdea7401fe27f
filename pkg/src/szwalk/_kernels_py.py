"""Pure-numpy walk-operator kernels: closed-form assembly and weighted
accumulation.

With q the elementwise square root of a row-stochastic matrix, the projector
factors of the two reflections satisfy

    (A A^T)[(x,y),(x',y')] = d_xx' q[x,y] q[x,y']
    (B B^T)[(x,y),(x',y')] = d_yy' q[y,x] q[y,x']

so U = (2BB^T - I)(2AA^T - I) expands entrywise to

    U[(x,y),(x',y')] = 4 q[y,x] q[y,x'] q[x',y] q[x',y']
                     - 2 d_yy' q[y,x] q[y,x']
                     - 2 d_xx' q[x,y] q[x,y']
                     + d_xx' d_yy'

which costs O(n^4) per operator instead of the O(n^6) reflection product.
The compiled backend implements the identical arithmetic in the identical
order; results are bitwise equal across backends (tests enforce this).
"""

from __future__ import annotations

import numpy as np


def assemble_walk(q: np.ndarray) -> np.ndarray:
    """Dense one-step walk operator from a sqrt-transition table.

    Returns a C-contiguous (n^2, n^2) array indexed row-major by (x, y).
    """
    q = np.ascontiguousarray(q, dtype=np.float64)
    n = q.shape[0]
    # pairwise factor G[y, x'] = q[y,x'] q[x',y]
    G = q * q.T
    U4 = (4.0 * q.T)[:, :, None, None] * G[None, :, :, None] * q[None, None, :, :]
    for y in range(n):
        U4[:, y, :, y] -= 2.0 * np.outer(q[y], q[y])
    for x in range(n):
        U4[x, :, x, :] -= 2.0 * np.outer(q[x], q[x])
    U = U4.reshape(n * n, n * n)
    diag = np.arange(n * n)
    U[diag, diag] += 1.0
    return U


def accumulate_walk(q_batch: np.ndarray, weights: np.ndarray, out: np.ndarray,
                    out_sq: np.ndarray | None = None) -> None:
    """Add sum_b weights[b] * U(q_batch[b]) into ``out`` in place.

    Samples are accumulated strictly in batch order so results do not depend
    on how callers chunk their batches.  When ``out_sq`` is given, the
    weighted sum of squared entries is accumulated alongside (for standard
    errors of Monte Carlo means).
    """
    q_batch = np.ascontiguousarray(q_batch, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if q_batch.ndim != 3 or q_batch.shape[1] != q_batch.shape[2]:
        raise ValueError(f"expected (B, n, n) batch, got shape {q_batch.shape}")
    if weights.shape[0] != q_batch.shape[0]:
        raise ValueError("one weight per sample required")
    for b in range(q_batch.shape[0]):
        U = assemble_walk(q_batch[b])
        w = weights[b]
        out += w * U
        if out_sq is not None:
            out_sq += w * (U * U)
