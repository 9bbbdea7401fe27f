import os
import subprocess
import sys

import numpy as np
import pytest

from szwalk import MarkedSet, apply_marking, build_transition_matrix, philox_stream
from szwalk import _kernels_py, kernels
from szwalk.walk import build_walk_operator, sqrt_transition
from helpers import random_marked_set, random_walkable_regular_graph

try:
    from szwalk import _kernels_cy
except ImportError:
    _kernels_cy = None

needs_cython = pytest.mark.skipif(_kernels_cy is None, reason="compiled extension not built")


def _random_case(rng, n_max=7):
    g = random_walkable_regular_graph(rng, n_max=n_max)
    M = random_marked_set(rng, g.n)
    Pm = apply_marking(build_transition_matrix(g), M)
    return sqrt_transition(Pm), Pm


def test_assemble_matches_reflection_product():
    rng = philox_stream(808)
    for _ in range(10):
        q, Pm = _random_case(rng)
        closed = _kernels_py.assemble_walk(q)
        explicit = build_walk_operator(Pm).U
        assert np.abs(closed - explicit).max() <= 1e-13


def test_assemble_unmarked_is_orthogonal():
    rng = philox_stream(809)
    q, Pm = _random_case(rng)
    U = _kernels_py.assemble_walk(q)
    assert np.abs(U.T @ U - np.eye(U.shape[0])).max() <= 1e-10


def _marked_sqrt_batch(rng, n_max, count):
    g = random_walkable_regular_graph(rng, n_max=n_max)
    P = build_transition_matrix(g)
    return np.stack(
        [
            sqrt_transition(apply_marking(P, random_marked_set(rng, g.n)))
            for _ in range(count)
        ]
    )


def test_accumulate_is_weighted_sum():
    rng = philox_stream(810)
    qs = _marked_sqrt_batch(rng, 5, 4)
    n = qs.shape[1]
    weights = np.array([0.1, 0.2, 0.3, 0.4])
    out = np.zeros((n * n, n * n))
    out_sq = np.zeros((n * n, n * n))
    _kernels_py.accumulate_walk(qs, weights, out, out_sq)
    want = np.zeros_like(out)
    want_sq = np.zeros_like(out)
    for w, q in zip(weights, qs):
        U = _kernels_py.assemble_walk(q)
        want += w * U
        want_sq += w * (U * U)
    assert np.array_equal(out, want)
    assert np.array_equal(out_sq, want_sq)


def test_accumulate_without_variance_buffer():
    rng = philox_stream(811)
    q, _ = _random_case(rng, n_max=4)
    qs = np.stack([q, q])
    weights = np.array([0.5, 0.5])
    out = np.zeros((q.shape[0] ** 2, q.shape[0] ** 2))
    _kernels_py.accumulate_walk(qs, weights, out, None)
    assert np.abs(out - _kernels_py.assemble_walk(q)).max() <= 1e-15


@needs_cython
def test_backends_bitwise_identical_assemble():
    rng = philox_stream(812)
    for _ in range(10):
        q, _ = _random_case(rng)
        assert np.array_equal(_kernels_cy.assemble_walk(q), _kernels_py.assemble_walk(q))


@needs_cython
def test_backends_bitwise_identical_accumulate():
    rng = philox_stream(813)
    qs = _marked_sqrt_batch(rng, 5, 6)
    n = qs.shape[1]
    weights = philox_stream(7).random(qs.shape[0])
    weights /= weights.sum()
    outs = []
    for mod in (_kernels_py, _kernels_cy):
        out = np.zeros((n * n, n * n))
        out_sq = np.zeros((n * n, n * n))
        mod.accumulate_walk(qs, weights, out, out_sq)
        outs.append((out, out_sq))
    assert np.array_equal(outs[0][0], outs[1][0])
    assert np.array_equal(outs[0][1], outs[1][1])


def test_dispatch_reports_backend():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.assemble_walk is not None


def test_env_var_forces_python_backend():
    code = "import szwalk.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, SZWALK_PURE_PYTHON="1")
    got = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert got.stdout.strip() == "python"
