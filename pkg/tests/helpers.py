"""Shared test fixtures: random instance generators and independent oracles.

The oracles here deliberately avoid the package's optimized code paths:
walk operators are rebuilt from the definition with explicit loops, noise
ensembles are enumerated with itertools, and probabilities use plain Python
arithmetic.  Tests compare the library against these slow references.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from szwalk import (
    Graph,
    MarkedSet,
    TransitionMatrix,
    apply_marking,
    build_transition_matrix,
    build_walk_operator,
    initial_state,
)
from szwalk.graphs import is_bipartite, is_connected


def random_regular_graph(rng: np.random.Generator, n: int, d: int, tries: int = 4000) -> Graph:
    """Random d-regular simple graph via configuration-model pairing.

    High degrees are sampled as the complement of an (n-1-d)-regular graph,
    where pairing rejection is cheap.
    """
    if n * d % 2 != 0 or d >= n:
        raise ValueError(f"no d-regular graph on n={n}, d={d}")
    if n - 1 - d < d:
        return random_regular_graph(rng, n, n - 1 - d, tries).complement()
    stubs = np.repeat(np.arange(n), d)
    for _ in range(tries):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        edges = set()
        ok = True
        for a, b in pairs:
            a, b = int(a), int(b)
            if a == b or (min(a, b), max(a, b)) in edges:
                ok = False
                break
            edges.add((min(a, b), max(a, b)))
        if ok:
            return Graph(n, sorted(edges))
    raise RuntimeError(f"could not sample a simple {d}-regular graph on {n} vertices")


def random_walkable_regular_graph(rng: np.random.Generator, n_max: int = 10) -> Graph:
    """Random connected non-bipartite regular graph, n <= n_max."""
    while True:
        n = int(rng.integers(3, n_max + 1))
        choices = [d for d in range(2, n) if n * d % 2 == 0]
        d = int(rng.choice(choices))
        g = random_regular_graph(rng, n, d)
        if is_connected(g) and not is_bipartite(g):
            return g


def random_marked_set(rng: np.random.Generator, n: int, m_min: int = 0, m_max=None) -> MarkedSet:
    m_max = n - 1 if m_max is None else m_max
    m = int(rng.integers(m_min, m_max + 1))
    members = rng.choice(n, size=m, replace=False)
    return MarkedSet([int(v) for v in members], n)


def random_symmetric_stochastic(rng: np.random.Generator, n: int) -> TransitionMatrix:
    """Random dense symmetric doubly stochastic matrix (symmetric Sinkhorn)."""
    A = rng.random((n, n)) + 0.1
    A = (A + A.T) / 2.0
    d = np.ones(n)
    for _ in range(200):
        r = d * (A @ d)
        if np.abs(r - 1.0).max() < 1e-15:
            break
        d = d / np.sqrt(r)
    P = d[:, None] * A * d[None, :]
    P = (P + P.T) / 2.0
    return TransitionMatrix(P)


def loop_walk_reference(P: TransitionMatrix):
    """Walk operator built entirely with explicit index loops.

    Returns (A, B, RA, RB, U) as plain arrays; the reference for both the
    reflection-product builder and the closed-form kernel.
    """
    n = P.n
    A = np.zeros((n * n, n))
    B = np.zeros((n * n, n))
    for x in range(n):
        for y in range(n):
            A[x * n + y, x] = math.sqrt(P.entries[x, y])
            B[x * n + y, y] = math.sqrt(P.entries[y, x])
    RA = 2.0 * A @ A.T - np.eye(n * n)
    RB = 2.0 * B @ B.T - np.eye(n * n)
    U = RB @ RA
    return A, B, RA, RB, U


def noise_slots(base: Graph, variant: str) -> list:
    if variant == "bond_flip":
        return [(i, j) for i in range(base.n) for j in range(i + 1, base.n)]
    if variant == "removal_only":
        return list(base.edges)
    raise ValueError(variant)


def enumerate_noise(base: Graph, variant: str, p: float) -> list:
    """All (graph, probability) outcomes of one noise draw, via itertools.

    Independent of the percolation module: slots, flip patterns, and
    binomial weights are rebuilt from scratch with Python arithmetic.
    """
    slots = noise_slots(base, variant)
    base_edges = set(base.edges)
    outcomes = []
    for pattern in itertools.product((0, 1), repeat=len(slots)):
        prob = 1.0
        for bit in pattern:
            prob *= p if bit else (1.0 - p)
        edges = set(base_edges)
        for bit, slot in zip(pattern, slots):
            if not bit:
                continue
            if variant == "bond_flip":
                edges.symmetric_difference_update([slot])
            else:
                edges.discard(slot)
        outcomes.append((Graph(base.n, sorted(edges)), prob))
    return outcomes


def sequence_ensemble_F(base: Graph, variant: str, p: float, M: MarkedSet, T: int) -> list:
    """Brute-force noise-averaged F values for t = 0..T.

    Enumerates every length-T operator sequence with its product weight and
    averages the squared displacement of the initial state, straight from
    the definition.  Exponential in T; fixtures only.
    """
    outcomes = enumerate_noise(base, variant, p)
    ops = []
    for g, _ in outcomes:
        chain = apply_marking(build_transition_matrix(g), M)
        ops.append(build_walk_operator(chain).U)
    psi0 = initial_state(build_transition_matrix(base)).amplitudes
    F = [0.0] * (T + 1)
    for seq in itertools.product(range(len(outcomes)), repeat=T):
        prob = 1.0
        for idx in seq:
            prob *= outcomes[idx][1]
        v = psi0
        total = 0.0
        for t in range(1, T + 1):
            v = ops[seq[t - 1]] @ v
            diff = v - psi0
            total += float(diff @ diff)
            F[t] += prob * total / (t + 1)
    return F


def sequence_ensemble_average_power(base: Graph, variant: str, p: float, M: MarkedSet, t: int):
    """Brute-force E[U_t ... U_1] by enumerating length-t sequences."""
    outcomes = enumerate_noise(base, variant, p)
    ops = []
    for g, _ in outcomes:
        chain = apply_marking(build_transition_matrix(g), M)
        ops.append(build_walk_operator(chain).U)
    dim = base.n * base.n
    acc = np.zeros((dim, dim))
    for seq in itertools.product(range(len(outcomes)), repeat=t):
        prob = 1.0
        prod = np.eye(dim)
        for idx in seq:
            prob *= outcomes[idx][1]
            prod = ops[idx] @ prod
        acc += prob * prod
    return acc
