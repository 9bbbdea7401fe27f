"""Per-step edge noise: sampling, occurrence probabilities, and the averaged
walk operator.

Two noise variants act on a base graph.  Under ``bond_flip`` every unordered
vertex pair of the complete graph independently flips its membership with
probability p each step; under ``removal_only`` every base edge is
independently deleted with probability p and non-edges stay absent.  The
walker takes one step with the walk operator of whatever marked chain the
sampled graph induces, so the step ensemble is summarized by the weighted
average of those operators.  That average is built here either by exact
enumeration over all 2^a_c slot patterns or by a deduplicated Monte Carlo
estimate, both funneled through the same accumulation kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .graphs import Graph, MarkedSet, build_transition_matrix
from .rng import philox_stream

VARIANTS = ("bond_flip", "removal_only")
EXACT_ENUMERATION_CAP = 2**10
SEQUENCE_BUDGET = 2**16
# Fixed internal batch sizes; constants so chunking can never affect results.
_DRAW_CHUNK = 8192
_ACCUMULATE_CHUNK = 4096


class EnumerationCapError(ValueError):
    """Exact enumeration would exceed the candidate cap; use the Monte Carlo
    builder instead."""


class PercolationModel:
    """Noise model: base graph, per-slot probability, and variant.

    a_c counts the independent edge slots the noise acts on: all n(n-1)/2
    pairs for bond_flip, the base edges for removal_only.
    """

    __slots__ = ("base", "p", "variant", "a_c", "slots", "base_membership")

    def __init__(self, base: Graph, p: float, variant: str = "bond_flip"):
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {p!r}")
        n = base.n
        if variant == "bond_flip":
            slots = tuple((i, j) for i in range(n) for j in range(i + 1, n))
            membership = np.array([s in base.edge_set for s in slots])
        else:
            slots = base.edges
            membership = np.ones(len(slots), dtype=bool)
        membership.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "p", float(p))
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "a_c", len(slots))
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "base_membership", membership)

    def __setattr__(self, name, value):
        raise AttributeError("PercolationModel is immutable")

    def __repr__(self):
        return (
            f"PercolationModel(n={self.base.n}, p={self.p}, "
            f"variant={self.variant!r}, a_c={self.a_c})"
        )

    def membership_from_flips(self, flips: np.ndarray) -> np.ndarray:
        """Slot membership row(s) given boolean flip indicator(s)."""
        if self.variant == "bond_flip":
            return np.logical_xor(self.base_membership, flips)
        return np.logical_and(self.base_membership, np.logical_not(flips))

    def graph_from_membership(self, membership: np.ndarray) -> Graph:
        edges = [slot for slot, present in zip(self.slots, membership) if present]
        return Graph(self.base.n, edges)


def sample_percolated_graph(model: PercolationModel, rng: np.random.Generator) -> Graph:
    """One noise sample: each slot flips (bond_flip) or each base edge drops
    (removal_only) independently with probability p."""
    flips = rng.random(model.a_c) < model.p
    return model.graph_from_membership(model.membership_from_flips(flips))


def occurrence_probability(model: PercolationModel, candidate: Graph) -> float:
    """(1-p)^(a_c - a_d) * p^a_d where a_d counts altered slots.

    bond_flip: a_d is the symmetric-difference size against the base edges;
    removal_only: a_d is the number of deleted base edges, and candidates
    outside the base are rejected.  At p in {0, 1} the formula degenerates to
    the correct point masses via 0**0 == 1.
    """
    if candidate.n != model.base.n:
        raise ValueError("candidate has a different vertex count than the base")
    if model.variant == "bond_flip":
        a_d = len(candidate.edge_set ^ model.base.edge_set)
    else:
        if not candidate.edge_set <= model.base.edge_set:
            raise ValueError("removal_only candidate must be a subgraph of the base")
        a_d = len(model.base.edge_set) - len(candidate.edge_set)
    return (1.0 - model.p) ** (model.a_c - a_d) * model.p**a_d


def _sqrt_batch(model: PercolationModel, membership: np.ndarray, M: MarkedSet) -> np.ndarray:
    """Marked sqrt-transition tables for a batch of membership rows.

    Vectorized replica of build_transition_matrix followed by marking; the
    arithmetic per sample is identical to the single-graph path (same
    divisions on the same values), so the two agree bitwise.
    """
    n = model.base.n
    B = membership.shape[0]
    iu = np.array([i for i, _ in model.slots], dtype=np.int64)
    ju = np.array([j for _, j in model.slots], dtype=np.int64)
    adj = np.zeros((B, n, n))
    if len(model.slots):
        adj[:, iu, ju] = membership
        adj += adj.transpose(0, 2, 1)
    deg = adj.sum(axis=2)
    isolated = deg == 0
    P = adj / np.where(isolated, 1.0, deg)[:, :, None]
    bidx, vidx = np.nonzero(isolated)
    P[bidx, vidx, vidx] = 1.0
    if M.m:
        idx = list(M.members)
        P[:, idx, :] = 0.0
        P[:, idx, idx] = 1.0
    return np.sqrt(P)


@dataclass(frozen=True)
class AveragedOperator:
    """Weighted average of marked walk operators over the noise ensemble.

    mode is "exact" (full enumeration, weights are occurrence probabilities)
    or "monte_carlo" (empirical mean over i.i.d. samples).  The matrix is a
    convex combination of orthogonal matrices, so its 2-norm is at most 1.
    """

    matrix: np.ndarray
    mode: str
    p: float
    variant: str
    a_c: int
    marked: MarkedSet
    samples: int | None = None
    seed: int | None = None
    stderr: np.ndarray | None = None
    weight_sum: float = 1.0

    def __post_init__(self):
        self.matrix.setflags(write=False)
        if self.stderr is not None:
            self.stderr.setflags(write=False)

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def provenance_dict(self) -> dict:
        return {
            "mode": self.mode,
            "p": self.p,
            "variant": self.variant,
            "samples": self.samples,
            "seed": self.seed,
            "a_c": self.a_c,
        }


def _accumulate_average(model, M, membership, weights, with_stderr):
    """Shared weighted accumulation: sum_g weights[g] * U(membership[g])."""
    n = model.base.n
    out = np.zeros((n * n, n * n))
    out_sq = np.zeros((n * n, n * n)) if with_stderr else None
    for start in range(0, membership.shape[0], _ACCUMULATE_CHUNK):
        stop = start + _ACCUMULATE_CHUNK
        q = _sqrt_batch(model, membership[start:stop], M)
        if out_sq is None:
            kernels.accumulate_walk(q, weights[start:stop], out)
        else:
            kernels.accumulate_walk(q, weights[start:stop], out, out_sq)
    return out, out_sq


def _all_flip_patterns(a_c: int) -> np.ndarray:
    """All 2^a_c flip rows in lexicographic order, slot 0 most significant."""
    count = 2**a_c
    bits = (np.arange(count)[:, None] >> np.arange(a_c - 1, -1, -1)[None, :]) & 1
    return bits.astype(bool)


def build_averaged_operator_exact(
    model: PercolationModel, M: MarkedSet, cap: int = EXACT_ENUMERATION_CAP
) -> AveragedOperator:
    """Enumerate every slot pattern and accumulate probability-weighted
    operators.  Weights sum to 1 within 1e-12 (binomial identity)."""
    count = 2**model.a_c
    if count > cap:
        raise EnumerationCapError(
            f"2^{model.a_c} = {count} candidates exceed the cap {cap}; "
            "use build_averaged_operator_mc"
        )
    flips = _all_flip_patterns(model.a_c)
    a_d = flips.sum(axis=1)
    weights = (1.0 - model.p) ** (model.a_c - a_d) * model.p ** a_d
    weight_sum = float(weights.sum())
    if abs(weight_sum - 1.0) > 1e-12:
        raise AssertionError(f"enumeration weights sum to {weight_sum!r}, not 1")
    membership = model.membership_from_flips(flips)
    out, _ = _accumulate_average(model, M, membership, weights, with_stderr=False)
    return AveragedOperator(
        matrix=out,
        mode="exact",
        p=model.p,
        variant=model.variant,
        a_c=model.a_c,
        marked=M,
        weight_sum=weight_sum,
    )


def build_averaged_operator_mc(
    model: PercolationModel,
    M: MarkedSet,
    samples: int,
    seed: int,
    with_stderr: bool = False,
) -> AveragedOperator:
    """Empirical mean of the marked walk operator over i.i.d. noise samples.

    Samples are drawn from one keyed stream in fixed-size chunks, then
    identical slot patterns are grouped (np.unique on packed bits) so each
    distinct graph's operator is assembled once and weighted by its
    multiplicity.  The estimate equals the plain per-sample mean by
    construction and is deterministic given (seed, samples).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    stream = philox_stream(seed)
    rows = np.empty((samples, model.a_c), dtype=bool)
    for start in range(0, samples, _DRAW_CHUNK):
        stop = min(start + _DRAW_CHUNK, samples)
        rows[start:stop] = stream.random((stop - start, model.a_c)) < model.p
    packed = np.packbits(rows, axis=1)
    unique_packed, counts = np.unique(packed, axis=0, return_counts=True)
    flips = np.unpackbits(unique_packed, axis=1)[:, : model.a_c].astype(bool)
    weights = counts / samples
    membership = model.membership_from_flips(flips)
    out, out_sq = _accumulate_average(model, M, membership, weights, with_stderr)
    stderr = None
    if with_stderr:
        variance = np.maximum(out_sq - out * out, 0.0)
        stderr = np.sqrt(variance / samples)
    return AveragedOperator(
        matrix=out,
        mode="monte_carlo",
        p=model.p,
        variant=model.variant,
        a_c=model.a_c,
        marked=M,
        samples=samples,
        seed=seed,
        stderr=stderr,
    )


def averaged_operator(
    model: PercolationModel,
    M: MarkedSet,
    mode: str = "exact",
    samples: int = 10**4,
    seed: int = 0,
    cap: int = EXACT_ENUMERATION_CAP,
) -> AveragedOperator:
    """Mode dispatch used by the hitting-time and CLI layers."""
    if mode == "exact":
        return build_averaged_operator_exact(model, M, cap=cap)
    if mode == "mc":
        return build_averaged_operator_mc(model, M, samples=samples, seed=seed)
    raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")


def _candidate_operators(model: PercolationModel, M: MarkedSet):
    """All candidate graphs' marked walk operators and probabilities, in
    lexicographic flip order."""
    flips = _all_flip_patterns(model.a_c)
    a_d = flips.sum(axis=1)
    probs = (1.0 - model.p) ** (model.a_c - a_d) * model.p ** a_d
    membership = model.membership_from_flips(flips)
    q = _sqrt_batch(model, membership, M)
    ops = np.stack([kernels.assemble_walk(q[g]) for g in range(q.shape[0])])
    return ops, probs


def verify_lemma1(
    model: PercolationModel,
    M: MarkedSet,
    t: int,
    T: int,
    budget: int = SEQUENCE_BUDGET,
) -> float:
    """Max-entry deviation between the sequence-ensemble average of the
    length-t product and the t-th power of the averaged operator.

    Enumerates every length-T operator sequence with its product probability,
    averages the product of the first t factors, and compares against
    matrix_power of the averaged operator.  Budgeted: (2^a_c)^T sequences.
    """
    if not 0 <= t <= T:
        raise ValueError("need 0 <= t <= T")
    n_graphs = 2**model.a_c
    n_seq = n_graphs**T
    if n_seq > budget:
        raise ValueError(f"{n_seq} sequences exceed the budget {budget}")
    dim = model.base.n**2
    workspace = (n_graphs**t + n_graphs) * dim * dim * 8
    if workspace > 2**29:
        raise ValueError("enumeration workspace would exceed 512 MiB; shrink a_c, t, or n")
    ops, probs = _candidate_operators(model, M)
    # Products over the first t factors, indexed by prefix (s_1..s_t) with
    # s_1 most significant; factor s_j acts j-th, so it multiplies from the
    # left of the running product.
    prods = np.eye(dim)[None, :, :]
    for _ in range(t):
        prods = np.stack([op @ pr for pr in prods for op in ops])
    # Literal per-sequence weights for all G^T sequences, C-order raveled so
    # axis order matches the prefix indexing above.
    w = np.ones(1)
    for _ in range(T):
        w = np.multiply.outer(w, probs).reshape(-1)
    tail = w.reshape(n_graphs**t, -1).sum(axis=1)
    lhs = (tail[:, None, None] * prods).sum(axis=0)
    ubar = build_averaged_operator_exact(model, M, cap=max(EXACT_ENUMERATION_CAP, n_graphs))
    rhs = np.linalg.matrix_power(ubar.matrix, t)
    return float(np.abs(lhs - rhs).max())
