"""Marked-set detection by controlled interference against a noisy walk.

One trial prepares a control qubit next to the walk's initial state, applies
a uniformly random number t <= T of controlled walk steps (each step's
operator drawn fresh from the noise model), interferes the branches with a
Hadamard, and measures the control.  Outcome 1 has probability
p1 = ||psi0 - U_t ... U_1 psi0||^2 / 4, so marked absorption shows up as a
measurable displacement while an empty marked set keeps the state fixed
whenever the sampled chain preserves it.

Production trials use the matrix-free factored application; a literal
2n^2-dimensional control-register simulation (dense controlled operators)
exists as a reference path and is cross-checked in test mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, MarkedSet, apply_marking, build_transition_matrix
from .hitting import coherent_F_curve, decoherent_F_curve
from .percolation import (
    EXACT_ENUMERATION_CAP,
    PercolationModel,
    build_averaged_operator_exact,
    sample_percolated_graph,
)
from .rng import philox_stream
from .walk import apply_walk_from_sqrt, build_walk_operator, initial_state, marked_sqrt_transition

PROBABILITY_SUM_TOL = 1e-12
REFERENCE_TOL = 1e-12


@dataclass(frozen=True)
class DetectionTrialResult:
    """One interference trial: chosen step count, exact branch probabilities,
    and the sampled measurement outcome.  invariance_dev records, for empty
    marked sets, the largest one-step displacement of the initial state under
    the chains sampled in this trial."""

    t_chosen: int
    outcome: int
    p0: float
    p1: float
    invariance_dev: float | None = None


@dataclass(frozen=True)
class DetectionReport:
    """Campaign aggregate with the applicable guarantee.

    guarantee is (1-eps)/4 on mean outcome-1 probability for a nonempty
    marked set, and (1-p)^(a_c T) on the outcome-0 frequency for an empty
    one; passed applies a 4-sigma binomial margin at the guarantee point.
    """

    trials: int
    T: int
    p: float
    variant: str
    m: int
    n: int
    frac_outcome1: float
    frac_outcome0: float
    mean_p1: float
    guarantee: float
    passed: bool
    invariance_max_dev: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "T": self.T,
            "p": self.p,
            "variant": self.variant,
            "m": self.m,
            "n": self.n,
            "frac_outcome1": self.frac_outcome1,
            "frac_outcome0": self.frac_outcome0,
            "mean_p1": self.mean_p1,
            "guarantee": self.guarantee,
            "pass": self.passed,
            "invariance_max_dev": self.invariance_max_dev,
        }


def _reference_probs(graphs: list, M: MarkedSet, psi0: np.ndarray) -> tuple:
    """Literal control-register simulation on the 2n^2-dimensional space.

    Builds each controlled step as a dense block matrix acting on the stacked
    (control=0, control=1) state, with the walk operators constructed through
    the explicit reflection product.  Slow by design; test-mode oracle only.
    """
    n2 = psi0.shape[0]
    hadamard = np.kron(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0), np.eye(n2))
    state = np.zeros(2 * n2)
    state[:n2] = psi0
    state = hadamard @ state
    for g in graphs:
        chain = apply_marking(build_transition_matrix(g), M)
        U = build_walk_operator(chain).U
        controlled = np.zeros((2 * n2, 2 * n2))
        controlled[:n2, :n2] = np.eye(n2)
        controlled[n2:, n2:] = U
        state = controlled @ state
    state = hadamard @ state
    p0 = float(state[:n2] @ state[:n2])
    p1 = float(state[n2:] @ state[n2:])
    return p0, p1


def run_detection_trial(
    model: PercolationModel,
    M: MarkedSet,
    T: int,
    rng: np.random.Generator,
    verify: bool = False,
) -> DetectionTrialResult:
    """Draw t uniform on {0..T}, apply t freshly sampled controlled steps,
    and compute the exact branch probabilities before sampling the outcome.

    Sampled chains are marked when M is nonempty and left unmarked when M is
    empty (the walker cannot know which case it is in).  With verify=True the
    probabilities are recomputed on the explicit control-register path and
    must agree to 1e-12.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    base_P = build_transition_matrix(model.base)
    psi0 = initial_state(base_P).amplitudes
    t = int(rng.integers(0, T + 1))
    graphs = [sample_percolated_graph(model, rng) for _ in range(t)]
    v = psi0
    inv_dev = 0.0 if M.m == 0 else None
    for g in graphs:
        q = marked_sqrt_transition(build_transition_matrix(g), M)
        if inv_dev is not None:
            step = apply_walk_from_sqrt(q, psi0)
            inv_dev = max(inv_dev, float(np.linalg.norm(step - psi0)))
        v = apply_walk_from_sqrt(q, v)
    minus = psi0 - v
    plus = psi0 + v
    p1 = float(minus @ minus) / 4.0
    p0 = float(plus @ plus) / 4.0
    if abs(p0 + p1 - 1.0) > PROBABILITY_SUM_TOL:
        raise AssertionError(f"branch probabilities sum to {p0 + p1!r}")
    if verify:
        p0_ref, p1_ref = _reference_probs(graphs, M, psi0)
        if abs(p0 - p0_ref) > REFERENCE_TOL or abs(p1 - p1_ref) > REFERENCE_TOL:
            raise AssertionError(
                f"factored path ({p0}, {p1}) disagrees with control-register "
                f"reference ({p0_ref}, {p1_ref})"
            )
    outcome = 1 if rng.random() < p1 else 0
    return DetectionTrialResult(t_chosen=t, outcome=outcome, p0=p0, p1=p1, invariance_dev=inv_dev)


def run_detection_campaign(
    model: PercolationModel,
    M: MarkedSet,
    T: int,
    trials: int,
    seed: int,
    verify: bool = False,
) -> DetectionReport:
    """Aggregate independent trials, each on its own keyed stream."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = [
        run_detection_trial(model, M, T, philox_stream(seed, i), verify=verify)
        for i in range(trials)
    ]
    outcomes = np.array([r.outcome for r in results])
    p1s = np.array([r.p1 for r in results])
    frac1 = float(outcomes.mean())
    mean_p1 = float(p1s.mean())
    if M.m >= 1:
        guarantee = 0.25 * (1.0 - M.epsilon)
        observed = mean_p1
        inv_max = None
    else:
        guarantee = (1.0 - model.p) ** (model.a_c * T)
        observed = 1.0 - frac1
        inv_max = max(r.invariance_dev for r in results)
    sigma = np.sqrt(guarantee * (1.0 - guarantee) / trials)
    passed = bool(observed >= guarantee - 4.0 * sigma)
    return DetectionReport(
        trials=trials,
        T=T,
        p=model.p,
        variant=model.variant,
        m=M.m,
        n=model.base.n,
        frac_outcome1=frac1,
        frac_outcome0=1.0 - frac1,
        mean_p1=mean_p1,
        guarantee=guarantee,
        passed=passed,
        invariance_max_dev=inv_max,
    )


def exact_mean_p1(
    model: PercolationModel, M: MarkedSet, T: int, cap: int = EXACT_ENUMERATION_CAP
) -> float:
    """Exact trial-averaged outcome-1 probability, no sampling.

    Equals F(T)/4 of the applicable averaged evolution: the double average
    over sequences and uniform t reduces to powers of the averaged operator
    because everything is real.  At p = 0 only the base chain occurs, so the
    coherent curve is used directly; otherwise the exact averaged operator is
    enumerated (budget permitting)."""
    base_P = build_transition_matrix(model.base)
    if model.p == 0.0:
        return float(coherent_F_curve(base_P, M, T)[T]) / 4.0
    ubar = build_averaged_operator_exact(model, M, cap=cap)
    return float(decoherent_F_curve(ubar, base_P, T)[T]) / 4.0


def invariance_deviation_over_subgraphs(g: Graph) -> float:
    """Max one-step displacement of the initial state across every subgraph.

    Exhaustively enumerates edge subsets of the base graph (the support of
    the removal-only model), builds each subgraph's unmarked walk, and
    measures how far one application moves the base initial state.  Zero
    means the empty-marked-set interference can never fire; nonzero
    quantifies the one-sided-error gap for non-regular samples.
    """
    if len(g.edges) > 20:
        raise ValueError("subgraph enumeration capped at 2^20")
    base_P = build_transition_matrix(g)
    psi0 = initial_state(base_P).amplitudes
    worst = 0.0
    M0 = MarkedSet([], g.n)
    for pattern in range(2 ** len(g.edges)):
        edges = [e for k, e in enumerate(g.edges) if pattern >> k & 1]
        sub = Graph(g.n, edges)
        q = marked_sqrt_transition(build_transition_matrix(sub), M0)
        moved = apply_walk_from_sqrt(q, psi0)
        worst = max(worst, float(np.linalg.norm(moved - psi0)))
    return worst
