"""Hitting-time functionals: coherent and noise-averaged curves, stopping
times, diagnostic decomposition, and the classical baseline.

The walk's progress toward a marked set is tracked by the time-averaged
squared displacement of the evolved state from the initial state,
F(T) = (1/(T+1)) sum_{t<=T} ||U^t psi0 - psi0||^2.  The quantum hitting time
is the first T where F reaches 1 - m/n.  Under per-step noise the same
functional is evaluated against powers of the averaged operator, which equals
the sequence-ensemble average because the initial state and all operators are
real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import MarkedSet, TransitionMatrix, apply_marking, build_transition_matrix, submatrix_PM
from .percolation import AveragedOperator, PercolationModel, averaged_operator
from .spectral import BoundReport, bound_report, dqht_bound, p_threshold, spectral_data, szegedy_bound
from .walk import build_walk_operator, initial_state


@dataclass(frozen=True)
class HittingTimeReport:
    """F-curve scan result.

    F_curve holds F(0..T_max) for the scanned range; T_star is the first
    crossing of the threshold or None when the scan ended without one.  For
    noise-averaged runs the noise parameters and the operator provenance are
    recorded, along with whether p sits below the proven threshold.
    """

    F_curve: np.ndarray
    threshold: float
    T_star: int | None
    T_max: int
    mode: str
    bound: float | None = None
    bound_used: BoundReport | None = None
    p: float | None = None
    variant: str | None = None
    operator_mode: str | None = None
    within_threshold: bool | None = None

    def __post_init__(self):
        self.F_curve.setflags(write=False)

    @property
    def reached(self) -> bool:
        return self.T_star is not None

    @property
    def within_bound(self) -> bool | None:
        if self.bound is None:
            return None
        if self.T_star is None:
            return False
        return self.T_star <= self.bound


def coherent_F_curve(P: TransitionMatrix, M: MarkedSet, T_max: int) -> np.ndarray:
    """F values for t = 0..T_max under the marked walk operator.

    The initial state always comes from the unmarked matrix; only the
    evolution uses marking.  Computed in one pass with a running sum, and
    F(0) is exactly 0 by construction.
    """
    if T_max < 0:
        raise ValueError("T_max must be nonnegative")
    op = build_walk_operator(apply_marking(P, M))
    psi0 = initial_state(P).amplitudes
    F = np.empty(T_max + 1)
    F[0] = 0.0
    v = psi0
    total = 0.0
    for t in range(1, T_max + 1):
        v = op.U @ v
        diff = v - psi0
        total += float(diff @ diff)
        F[t] = total / (t + 1)
    return F


def coherent_qht(P: TransitionMatrix, M: MarkedSet, T_cap: int | None = None) -> HittingTimeReport:
    """Scan T = 0, 1, 2, ... for the first F(T) >= 1 - m/n.

    The default cap is the ceiling of the closed-form coherent bound, which
    needs a symmetric matrix and a nonempty marked set; otherwise pass T_cap
    explicitly.  "Not reached" is reported as T_star = None, not an error.
    """
    threshold = 1.0 - M.epsilon
    bound = None
    if P.symmetric and M.m >= 1:
        bound = szegedy_bound(spectral_data(P, M))
    if T_cap is None:
        if M.m == 0:
            T_cap = 0
        elif bound is None:
            raise ValueError("no default cap for a non-symmetric matrix; pass T_cap")
        else:
            T_cap = math.ceil(bound)
    op = build_walk_operator(apply_marking(P, M))
    psi0 = initial_state(P).amplitudes
    F_values = [0.0]
    T_star = 0 if F_values[0] >= threshold else None
    v = psi0
    total = 0.0
    t = 0
    while T_star is None and t < T_cap:
        t += 1
        v = op.U @ v
        diff = v - psi0
        total += float(diff @ diff)
        F_values.append(total / (t + 1))
        if F_values[-1] >= threshold:
            T_star = t
    return HittingTimeReport(
        F_curve=np.array(F_values),
        threshold=threshold,
        T_star=T_star,
        T_max=len(F_values) - 1,
        mode="coherent",
        bound=bound,
    )


def decoherent_F_curve(Ubar: AveragedOperator, P: TransitionMatrix, T_max: int) -> np.ndarray:
    """F values under the averaged operator via the inner-product identity
    F(T) = 2 - (2/(T+1)) sum_{t<=T} <psi0| Ubar^t |psi0>.

    Powers are never materialized; the state is advanced by one application
    per step.  The t = 0 term is the literal 1 (the zeroth power is the
    identity), which keeps F(0) exactly 0.
    """
    if T_max < 0:
        raise ValueError("T_max must be nonnegative")
    psi0 = initial_state(P).amplitudes
    F = np.empty(T_max + 1)
    F[0] = 0.0
    v = psi0
    ip_sum = 1.0
    for t in range(1, T_max + 1):
        v = Ubar.matrix @ v
        ip_sum += float(psi0 @ v)
        F[t] = 2.0 - 2.0 * ip_sum / (t + 1)
    return F


def decoherent_qht(
    model: PercolationModel,
    M: MarkedSet,
    mode: str = "exact",
    T_cap: int | None = None,
    samples: int = 10**4,
    seed: int = 0,
) -> HittingTimeReport:
    """First crossing of the noise-averaged F curve over 1 - m/n.

    The averaged operator is built per ``mode`` ("exact" enumeration or "mc").
    The default cap is the ceiling of the noise-aware bound at the model's p;
    the report records that bound and whether p is below the proven
    threshold.
    """
    P = build_transition_matrix(model.base)
    threshold = 1.0 - M.epsilon
    report = None
    if P.symmetric and M.m >= 1:
        sd = spectral_data(P, M)
        report = bound_report(sd, model.a_c, model.p)
    if T_cap is None:
        if report is None:
            raise ValueError("no default cap without spectral bounds; pass T_cap")
        T_cap = math.ceil(report.dqht_bound)
    ubar = averaged_operator(model, M, mode=mode, samples=samples, seed=seed)
    psi0 = initial_state(P).amplitudes
    F_values = [0.0]
    T_star = 0 if F_values[0] >= threshold else None
    v = psi0
    ip_sum = 1.0
    t = 0
    while T_star is None and t < T_cap:
        t += 1
        v = ubar.matrix @ v
        ip_sum += float(psi0 @ v)
        F_values.append(2.0 - 2.0 * ip_sum / (t + 1))
        if F_values[-1] >= threshold:
            T_star = t
    return HittingTimeReport(
        F_curve=np.array(F_values),
        threshold=threshold,
        T_star=T_star,
        T_max=len(F_values) - 1,
        mode="decoherent",
        bound=None if report is None else report.dqht_bound,
        bound_used=report,
        p=model.p,
        variant=model.variant,
        operator_mode=ubar.mode,
        within_threshold=None if report is None else model.p <= report.p_threshold,
    )


@dataclass(frozen=True)
class GTermReport:
    """Diagnostic split of the averaged F value at a fixed T.

    G_M, G_MMbot, G_Mbot are the time-averaged matrix elements of the
    averaged-operator powers taken in the marked/unmarked split of the
    initial state; they satisfy F = 2 - 2 (G_M + G_MMbot + G_Mbot) and
    G_M <= epsilon.
    """

    G_M: float
    G_MMbot: float
    G_Mbot: float
    epsilon: float
    T: int


def g_term_decomposition(
    Ubar: AveragedOperator, P: TransitionMatrix, M: MarkedSet, T: int
) -> GTermReport:
    """Time-averaged quadratic forms of Ubar powers on the split initial state."""
    from .spectral import split_initial_state

    if T < 0:
        raise ValueError("T must be nonnegative")
    psi_perp, psi_m = split_initial_state(P, M)
    vm0 = psi_m.amplitudes
    vp0 = psi_perp.amplitudes
    vm, vp = vm0, vp0
    gm = gcross = gp = 0.0
    for t in range(T + 1):
        if t > 0:
            vm = Ubar.matrix @ vm
            vp = Ubar.matrix @ vp
        gm += float(vm0 @ vm)
        gcross += float(vp0 @ vm) + float(vm0 @ vp)
        gp += float(vp0 @ vp)
    scale = 1.0 / (T + 1)
    return GTermReport(
        G_M=gm * scale,
        G_MMbot=gcross * scale,
        G_Mbot=gp * scale,
        epsilon=M.epsilon,
        T=T,
    )


def classical_hitting_time(P: TransitionMatrix, M: MarkedSet) -> float:
    """Expected steps to absorption into the marked set from a uniform start.

    Solves (I - P_M) h = 1 on the unmarked block; marked starts contribute 0
    to the average.  This is the comparison convention matching the uniform
    quantum initial condition.  A singular system means some vertex cannot
    reach the marked set.
    """
    if M.m == 0:
        raise ValueError("classical hitting time needs a nonempty marked set")
    if M.m == P.n:
        return 0.0
    PM = submatrix_PM(P, M)
    k = PM.shape[0]
    system = np.eye(k) - PM
    ones = np.ones(k)
    try:
        h = np.linalg.solve(system, ones)
    except np.linalg.LinAlgError as exc:
        raise ValueError("marked set unreachable: absorption system is singular") from exc
    residual = float(np.abs(system @ h - ones).max())
    if not np.all(np.isfinite(h)) or residual > 1e-6:
        raise ValueError("marked set unreachable: absorption system is singular")
    return float(h.sum() / P.n)
