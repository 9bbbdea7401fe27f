"""Spectral data of the unmarked-block submatrix and the closed-form bounds.

Everything here is driven by the eigendecomposition of P_M (the transition
matrix with marked rows and columns deleted) and the overlaps of its
eigenvectors with the scaled all-ones vector.  Those two ingredients give an
upper bound on the coherent hitting time, the decoherence threshold, the
decoherent hitting-time bound, and the detection-time bound.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import MarkedSet, TransitionMatrix, submatrix_PM
from .walk import WalkState

# Treat an eigenvalue this close to 1 as 1 when deciding divergence.
EIGENVALUE_ONE_TOL = 1e-12
# Overlap mass below this is taken as exactly zero (floating-point dust).
NEGLIGIBLE_MASS = 1e-16


class BoundInfiniteError(ValueError):
    """A nonzero-overlap eigenvalue sits at 1, so the bound diverges."""


@dataclass(frozen=True)
class SpectralData:
    """Eigenpairs of P_M and their overlaps with the uniform vector.

    lambdas: eigenvalues of P_M, ascending, clamped to [-1, 1].
    nus: overlaps <v_k | u> with u the (n-m)-vector of entries 1/sqrt(n);
         aligned with lambdas.  Individual signs and the split of mass inside
         a degenerate eigenspace are basis-dependent; per-eigenvalue summed
         squares are not, and only those enter the bounds.
    thetas: arccos(lambdas), radians.
    epsilon: m/n.
    lambda_max_abs: max |lambda_k|.
    """

    lambdas: np.ndarray
    nus: np.ndarray
    thetas: np.ndarray
    epsilon: float
    lambda_max_abs: float

    def __post_init__(self):
        for arr in (self.lambdas, self.nus, self.thetas):
            arr.setflags(write=False)


def spectral_data(P: TransitionMatrix, M: MarkedSet) -> SpectralData:
    """Eigendecomposition of P_M plus uniform-vector overlaps.

    Requires symmetric P (the bounds are only meaningful there, and symmetry
    gives a real orthonormal eigenbasis) and a nonempty marked set.
    """
    if not P.symmetric:
        raise ValueError("spectral data requires a symmetric transition matrix")
    if M.m == 0:
        raise ValueError("spectral data requires a nonempty marked set")
    PM = submatrix_PM(P, M)
    lambdas, vecs = np.linalg.eigh(PM)
    # Clamp 1e-16-scale eigensolver overshoot so arccos and sqrt stay real.
    lambdas = np.clip(lambdas, -1.0, 1.0)
    u_hat = np.full(PM.shape[0], 1.0 / np.sqrt(P.n))
    nus = vecs.T @ u_hat
    return SpectralData(
        lambdas=lambdas,
        nus=nus,
        thetas=np.arccos(lambdas),
        epsilon=M.epsilon,
        lambda_max_abs=float(np.abs(lambdas).max()),
    )


def grouped_overlap_mass(sd: SpectralData, tol: float = 1e-8) -> list:
    """(eigenvalue, summed nu^2) pairs with near-equal eigenvalues merged.

    This is the basis-independent form of the overlap data: inside a
    degenerate eigenspace only the total projected mass is well-defined.
    """
    groups: list = []
    for lam, nu in zip(sd.lambdas, sd.nus):
        if groups and abs(lam - groups[-1][0]) <= tol:
            prev_lam, prev_mass, count = groups[-1]
            groups[-1] = (prev_lam, prev_mass + nu * nu, count + 1)
        else:
            groups.append((float(lam), float(nu * nu), 1))
    return [(lam, mass) for lam, mass, _ in groups]


def _inverse_weighted_sum(sd: SpectralData, transform) -> float:
    """sum_k nu_k^2 * transform(lambda_k), skipping zero-mass terms and
    refusing eigenvalues at 1 that carry mass."""
    total = 0.0
    for lam, nu in zip(sd.lambdas, sd.nus):
        mass = nu * nu
        if lam >= 1.0 - EIGENVALUE_ONE_TOL:
            if mass > NEGLIGIBLE_MASS:
                raise BoundInfiniteError(
                    f"eigenvalue {lam!r} at 1 carries overlap mass {mass!r}; bound is infinite"
                )
            continue
        total += mass * transform(lam)
    return total


def _spectral_sum(sd: SpectralData) -> float:
    """S = sum_k nu_k^2 / sqrt(1 - lambda_k), the core of every bound."""
    return _inverse_weighted_sum(sd, lambda lam: 1.0 / np.sqrt(1.0 - lam))


def szegedy_bound(sd: SpectralData) -> float:
    """Upper bound on the coherent hitting time: 100 S / (1 - epsilon)."""
    return 100.0 * _spectral_sum(sd) / (1.0 - sd.epsilon)


def E_quantity(sd: SpectralData) -> float:
    """Angle-weighted overlap sum: (1/(1-eps)) sum_k nu_k^2 / arccos(lambda_k).

    Sets the percolation threshold below which the decoherent bound holds.
    """
    total = _inverse_weighted_sum(sd, lambda lam: 1.0 / np.arccos(lam))
    return total / (1.0 - sd.epsilon)


def p_threshold(sd: SpectralData, a_c: int) -> float:
    """Largest per-edge noise probability covered by the decoherent bound:
    1 / (300 a_c E)."""
    E = E_quantity(sd)
    if E <= 0.0:
        raise ValueError("E must be positive for a finite threshold")
    return 1.0 / (300.0 * a_c * E)


def dqht_bound(sd: SpectralData, a_c: int, p: float) -> float:
    """Upper bound on the decoherent hitting time:
    8 S / (1-eps) + 942 a_c p S^2 / (1-eps)^2.

    Proven only for p at or below p_threshold; above it the value is still
    returned with a warning since it is no longer a guarantee.
    """
    if p > p_threshold(sd, a_c):
        warnings.warn(
            f"p={p} exceeds the proven threshold; the returned value is not a guarantee",
            stacklevel=2,
        )
    S = _spectral_sum(sd)
    one_minus_eps = 1.0 - sd.epsilon
    return 8.0 * S / one_minus_eps + 942.0 * a_c * p * S * S / (one_minus_eps * one_minus_eps)


def detection_bound(sd: SpectralData, a_c: int, p: float) -> float:
    """Steps sufficient for the detection procedure: 16 S + 3768 a_c p S^2.

    Note the two terms carry no 1/(1-eps) prefactors; the expression is
    implemented exactly as stated.
    """
    S = _spectral_sum(sd)
    return 16.0 * S + 3768.0 * a_c * p * S * S


def corollary_scaling(sd: SpectralData) -> float:
    """dqht_bound at the threshold times sqrt(1 - lambda_max_abs).

    The product a_c * p_threshold is a_c-free, so this ratio depends only on
    the spectral data; across a graph family it should stay bounded by a
    constant when the decoherent hitting time scales like
    1/sqrt(1 - lambda_max_abs).
    """
    if sd.lambda_max_abs >= 1.0 - EIGENVALUE_ONE_TOL:
        raise ValueError("largest |eigenvalue| is 1; the scaling ratio diverges")
    # a_c cancels inside dqht_bound(p_threshold); evaluate with a_c = 1.
    value = dqht_bound(sd, 1, p_threshold(sd, 1))
    return value * np.sqrt(1.0 - sd.lambda_max_abs)


def build_C(P_marked: TransitionMatrix) -> np.ndarray:
    """Overlap operator of the two isometries: C_xy = sqrt(p_xy * p_yx)."""
    return np.sqrt(P_marked.entries * P_marked.entries.T)


def block_structure_deviation(P: TransitionMatrix, M: MarkedSet) -> float:
    """Max deviation of the marked-last permuted C from blkdiag(P_M, I_m).

    For a symmetric base matrix, marking kills the couplings between marked
    and unmarked vertices inside C, leaving the unmarked block equal to P_M
    and the marked block equal to the identity.
    """
    from .graphs import apply_marking  # local import avoids cycle at module load

    Pm = apply_marking(P, M)
    C = build_C(Pm)
    order = np.concatenate([M.unmarked(), np.array(M.members, dtype=np.int64)])
    permuted = C[np.ix_(order, order)]
    n_un = P.n - M.m
    expected = np.zeros_like(permuted)
    expected[:n_un, :n_un] = submatrix_PM(P, M)
    expected[n_un:, n_un:] = np.eye(M.m)
    return float(np.abs(permuted - expected).max())


def split_initial_state(P: TransitionMatrix, M: MarkedSet) -> tuple:
    """Orthogonal split of the initial state by marked first coordinate.

    Returns (psi_unmarked, psi_marked), both unnormalized WalkStates: the
    second carries the amplitudes sqrt(p_xy/n) with x marked (squared norm
    m/n), the first carries the rest, and their sum reconstructs the initial
    state exactly.
    """
    amps = np.sqrt(P.entries / P.n)
    marked_mask = np.zeros(P.n, dtype=bool)
    marked_mask[list(M.members)] = True
    psi_m = np.where(marked_mask[:, None], amps, 0.0).reshape(-1)
    psi_perp = np.where(marked_mask[:, None], 0.0, amps).reshape(-1)
    return (
        WalkState(P.n, psi_perp, normalized=False),
        WalkState(P.n, psi_m, normalized=False),
    )


@dataclass(frozen=True)
class BoundReport:
    """All closed-form bounds for one (graph, marked set, noise) choice,
    evaluated at a specific per-edge probability p."""

    szegedy_bound: float
    E: float
    p_threshold: float
    dqht_bound: float
    detection_bound: float
    a_c: int
    lambda_max_abs: float
    p: float

    def to_json_dict(self) -> dict:
        return {
            "szegedy_bound": self.szegedy_bound,
            "E": self.E,
            "p_threshold": self.p_threshold,
            "dqht_bound": self.dqht_bound,
            "detection_bound": self.detection_bound,
            "a_c": self.a_c,
            "lambda_max_abs": self.lambda_max_abs,
            "p": self.p,
        }


def bound_report(sd: SpectralData, a_c: int, p: float) -> BoundReport:
    """Evaluate every bound at the given noise level."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dq = dqht_bound(sd, a_c, p)
    return BoundReport(
        szegedy_bound=szegedy_bound(sd),
        E=E_quantity(sd),
        p_threshold=p_threshold(sd, a_c),
        dqht_bound=dq,
        detection_bound=detection_bound(sd, a_c, p),
        a_c=a_c,
        lambda_max_abs=sd.lambda_max_abs,
        p=p,
    )
