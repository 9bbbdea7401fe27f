"""Quantum walk operators on the doubled space and state evolution.

The walk lives on H^(n^2) with basis |x,y> laid out row-major: (x, y) maps to
index x*n + y.  Two isometries built from the square-rooted transition matrix
define reflections RA = 2*A*A^T - I and RB = 2*B*B^T - I, and one walk step is
U = RB @ RA.  Everything is real-valued: all operators involved are real
orthogonal matrices, so complex arithmetic is never needed.
"""

from __future__ import annotations

import numpy as np

from .graphs import MarkedSet, TransitionMatrix

NORM_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-10


class WalkState:
    """Real amplitude vector over the doubled basis |x,y>.

    Unit norm is enforced at construction unless ``normalized=False`` is
    passed; the opt-out exists for the components of an orthogonal split of a
    state, which are meaningful but not unit vectors.
    """

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes, normalized: bool = True):
        amps = np.array(amplitudes, dtype=np.float64).reshape(-1)
        if amps.shape[0] != n * n:
            raise ValueError(f"expected {n * n} amplitudes for n={n}, got {amps.shape[0]}")
        if normalized:
            norm = float(np.linalg.norm(amps))
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state norm {norm!r} is not 1 within {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("WalkState is immutable")

    def amplitude(self, x: int, y: int) -> float:
        return float(self.amplitudes[x * self.n + y])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class WalkOperator:
    """One-step walk operator with its factor decomposition.

    U is built literally as RB @ RA so the identity U = RB*RA holds by
    construction; A and B are the n^2-by-n isometry factors behind the
    reflections.
    """

    __slots__ = ("n", "U", "A", "B", "RA", "RB")

    def __init__(self, n, U, A, B, RA, RB):
        for arr in (U, A, B, RA, RB):
            arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "RA", RA)
        object.__setattr__(self, "RB", RB)

    def __setattr__(self, name, value):
        raise AttributeError("WalkOperator is immutable")

    def __repr__(self):
        return f"WalkOperator(n={self.n})"


def sqrt_transition(P: TransitionMatrix) -> np.ndarray:
    """Elementwise square root of the transition matrix; the amplitude table
    from which every walk object is assembled."""
    return np.sqrt(P.entries)


def phi_state(x: int, P: TransitionMatrix) -> WalkState:
    """Unit state with amplitude sqrt(p_xy) at (x, y): vertex x paired with
    the superposition of its outgoing transitions."""
    n = P.n
    if not 0 <= x < n:
        raise ValueError(f"vertex {x} out of range for n={n}")
    amps = np.zeros(n * n)
    amps[x * n : (x + 1) * n] = np.sqrt(P.entries[x])
    return WalkState(n, amps)


def psi_state(y: int, P: TransitionMatrix) -> WalkState:
    """Mirror of phi_state: amplitude sqrt(p_yx) at (x, y), i.e. vertex y in
    the second slot paired with its transition superposition in the first."""
    n = P.n
    if not 0 <= y < n:
        raise ValueError(f"vertex {y} out of range for n={n}")
    amps = np.zeros(n * n)
    amps[y::n] = np.sqrt(P.entries[y])
    return WalkState(n, amps)


def _isometry_factors(q: np.ndarray) -> tuple:
    """A and B as dense (n^2, n) matrices; column x of A is the phi state of
    x, column y of B is the psi state of y."""
    n = q.shape[0]
    idx = np.arange(n)
    A3 = np.zeros((n, n, n))
    A3[idx, :, idx] = q
    B3 = np.zeros((n, n, n))
    B3[:, idx, idx] = q.T
    return A3.reshape(n * n, n), B3.reshape(n * n, n)


def build_walk_operator(P: TransitionMatrix) -> WalkOperator:
    """Assemble A, B, the two reflections, and U = RB @ RA."""
    n = P.n
    q = sqrt_transition(P)
    A, B = _isometry_factors(q)
    eye = np.eye(n * n)
    RA = 2.0 * (A @ A.T) - eye
    RB = 2.0 * (B @ B.T) - eye
    U = RB @ RA
    return WalkOperator(n, U, A, B, RA, RB)


def initial_state(P: TransitionMatrix) -> WalkState:
    """Uniform superposition over directed transitions: amplitude
    sqrt(p_xy / n) at (x, y).  Row-stochasticity makes it unit norm, and it is
    a 1-eigenvector of the unmarked walk operator.

    Always built from the unmarked base matrix, even when the evolution that
    follows uses a marked operator."""
    return WalkState(P.n, np.sqrt(P.entries / P.n).reshape(-1))


def evolve(op: WalkOperator, s: WalkState, t: int) -> WalkState:
    """Apply the walk operator t times by repeated matrix-vector products."""
    if t < 0:
        raise ValueError("step count must be nonnegative")
    if op.n != s.n:
        raise ValueError(f"operator n={op.n} does not match state n={s.n}")
    v = s.amplitudes
    for _ in range(t):
        v = op.U @ v
    return WalkState(s.n, v)


def position_distribution(s: WalkState) -> np.ndarray:
    """Marginal probability over the first coordinate: prob(x) = sum_y a(x,y)^2."""
    return (s.amplitudes.reshape(s.n, s.n) ** 2).sum(axis=1)


def apply_walk_from_sqrt(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """One walk step applied matrix-free from the sqrt-transition table.

    Expands U*v = RB*(RA*v) through the rank-n factors in O(n^2) instead of
    materializing the n^2-by-n^2 operator.  Used where many one-off operators
    act on a single vector; agrees with the dense route to float precision."""
    n = q.shape[0]
    w = v.reshape(n, n)
    a = (q * w).sum(axis=1)
    u = 2.0 * q * a[:, None] - w
    b = (q.T * u).sum(axis=0)
    out = 2.0 * q.T * b[None, :] - u
    return out.reshape(-1)


def marked_sqrt_transition(P: TransitionMatrix, M: MarkedSet) -> np.ndarray:
    """sqrt-transition table of the marked chain without building the marked
    matrix object; marked rows become basis rows."""
    q = np.sqrt(P.entries)
    if M.m:
        idx = list(M.members)
        q[idx, :] = 0.0
        q[idx, idx] = 1.0
    return q
