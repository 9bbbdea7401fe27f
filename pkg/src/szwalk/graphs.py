"""Graphs, uniform-transition stochastic matrices, and marked sets.

The walk machinery consumes three value types defined here: ``Graph`` (simple
undirected graph on 0-indexed vertices), ``TransitionMatrix`` (row-stochastic
matrix, with the uniform 1/degree construction as the canonical builder), and
``MarkedSet`` (absorbing target set with its density m/n).  All values are
immutable after construction.
"""

from __future__ import annotations

import json
from collections import deque
from pathlib import Path

import numpy as np

ROW_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12


class GraphValidationError(ValueError):
    """Raised when a base graph fails the connectivity/bipartiteness rules."""


class Graph:
    """Simple undirected graph: no self-loops, no duplicate edges.

    Edges are stored canonically as sorted (i, j) pairs with i < j.  Vertex
    count n stays fixed even when edges leave some vertices isolated, which
    happens routinely in percolated samples.
    """

    __slots__ = ("n", "edges")

    def __init__(self, n: int, edges=()):
        if int(n) != n or n < 2:
            raise ValueError(f"vertex count must be an integer >= 2, got {n!r}")
        n = int(n)
        canon = []
        seen = set()
        for edge in edges:
            i, j = edge
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            a, b = (i, j) if i < j else (j, i)
            if not (0 <= a and b < n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a},{b})")
            seen.add((a, b))
            canon.append((a, b))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={len(self.edges)})"

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n))
        for i, j in self.edges:
            adj[i, j] = 1.0
            adj[j, i] = 1.0
        return adj

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def complement(self) -> "Graph":
        """Graph on the same vertices whose edges are exactly the non-edges."""
        present = self.edge_set
        edges = [
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if (i, j) not in present
        ]
        return Graph(self.n, edges)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


def _neighbor_lists(g: Graph) -> list:
    nbrs = [[] for _ in range(g.n)]
    for i, j in g.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    return nbrs


def is_connected(g: Graph) -> bool:
    nbrs = _neighbor_lists(g)
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for w in nbrs[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == g.n


def is_bipartite(g: Graph) -> bool:
    """2-colorability check; vertices in no edge never block a coloring."""
    nbrs = _neighbor_lists(g)
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if color[w] == -1:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return False
    return True


def validate_base_graph(g: Graph) -> None:
    """Base graphs for hitting-time experiments must be connected and
    non-bipartite.  Percolated samples are exempt and never pass through here.
    """
    problems = []
    if not is_connected(g):
        problems.append("disconnected")
    if is_bipartite(g):
        problems.append("bipartite")
    if problems:
        raise GraphValidationError(f"base graph is {' and '.join(problems)}")


def complete_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("complete graph requires n >= 3")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def odd_cycle(n: int) -> Graph:
    if n < 3 or n % 2 == 0:
        raise ValueError("odd cycle requires odd n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def load_graph(path) -> Graph:
    """Parse the JSON graph format {"n": int, "edges": [[i, j], ...]} with
    i < j; duplicate pairs are rejected by the Graph constructor."""
    with open(Path(path), encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise ValueError(f"{path}: expected an object with keys 'n' and 'edges'")
    for e in data["edges"]:
        if not (isinstance(e, list) and len(e) == 2):
            raise ValueError(f"{path}: malformed edge entry {e!r}")
        if not e[0] < e[1]:
            raise ValueError(f"{path}: edge {e!r} must be listed as [i, j] with i < j")
    return Graph(data["n"], data["edges"])


def generate_graph(spec: str) -> Graph:
    """Build a graph from a family spec: 'complete:N', 'cycle:N' (odd), or
    'file:PATH'."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise ValueError(f"graph spec {spec!r} must look like 'family:arg'")
    if kind == "complete":
        return complete_graph(int(arg))
    if kind == "cycle":
        return odd_cycle(int(arg))
    if kind == "file":
        return load_graph(arg)
    raise ValueError(f"unknown graph family {kind!r}")


class TransitionMatrix:
    """Row-stochastic nonnegative matrix.

    Invariants checked at construction: entries in [0, 1] and every row sum
    within 1e-12 of 1.  ``symmetric`` records whether the matrix equals its
    transpose within 1e-12 (true for regular graphs).
    """

    __slots__ = ("n", "entries", "symmetric")

    def __init__(self, entries):
        mat = np.array(entries, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {mat.shape}")
        if np.any(mat < -ROW_SUM_TOL) or np.any(mat > 1.0 + ROW_SUM_TOL):
            bad = int(np.argmax(np.any((mat < -ROW_SUM_TOL) | (mat > 1.0 + ROW_SUM_TOL), axis=1)))
            raise ValueError(f"row {bad}: entries outside [0, 1]")
        sums = mat.sum(axis=1)
        off = np.abs(sums - 1.0)
        if np.any(off > ROW_SUM_TOL):
            bad = int(np.argmax(off))
            raise ValueError(f"row {bad}: sum {sums[bad]!r} not 1 within {ROW_SUM_TOL}")
        mat.setflags(write=False)
        object.__setattr__(self, "n", mat.shape[0])
        object.__setattr__(self, "entries", mat)
        object.__setattr__(self, "symmetric", bool(np.allclose(mat, mat.T, atol=SYMMETRY_TOL)))

    def __setattr__(self, name, value):
        raise AttributeError("TransitionMatrix is immutable")

    def __repr__(self):
        return f"TransitionMatrix(n={self.n}, symmetric={self.symmetric})"


class MarkedSet:
    """Subset of vertices targeted by the walk, with its density epsilon = m/n."""

    __slots__ = ("n", "members", "m", "epsilon")

    def __init__(self, members, n: int):
        members = sorted(set(int(v) for v in members))
        if members and not (0 <= members[0] and members[-1] < n):
            raise ValueError(f"marked vertices {members} out of range for n={n}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "members", tuple(members))
        object.__setattr__(self, "m", len(members))
        object.__setattr__(self, "epsilon", len(members) / n)

    def __setattr__(self, name, value):
        raise AttributeError("MarkedSet is immutable")

    def __repr__(self):
        return f"MarkedSet({list(self.members)}, n={self.n})"

    def unmarked(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.members)] = False
        return np.flatnonzero(mask)


def build_transition_matrix(g: Graph) -> TransitionMatrix:
    """Uniform walk matrix: p_xy = 1/deg(x) on edges, 0 elsewhere.

    Isolated vertices get p_xx = 1 so every row stays stochastic; that keeps
    the walk construction well-defined on arbitrary percolated samples.
    """
    adj = g.adjacency()
    deg = adj.sum(axis=1)
    isolated = deg == 0
    mat = adj / np.where(isolated, 1.0, deg)[:, None]
    if isolated.any():
        idx = np.flatnonzero(isolated)
        mat[idx, idx] = 1.0
    return TransitionMatrix(mat)


def apply_marking(P: TransitionMatrix, M: MarkedSet) -> TransitionMatrix:
    """Replace each marked row by the standard basis row, making the marked
    vertices absorbing.  Idempotent; unmarked rows are untouched."""
    if M.n != P.n:
        raise ValueError(f"marked set is for n={M.n}, matrix has n={P.n}")
    if M.m == 0:
        return P
    mat = np.array(P.entries)
    idx = list(M.members)
    mat[idx, :] = 0.0
    mat[idx, idx] = 1.0
    return TransitionMatrix(mat)


def submatrix_PM(P: TransitionMatrix, M: MarkedSet) -> np.ndarray:
    """P restricted to unmarked rows and columns, order preserved.  The result
    is generally sub-stochastic.  Marking rows of M first would not change the
    retained block, so this accepts marked and unmarked inputs alike."""
    if M.n != P.n:
        raise ValueError(f"marked set is for n={M.n}, matrix has n={P.n}")
    if M.m == P.n:
        raise ValueError("submatrix undefined when every vertex is marked")
    keep = M.unmarked()
    return np.array(P.entries[np.ix_(keep, keep)])
