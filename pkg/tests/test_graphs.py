import json

import numpy as np
import pytest

from szwalk import (
    Graph,
    GraphValidationError,
    MarkedSet,
    TransitionMatrix,
    apply_marking,
    build_transition_matrix,
    complete_graph,
    generate_graph,
    load_graph,
    odd_cycle,
    submatrix_PM,
    validate_base_graph,
)
from szwalk.graphs import is_bipartite, is_connected


def test_graph_canonicalizes_edges():
    g = Graph(4, [(2, 1), (0, 3)])
    assert g.edges == ((0, 3), (1, 2))


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(1)


def test_graph_immutable():
    g = Graph(3, [(0, 1)])
    with pytest.raises(AttributeError):
        g.n = 5


def test_adjacency_degrees_complement():
    g = Graph(3, [(0, 1), (1, 2)])
    adj = g.adjacency()
    assert adj[0, 1] == adj[1, 0] == 1
    assert adj[0, 2] == 0
    assert list(g.degrees()) == [1, 2, 1]
    assert g.complement().edges == ((0, 2),)


def test_connectivity_and_bipartiteness():
    path = Graph(3, [(0, 1), (1, 2)])
    assert is_connected(path)
    assert is_bipartite(path)
    tri = complete_graph(3)
    assert is_connected(tri)
    assert not is_bipartite(tri)
    assert not is_connected(Graph(4, [(0, 1), (2, 3)]))


def test_validate_base_graph():
    validate_base_graph(complete_graph(4))
    with pytest.raises(GraphValidationError):
        validate_base_graph(Graph(4, [(0, 1), (2, 3)]))
    with pytest.raises(GraphValidationError):
        validate_base_graph(Graph(4, [(0, 1), (1, 2), (2, 3)]))


def test_families():
    k5 = complete_graph(5)
    assert len(k5.edges) == 10
    c5 = odd_cycle(5)
    assert len(c5.edges) == 5
    assert all(d == 2 for d in c5.degrees())
    with pytest.raises(ValueError):
        complete_graph(2)
    with pytest.raises(ValueError):
        odd_cycle(4)


def test_generate_graph_specs(tmp_path):
    assert generate_graph("complete:4").edges == complete_graph(4).edges
    assert generate_graph("cycle:5").edges == odd_cycle(5).edges
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 3, "edges": [[0, 1], [0, 2], [1, 2]]}))
    assert generate_graph(f"file:{path}").edges == complete_graph(3).edges
    with pytest.raises(ValueError):
        generate_graph("complete")
    with pytest.raises(ValueError):
        generate_graph("torus:3")


def test_load_graph_validation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 3, "edges": [[1, 0]]}))
    with pytest.raises(ValueError):
        load_graph(path)


def test_graph_json_round_trip(tmp_path):
    g = Graph(4, [(0, 1), (1, 3), (2, 3), (0, 2), (0, 3)])
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_json_dict()))
    assert load_graph(path).edges == g.edges


def test_transition_matrix_of_complete_graph():
    P = build_transition_matrix(complete_graph(3))
    expected = (np.ones((3, 3)) - np.eye(3)) / 2.0
    assert np.array_equal(P.entries, expected)
    assert P.symmetric


def test_transition_matrix_nonregular_not_symmetric():
    P = build_transition_matrix(Graph(3, [(0, 1), (1, 2)]))
    assert P.entries[0, 1] == 1.0
    assert P.entries[1, 0] == 0.5
    assert not P.symmetric


def test_isolated_vertex_gets_self_loop():
    P = build_transition_matrix(Graph(3, [(0, 1)]))
    assert P.entries[2, 2] == 1.0
    assert P.entries[2].sum() == 1.0


def test_transition_matrix_validation():
    with pytest.raises(ValueError, match="row 1"):
        TransitionMatrix([[0.5, 0.5], [0.7, 0.7]])
    with pytest.raises(ValueError, match="square"):
        TransitionMatrix(np.ones((2, 3)) / 3.0)
    with pytest.raises(ValueError):
        TransitionMatrix([[1.2, -0.2], [0.5, 0.5]])


def test_transition_matrix_immutable():
    P = build_transition_matrix(complete_graph(3))
    with pytest.raises(ValueError):
        P.entries[0, 0] = 1.0
    with pytest.raises(AttributeError):
        P.n = 7


def test_marked_set_basics():
    M = MarkedSet([2, 0, 2], 4)
    assert M.members == (0, 2)
    assert M.m == 2
    assert M.epsilon == 0.5
    assert list(M.unmarked()) == [1, 3]
    assert MarkedSet([], 4).m == 0
    with pytest.raises(ValueError):
        MarkedSet([4], 4)


def test_apply_marking_rows():
    P = build_transition_matrix(complete_graph(4))
    M = MarkedSet([1, 3], 4)
    Pm = apply_marking(P, M)
    assert np.array_equal(Pm.entries[1], np.eye(4)[1])
    assert np.array_equal(Pm.entries[3], np.eye(4)[3])
    assert np.array_equal(Pm.entries[0], P.entries[0])
    # idempotent and identity on the empty set
    assert np.array_equal(apply_marking(Pm, M).entries, Pm.entries)
    assert apply_marking(P, MarkedSet([], 4)) is P


def test_submatrix_PM():
    P = build_transition_matrix(complete_graph(4))
    M = MarkedSet([0], 4)
    PM = submatrix_PM(P, M)
    assert PM.shape == (3, 3)
    assert np.array_equal(PM, P.entries[1:, 1:])
    with pytest.raises(ValueError):
        submatrix_PM(P, MarkedSet([0, 1, 2, 3], 4))
