import itertools

import pytest
from fractions import Fraction

from isingcoupler.graphs import (
    AdjacencyMatrix,
    Graph,
    GraphParseError,
    canonical_edge_mask,
    enumerate_labeled_graphs,
    graph_from_json,
    graph_to_json,
    parse_edge_list,
    random_er_graph,
    serialize_edge_list,
    to_adjacency,
)


def test_parse_basic_path():
    g = parse_edge_list("n 3\n0 1\n1 2")
    assert g.n == 3
    assert g.edges == ((0, 1, Fraction(1)), (1, 2, Fraction(1)))


def test_parse_empty_graph():
    g = parse_edge_list("n 2")
    assert g.n == 2 and g.edges == ()


def test_parse_rational_weight():
    g = parse_edge_list("n 3\n0 1 1/2")
    assert g.edges[0][2] == Fraction(1, 2)


def test_parse_decimal_weight_and_comments():
    g = parse_edge_list("# header comment\nn 4\n0 1 0.25  # trailing\n\n2 3 -3\n")
    assert g.edges == ((0, 1, Fraction(1, 4)), (2, 3, Fraction(-3)))


def test_parse_zero_weight_dropped():
    g = parse_edge_list("n 3\n0 1 0\n1 2")
    assert g.edges == ((1, 2, Fraction(1)),)
    assert g.m == 1


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("0 1\n", "header"),
        ("n 3\n0 0", "line 2: self-loop"),
        ("n 3\n0 5", "line 2"),
        ("n 3\n0 1\n1 0", "line 3: duplicate"),
        ("n 3\n0 1 x", "line 2: bad weight"),
        ("n 3\n0", "line 2"),
        ("n 0", "line 1"),
        ("n 3\na b", "line 2: bad vertex index"),
    ],
)
def test_parse_errors_carry_line_numbers(text, fragment):
    with pytest.raises(GraphParseError, match=fragment):
        parse_edge_list(text)


def test_serialize_parse_round_trip():
    for seed in range(40):
        g = random_er_graph(6, 0.5, [1, 2, Fraction(1, 2), -3], seed=seed)
        assert parse_edge_list(serialize_edge_list(g)) == g


def test_json_round_trip():
    g = random_er_graph(5, 0.7, [Fraction(3, 7), 2], seed=9)
    assert graph_from_json(graph_to_json(g)) == g


def test_to_adjacency_path():
    g = parse_edge_list("n 3\n0 1\n1 2")
    a = to_adjacency(g)
    assert a.rows == (
        (Fraction(0), Fraction(1), Fraction(0)),
        (Fraction(1), Fraction(0), Fraction(1)),
        (Fraction(0), Fraction(1), Fraction(0)),
    )


def test_to_adjacency_empty_and_complete():
    assert to_adjacency(Graph(2, ())).rows == ((Fraction(0),) * 2,) * 2
    a = to_adjacency(Graph.complete(3))
    for i in range(3):
        for j in range(3):
            assert a[i, j] == (0 if i == j else 1)


def test_adjacency_invariants_fuzz():
    for seed in range(30):
        g = random_er_graph(7, 0.4, [1, 2, 3], seed=seed)
        a = to_adjacency(g)  # constructor validates symmetry + zero diagonal
        assert isinstance(a, AdjacencyMatrix)


def test_adjacency_matrix_rejects_bad_input():
    with pytest.raises(ValueError, match="diagonal"):
        AdjacencyMatrix(1, ((Fraction(1),),))
    with pytest.raises(ValueError, match="asymmetric"):
        AdjacencyMatrix(
            2, ((Fraction(0), Fraction(1)), (Fraction(2), Fraction(0)))
        )


def test_random_er_extremes():
    assert random_er_graph(7, 0.0, [], seed=1).m == 0
    assert random_er_graph(7, 1.0, [], seed=1).m == 21


def test_random_er_weight_membership():
    allowed = {Fraction(1), Fraction(2), Fraction(3)}
    for seed in range(1000):
        g = random_er_graph(7, 0.5, [1, 2, 3], seed=seed)
        assert {z for _, _, z in g.edges} <= allowed


def test_random_er_deterministic():
    a = random_er_graph(8, 0.37, [1, 2], seed=123456789)
    b = random_er_graph(8, 0.37, [1, 2], seed=123456789)
    assert a == b
    c = random_er_graph(8, 0.37, [1, 2], seed=987654321)
    assert a != c  # overwhelmingly likely for distinct seeds


def test_random_er_validates_inputs():
    with pytest.raises(ValueError):
        random_er_graph(5, 1.5, [], seed=0)
    with pytest.raises(ValueError):
        random_er_graph(5, 0.5, [0], seed=0)
    with pytest.raises(ValueError):
        random_er_graph(0, 0.5, [], seed=0)


def test_enumerate_counts_n3():
    graphs = list(enumerate_labeled_graphs(3))
    assert len(graphs) == 8
    classes = list(enumerate_labeled_graphs(3, distinct_only=True))
    assert len(classes) == 4


def test_enumerate_counts_n4():
    assert len(list(enumerate_labeled_graphs(4))) == 64
    assert len(list(enumerate_labeled_graphs(4, distinct_only=True))) == 11


def test_enumerate_single_vertex():
    graphs = list(enumerate_labeled_graphs(1))
    assert len(graphs) == 1 and graphs[0].m == 0


def test_enumerate_guard():
    with pytest.raises(ValueError, match="too large"):
        next(enumerate_labeled_graphs(6))


def test_isomorphism_classes_match_networkx():
    nx = pytest.importorskip("networkx")
    reps = []
    for g in enumerate_labeled_graphs(4, distinct_only=True):
        h = nx.Graph()
        h.add_nodes_from(range(4))
        h.add_edges_from((u, v) for u, v, _ in g.edges)
        assert not any(nx.is_isomorphic(h, other) for other in reps)
        reps.append(h)
    assert len(reps) == 11


def test_canonical_mask_invariant_under_relabeling():
    pairs = list(itertools.combinations(range(4), 2))
    pair_index = {uv: i for i, uv in enumerate(pairs)}
    mask = 0b010011
    base = canonical_edge_mask(mask, 4)
    for perm in itertools.permutations(range(4)):
        relabeled = 0
        for bit, (u, v) in enumerate(pairs):
            if mask >> bit & 1:
                a, b = sorted((perm[u], perm[v]))
                relabeled |= 1 << pair_index[(a, b)]
        assert canonical_edge_mask(relabeled, 4) == base


def test_graph_invariant_validation():
    with pytest.raises(ValueError, match="duplicate"):
        Graph(3, ((0, 1, Fraction(1)), (0, 1, Fraction(2))))
    with pytest.raises(ValueError, match="zero weight"):
        Graph(3, ((0, 1, Fraction(0)),))
    with pytest.raises(ValueError, match="u < v"):
        Graph(3, ((1, 0, Fraction(1)),))
