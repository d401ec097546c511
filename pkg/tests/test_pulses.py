import json
from fractions import Fraction

import pytest

from isingcoupler.graphs import Graph, parse_edge_list, random_er_graph, to_adjacency
from isingcoupler.pulses import (
    FlipRow,
    PulseSequence,
    canonicalize,
    compose,
    evaluate,
    sequence_from_json,
    sequence_to_json,
    verify,
)
from isingcoupler.rng import SplitMix64

PATH3 = parse_edge_list("n 3\n0 1\n1 2")


def random_sequence(n, k, seed):
    rng = SplitMix64(seed)
    pairs = []
    for _ in range(k):
        mask = rng.next_index(1 << n)
        w = Fraction(rng.next_index(9) - 4, rng.next_index(4) + 1)
        pairs.append((mask, w))
    return PulseSequence.from_pairs(n, pairs)


def brute_force_coupling(seq):
    n = seq.n
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            total = Fraction(0)
            for row, w in zip(seq.rows, seq.strengths):
                total += w * row.signs[i] * row.signs[j]
            a[i][j] = total
    return a


def test_evaluate_two_row_path_solution():
    seq = PulseSequence.from_pairs(
        3, [((1, 1, 1), Fraction(1, 2)), ((1, -1, 1), Fraction(-1, 2))]
    )
    assert evaluate(seq) == to_adjacency(PATH3)


def test_evaluate_single_uniform_row_gives_complete_graph():
    seq = PulseSequence.from_pairs(3, [((1, 1, 1), 1)])
    assert evaluate(seq) == to_adjacency(Graph.complete(3))


def test_evaluate_matches_double_loop_oracle():
    for seed in range(25):
        seq = random_sequence(5, 6, seed)
        got = evaluate(seq)
        expected = brute_force_coupling(seq)
        for i in range(5):
            for j in range(5):
                assert got[i, j] == expected[i][j]


def test_verify_path_solution():
    seq = PulseSequence.from_pairs(
        3, [((1, 1, 1), Fraction(1, 2)), ((1, -1, 1), Fraction(-1, 2))]
    )
    assert verify(seq, PATH3)
    assert not verify(seq, Graph.complete(3))


def test_verify_dimension_mismatch():
    seq = PulseSequence.from_pairs(2, [((1, 1), 1)])
    with pytest.raises(ValueError, match="qubits"):
        verify(seq, PATH3)


def test_compose_identity_and_additivity():
    empty = PulseSequence.empty(4)
    for seed in range(15):
        a = random_sequence(4, 3, seed)
        b = random_sequence(4, 4, seed + 1000)
        assert compose(a, empty) == a
        total = evaluate(compose(a, b))
        ea, eb = evaluate(a), evaluate(b)
        for i in range(4):
            for j in range(4):
                assert total[i, j] == ea[i, j] + eb[i, j]


def test_compose_appendix_style_single_rows():
    c1 = PulseSequence.from_pairs(3, [((1, 1, 1), Fraction(1, 2))])
    c2 = PulseSequence.from_pairs(3, [((1, -1, 1), Fraction(-1, 2))])
    assert evaluate(compose(c1, c2)) == to_adjacency(PATH3)


def test_compose_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(PulseSequence.empty(2), PulseSequence.empty(3))


def test_canonicalize_opposite_rows_merge_preserving_evaluate():
    # A row and its negation contribute identically, so equal strengths add.
    r = (1, -1, 1)
    neg = (-1, 1, -1)
    seq = PulseSequence.from_pairs(3, [(r, Fraction(1)), (neg, Fraction(1))])
    out = canonicalize(seq)
    assert out.l0 == 1
    assert out.strengths == (Fraction(2),)
    assert evaluate(out) == evaluate(seq)


def test_canonicalize_cancellation():
    r = (1, -1, 1)
    neg = (-1, 1, -1)
    seq = PulseSequence.from_pairs(3, [(r, Fraction(1)), (neg, Fraction(-1))])
    out = canonicalize(seq)
    assert out.l0 == 0 and out.rows == ()
    assert evaluate(out) == evaluate(seq)


def test_canonicalize_merges_equal_rows():
    seq = PulseSequence.from_pairs(
        3, [((1, 1, 1), Fraction(1, 4)), ((1, 1, 1), Fraction(1, 4))]
    )
    out = canonicalize(seq)
    assert out.l0 == 1
    assert out.strengths == (Fraction(1, 2),)


def test_canonicalize_preserves_evaluate_and_shrinks():
    for seed in range(30):
        seq = random_sequence(5, 8, seed)
        out = canonicalize(seq)
        assert evaluate(out) == evaluate(seq)
        assert out.l0 <= seq.l0
        assert out.l1 <= seq.l1
        assert canonicalize(out) == out  # idempotent
        for row, w in zip(out.rows, out.strengths):
            assert row.signs[0] == 1
            assert w != 0
        assert len({row.mask for row in out.rows}) == out.l0


def test_evaluate_invariances():
    base = random_sequence(4, 5, 7)
    value = evaluate(base)
    # row permutation
    perm = PulseSequence(
        4, tuple(reversed(base.rows)), tuple(reversed(base.strengths))
    )
    assert evaluate(perm) == value
    # negating a row
    rows = list(base.rows)
    rows[2] = rows[2].negated()
    assert evaluate(PulseSequence(4, tuple(rows), base.strengths)) == value
    # appending a zero-strength row
    extended = compose(base, PulseSequence.from_pairs(4, [((1, 1, 1, 1), 0)]))
    assert evaluate(extended) == value


def test_evaluate_diagonal_zero():
    seq = random_sequence(5, 4, 3)
    a = evaluate(seq)
    assert all(a[i, i] == 0 for i in range(5))


def test_flip_row_mask_round_trip():
    for mask in range(16):
        row = FlipRow.from_mask(mask, 4)
        assert row.mask == mask
        assert all(s in (1, -1) for s in row.signs)


def test_flip_row_validation():
    with pytest.raises(ValueError):
        FlipRow((1, 0, -1))


def test_sequence_json_round_trip():
    seq = random_sequence(5, 6, 42)
    text = sequence_to_json(seq)
    obj = json.loads(text)
    assert obj["n"] == 5
    assert all(set(op["mask"]) <= {"+", "-"} for op in obj["ops"])
    assert sequence_from_json(text) == seq


def test_sequence_json_schema_shape():
    seq = PulseSequence.from_pairs(3, [((1, -1, 1), Fraction(-1, 2))])
    obj = json.loads(sequence_to_json(seq))
    assert obj == {"n": 3, "ops": [{"mask": "+-+", "w": "-1/2"}]}


def test_sequence_json_rejects_bad_mask():
    with pytest.raises(ValueError):
        sequence_from_json('{"n": 3, "ops": [{"mask": "+-", "w": "1"}]}')


def test_sequence_validation():
    with pytest.raises(ValueError):
        PulseSequence(3, (FlipRow((1, 1)),), (Fraction(1),))
    with pytest.raises(ValueError):
        PulseSequence(2, (FlipRow((1, 1)),), ())
