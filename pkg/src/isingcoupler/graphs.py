"""Weighted graphs as compilation targets: parsing, generators, adjacency.

A target coupling graph is an undirected simple graph with nonzero rational
edge weights.  Weights stay exact ``Fraction`` values end to end so that
compiled pulse sequences can be verified by equality rather than tolerance.
Vertex indices are 0-based everywhere, including the text format.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .rng import SplitMix64

# 2^(n(n-1)/2) labeled graphs; n = 6 would already mean 32768 instances.
MAX_ENUMERATION_N = 5


class GraphParseError(ValueError):
    """Malformed edge-list text; message carries the 1-based line number."""


def _as_weight(value) -> Fraction:
    w = Fraction(value)
    return w


@dataclass(frozen=True)
class Graph:
    """Immutable weighted graph on vertices 0..n-1.

    Edges are stored as (u, v, weight) triples with u < v, sorted, with no
    duplicates and no zero weights (a zero coupling is a non-edge).  An
    unweighted graph is one whose weights are all 1.
    """

    n: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        for u, v, z in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u},{v}) violates 0 <= u < v < n")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            if z == 0:
                raise ValueError(f"edge ({u},{v}) has zero weight")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, object]]) -> "Graph":
        """Build a graph, normalizing edge order and weight type."""
        normalized = []
        for u, v, z in edges:
            if u > v:
                u, v = v, u
            normalized.append((u, v, _as_weight(z)))
        normalized.sort(key=lambda e: (e[0], e[1]))
        return cls(n, tuple(normalized))

    @classmethod
    def unweighted(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        return cls.from_edges(n, [(u, v, 1) for u, v in pairs])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.unweighted(n, itertools.combinations(range(n), 2))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_unweighted(self) -> bool:
        return all(z == 1 for _, _, z in self.edges)

    def uniform_weight(self) -> Fraction | None:
        """The common edge weight, or None if weights differ (or no edges)."""
        if not self.edges:
            return None
        weights = {z for _, _, z in self.edges}
        return weights.pop() if len(weights) == 1 else None

    def total_abs_weight(self) -> Fraction:
        return sum((abs(z) for _, _, z in self.edges), Fraction(0))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for a, b, _ in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Symmetric rational matrix with zero diagonal."""

    n: int
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.n or any(len(r) != self.n for r in self.rows):
            raise ValueError("adjacency matrix must be n x n")
        for i in range(self.n):
            if self.rows[i][i] != 0:
                raise ValueError(f"diagonal entry ({i},{i}) must be zero")
            for j in range(i + 1, self.n):
                if self.rows[i][j] != self.rows[j][i]:
                    raise ValueError(f"asymmetric entries at ({i},{j})")

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def zeros(cls, n: int) -> "AdjacencyMatrix":
        zero = Fraction(0)
        return cls(n, tuple(tuple(zero for _ in range(n)) for _ in range(n)))


def to_adjacency(g: Graph) -> AdjacencyMatrix:
    """Adjacency matrix with A[u][v] = A[v][u] = weight, zero elsewhere."""
    a = [[Fraction(0)] * g.n for _ in range(g.n)]
    for u, v, z in g.edges:
        a[u][v] = z
        a[v][u] = z
    return AdjacencyMatrix(g.n, tuple(tuple(row) for row in a))


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list text format.

    Format: a header line ``n <count>`` followed by one edge per line,
    ``u v [weight]``; the weight defaults to 1 and may be an integer, a
    decimal, or a ``p/q`` rational.  ``#`` starts a comment.  Zero-weight
    lines are accepted and dropped (they denote non-edges).
    """
    n = None
    edges: list[tuple[int, int, Fraction]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 2 or tokens[0] != "n":
                raise GraphParseError(f"line {lineno}: expected header 'n <count>'")
            try:
                n = int(tokens[1])
            except ValueError:
                raise GraphParseError(f"line {lineno}: bad vertex count {tokens[1]!r}")
            if n < 1:
                raise GraphParseError(f"line {lineno}: vertex count must be positive")
            continue
        if len(tokens) not in (2, 3):
            raise GraphParseError(f"line {lineno}: expected 'u v [weight]'")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: bad vertex index")
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"line {lineno}: vertex index out of range [0,{n})")
        if u > v:
            u, v = v, u
        if (u, v) in seen:
            raise GraphParseError(f"line {lineno}: duplicate edge ({u},{v})")
        seen.add((u, v))
        z = Fraction(1)
        if len(tokens) == 3:
            try:
                z = Fraction(tokens[2])
            except (ValueError, ZeroDivisionError):
                raise GraphParseError(f"line {lineno}: bad weight {tokens[2]!r}")
        if z != 0:
            edges.append((u, v, z))
    if n is None:
        raise GraphParseError("line 1: missing header 'n <count>'")
    return Graph.from_edges(n, edges)


def serialize_edge_list(g: Graph) -> str:
    """Inverse of parse_edge_list (weight omitted when it is 1)."""
    lines = [f"n {g.n}"]
    for u, v, z in g.edges:
        lines.append(f"{u} {v}" if z == 1 else f"{u} {v} {z}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> str:
    return json.dumps(
        {"n": g.n, "edges": [[u, v, str(z)] for u, v, z in g.edges]}
    )


def graph_from_json(text: str) -> Graph:
    obj = json.loads(text)
    return Graph.from_edges(obj["n"], [(u, v, Fraction(z)) for u, v, z in obj["edges"]])


def random_er_graph(
    n: int,
    p: float,
    weight_set: Sequence[object] = (),
    seed: int = 0,
) -> Graph:
    """Erdos-Renyi G(n, p) with optional weights drawn uniformly from a set.

    Each unordered pair is included independently with probability p, visiting
    pairs in lexicographic order and drawing from SplitMix64(seed); an empty
    weight_set means unit weights.  Fixed (n, p, weight_set, seed) always
    yields the same graph.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"edge probability {p} outside [0, 1]")
    weights = [_as_weight(w) for w in weight_set]
    if any(w == 0 for w in weights):
        raise ValueError("weight_set must not contain zero")
    rng = SplitMix64(seed)
    edges = []
    for u in range(n - 1):
        for v in range(u + 1, n):
            if rng.next_float() < p:
                z = weights[rng.next_index(len(weights))] if weights else Fraction(1)
                edges.append((u, v, z))
    return Graph.from_edges(n, edges)


def _pair_order(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def _relabel_mask(mask: int, pairs: list[tuple[int, int]], pair_index: dict, perm: tuple) -> int:
    out = 0
    for bit, (u, v) in enumerate(pairs):
        if mask >> bit & 1:
            a, b = perm[u], perm[v]
            if a > b:
                a, b = b, a
            out |= 1 << pair_index[(a, b)]
    return out


def canonical_edge_mask(mask: int, n: int) -> int:
    """Smallest edge bitmask over all vertex relabelings (isomorphism key)."""
    pairs = _pair_order(n)
    pair_index = {uv: i for i, uv in enumerate(pairs)}
    return min(
        _relabel_mask(mask, pairs, pair_index, perm)
        for perm in itertools.permutations(range(n))
    )


def enumerate_labeled_graphs(n: int, distinct_only: bool = False) -> Iterator[Graph]:
    """Yield every labeled unweighted graph on n vertices, in bitmask order.

    With distinct_only, keep one representative per isomorphism class (the
    graph whose edge bitmask is minimal over all vertex permutations).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_ENUMERATION_N:
        raise ValueError(
            f"n={n} too large to enumerate (limit {MAX_ENUMERATION_N})"
        )
    pairs = _pair_order(n)
    for mask in range(1 << len(pairs)):
        if distinct_only and canonical_edge_mask(mask, n) != mask:
            continue
        yield Graph.unweighted(
            n, [uv for bit, uv in enumerate(pairs) if mask >> bit & 1]
        )
