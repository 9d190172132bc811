"""Ordered graphs: simple undirected graphs with a vertex order and an edge order.

Vertices are dense integers ``0..n-1`` and the vertex order is numeric order.
Edges are identified by their rank: the edge order is a bijection
``E -> {1..|E|}`` and every API in this package names an edge by that rank.
Subgraphs are expressed as :class:`GraphView` objects that hide vertices and
edges of a base graph without ever renumbering them, so heights and ranks
computed on different views are directly comparable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .errors import GraphFormatError


class Edge(NamedTuple):
    u: int
    v: int
    rank: int


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class OrderedGraph:
    """An immutable simple graph with explicit edge ranks.

    ``edges[r - 1]`` holds the endpoints ``(u, v)`` (``u < v``) of the edge
    with rank ``r``.
    """

    __slots__ = ("n", "edges", "_rank_of", "_incident", "_full_view")

    def __init__(self, n: int, ranked_edges: Iterable[tuple[int, int, int]]):
        if n < 0:
            raise GraphFormatError("negative vertex count")
        items = list(ranked_edges)
        m = len(items)
        slots: list[tuple[int, int] | None] = [None] * m
        rank_of: dict[tuple[int, int], int] = {}
        for u, v, r in items:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"vertex out of range in edge {u}-{v}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not 1 <= r <= m:
                raise GraphFormatError(f"rank {r} outside 1..{m}")
            key = _norm(u, v)
            if key in rank_of:
                raise GraphFormatError(f"duplicate edge {key[0]}-{key[1]}")
            if slots[r - 1] is not None:
                raise GraphFormatError(f"rank collision at rank {r}")
            slots[r - 1] = key
            rank_of[key] = r
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(slots)  # type: ignore[arg-type]
        self._rank_of = rank_of
        incident: list[list[int]] = [[] for _ in range(n)]
        for r in range(m, 0, -1):
            u, v = self.edges[r - 1]
            incident[u].append(r)
            incident[v].append(r)
        self._incident = tuple(tuple(x) for x in incident)
        self._full_view: GraphView | None = None

    @classmethod
    def from_edge_sequence(cls, n: int, edges: Sequence[tuple[int, int]]) -> "OrderedGraph":
        """Build a graph whose ranks follow the order of ``edges`` (first = rank 1)."""
        return cls(n, ((u, v, i + 1) for i, (u, v) in enumerate(edges)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def rank(self, u: int, v: int) -> int:
        try:
            return self._rank_of[_norm(u, v)]
        except KeyError:
            raise KeyError(f"no edge {u}-{v}") from None

    def edge_between(self, u: int, v: int) -> int | None:
        return self._rank_of.get(_norm(u, v))

    def endpoints(self, r: int) -> tuple[int, int]:
        return self.edges[r - 1]

    def incident(self, v: int) -> tuple[int, ...]:
        """Ranks of edges at ``v``, highest rank first."""
        return self._incident[v]

    def ranked_edges(self) -> Iterator[Edge]:
        for i, (u, v) in enumerate(self.edges):
            yield Edge(u, v, i + 1)

    def view(self) -> "GraphView":
        if self._full_view is None:
            self._full_view = GraphView(self)
        return self._full_view

    def reversed(self) -> "OrderedGraph":
        """Same graph with the edge order reversed."""
        m = self.m
        return OrderedGraph(self.n, ((u, v, m + 1 - r) for (u, v, r) in self.ranked_edges()))

    def __eq__(self, other):
        if not isinstance(other, OrderedGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"OrderedGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class GraphView:
    """A subgraph of ``base`` obtained by deleting vertices and/or edges.

    Deleting a vertex deletes every edge meeting it. Ranks and vertex ids are
    those of the base graph. Two views compare equal when they have the same
    base graph and the same surviving vertex and edge sets.
    """

    base: OrderedGraph
    removed_vertices: frozenset = field(default_factory=frozenset)
    removed_edges: frozenset = field(default_factory=frozenset)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        gone = self.removed_vertices
        return tuple(v for v in range(self.base.n) if v not in gone)

    @cached_property
    def _vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    @cached_property
    def edge_ranks(self) -> tuple[int, ...]:
        return tuple(r for r in range(1, self.base.m + 1) if self._alive(r))

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edge_ranks)

    @cached_property
    def _incident(self) -> dict[int, tuple[int, ...]]:
        if not self.removed_vertices and not self.removed_edges:
            return {v: self.base.incident(v) for v in self.vertices}
        alive = self._edge_set
        return {v: tuple(r for r in self.base.incident(v) if r in alive) for v in self.vertices}

    def _alive(self, r: int) -> bool:
        if r in self.removed_edges:
            return False
        u, v = self.base.edges[r - 1]
        return u not in self.removed_vertices and v not in self.removed_vertices

    # -- queries -----------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edge_ranks)

    def has_vertex(self, v: int) -> bool:
        return v in self._vertex_set

    def has_edge(self, r: int) -> bool:
        return r in self._edge_set

    def endpoints(self, r: int) -> tuple[int, int]:
        return self.base.edges[r - 1]

    def other(self, r: int, v: int) -> int:
        a, b = self.base.edges[r - 1]
        if v == a:
            return b
        if v == b:
            return a
        raise ValueError(f"vertex {v} is not an endpoint of edge {r}")

    def edge_between(self, u: int, v: int) -> int | None:
        r = self.base.edge_between(u, v)
        if r is None or not self.has_edge(r):
            return None
        return r

    def incident(self, v: int) -> tuple[int, ...]:
        """Surviving edges at ``v``, highest rank first."""
        return self._incident[v]

    def neighbors(self, v: int) -> list[int]:
        return [self.other(r, v) for r in self._incident[v]]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    @cached_property
    def max_degree(self) -> int:
        return max((len(x) for x in self._incident.values()), default=0)

    @property
    def average_degree(self) -> Fraction:
        """Exact ``2|E| / |V|`` (zero for the empty vertex set)."""
        if not self.vertices:
            return Fraction(0)
        return Fraction(2 * self.num_edges, self.num_vertices)

    def edges(self) -> Iterator[Edge]:
        for r in self.edge_ranks:
            u, v = self.base.edges[r - 1]
            yield Edge(u, v, r)

    # -- derived views ------------------------------------------------------

    def delete(self, vertices: Iterable[int] = (), edges: Iterable[int] = ()) -> "GraphView":
        """Return a new view with ``vertices`` and ``edges`` also deleted.

        Raises ``KeyError`` when a target is not present in this view; that
        usually signals a bookkeeping bug in the caller.
        """
        vs = frozenset(vertices)
        es = frozenset(edges)
        for v in vs:
            if not self.has_vertex(v):
                raise KeyError(f"vertex {v} is not in the view")
        for r in es:
            if not self.has_edge(r):
                raise KeyError(f"edge {r} is not in the view")
        if not vs and not es:
            return self
        return GraphView(self.base, self.removed_vertices | vs, self.removed_edges | es)

    def without_vertices(self, vertices: Iterable[int]) -> "GraphView":
        """``G - U``: like :meth:`delete` but silently skips absent vertices."""
        return self.delete(vertices=[v for v in set(vertices) if self.has_vertex(v)])

    def without_edges(self, edges: Iterable[int]) -> "GraphView":
        """``G \\ T``: like :meth:`delete` but silently skips absent edges."""
        return self.delete(edges=[r for r in set(edges) if self.has_edge(r)])

    def spanning(self, keep_edges: Iterable[int]) -> "GraphView":
        """Spanning subgraph on the same vertex set keeping only ``keep_edges``."""
        keep = set(keep_edges)
        return self.delete(edges=[r for r in self.edge_ranks if r not in keep])

    def induced(self, keep_vertices: Iterable[int]) -> "GraphView":
        keep = set(keep_vertices)
        return self.delete(vertices=[v for v in self.vertices if v not in keep])

    def restrict(self, keep_vertices: Iterable[int], keep_edges: Iterable[int]) -> "GraphView":
        """Subgraph with the given vertex set and edge set.

        Every kept edge must have both endpoints among the kept vertices.
        """
        kv = set(keep_vertices)
        ke = set(keep_edges)
        for r in ke:
            u, v = self.endpoints(r)
            if u not in kv or v not in kv:
                raise ValueError(f"edge {r} leaves the kept vertex set")
        sub = self.induced(kv)
        return sub.delete(edges=[r for r in sub.edge_ranks if r not in ke])

    def to_graph(self) -> OrderedGraph:
        """Materialise as a standalone graph on the same ids (ranks compressed)."""
        ranks = self.edge_ranks
        return OrderedGraph(self.base.n, (
            (*self.base.edges[r - 1], i + 1) for i, r in enumerate(ranks)))

    def __eq__(self, other):
        if not isinstance(other, GraphView):
            return NotImplemented
        return (self.base is other.base or self.base == other.base) and \
            self.vertices == other.vertices and self.edge_ranks == other.edge_ranks

    def __hash__(self):
        return hash((self.base, self.vertices, self.edge_ranks))

    def __repr__(self):
        return f"GraphView(n={self.num_vertices}, m={self.num_edges}, base={self.base!r})"


GraphLike = Union[OrderedGraph, GraphView]


def as_view(g: GraphLike) -> GraphView:
    if isinstance(g, GraphView):
        return g
    if isinstance(g, OrderedGraph):
        return g.view()
    raise TypeError(f"expected OrderedGraph or GraphView, got {type(g).__name__}")


def delete(view: GraphLike, vertices: Iterable[int] = (), edges: Iterable[int] = ()) -> GraphView:
    return as_view(view).delete(vertices, edges)


# -- shapes and constructors ----------------------------------------------------


@dataclass(frozen=True)
class GraphShape:
    """An unordered simple graph: vertex count plus an edge list."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"vertex out of range in edge {u}-{v}")
            key = _norm(u, v)
            if key in seen:
                raise GraphFormatError(f"duplicate edge {u}-{v}")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    def ordered(self, ranks: Sequence[int] | None = None) -> OrderedGraph:
        """Attach ranks (``ranks[i]`` for ``edges[i]``; default: list order)."""
        if ranks is None:
            ranks = range(1, self.m + 1)
        return OrderedGraph(self.n, ((u, v, r) for (u, v), r in zip(self.edges, ranks)))


def complete_shape(n: int) -> GraphShape:
    return GraphShape(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_graph(n: int, ordering: str = "lexicographic", seed: int | None = None) -> OrderedGraph:
    """``K_n`` with a lexicographic or uniformly random edge ordering."""
    if n < 2:
        raise ValueError("complete_graph needs n >= 2")
    shape = complete_shape(n)
    if ordering in ("lexicographic", "lex"):
        return shape.ordered()
    if ordering in ("uniform-random", "random"):
        return random_ordering(shape, seed)
    raise ValueError(f"unknown ordering {ordering!r}")


def random_ordering(shape: GraphShape | GraphLike, seed: int | None) -> OrderedGraph:
    """Uniformly random rank permutation on the edges of ``shape``."""
    if not isinstance(shape, GraphShape):
        view = as_view(shape)
        shape = GraphShape(view.base.n, tuple(view.endpoints(r) for r in view.edge_ranks))
    ranks = list(range(1, shape.m + 1))
    random.Random(seed).shuffle(ranks)
    return shape.ordered(ranks)


# -- text format ------------------------------------------------------------------


def parse_graph(text: str) -> OrderedGraph:
    """Parse the line format ``p eog <n> <m>`` / ``e <u> <v> <rank>`` / ``c ...``."""
    header = None
    items: list[tuple[int, int, int]] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if header is not None:
                raise GraphFormatError("second header", lineno)
            if len(tokens) != 4 or tokens[1] != "eog":
                raise GraphFormatError("expected 'p eog <n> <m>'", lineno)
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError:
                raise GraphFormatError("non-integer header field", lineno) from None
            continue
        if tokens[0] == "e":
            if header is None:
                raise GraphFormatError("edge before header", lineno)
            if len(tokens) != 4:
                raise GraphFormatError("expected 'e <u> <v> <rank>'", lineno)
            try:
                u, v, r = (int(t) for t in tokens[1:])
            except ValueError:
                raise GraphFormatError("non-integer edge field", lineno) from None
            items.append((u, v, r))
            lines.append(lineno)
            continue
        raise GraphFormatError(f"unknown line type {tokens[0]!r}", lineno)
    if header is None:
        raise GraphFormatError("missing 'p eog' header")
    n, m = header
    if len(items) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(items)}")
    # re-run the constructor checks one edge at a time to attach line numbers
    seen_edges: dict[tuple[int, int], int] = {}
    seen_ranks: dict[int, int] = {}
    for (u, v, r), lineno in zip(items, lines):
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range in edge {u}-{v}", lineno)
        if not 1 <= r <= m:
            raise GraphFormatError(f"rank {r} outside 1..{m}", lineno)
        if _norm(u, v) in seen_edges:
            raise GraphFormatError(f"duplicate edge {u}-{v}", lineno)
        if r in seen_ranks:
            raise GraphFormatError(f"rank collision at rank {r} (first on line {seen_ranks[r]})", lineno)
        seen_edges[_norm(u, v)] = lineno
        seen_ranks[r] = lineno
    return OrderedGraph(n, items)


def load_graph(path: str | Path) -> OrderedGraph:
    return parse_graph(Path(path).read_text())


def format_graph(g: GraphLike, comments: Sequence[str] = ()) -> str:
    """Serialise a graph or view; a view is written with compressed ranks."""
    if isinstance(g, GraphView):
        g = g.to_graph()
    out = [f"c {c}" for c in comments]
    out.append(f"p eog {g.n} {g.m}")
    out.extend(f"e {u} {v} {r}" for u, v, r in g.ranked_edges())
    return "\n".join(out) + "\n"


def save_graph(g: GraphLike, path: str | Path, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(format_graph(g, comments))
