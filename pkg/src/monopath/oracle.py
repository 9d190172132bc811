"""Exhaustive ground truth for tiny graphs.

Every monotone path is an increasing path read in one direction or the
other, so searching increasing paths over all start edges and both
orientations already gives the longest monotone path.
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import PreconditionError
from .graph import GraphLike, GraphShape, GraphView, OrderedGraph, as_view
from .height_table import build_height_table

MAX_VERTICES = 14
MAX_ALTITUDE_EDGES = 8
HARD_ALTITUDE_EDGES = 10


@dataclass
class OracleResult:
    length: int
    path: list[int]
    states: int
    empty_feasible_set: bool = False


class _Search:
    """Memoised DFS over (vertex, last rank, visited mask)."""

    def __init__(self, view: GraphView, allowed: set[int] | None = None):
        self.view = view
        self.index = {v: i for i, v in enumerate(view.vertices)}
        # incident edges in increasing rank order: (rank, neighbour)
        self.adj = {
            v: sorted((r, view.other(r, v)) for r in view.incident(v) if allowed is None or r in allowed)
            for v in view.vertices
        }
        self.memo: dict[tuple[int, int, int], tuple[int, int]] = {}

    def best(self, v: int, last: int, mask: int) -> int:
        """Longest increasing continuation from ``v`` after an edge of rank ``last``."""
        key = (v, last, mask)
        hit = self.memo.get(key)
        if hit is not None:
            return hit[0]
        best_len, best_next = 0, -1
        for r, u in self.adj[v]:
            if r <= last:
                continue
            bit = 1 << self.index[u]
            if mask & bit:
                continue
            k = 1 + self.best(u, r, mask | bit)
            if k > best_len:
                best_len, best_next = k, u
        self.memo[key] = (best_len, best_next)
        return best_len

    def walk(self, path: list[int], last: int, mask: int) -> list[int]:
        v = path[-1]
        while True:
            length, nxt = self.memo[(v, last, mask)]
            if length == 0:
                return path
            last = self.view.edge_between(v, nxt)
            mask |= 1 << self.index[nxt]
            path.append(nxt)
            v = nxt

    def from_edge(self, r: int) -> tuple[int, list[int]]:
        best, best_path = 0, []
        a, b = self.view.endpoints(r)
        for x, y in ((a, b), (b, a)):
            mask = (1 << self.index[x]) | (1 << self.index[y])
            k = 1 + self.best(y, r, mask)
            if k > best:
                best = k
                best_path = self.walk([x, y], r, mask)
        return best, best_path


def _guard(view: GraphView, max_vertices: int) -> None:
    if view.num_vertices > max_vertices:
        raise PreconditionError("size guard", f"{view.num_vertices} vertices exceed the limit {max_vertices}")


def longest_monotone_path(g: GraphLike, max_vertices: int = MAX_VERTICES) -> OracleResult:
    """Exact longest monotone path, returned in its increasing direction."""
    view = as_view(g)
    _guard(view, max_vertices)
    search = _Search(view)
    best, best_path = 0, []
    for r in view.edge_ranks:
        k, path = search.from_edge(r)
        if k > best:
            best, best_path = k, path
    return OracleResult(best, best_path, len(search.memo))


def longest_increasing_from(g: GraphLike, e: int, height_floor: int | None = None,
                            max_vertices: int = MAX_VERTICES) -> OracleResult:
    """Exact longest increasing path starting with ``e`` (either orientation).

    With ``height_floor`` only edges of height at least the floor (in the
    table of ``g``) may be used. If ``e`` itself is below the floor the
    feasible set is empty: a 0-length result with ``empty_feasible_set``.
    """
    view = as_view(g)
    _guard(view, max_vertices)
    if not view.has_edge(e):
        raise PreconditionError("edge", f"edge {e} is not in the graph")
    allowed = None
    if height_floor is not None:
        table = build_height_table(view)
        allowed = {r for r in view.edge_ranks if table.height(r) >= height_floor}
        if e not in allowed:
            return OracleResult(0, [], 0, empty_feasible_set=True)
    search = _Search(view, allowed)
    k, path = search.from_edge(e)
    return OracleResult(k, path, len(search.memo))


# -- altitude -------------------------------------------------------------------------------


@dataclass
class AltitudeResult:
    value: int
    worst_ranks: tuple[int, ...]
    orderings: int


def _shape_of(g) -> GraphShape:
    if isinstance(g, GraphShape):
        return g
    view = as_view(g)
    if view.vertices != tuple(range(view.base.n)):
        raise PreconditionError("shape", "pass a GraphShape or a graph without removed vertices")
    return GraphShape(view.base.n, tuple(view.endpoints(r) for r in view.edge_ranks))


def _batch_min(shape: GraphShape, perms: list[tuple[int, ...]]) -> tuple[int, tuple[int, ...]]:
    best, worst = math.inf, ()
    for ranks in perms:
        k = longest_monotone_path(shape.ordered(ranks), max_vertices=shape.n).length
        if k < best:
            best, worst = k, ranks
    return best, worst


def altitude_search(g, max_edges: int = MAX_ALTITUDE_EDGES, workers: int | None = None) -> AltitudeResult:
    """Minimum over all edge orderings of the longest monotone path."""
    shape = _shape_of(g)
    if max_edges > HARD_ALTITUDE_EDGES:
        raise PreconditionError("size guard", f"max_edges cannot exceed {HARD_ALTITUDE_EDGES}")
    if shape.m > max_edges:
        raise PreconditionError("size guard", f"{shape.m} edges exceed the limit {max_edges} "
                                              f"({math.factorial(shape.m)} orderings)")
    if shape.m > MAX_ALTITUDE_EDGES:
        warnings.warn(f"altitude over {math.factorial(shape.m)} orderings; this is slow", stacklevel=2)
    if shape.m == 0:
        return AltitudeResult(0, (), 1)
    perms = list(itertools.permutations(range(1, shape.m + 1)))
    if workers and workers > 1:
        size = math.ceil(len(perms) / (workers * 4))
        chunks = [perms[i:i + size] for i in range(0, len(perms), size)]
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_batch_min, [shape] * len(chunks), chunks))
    else:
        results = [_batch_min(shape, perms)]
    # ties resolve to the earliest ordering in enumeration order
    best, worst = min(results, key=lambda x: x[0])
    return AltitudeResult(int(best), tuple(worst), len(perms))


def altitude(g, max_edges: int = MAX_ALTITUDE_EDGES, workers: int | None = None) -> int:
    return altitude_search(g, max_edges, workers).value


def shape_from_name(name: str) -> GraphShape:
    """``K<n>`` complete, ``P<k>`` path with k edges, ``C<n>`` cycle, ``S<k>`` star with k leaves."""
    kind, digits = name[:1].upper(), name[1:]
    if not digits.isdigit():
        raise ValueError(f"unknown shape {name!r}")
    k = int(digits)
    if kind == "K":
        edges = list(itertools.combinations(range(k), 2))
        return GraphShape(k, tuple(edges))
    if kind == "P":
        return GraphShape(k + 1, tuple((i, i + 1) for i in range(k)))
    if kind == "C":
        if k < 3:
            raise ValueError("cycles need at least 3 vertices")
        return GraphShape(k, tuple(sorted(tuple(sorted((i, (i + 1) % k))) for i in range(k))))
    if kind == "S":
        return GraphShape(k + 1, tuple((0, i) for i in range(1, k + 1)))
    raise ValueError(f"unknown shape {name!r}")


def as_ordered(shape: GraphShape, ranks=None) -> OrderedGraph:
    return shape.ordered(ranks)
