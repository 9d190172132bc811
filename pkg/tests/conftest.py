"""Shared fixtures, independent reference implementations and hypothesis strategies.

The reference implementations here deliberately avoid the package's own
algorithms: they are the slow, literal readings of the definitions.
"""

from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from monopath.graph import GraphShape, OrderedGraph, as_view

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- reference implementations --------------------------------------------------------------


def naive_height_table(g) -> dict[int, tuple[int, int]]:
    """Literal sweep over cells ``(1, v_0), (1, v_1), ..., (2, v_0), ...``.

    Returns ``rank -> (row, column)``.
    """
    view = as_view(g)
    edges = {r: view.endpoints(r) for r in view.edge_ranks}
    placed: dict[int, tuple[int, int]] = {}
    row = 0
    while len(placed) < len(edges):
        row += 1
        for v in sorted(view.vertices):
            options = [r for r, (a, b) in edges.items() if v in (a, b) and r not in placed]
            if options:
                placed[max(options)] = (row, v)
    return placed


def reference_path_ok(g, seq, simple=True) -> bool:
    """Independent validator: edges exist, ranks strictly increase, (simple) no repeats."""
    view = as_view(g)
    if len(seq) < 2:
        return False
    ranks = []
    for u, v in zip(seq, seq[1:]):
        hit = [r for r in view.edge_ranks if set(view.endpoints(r)) == {u, v}]
        if len(hit) != 1:
            return False
        ranks.append(hit[0])
    if any(a >= b for a, b in zip(ranks, ranks[1:])):
        return False
    if simple and len(set(seq)) != len(seq):
        return False
    return len(set(ranks)) == len(ranks)


def brute_longest_monotone(g) -> int:
    """Longest monotone path by enumerating vertex sequences (tiny graphs only)."""
    view = as_view(g)
    verts = view.vertices
    best = 1 if view.num_edges else 0
    for k in range(3, len(verts) + 1):
        found = False
        for seq in itertools.permutations(verts, k):
            ranks = []
            for u, v in zip(seq, seq[1:]):
                r = view.edge_between(u, v)
                if r is None:
                    break
                ranks.append(r)
            else:
                if all(a < b for a, b in zip(ranks, ranks[1:])) or all(a > b for a, b in zip(ranks, ranks[1:])):
                    best = k - 1
                    found = True
                    break
        if not found:
            break
    return best


def brute_longest_from(g, e, allowed=None) -> int:
    """Longest increasing path starting with edge ``e`` by plain DFS."""
    view = as_view(g)

    def dfs(v, last, seen):
        best = 0
        for r in view.incident(v):
            if r <= last or (allowed is not None and r not in allowed):
                continue
            u = view.other(r, v)
            if u in seen:
                continue
            best = max(best, 1 + dfs(u, r, seen | {u}))
        return best

    a, b = view.endpoints(e)
    return max(1 + dfs(b, e, {a, b}), 1 + dfs(a, e, {a, b}))


# -- strategies ---------------------------------------------------------------------------------


@st.composite
def ordered_graphs(draw, min_n=1, max_n=9, min_edges=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min(min_edges, len(pairs)))
                  if pairs else st.just([]))
    ranks = draw(st.permutations(list(range(1, len(chosen) + 1))))
    return OrderedGraph(n, [(u, v, r) for (u, v), r in zip(chosen, ranks)])


@st.composite
def graph_shapes(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return GraphShape(n, tuple(sorted(chosen)))


def k3() -> OrderedGraph:
    """Vertices a=0, b=1, c=2 with ab=1, bc=2, ca=3."""
    return OrderedGraph(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])


def random_seam_pair(rng, max_vertices=14, max_trail=6, max_path=10):
    """A graph with an increasing trail ``W`` and path ``P`` sharing the seam edge.

    Trail edges get ranks ``1..k`` (the seam is ``k``), path edges after the
    seam get ``k+1..``. Both seam orientations occur.
    """
    while True:
        n = rng.randint(4, max_vertices)
        k = rng.randint(1, max_trail)
        trail = [rng.randrange(n)]
        used: set = set()
        for _ in range(k):
            options = [v for v in range(n) if v != trail[-1] and frozenset((trail[-1], v)) not in used]
            if not options:
                break
            v = rng.choice(options)
            used.add(frozenset((trail[-1], v)))
            trail.append(v)
        if len(trail) != k + 1:
            continue
        seam = (trail[-2], trail[-1]) if rng.random() < 0.5 else (trail[-1], trail[-2])
        path = list(seam)
        ell = rng.randint(1, max_path)
        while len(path) - 1 < ell:
            options = [v for v in range(n) if v not in path and frozenset((path[-1], v)) not in used]
            if not options:
                break
            path.append(rng.choice(options))
        ranked = {}
        for i, (u, v) in enumerate(zip(trail, trail[1:]), start=1):
            ranked[frozenset((u, v))] = i
        for j, (u, v) in enumerate(zip(path[1:], path[2:]), start=k + 1):
            ranked[frozenset((u, v))] = j
        g = OrderedGraph(n, [(*sorted(e), r) for e, r in ranked.items()])
        return g, trail, path
