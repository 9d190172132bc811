"""Almost-regular subgraph extraction.

Pipeline: a bipartite subgraph keeping half the edges, a min-degree core of
it, a chain of nested vertex sets carrying edge-disjoint perfect matchings,
and finally a window of consecutive matchings whose union has all degrees in
``[d', 6 d']`` with ``d' = (floor((d/4 - 1) / ceil(log2 n)) + 1) / 6``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import InvariantViolation, PreconditionError
from .graph import GraphLike, GraphView, as_view


def ceil_log2(n: int) -> int:
    """``ceil(log2 n)`` for ``n >= 1``, exact."""
    if n < 1:
        raise ValueError("n must be positive")
    return (n - 1).bit_length()


def floor_fraction(q: Fraction) -> int:
    return math.floor(q)


class Bipartite(NamedTuple):
    view: GraphView
    side_a: frozenset
    side_b: frozenset


def bipartite_half(g: GraphLike) -> Bipartite:
    """Spanning bipartite subgraph with at least half of the edges.

    Local switching: while some vertex has more neighbours on its own side
    than across, move it. The cut grows by at least one per move.
    """
    view = as_view(g)
    side = {v: v & 1 for v in view.vertices}
    moved = True
    while moved:
        moved = False
        for v in view.vertices:
            same = sum(1 for u in view.neighbors(v) if side[u] == side[v])
            if 2 * same > view.degree(v):
                side[v] ^= 1
                moved = True
    a = frozenset(v for v in view.vertices if side[v] == 0)
    b = frozenset(v for v in view.vertices if side[v] == 1)
    inner = [r for r in view.edge_ranks if side[view.endpoints(r)[0]] == side[view.endpoints(r)[1]]]
    return Bipartite(view.delete(edges=inner), a, b)


class Core(NamedTuple):
    view: GraphView
    guaranteed: bool


def min_degree_core(g: GraphLike, threshold) -> Core:
    """Peel vertices of degree ``< threshold`` until none is left.

    When ``threshold <= d/2`` the result is non-empty (as a vertex set) and
    has minimum degree at least ``threshold``; ``guaranteed`` records whether
    the call was in that regime.
    """
    view = as_view(g)
    threshold = Fraction(threshold)
    guaranteed = threshold <= view.average_degree / 2
    deg = {v: view.degree(v) for v in view.vertices}
    alive = set(view.vertices)
    stack = [v for v in view.vertices if deg[v] < threshold]
    gone = set()
    while stack:
        v = stack.pop()
        if v in gone:
            continue
        gone.add(v)
        alive.discard(v)
        for u in view.neighbors(v):
            if u in alive:
                deg[u] -= 1
                if deg[u] < threshold and u not in gone:
                    stack.append(u)
    return Core(view.delete(vertices=gone), guaranteed)


# -- matchings ------------------------------------------------------------------


def max_bipartite_matching(left: Iterable[int], adj: dict[int, list[int]]) -> dict[int, int]:
    """Augmenting-path maximum matching; returns ``left -> right``."""
    match_l: dict[int, int] = {}
    match_r: dict[int, int] = {}
    for root in sorted(left):
        seen: set[int] = set()
        # entries: [left vertex, neighbour iterator, right vertex used to descend]
        stack = [[root, iter(adj.get(root, ())), None]]
        while stack:
            top = stack[-1]
            for b in top[1]:
                if b in seen:
                    continue
                seen.add(b)
                if b not in match_r:
                    top[2] = b
                    for a, _, bb in stack:
                        match_l[a] = bb
                        match_r[bb] = a
                    stack = []
                    break
                top[2] = b
                nxt = match_r[b]
                stack.append([nxt, iter(adj.get(nxt, ())), None])
                break
            else:
                stack.pop()
    return match_l


def _neighbourhood(S, adj) -> set:
    out: set = set()
    for a in S:
        out.update(adj[a])
    return out


def _minimal_deficient_set(start, adj) -> tuple[frozenset, dict[int, int]]:
    """Inclusion-minimal nonempty ``S`` within ``start`` with ``|N(S)| <= |S|``.

    Returns ``S`` and a perfect matching of ``S`` onto ``N(S)``. The input
    must itself satisfy ``|N(start)| <= |start|``.
    """
    S = set(start)
    while True:
        N = _neighbourhood(S, adj)
        if len(N) > len(S):
            raise InvariantViolation("starting set already has |N(S)| > |S|")
        if len(N) < len(S):
            if len(S) == 1:
                raise InvariantViolation("isolated vertex inside the matching chain")
            # dropping any element keeps |N| <= |S|
            S.discard(max(S))
            continue
        sub = {a: [b for b in adj[a]] for a in S}
        match = max_bipartite_matching(S, sub)
        if len(match) < len(S):
            # vertices alternating-reachable from an unmatched one form a deficient proper subset
            u = min(a for a in S if a not in match)
            match_r = {b: a for a, b in match.items()}
            X = {u}
            todo = [u]
            while todo:
                a = todo.pop()
                for b in sub[a]:
                    c = match_r[b]
                    if c not in X:
                        X.add(c)
                        todo.append(c)
            S = X
            continue
        # perfect: tight subsets are exactly the sets closed under a -> match^{-1}(N(a))
        match_r = {b: a for a, b in match.items()}
        best = None
        for a in sorted(S):
            R = {a}
            todo = [a]
            while todo:
                c = todo.pop()
                for b in sub[c]:
                    nxt = match_r[b]
                    if nxt not in R:
                        R.add(nxt)
                        todo.append(nxt)
            if best is None or len(R) < len(best):
                best = R
                if len(best) == 1:
                    break
        if len(best) == len(S):
            return frozenset(S), match
        S = best


@dataclass
class MatchingChain:
    """Nested sets ``A_0 >= A_1 >= ...``, ``B_0 >= B_1 >= ...`` and matchings.

    ``matchings[i - 1]`` is ``M_i`` as a dict from ``A_i`` to ``B_i``;
    ``matching_edges[i - 1]`` lists its edge ranks.
    """

    a_sets: list[frozenset]
    b_sets: list[frozenset]
    matchings: list[dict[int, int]]
    matching_edges: list[frozenset]

    @property
    def length(self) -> int:
        return len(self.matchings)

    def problems(self, g: GraphLike) -> list[str]:
        """Every violated chain invariant, as readable strings (empty if none)."""
        view = as_view(g)
        out = []
        used: set = set()
        for i in range(1, self.length + 1):
            A, B = self.a_sets[i], self.b_sets[i]
            if not A <= self.a_sets[i - 1] or not B <= self.b_sets[i - 1]:
                out.append(f"step {i}: sets not nested")
            if not A:
                out.append(f"step {i}: empty A_i")
            if len(A) != len(B):
                out.append(f"step {i}: |A_i|={len(A)} != |B_i|={len(B)}")
            M = self.matchings[i - 1]
            if set(M) != set(A) or set(M.values()) != set(B) or len(set(M.values())) != len(M):
                out.append(f"step {i}: M_i is not a perfect matching of A_i and B_i")
            edges = set()
            for a, b in M.items():
                r = view.edge_between(a, b)
                if r is None:
                    out.append(f"step {i}: matched pair {a}-{b} is not an edge")
                else:
                    edges.add(r)
            if edges != set(self.matching_edges[i - 1]):
                out.append(f"step {i}: matching edge list out of sync")
            if edges & used:
                out.append(f"step {i}: M_i reuses an edge of an earlier matching")
            # N_{G_i}(A_i) is inside B_i
            for a in A:
                for r in view.incident(a):
                    if r in used:
                        continue
                    if view.other(r, a) not in B:
                        out.append(f"step {i}: neighbour of A_i outside B_i")
                        break
            used |= edges
        return out

    def to_dict(self) -> dict:
        return {
            "A": [sorted(s) for s in self.a_sets],
            "B": [sorted(s) for s in self.b_sets],
            "M": [sorted(sorted(p) for p in m.items()) for m in self.matchings],
        }


def pyber_chain(g: GraphLike, A: Iterable[int], B: Iterable[int], delta: int) -> MatchingChain:
    """Nested sets with edge-disjoint perfect matchings, ``delta`` steps deep.

    ``g`` must be bipartite with sides ``A``, ``B`` (``|A| >= |B|``) and
    minimum degree at least ``delta``.
    """
    view = as_view(g)
    A, B = frozenset(A), frozenset(B)
    if A & B or (A | B) != set(view.vertices):
        raise PreconditionError("bipartition", "A and B must partition the vertex set")
    if len(A) < len(B):
        raise PreconditionError("|A| >= |B|", f"|A|={len(A)} |B|={len(B)}")
    for r in view.edge_ranks:
        u, v = view.endpoints(r)
        if (u in A) == (v in A):
            raise PreconditionError("bipartite", f"edge {u}-{v} lies inside one side")
    if delta < 0:
        raise PreconditionError("delta", "delta must be non-negative")
    if delta > 0 and min((view.degree(v) for v in view.vertices), default=0) < delta:
        raise PreconditionError("min degree", f"minimum degree is below delta={delta}")
    used: set = set()
    chain = MatchingChain([A], [B], [], [])
    for _ in range(delta):
        adj = {a: [view.other(r, a) for r in view.incident(a) if r not in used] for a in A}
        S, match = _minimal_deficient_set(chain.a_sets[-1], adj)
        Bi = frozenset(_neighbourhood(S, adj))
        edges = frozenset(view.edge_between(a, b) for a, b in match.items())
        chain.a_sets.append(S)
        chain.b_sets.append(Bi)
        chain.matchings.append(dict(match))
        chain.matching_edges.append(edges)
        used |= edges
    return chain


@dataclass
class RegularisationResult:
    subgraph: GraphView
    d_prime: Fraction
    x: int
    q: int | None
    delta: int
    bipartite: Bipartite | None = None
    core: GraphView | None = None
    chain: MatchingChain | None = None
    degenerate: bool = False
    notes: list[str] = field(default_factory=list)

    def degree_band_ok(self) -> bool:
        lo, hi = self.d_prime, 6 * self.d_prime
        return all(lo <= self.subgraph.degree(v) <= hi for v in self.subgraph.vertices)

    def to_json(self) -> str:
        data = {
            "d_prime": str(self.d_prime),
            "x": self.x,
            "q": self.q,
            "delta": self.delta,
            "degenerate": self.degenerate,
            "vertices": list(self.subgraph.vertices),
            "edges": list(self.subgraph.edge_ranks),
            "notes": self.notes,
        }
        if self.bipartite is not None:
            data["side_a"] = sorted(self.bipartite.side_a)
            data["side_b"] = sorted(self.bipartite.side_b)
        if self.core is not None:
            data["core_vertices"] = list(self.core.vertices)
        if self.chain is not None:
            data["chain"] = self.chain.to_dict()
        return json.dumps(data, sort_keys=True)


def regularise(g: GraphLike) -> RegularisationResult:
    """Subgraph with all degrees in ``[d', 6d']``.

    For average degree below 4 the band degenerates (``d' <= 0``); the empty
    subgraph is returned with ``degenerate`` set.
    """
    view = as_view(g)
    n = view.num_vertices
    if n < 2:
        raise PreconditionError("n >= 2", f"graph has {n} vertices")
    d = view.average_degree
    logn = ceil_log2(n)
    x = math.floor((d / 4 - 1) / logn)
    d_prime = Fraction(x + 1, 6)
    delta = math.floor(d / 4)
    if x < 0:
        return RegularisationResult(view.induced(()), d_prime, x, None, delta, degenerate=True,
                                    notes=["average degree below 4: empty band"])
    bip = bipartite_half(view)
    if 2 * bip.view.num_edges < view.num_edges:
        raise InvariantViolation("bipartite subgraph kept fewer than half the edges")
    core, guaranteed = min_degree_core(bip.view, d / 4)
    if not guaranteed or core.num_vertices == 0:
        raise InvariantViolation("min-degree core left the guaranteed regime")
    side_a = bip.side_a & set(core.vertices)
    side_b = bip.side_b & set(core.vertices)
    if len(side_a) < len(side_b):
        side_a, side_b = side_b, side_a
    chain = pyber_chain(core, side_a, side_b, delta)
    sizes = [len(b) for b in chain.b_sets]
    q = next((i for i in range(1, delta - x + 1) if sizes[i] <= 2 * sizes[i + x]), None)
    if q is None:
        raise InvariantViolation("no index q with |B_q| <= 2|B_{q+x}|")
    keep_v = chain.a_sets[q] | chain.b_sets[q + x]
    keep_e = set()
    for j in range(q, q + x + 1):
        for r in chain.matching_edges[j - 1]:
            a, b = core.endpoints(r)
            if a in keep_v and b in keep_v:
                keep_e.add(r)
    window = core.restrict(keep_v, keep_e)
    final, _ = min_degree_core(window, d_prime)
    res = RegularisationResult(final, d_prime, x, q, delta, bip, core, chain)
    if final.num_vertices == 0:
        raise InvariantViolation("regularised subgraph is empty")
    if not res.degree_band_ok():
        raise InvariantViolation("degrees escaped the [d', 6d'] band")
    return res
