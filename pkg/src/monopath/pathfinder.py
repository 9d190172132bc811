"""Increasing-path construction.

Paths and trails are vertex sequences; their length is the number of edges.
Every function here returns sequences that are *increasing*: consecutive
edge ranks strictly increase along the sequence.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvariantViolation, PreconditionError
from .graph import GraphLike, GraphView, as_view
from .height_table import HeightTable, _extend, build_height_table, relaxed_extension
from .regularise import regularise

STRICT = "strict"
BEST_EFFORT = "best-effort"
MODES = (STRICT, BEST_EFFORT)


# -- validation -------------------------------------------------------------------------


def sequence_ranks(g: GraphLike, seq: Sequence[int]) -> list[int]:
    """Ranks of the consecutive edges of ``seq``; ``KeyError`` if one is missing."""
    view = as_view(g)
    out = []
    for u, v in zip(seq, seq[1:]):
        r = view.edge_between(u, v)
        if r is None:
            raise KeyError(f"{u}-{v} is not an edge")
        out.append(r)
    return out


def trail_problem(g: GraphLike, seq: Sequence[int], simple: bool = False) -> str | None:
    """Why ``seq`` is not an increasing trail (or path, if ``simple``); ``None`` if it is."""
    view = as_view(g)
    if len(seq) < 2:
        return "fewer than two vertices"
    for v in seq:
        if not view.has_vertex(v):
            return f"vertex {v} is not in the graph"
    try:
        ranks = sequence_ranks(view, seq)
    except KeyError as exc:
        return exc.args[0]
    for i, (r, s) in enumerate(zip(ranks, ranks[1:])):
        if not r < s:
            return f"ranks {r}, {s} at positions {i}, {i + 1} do not increase"
    if simple and len(set(seq)) != len(seq):
        return "repeated vertex"
    return None


def path_problem(g: GraphLike, seq: Sequence[int]) -> str | None:
    return trail_problem(g, seq, simple=True)


def is_increasing_path(g: GraphLike, seq: Sequence[int]) -> bool:
    return path_problem(g, seq) is None


def is_increasing_trail(g: GraphLike, seq: Sequence[int]) -> bool:
    return trail_problem(g, seq) is None


def canonical_increasing(g: GraphLike, seq: Sequence[int]) -> list[int]:
    """``seq`` if increasing, its reversal if decreasing."""
    seq = list(seq)
    ranks = sequence_ranks(g, seq)
    if all(a < b for a, b in zip(ranks, ranks[1:])):
        return seq
    if all(a > b for a, b in zip(ranks, ranks[1:])):
        return seq[::-1]
    raise ValueError("sequence is not monotone")


# relative slack against rounding in the floating-point log terms; a gate only
# passes when it holds with this margin
LOG_ALLOWANCE = 2.0**-40


def _log2n(n: int) -> float:
    if n < 2:
        raise PreconditionError("n >= 2", f"n={n}")
    return math.log2(n)


def _greater(lhs: float, rhs: float) -> bool:
    return lhs > rhs + LOG_ALLOWANCE * abs(rhs)


def _at_least(lhs: float, rhs: float) -> bool:
    return lhs >= rhs + LOG_ALLOWANCE * abs(rhs)


def _less(lhs: float, rhs: float) -> bool:
    return lhs < rhs - LOG_ALLOWANCE * abs(rhs)


# -- controlled trails ---------------------------------------------------------------------


@dataclass
class DenseSubgraph:
    """Result of :func:`reachable_dense_subgraph`.

    ``trails[r]`` is an increasing trail (vertex list) starting with the base
    edge and ending with edge ``r``; ``layer_sizes[j - 1] = |N_j|``.
    """

    subgraph: GraphView
    trails: dict[int, list[int]]
    k: int
    layer_sizes: list[int]
    thresholds: list[float]

    def trail(self, r: int) -> list[int]:
        return self.trails[r]


def reachable_dense_subgraph(g: GraphLike, e: int, h: float, n_bound: int | None = None,
                             table: HeightTable | None = None, height_floor: float | None = None,
                             check: bool = True) -> DenseSubgraph:
    """Dense subgraph all of whose edges end short controlled trails from ``e``.

    Layer ``j`` holds the vertices ending a controlled trail of length ``j``
    together with the smallest possible last rank, which is all an extension
    depends on. ``height_floor`` optionally raises every threshold to at least
    that value. With ``check`` the hypothesis
    ``h(e) >= 21 h log n`` behind the density guarantee is enforced.
    """
    view = as_view(g)
    t = table or build_height_table(view)
    n = n_bound if n_bound is not None else view.num_vertices
    logn = _log2n(n)
    if h < 1:
        raise PreconditionError("h >= 1", f"h={h}")
    he = t.height(e)
    if check and not _at_least(he, 21 * h * logn):
        raise PreconditionError("h(e) >= 21 h log n", f"h(e)={he}, h={h}, log n={logn:.3f}")
    x0, x1 = t.oriented(e)

    def threshold(j: int) -> float:
        thr = he - 7 * h * j
        return thr if height_floor is None else max(thr, height_floor)

    # layer: vertex -> (smallest last rank, predecessor vertex)
    layers: list[dict[int, tuple[int, int]]] = [{x0: (0, -1)}, {x1: (e, x0)}]
    thresholds = [threshold(1)]
    max_k = max(1, math.floor(1 + logn))
    k = 1
    while True:
        thr = threshold(k + 1)
        nxt: dict[int, tuple[int, int]] = {}
        for w, (last, _) in layers[k].items():
            col = t.columns.get(w, [])
            for row in range(len(col), 0, -1):
                if row < thr:
                    break
                r = col[row - 1]
                if r is None or r <= last:
                    continue
                z = view.other(r, w)
                if z not in nxt or r < nxt[z][0]:
                    nxt[z] = (r, w)
        layers.append(nxt)
        thresholds.append(thr)
        if len(nxt) <= 2 * len(layers[k]) or k >= max_k:
            break
        k += 1

    def trail_to(j: int, v: int) -> list[int]:
        seq = [v]
        while j > 0:
            v = layers[j][v][1]
            seq.append(v)
            j -= 1
        return seq[::-1]

    trails: dict[int, list[int]] = {}
    top_thr = thresholds[k]
    for w, (last, _) in layers[k].items():
        col = t.columns.get(w, [])
        for row in range(len(col), 0, -1):
            if row < top_thr:
                break
            r = col[row - 1]
            if r is None or r <= last:
                continue
            trails[r] = trail_to(k, w) + [view.other(r, w)]
    keep_v = set(layers[k]) | set(layers[k + 1])
    sub = view.restrict(keep_v, trails)
    return DenseSubgraph(sub, trails, k, [len(layer) for layer in layers[1:]], thresholds)


# -- joining a trail and a path ------------------------------------------------------------------


def _connector(trail: Sequence[int], target: int) -> list[int]:
    """Increasing path over trail edges: the first trail edge, then on to ``target``."""
    w0, w1 = trail[0], trail[1]
    j = trail.index(target)
    walk = list(trail[: j + 1])
    s = max(i for i, v in enumerate(walk) if v in (w0, w1))
    walk = walk[s:]
    # splice out closed sub-walks; the ranks around a splice still increase
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in walk:
        if v in pos:
            cut = pos[v]
            for u in out[cut + 1:]:
                del pos[u]
            del out[cut + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    first = w1 if out[0] == w0 else w0
    return [first] + out


def join_trail_path(g: GraphLike, trail: Sequence[int], path: Sequence[int]) -> list[int]:
    """Increasing path from the first edge of ``trail`` using ``E(trail) | E(path)``.

    The last edge of the trail must be the first edge of the path (either
    orientation). The result has length at least ``len(path)/(k + 1) - 1``
    where ``k`` is the trail length and lengths count edges.
    """
    view = as_view(g)
    trail, path = list(trail), list(path)
    problem = trail_problem(view, trail)
    if problem:
        raise PreconditionError("trail", problem)
    problem = path_problem(view, path)
    if problem:
        raise PreconditionError("path", problem)
    if {trail[-2], trail[-1]} != {path[0], path[1]}:
        raise PreconditionError("seam", "last trail edge differs from the first path edge")
    if len(trail) == 2:
        return path
    if trail[-2] != path[0]:
        if len(path) == 2:
            return trail[:2]
        trail = trail[:-1] + [path[2]]
        path = path[1:]
    on_trail = set(trail)
    starts = [i for i, v in enumerate(path) if v in on_trail]
    best: list[int] | None = None
    for a, b in zip(starts, starts[1:] + [len(path)]):
        segment = path[a:b]
        cand = _connector(trail, segment[0]) + segment[1:]
        if best is None or len(cand) > len(best):
            best = cand
    assert best is not None
    problem = path_problem(view, best)
    if problem:
        raise InvariantViolation(f"joined path is invalid: {problem}")
    return best


# -- the recursive search -------------------------------------------------------------------------


@dataclass
class IterationLog:
    depth: int
    i: int
    e_i: int
    f_i: int
    h_e: int
    h_f: int
    length: int
    gates: dict[str, bool] = field(default_factory=dict)
    note: str = ""

    def line(self) -> str:
        gates = ",".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in self.gates.items()) or "-"
        text = (f"depth={self.depth} i={self.i} e_i={self.e_i} f_i={self.f_i} "
                f"h(e_i)={self.h_e} h(f_i)={self.h_f} |P_i|={self.length} gates={gates}")
        return text + (f" note={self.note}" if self.note else "")


@dataclass
class PathSearchReport:
    path: list[int]
    start_edge: int
    a: float
    t: int
    C: float
    mode: str
    bound: float
    window_floor: float
    guarantee_satisfied: bool = False
    failed_gate: str | None = None
    gates: dict[str, bool] = field(default_factory=dict)
    iterations: list[IterationLog] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.path) - 1

    def log_lines(self) -> list[str]:
        head = (f"mode={self.mode} t={self.t} a={self.a:g} C={self.C:g} e={self.start_edge} "
                f"bound={self.bound:.6g} failed_gate={self.failed_gate or '-'}")
        lines = [head]
        lines += [it.line() for it in self.iterations]
        lines += [f"note {n}" for n in self.notes]
        lines.append("path " + " ".join(map(str, self.path)))
        return lines


def guarantee_bound(a: float, t: int, C: float, n: int) -> float:
    """``a^(1 - 1/t) / (C log n)^(2t)``."""
    return a ** (1 - 1 / t) / (C * _log2n(n)) ** (2 * t)


@dataclass
class _Context:
    C: float
    logn: float
    n: int
    mode: str
    report: PathSearchReport

    @property
    def strict(self) -> bool:
        return self.mode == STRICT

    def gate(self, name: str, ok: bool, depth: int) -> bool:
        key = name if depth == 0 else f"{name}@{depth}"
        self.report.gates[key] = bool(ok)
        if not ok and self.report.failed_gate is None:
            self.report.failed_gate = key
        return bool(ok)


def _oriented_start(t: HeightTable, e: int) -> list[int]:
    x, y = t.oriented(e)
    return [x, y]


def _trim(view: GraphView, target: int) -> GraphView:
    """Keep the highest-ranked edges so the average degree drops to about ``target``."""
    if target < 1 or view.average_degree <= target:
        return view
    keep = math.ceil(Fraction(target * view.num_vertices, 2))
    ranks = sorted(view.edge_ranks, reverse=True)[:keep]
    return view.spanning(ranks)


def _search(view: GraphView, e: int, a: float, t: int, ctx: _Context, depth: int) -> list[int]:
    table = build_height_table(view)
    start = _oriented_start(table, e)
    if t == 1:
        return start
    C, L = ctx.C, ctx.logn
    if ctx.strict and guarantee_bound(a, t, C, ctx.n) <= 1:
        # the guaranteed length is at most one edge
        return start
    s = t - 1
    he = table.height(e)
    m = (240 * a) ** (1 - 1 / t) / (C * L) ** (2 * s)
    ell = m ** (1 - 1 / s) / (C * L) ** (2 * s)
    if not ctx.gate("a > (CL)^(2t+2)", _greater(a, (C * L) ** (2 * s + 4)), depth) and ctx.strict:
        return start

    h_param = a / (21 * L)
    if h_param < 1:
        if ctx.strict:
            ctx.gate("h >= 1", False, depth)
            return start
        h_param = 1.0
    try:
        dense = reachable_dense_subgraph(view, e, h_param, ctx.n, table, height_floor=he - a,
                                         check=ctx.strict)
    except PreconditionError as exc:
        ctx.gate(exc.name, False, depth)
        return start
    target = math.floor(a / (21 * L))
    g_prime = dense.subgraph if target < 1 else _trim(dense.subgraph, target)

    H = None
    if g_prime.num_vertices >= 2 and g_prime.num_edges:
        res = regularise(g_prime)
        if not res.degenerate and res.subgraph.num_edges:
            H = res.subgraph
    if H is None:
        if ctx.strict:
            ctx.gate("regularise", False, depth)
            return start
        ctx.report.notes.append(f"depth {depth}: regularisation empty, using G' directly")
        H = g_prime
    if H.num_edges == 0:
        ctx.gate("H nonempty", False, depth)
        return start

    dH = float(H.average_degree)
    delta = H.max_degree
    gates = [
        ("dbar(H) >= 4a/(CL)^2", _at_least(dH, 4 * a / (C * L) ** 2)),
        ("Delta(H) < 120a/(CL)^2", _less(delta, 120 * a / (C * L) ** 2)),
        ("m^2 > 2 Delta l", _greater(m * m, 2 * delta * ell)),
        ("dbar(H)/4 > 7m >= 4m+3", _greater(dH / 4, 7 * m) and _at_least(7 * m, 4 * m + 3)),
        ("ceil(l) < m", math.ceil(ell) < m),
    ]
    for name, ok in gates:
        if not ctx.gate(name, ok, depth) and ctx.strict:
            return start

    rounds = math.ceil(dH / (48 * m)) if m > 0 else 1
    if not ctx.strict:
        rounds = max(rounds, 1)
    keep = max(1, math.ceil(ell))
    G_i = H
    t_i = build_height_table(G_i)
    e_i = t_i.max_height_edge()
    glued: list[int] = []
    hop: tuple[int, int] | None = None  # (w_{i-1}, x_i) joining the previous piece
    for i in range(1, rounds + 1):
        he_i = t_i.height(e_i)
        a_i = m if ctx.strict else min(m, he_i - 0.5)
        if a_i <= 0:
            a_i = he_i - 0.5
        P = _search(G_i, e_i, a_i, s, ctx, depth + 1)
        if ctx.strict:
            if len(P) - 1 < keep:
                ctx.gate("|P_i| >= ceil(l)", False, depth)
                break
            P = P[: keep + 1]
        if hop is None:
            glued = list(P)
        else:
            w_prev, x_i = hop
            # if P_i starts with y_i, the edge y_i x_i is replaced by w_{i-1} x_i
            glued += P if P[0] == x_i else P[1:]
        f_i = G_i.edge_between(P[-2], P[-1])
        log = IterationLog(depth, i, e_i, f_i, he_i, t_i.height(f_i), len(P) - 1)
        ctx.report.iterations.append(log)
        if i == rounds:
            break
        # hop: z_i w_i x_{i+1} y_{i+1} increasing, avoiding every vertex of P_i
        z, w = P[-2], P[-1]
        U = set(P)
        if ctx.strict:
            ok = m + 2 >= len(U) and m * m / 2 > G_i.max_degree * len(U) and t_i.height(f_i) > 4 * m + 3
            log.gates["length3 hypotheses"] = ok
            if not ctx.gate("length3 hypotheses", ok, depth):
                break
            try:
                ext = _extend(G_i, t_i, z, w, U, m, strict=True)
            except (PreconditionError, InvariantViolation) as exc:
                ctx.gate("length3 extension", False, depth)
                log.note = str(exc)
                break
        else:
            ext = relaxed_extension(G_i, z, w, U, max(m, 1.0), t_i)
            if ext is None:
                ext = relaxed_extension(G_i, z, w, U, t_i.height(f_i), t_i)
            if ext is None:
                log.note = "no extension candidate"
                break
        G_i = G_i.without_vertices(U)
        t_i = build_height_table(G_i)
        e_i = G_i.edge_between(ext.z, ext.w)
        hop = (w, ext.z)
    first_edge = view.edge_between(glued[0], glued[1])
    return join_trail_path(view, dense.trail(first_edge), glued)


def find_increasing_path(g: GraphLike, e: int, a: float, t: int, C: float = 70,
                         mode: str = BEST_EFFORT, n_bound: int | None = None) -> PathSearchReport:
    """Increasing path starting with ``e`` whose edges all have height ``>= h(e) - a``.

    ``strict`` stops at the first inequality that fails;
    ``best-effort`` logs failed inequalities and keeps going. Both modes
    only ever return valid paths inside the height window.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if t < 1:
        raise PreconditionError("t >= 1", f"t={t}")
    if not a > 0:
        raise PreconditionError("a > 0", f"a={a}")
    view = as_view(g)
    table = build_height_table(view)
    he = table.height(e)
    if not he > a:
        raise PreconditionError("h(e) > a", f"h(e)={he}, a={a}")
    n = n_bound if n_bound is not None else view.num_vertices
    bound = guarantee_bound(a, t, C, n)
    report = PathSearchReport([], e, a, t, C, mode, bound, he - a)
    ctx = _Context(C, _log2n(n), n, mode, report)
    path = _search(view, e, a, t, ctx, 0)
    problem = path_problem(view, path)
    if problem:
        raise InvariantViolation(f"search produced an invalid path: {problem}")
    if view.edge_between(path[0], path[1]) != e:
        raise InvariantViolation("path does not start with the requested edge")
    low = min(table.height(r) for r in sequence_ranks(view, path))
    if low < he - a:
        raise InvariantViolation(f"path leaves the height window: {low} < {he - a}")
    report.path = path
    report.guarantee_satisfied = report.length >= bound
    return report


def altitude_parameters(g: GraphLike) -> tuple[int, int]:
    """``(a, t)`` used by :func:`longest_path_lower_bound`."""
    view = as_view(g)
    a = math.floor(view.average_degree / 2) - 1
    n = view.num_vertices
    if a <= 1 or n <= 2 or math.log2(math.log2(n)) <= 0:
        return a, 1
    t = math.floor(math.sqrt(math.log2(a) / math.log2(math.log2(n))))
    return a, max(1, t)


def longest_path_lower_bound(g: GraphLike, mode: str = BEST_EFFORT, C: float = 70) -> PathSearchReport:
    """The altitude argument: ``a = floor(d/2) - 1`` from a maximum-height edge."""
    view = as_view(g)
    if view.num_vertices == 0 or view.average_degree < 2:
        raise PreconditionError("dbar >= 2", f"average degree {view.average_degree}")
    table = build_height_table(view)
    e = table.max_height_edge()
    a, t = altitude_parameters(view)
    if a <= 0:
        he = table.height(e)
        rep = PathSearchReport(_oriented_start(table, e), e, a, t, C, mode, 0.0, he - a,
                               guarantee_satisfied=True)
        rep.notes.append("a <= 0: single-edge path")
        return rep
    return find_increasing_path(view, e, a, t, C, mode)


# -- locally sparse graphs -------------------------------------------------------------------------


@dataclass
class GreedyResult:
    path: list[int]
    epsilon: float
    condition_verified: bool | None
    condition_exact: bool
    bound: Fraction

    @property
    def length(self) -> int:
        return len(self.path) - 1

    @property
    def bound_met(self) -> bool:
        return self.length >= self.bound


def greedy_descent(g: GraphLike, table: HeightTable | None = None) -> list[int]:
    """Walk down the height table from a maximum-height edge, never revisiting a vertex."""
    view = as_view(g)
    t = table or build_height_table(view)
    e = t.max_height_edge()
    if e is None:
        return []
    path = list(t.oriented(e))
    on_path = set(path)
    h_prev = t.height(e)
    while True:
        cur = path[-1]
        col = t.columns.get(cur, [])
        nxt = None
        for row in range(min(h_prev - 1, len(col)), 0, -1):
            r = col[row - 1]
            y = view.other(r, cur)
            if y not in on_path:
                nxt, h_prev = y, row
                break
        if nxt is None:
            return path
        path.append(nxt)
        on_path.add(nxt)


@dataclass
class SparsityCheck:
    holds: bool | None
    exact: bool
    size: int
    edge_bound: Fraction
    densest: int
    witness: tuple[int, ...] = ()
    samples: int = 0


def _induced_edges(view: GraphView, S) -> int:
    S = set(S)
    return sum(1 for v in S for u in view.neighbors(v) if u in S) // 2


def check_local_sparsity(g: GraphLike, epsilon: float, exact_limit: int = 200_000,
                         samples: int = 2000, seed: int = 0) -> SparsityCheck:
    """Does every set of at most ``eps d`` vertices induce at most ``(1/2 - eps) d`` edges?

    Exact when it is implied by counting (``C(s, 2)`` below the bound) or
    when the number of ``s``-sets is below ``exact_limit``; otherwise random
    and greedily-grown sets are sampled and ``exact`` is false.
    """
    view = as_view(g)
    eps = Fraction(epsilon).limit_denominator(10**6)
    d = view.average_degree
    s = min(math.floor(eps * d), view.num_vertices)
    bound = (Fraction(1, 2) - eps) * d
    if s <= 1 or math.comb(s, 2) <= bound:
        # sets of at most one vertex induce nothing, so only the sign of the bound matters
        worst = min(math.comb(max(s, 0), 2), view.num_edges)
        return SparsityCheck(worst <= bound, True, s, bound, worst)
    verts = view.vertices
    if math.comb(len(verts), s) <= exact_limit:
        best, witness = -1, ()
        for S in itertools.combinations(verts, s):
            k = _induced_edges(view, S)
            if k > best:
                best, witness = k, S
                if best > bound:
                    break
        return SparsityCheck(best <= bound, True, s, bound, best, witness)
    rng = random.Random(seed)
    best, witness = -1, ()
    for i in range(samples):
        if i % 2 == 0:
            S = rng.sample(verts, s)
        else:
            # grow greedily from a random vertex by most neighbours inside
            S = [rng.choice(verts)]
            inside = set(S)
            while len(S) < s:
                cand = max((u for v in S for u in view.neighbors(v) if u not in inside),
                           key=lambda u: (sum(1 for x in view.neighbors(u) if x in inside), -u),
                           default=None)
                if cand is None:
                    cand = rng.choice([v for v in verts if v not in inside])
                S.append(cand)
                inside.add(cand)
        k = _induced_edges(view, S)
        if k > best:
            best, witness = k, tuple(sorted(S))
            if best > bound:
                return SparsityCheck(False, True, s, bound, best, witness, i + 1)
    return SparsityCheck(None, False, s, bound, best, witness, samples)


def greedy_locally_sparse(g: GraphLike, epsilon: float, check: bool = True, **check_args) -> GreedyResult:
    """The locally-sparse descent plus (optionally) a check of its hypothesis.

    ``condition_verified`` is ``True``/``False`` when the hypothesis was
    decided, ``None`` when only sampled evidence exists or no check was run.
    When it is ``True`` the descent is guaranteed to satisfy ``bound_met``;
    callers check it.
    """
    if not 0 < epsilon < 1:
        raise PreconditionError("0 < epsilon < 1", f"epsilon={epsilon}")
    view = as_view(g)
    path = greedy_descent(view)
    bound = Fraction(epsilon).limit_denominator(10**6) * view.average_degree if view.num_vertices else Fraction(0)
    verified, exact = None, False
    if check and view.num_edges:
        rep = check_local_sparsity(view, epsilon, **check_args)
        verified, exact = rep.holds, rep.exact
    return GreedyResult(path, epsilon, verified, exact, bound)
