"""Height tables of ordered graphs and the structural facts they satisfy.

Cells are ``(row, vertex)`` pairs with rows starting at 1; the lexicographic
cell order is plain tuple order. The table is filled by sweeping cells in
that order and dropping into each cell the highest-ranked not-yet-placed edge
at the cell's vertex. Edges with a high rank therefore land in *low* cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InvariantViolation, PreconditionError
from .graph import GraphLike, GraphView, as_view

Cell = tuple[int, int]


class HeightTable:
    """Immutable height table of a graph view.

    ``columns[v][i - 1]`` is the rank of the edge in cell ``(i, v)``; columns
    are stored as prefix-filled lists, blank cells are implicit. A table may
    be constructed from explicit columns (e.g. a parsed dump); such a table is
    not guaranteed to satisfy any of the laws, which is what the ``check_*``
    functions are for.
    """

    def __init__(self, graph: GraphLike, columns: dict[int, list[int | None]]):
        self.graph = as_view(graph)
        self.columns = {v: list(col) for v, col in columns.items() if col}
        cells: dict[int, Cell] = {}
        for v, col in self.columns.items():
            for i, r in enumerate(col, start=1):
                if r is None:
                    continue
                if r in cells:
                    raise InvariantViolation(f"edge {r} appears in two cells")
                cells[r] = (i, v)
        self.cells = cells

    def height(self, r: int) -> int:
        return self.ht(r)[0]

    def column(self, r: int) -> int:
        return self.ht(r)[1]

    def ht(self, r: int) -> Cell:
        try:
            return self.cells[r]
        except KeyError:
            raise KeyError(f"edge {r} is not in the table") from None

    def cell(self, row: int, v: int) -> int | None:
        col = self.columns.get(v)
        if col is None or not 1 <= row <= len(col):
            return None
        return col[row - 1]

    def column_height(self, v: int) -> int:
        return len(self.columns.get(v, ()))

    @property
    def num_rows(self) -> int:
        return max((len(c) for c in self.columns.values()), default=0)

    def oriented(self, r: int) -> tuple[int, int]:
        """Endpoints of ``r`` as ``(column vertex, other vertex)``."""
        v = self.column(r)
        return v, self.graph.other(r, v)

    def max_height_edge(self) -> int | None:
        """An edge of maximum height (leftmost column among ties)."""
        best = None
        for r, cell in self.cells.items():
            if best is None or (cell[0], -cell[1]) > (self.cells[best][0], -self.cells[best][1]):
                best = r
        return best

    def s_set(self, x: int, y: int, i: int) -> frozenset:
        return frozenset(self.s_list(x, y, i))

    def s_list(self, x: int, y: int, i: int) -> list[int]:
        """Vertices ``z`` with ``v(yz) = y`` and ``h(xy) - i <= h(yz) < h(xy)``.

        Returned highest row first. Each ``z`` makes ``x y z`` increasing.
        """
        r = self.graph.edge_between(x, y)
        if r is None:
            raise PreconditionError("edge", f"{x}-{y} is not an edge of the graph")
        h = self.height(r)
        if i >= h:
            raise PreconditionError("S_i undefined", f"i={i} must be below h(xy)={h}")
        if i < 0:
            raise ValueError("i must be non-negative")
        col = self.columns.get(y, [])
        out = []
        for row in range(h - 1, h - 1 - i, -1):
            f = col[row - 1] if row - 1 < len(col) else None
            if f is None:
                raise InvariantViolation(f"cell ({row}, {y}) is blank below an edge of height {h}")
            out.append(self.graph.other(f, y))
        return out

    def dump(self) -> str:
        """One line per nonempty cell, rows ascending then vertices ascending."""
        lines = []
        for row in range(1, self.num_rows + 1):
            for v in sorted(self.columns):
                r = self.cell(row, v)
                if r is None:
                    continue
                a, b = self.graph.endpoints(r)
                lines.append(f"({row}, {v}) {a} {b} {r}")
        return "\n".join(lines) + ("\n" if lines else "")

    def __eq__(self, other):
        if not isinstance(other, HeightTable):
            return NotImplemented
        return self.graph == other.graph and self.columns == other.columns

    def __repr__(self):
        return f"HeightTable(rows={self.num_rows}, edges={len(self.cells)})"


def build_height_table(g: GraphLike) -> HeightTable:
    view = as_view(g)
    pending = {v: view.incident(v) for v in view.vertices}
    ptr = {v: 0 for v in pending}
    placed = bytearray(view.base.m + 1)
    columns: dict[int, list[int]] = {v: [] for v in pending}
    active = [v for v in view.vertices if pending[v]]
    while active:
        still = []
        for v in active:
            lst = pending[v]
            i = ptr[v]
            while i < len(lst) and placed[lst[i]]:
                i += 1
            if i == len(lst):
                continue
            r = lst[i]
            placed[r] = 1
            ptr[v] = i + 1
            columns[v].append(r)
            still.append(v)
        active = still
    return HeightTable(view, columns)


def parse_dump(graph: GraphLike, text: str) -> HeightTable:
    """Rebuild a table from :meth:`HeightTable.dump` output (no law checking)."""
    view = as_view(graph)
    cols: dict[int, dict[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        head, _, rest = raw.partition(")")
        try:
            row_s, v_s = head.strip().lstrip("(").split(",")
            row, v = int(row_s), int(v_s)
            a, b, r = (int(t) for t in rest.split())
        except ValueError:
            raise ValueError(f"line {lineno}: malformed cell line {raw!r}") from None
        if view.base.edge_between(a, b) != r:
            raise ValueError(f"line {lineno}: {a}-{b} does not have rank {r} in the graph")
        cols.setdefault(v, {})[row] = r
    columns = {}
    for v, rows in cols.items():
        top = max(rows)
        columns[v] = [rows.get(i) for i in range(1, top + 1)]
    return HeightTable(view, columns)


# -- law checks -------------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    ok: bool = True
    checked: int = 0
    counterexample: object = None
    detail: str = ""

    def fail(self, counterexample, detail):
        if self.ok:
            self.ok = False
            self.counterexample = counterexample
            self.detail = detail

    def __bool__(self):
        return self.ok


def check_coverage(t: HeightTable) -> CheckReport:
    rep = CheckReport("coverage")
    placed = set(t.cells)
    want = set(t.graph.edge_ranks)
    rep.checked = len(want)
    if placed != want:
        missing = sorted(want - placed)
        extra = sorted(placed - want)
        rep.fail((missing, extra), f"missing={missing[:5]} extra={extra[:5]}")
    for v, col in t.columns.items():
        for i, r in enumerate(col, start=1):
            if r is not None and v not in t.graph.endpoints(r):
                rep.fail((i, v), f"edge {r} sits in column {v} but does not contain it")
    return rep


def check_prefix_filled(t: HeightTable) -> CheckReport:
    """Every nonempty cell has only nonempty cells below it in its column."""
    rep = CheckReport("prefix-filled")
    for v, col in t.columns.items():
        rep.checked += 1
        for i, r in enumerate(col, start=1):
            if r is None:
                rep.fail((i, v), f"blank cell ({i}, {v}) under a filled one")
                break
    return rep


def check_nonempty_below_entry(t: HeightTable) -> CheckReport:
    """If ``ht(xy)`` is lex-above ``(i, x)`` then cell ``(i, x)`` is filled."""
    rep = CheckReport("nonempty-below-entry")
    for r, (h, col) in t.cells.items():
        for x in t.graph.endpoints(r):
            # (i, x) < (h, col) iff i < h, or i == h and x < col
            top = h if x < col else h - 1
            rep.checked += 1
            for i in range(1, top + 1):
                if t.cell(i, x) is None:
                    rep.fail((r, (i, x)), f"cell ({i}, {x}) blank but edge {r} sits at ({h}, {col})")
                    break
    return rep


def check_nonempty_below_row(t: HeightTable) -> CheckReport:
    """If ``h(xy) > i`` there is an edge ``xz`` at ``(i, x)``."""
    rep = CheckReport("nonempty-below-row")
    for r, (h, _) in t.cells.items():
        for x in t.graph.endpoints(r):
            rep.checked += 1
            for i in range(1, h):
                f = t.cell(i, x)
                if f is None or x not in t.graph.endpoints(f):
                    rep.fail((r, (i, x)), f"no edge at ({i}, {x}) below edge {r} of height {h}")
                    break
    return rep


def check_lex_implies_rank(t: HeightTable) -> CheckReport:
    """For ``e, f`` sharing ``v(f)`` with ``ht(f)`` lex-below ``ht(e)``: ``e < f``."""
    rep = CheckReport("lex-implies-rank")
    for v, col in t.columns.items():
        inc = t.graph.incident(v)
        for f in col:
            if f is None:
                continue
            hf = t.cells[f]
            for e in inc:
                if e == f or e not in t.cells:
                    continue
                rep.checked += 1
                if hf < t.cells[e] and not e < f:
                    rep.fail((e, f), f"ht({f})={hf} < ht({e})={t.cells[e]} but rank {e} > {f}")
    return rep


def check_high_edge(t: HeightTable) -> CheckReport:
    """Some edge has height at least ``|E| / |V|`` (hence at least ``d/2``)."""
    rep = CheckReport("high-edge")
    view = t.graph
    rep.checked = 1
    if view.num_edges == 0:
        return rep
    r = t.max_height_edge()
    h = t.height(r)
    if h * view.num_vertices < view.num_edges:
        rep.fail(r, f"max height {h} < |E|/|V| = {Fraction(view.num_edges, view.num_vertices)}")
    return rep


def check_laws(t: HeightTable) -> list[CheckReport]:
    return [
        check_coverage(t),
        check_prefix_filled(t),
        check_nonempty_below_entry(t),
        check_nonempty_below_row(t),
        check_lex_implies_rank(t),
        check_high_edge(t),
    ]


def check_subgraph_monotonicity(g: GraphLike, h_sub: GraphLike,
                                table_g: HeightTable | None = None) -> CheckReport:
    """``ht_H(e) <= ht_G(e)`` for every edge of the spanning subgraph ``H``."""
    g, h_sub = as_view(g), as_view(h_sub)
    if g.vertices != h_sub.vertices:
        raise PreconditionError("spanning", "subgraph must keep every vertex; delete incident edges instead")
    if not set(h_sub.edge_ranks) <= set(g.edge_ranks):
        raise PreconditionError("subgraph", "H has edges that G lacks")
    tg = table_g or build_height_table(g)
    th = build_height_table(h_sub)
    rep = CheckReport("subgraph-monotonicity")
    for r in h_sub.edge_ranks:
        rep.checked += 1
        if th.ht(r) > tg.ht(r):
            rep.fail(r, f"ht_H({r})={th.ht(r)} above ht_G({r})={tg.ht(r)}")
    return rep


# -- edge drop ------------------------------------------------------------------------


@dataclass
class AuxiliaryDigraph:
    """Arcs ``ht_G(e) -> ht_{G\\T}(e)`` for surviving edges, loops removed."""

    arcs: dict[Cell, Cell]
    removed_cells: frozenset = field(default_factory=frozenset)

    def check(self, max_path_ends: int | None = None) -> CheckReport:
        rep = CheckReport("auxiliary-digraph")
        indeg: dict[Cell, int] = {}
        for a, b in self.arcs.items():
            rep.checked += 1
            indeg[b] = indeg.get(b, 0) + 1
            if indeg[b] > 1:
                rep.fail(b, f"cell {b} has in-degree > 1")
            if not b < a:
                rep.fail((a, b), f"arc {a} -> {b} does not go lex-down")
        # out-degree <= 1 holds structurally (dict); descending arcs imply acyclicity,
        # but walk anyway so a corrupted input is caught
        for start in self.arcs:
            seen = {start}
            cur = start
            while cur in self.arcs:
                cur = self.arcs[cur]
                if cur in seen:
                    rep.fail(start, f"directed cycle through {start}")
                    break
                seen.add(cur)
        ends = [b for b in indeg if b not in self.arcs]
        if max_path_ends is not None and len(ends) > max_path_ends:
            rep.fail(ends, f"{len(ends)} path ends exceed |T| = {max_path_ends}")
        if max_path_ends is not None:
            stray = [b for b in ends if b not in self.removed_cells]
            if stray:
                rep.fail(stray, f"path end {stray[0]} is not the cell of a deleted edge")
        return rep


def auxiliary_digraph(table_g: HeightTable, table_gt: HeightTable,
                      removed: Iterable[int] = ()) -> AuxiliaryDigraph:
    arcs = {}
    for r, cell in table_gt.cells.items():
        src = table_g.ht(r)
        if src != cell:
            arcs[src] = cell
    return AuxiliaryDigraph(arcs, frozenset(table_g.ht(r) for r in removed))


@dataclass
class EdgeDropResult:
    witness: int
    height_after: int
    min_height: int
    table_after: HeightTable
    digraph: AuxiliaryDigraph


def edge_drop(g: GraphLike, s_edges: Iterable[int], t_edges: Iterable[int],
              table_g: HeightTable | None = None) -> EdgeDropResult:
    """Find ``e`` in ``S \\ T`` whose height in ``G \\ T`` is at least ``min_S h_G``.

    Among qualifying edges the one with the lex-highest cell in ``G \\ T`` is
    returned.
    """
    view = as_view(g)
    s = set(s_edges)
    t = set(t_edges)
    for r in s | t:
        if not view.has_edge(r):
            raise PreconditionError("edge", f"edge {r} is not in the graph")
    if len(s) <= len(t):
        raise PreconditionError("|S| > |T|", f"|S|={len(s)} |T|={len(t)}")
    tg = table_g or build_height_table(view)
    gt = view.without_edges(t)
    tgt = build_height_table(gt)
    floor = min(tg.height(r) for r in s)
    best = None
    for r in s - t:
        if tgt.height(r) >= floor and (best is None or tgt.ht(r) > tgt.ht(best)):
            best = r
    if best is None:
        raise InvariantViolation(f"no edge of S\\T keeps height >= {floor} after deleting T")
    return EdgeDropResult(best, tgt.height(best), floor, tgt, auxiliary_digraph(tg, tgt, t))


def edge_drop_witness(g: GraphLike, s_edges: Iterable[int], t_edges: Iterable[int],
                      table_g: HeightTable | None = None) -> int:
    return edge_drop(g, s_edges, t_edges, table_g).witness


# -- length-3 extension ------------------------------------------------------------------


@dataclass
class Extension:
    z: int
    w: int
    new_edge_height: int
    candidates: int
    bound_met: bool = True


def _extension_candidates(t: HeightTable, x: int, y: int, blocked: set, i_first: int, i_second: int):
    """Oriented edges ``z w`` with ``z`` in ``S_{i1}(x,y)`` and ``w`` in ``S_{i2}(y,z)``."""
    oriented: dict[int, tuple[int, int]] = {}
    for z in t.s_list(x, y, i_first):
        if z in blocked:
            continue
        hz = t.height(t.graph.edge_between(y, z))
        for w in t.s_list(y, z, min(i_second, hz - 1)):
            if w in blocked or w == x:
                continue
            r = t.graph.edge_between(z, w)
            oriented.setdefault(r, (z, w))
    return oriented


def length3_extension(g: GraphLike, x: int, y: int, U: Iterable[int], m: float,
                      table: HeightTable | None = None) -> Extension:
    """Extend the increasing edge ``x y`` to ``x y z w`` avoiding ``U``.

    Guarantees ``h_{G-U}(zw) >= h(xy) - 4m - 3`` under the hypotheses
    ``h(xy) > 4m + 3``, ``m >= |U|``, ``m^2/2 > Delta(G) |U|`` and ``x, y`` not
    in ``U``; each failing hypothesis raises :class:`PreconditionError`.
    """
    view = as_view(g)
    U = set(U)
    t = table or build_height_table(view)
    r = view.edge_between(x, y)
    if r is None:
        raise PreconditionError("edge", f"{x}-{y} is not an edge of the graph")
    h = t.height(r)
    if not h > 4 * m + 3:
        raise PreconditionError("h(xy) > 4m+3", f"h(xy)={h}, m={m}")
    if not m >= len(U):
        raise PreconditionError("m >= |U|", f"m={m}, |U|={len(U)}")
    if not m * m / 2 > view.max_degree * len(U):
        raise PreconditionError("m^2/2 > Delta|U|", f"m={m}, Delta={view.max_degree}, |U|={len(U)}")
    if x in U or y in U:
        raise PreconditionError("x, y not in U", "the starting edge must avoid U")
    return _extend(view, t, x, y, U, m, strict=True)


def _extend(view: GraphView, t: HeightTable, x: int, y: int, U: set, m: float, strict: bool) -> Extension:
    h = t.height(view.edge_between(x, y))
    i1 = math.ceil(2 * m)
    i2 = math.ceil(2 * m + 1)
    if not strict:
        i1 = max(0, min(i1, h - 1))
    cands = _extension_candidates(t, x, y, U, i1, i2)
    if not cands:
        if strict:
            raise InvariantViolation("no length-3 extension candidates")
        return None  # type: ignore[return-value]
    touching = {r for u in U if view.has_vertex(u) for r in view.incident(u)}
    reduced = view.without_vertices(U)
    if strict:
        res = edge_drop(view, set(cands), touching, t)
        z, w = cands[res.witness]
        h_new = build_height_table(reduced).height(res.witness)
        return Extension(z, w, h_new, len(cands), h_new >= h - 4 * m - 3)
    tr = build_height_table(reduced)
    best = max(cands, key=lambda r_: tr.ht(r_))
    z, w = cands[best]
    h_new = tr.height(best)
    return Extension(z, w, h_new, len(cands), h_new >= h - 4 * m - 3)


def relaxed_extension(g: GraphLike, x: int, y: int, U: Iterable[int], m: float,
                      table: HeightTable | None = None) -> Extension | None:
    """Best-effort variant of :func:`length3_extension` that never raises.

    Hypotheses are not checked; the first index is clipped to stay below
    ``h(xy)``. Returns the candidate that is highest in ``G - U`` (``None`` if
    there is no candidate at all). ``bound_met`` tells whether the height
    guarantee happens to hold.
    """
    view = as_view(g)
    t = table or build_height_table(view)
    if view.edge_between(x, y) is None:
        raise PreconditionError("edge", f"{x}-{y} is not an edge of the graph")
    return _extend(view, t, x, y, set(U), m, strict=False)
