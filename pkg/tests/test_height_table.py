import random

import pytest
from hypothesis import given, settings

from conftest import k3, naive_height_table, ordered_graphs
from monopath.errors import PreconditionError
from monopath.graph import OrderedGraph, as_view, complete_graph, random_ordering
from monopath.generators import gnp
from monopath.height_table import (
    HeightTable,
    build_height_table,
    check_laws,
    check_lex_implies_rank,
    check_subgraph_monotonicity,
    edge_drop,
    edge_drop_witness,
    length3_extension,
    parse_dump,
    relaxed_extension,
)


def test_k3_table():
    t = build_height_table(k3())
    # a=0, b=1, c=2; ab=1, bc=2, ca=3
    assert t.ht(3) == (1, 0)
    assert t.ht(2) == (1, 1)
    assert t.ht(1) == (2, 0)
    assert t.cell(1, 2) is None and t.cell(2, 1) is None
    assert t.height(1) == 2 and t.column(1) == 0
    assert t.height(3) == 1


def test_path_table_and_empty_table():
    t = build_height_table(OrderedGraph(3, [(0, 1, 1), (1, 2, 2)]))
    assert t.ht(1) == (1, 0) and t.ht(2) == (1, 1)
    empty = build_height_table(OrderedGraph(4, []))
    assert empty.cells == {} and empty.num_rows == 0 and empty.dump() == ""


def test_height_of_removed_edge_fails():
    view = as_view(k3()).delete(edges=[1])
    with pytest.raises(KeyError):
        build_height_table(view).height(1)


def test_dump_is_stable():
    assert build_height_table(k3()).dump() == "(1, 0) 0 2 3\n(1, 1) 1 2 2\n(2, 0) 0 1 1\n"


def test_parse_dump_round_trip():
    g = complete_graph(7, "uniform-random", seed=2)
    t = build_height_table(g)
    assert parse_dump(g, t.dump()) == t


@settings(max_examples=300, deadline=None)
@given(ordered_graphs(max_n=9))
def test_matches_literal_sweep(g):
    t = build_height_table(g)
    assert t.cells == naive_height_table(g)


@settings(max_examples=200, deadline=None)
@given(ordered_graphs(max_n=12))
def test_laws_hold(g):
    for rep in check_laws(build_height_table(g)):
        assert rep, rep.detail


def test_s_set_k3():
    t = build_height_table(k3())
    assert t.s_set(0, 1, 1) == {2}
    with pytest.raises(PreconditionError, match="S_i undefined"):
        t.s_set(0, 1, 2)


def test_s_set_sizes_exhaustive():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(3, 12)
        g = random_ordering(gnp(n, rng.uniform(0.3, 1.0), rng.random()), rng.random())
        t = build_height_table(g)
        view = as_view(g)
        for r in view.edge_ranks:
            for x, y in (view.endpoints(r), view.endpoints(r)[::-1]):
                for i in range(t.height(r)):
                    s = t.s_list(x, y, i)
                    assert len(set(s)) == i == len(s)
                    assert x not in s and y not in s
                    for z in s:
                        assert r < view.edge_between(y, z)


def test_corrupted_table_is_caught():
    g = k3()
    t = build_height_table(g)
    cols = {v: list(c) for v, c in t.columns.items()}
    cols[0][0], cols[0][1] = cols[0][1], cols[0][0]  # swap ca and ab in column a
    bad = HeightTable(g, cols)
    rep = check_lex_implies_rank(bad)
    assert not rep and rep.counterexample is not None


def test_subgraph_monotonicity_examples():
    g = random_ordering(complete_graph(5), seed=4)
    top = g.m
    assert check_subgraph_monotonicity(g, as_view(g).delete(edges=[top]))
    t = build_height_table(g)
    same = build_height_table(as_view(g).delete())
    assert same == t
    with pytest.raises(PreconditionError, match="spanning"):
        check_subgraph_monotonicity(g, as_view(g).delete(vertices=[0]))


def test_edge_drop_path_example():
    g = OrderedGraph(3, [(0, 1, 1), (1, 2, 2)])
    res = edge_drop(g, {1, 2}, {2})
    assert res.witness == 1 and res.height_after == 1 >= res.min_height
    with pytest.raises(PreconditionError, match=r"\|S\| > \|T\|"):
        edge_drop(g, {1}, {2})


def test_edge_drop_empty_t_keeps_heights():
    g = complete_graph(6, "uniform-random", seed=9)
    t = build_height_table(g)
    S = {1, 5, 9}
    w = edge_drop_witness(g, S, set())
    assert t.height(w) >= min(t.height(r) for r in S)


def test_edge_drop_exhaustive_small():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(3, 8)
        g = random_ordering(gnp(n, 0.6, rng.random()), rng.random())
        ranks = list(as_view(g).edge_ranks)
        if len(ranks) < 2:
            continue
        for _ in range(10):
            k = rng.randint(0, (len(ranks) - 1) // 2)
            T = rng.sample(ranks, k)
            S = rng.sample(ranks, k + rng.randint(1, len(ranks) - k) if len(ranks) > k else k + 1)
            res = edge_drop(g, S, T)
            assert res.witness in set(S) - set(T)
            assert res.digraph.check(max_path_ends=len(T))


def test_length3_precondition_names():
    g = complete_graph(10, "uniform-random", seed=1)
    t = build_height_table(g)
    e = t.max_height_edge()
    x, y = g.endpoints(e)
    with pytest.raises(PreconditionError, match=r"h\(xy\) > 4m\+3"):
        length3_extension(g, x, y, [], m=5, table=t)
    with pytest.raises(PreconditionError, match=r"m >= \|U\|"):
        length3_extension(g, x, y, [7, 8, 9], m=0.1, table=t)
    big = complete_graph(30, "uniform-random", seed=1)
    tb = build_height_table(big)
    eb = tb.max_height_edge()
    xb, yb = big.endpoints(eb)
    other = next(v for v in range(30) if v not in (xb, yb))
    with pytest.raises(PreconditionError, match=r"m\^2/2 > Delta\|U\|"):
        length3_extension(big, xb, yb, [other], m=1.0, table=tb)


def _dense_instance(rng, n):
    g = random_ordering(gnp(n, rng.uniform(0.7, 1.0), rng.random()), rng.random())
    t = build_height_table(g)
    return g, t


def test_length3_extension_property():
    rng = random.Random(21)
    done = 0
    while done < 40:
        g, t = _dense_instance(rng, rng.randint(12, 30))
        view = as_view(g)
        r = t.max_height_edge()
        h = t.height(r)
        m = rng.uniform(0.5, (h - 4) / 4)
        if not h > 4 * m + 3:
            continue
        for x, y in (t.oriented(r), t.oriented(r)[::-1]):
            ext = length3_extension(g, x, y, [], m, t)
            seq = [x, y, ext.z, ext.w]
            ranks = [view.edge_between(a, b) for a, b in zip(seq, seq[1:])]
            assert ranks[0] < ranks[1] < ranks[2] and len(set(seq)) == 4
            assert ext.new_edge_height >= h - 4 * m - 3
        done += 1


def test_relaxed_extension_never_raises():
    g = complete_graph(8, "uniform-random", seed=5)
    t = build_height_table(g)
    r = t.max_height_edge()
    x, y = t.oriented(r)
    ext = relaxed_extension(g, x, y, {0, 1, 2, 3} - {x, y}, 10.0, t)
    assert ext is None or (ext.z not in {0, 1, 2, 3} and ext.w not in {0, 1, 2, 3})
