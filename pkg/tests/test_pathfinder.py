import math
import random

import pytest

from conftest import k3, random_seam_pair, reference_path_ok
from monopath.errors import PreconditionError
from monopath.generators import gnp
from monopath.graph import OrderedGraph, as_view, complete_graph, random_ordering
from monopath.height_table import build_height_table
from monopath.oracle import longest_increasing_from
from monopath.pathfinder import (
    BEST_EFFORT,
    STRICT,
    altitude_parameters,
    canonical_increasing,
    check_local_sparsity,
    find_increasing_path,
    greedy_descent,
    greedy_locally_sparse,
    guarantee_bound,
    join_trail_path,
    longest_path_lower_bound,
    path_problem,
    reachable_dense_subgraph,
    trail_problem,
)


def test_validators():
    g = k3()  # ab=1, bc=2, ca=3
    assert path_problem(g, [0, 1, 2]) is None
    assert "do not increase" in path_problem(g, [2, 1, 0])
    assert trail_problem(g, [0, 1, 2, 0]) is None
    assert path_problem(g, [0, 1, 2, 0]) == "repeated vertex"
    assert path_problem(g, [0]) is not None
    assert canonical_increasing(g, [2, 1, 0]) == [0, 1, 2]


def test_join_disjoint_concatenation():
    # trail 0-1-2 (ranks 1, 2), path 1-2-3-4 continuing the seam
    g = OrderedGraph(5, [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 4, 4)])
    assert join_trail_path(g, [0, 1, 2], [1, 2, 3, 4]) == [0, 1, 2, 3, 4]


def test_join_single_edge_trail_returns_path():
    g = OrderedGraph(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3)])
    assert join_trail_path(g, [0, 1], [0, 1, 2, 3]) == [0, 1, 2, 3]


def test_join_reversed_seam():
    g = OrderedGraph(4, [(0, 1, 1), (1, 2, 2), (1, 3, 3)])
    # trail 0-1-2, path 2-1-3 shares edge 1-2 in the other direction
    out = join_trail_path(g, [0, 1, 2], [2, 1, 3])
    assert out == [0, 1, 3]


def test_join_seam_mismatch():
    g = OrderedGraph(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3)])
    with pytest.raises(PreconditionError, match="seam"):
        join_trail_path(g, [0, 1], [1, 2, 3])


def test_join_fuzz():
    rng = random.Random(8)
    for _ in range(300):
        g, trail, path = random_seam_pair(rng)
        out = join_trail_path(g, trail, path)
        k, ell = len(trail) - 1, len(path) - 1
        assert reference_path_ok(g, out)
        assert {out[0], out[1]} == {trail[0], trail[1]}
        assert len(out) - 1 >= math.ceil(ell / (k + 1) - 1)


def test_reachable_dense_precondition():
    g = complete_graph(16, "uniform-random", seed=0)
    t = build_height_table(g)
    with pytest.raises(PreconditionError, match="21 h log n"):
        reachable_dense_subgraph(g, t.max_height_edge(), 2)


def _check_trails(g, t, dense, e, h, n):
    view = as_view(g)
    for f in dense.subgraph.edge_ranks:
        trail = dense.trail(f)
        assert trail_problem(view, trail) is None
        assert view.edge_between(trail[0], trail[1]) == e
        assert view.edge_between(trail[-2], trail[-1]) == f
        assert len(trail) - 1 <= 2 + math.log2(n)
        for u, v in zip(trail, trail[1:]):
            assert t.height(view.edge_between(u, v)) >= t.height(e) - 7 * h * (math.log2(n) + 2)


def test_reachable_dense_outside_regime_still_valid():
    g = complete_graph(64, "uniform-random", seed=3)
    t = build_height_table(g)
    e = t.max_height_edge()
    dense = reachable_dense_subgraph(g, e, 2, table=t, check=False)
    assert dense.subgraph.num_edges > 0
    _check_trails(g, t, dense, e, 2, 64)


def test_reachable_dense_in_regime():
    g = complete_graph(512, "uniform-random", seed=0)
    t = build_height_table(g)
    e = t.max_height_edge()
    assert t.height(e) >= 21 * math.log2(512)
    dense = reachable_dense_subgraph(g, e, 1, table=t)
    assert dense.subgraph.average_degree >= 1
    _check_trails(g, t, dense, e, 1, 512)


def test_find_increasing_path_base_case():
    g = complete_graph(10, "uniform-random", seed=1)
    t = build_height_table(g)
    e = t.max_height_edge()
    rep = find_increasing_path(g, e, t.height(e) - 1, 1)
    assert rep.length == 1 and rep.guarantee_satisfied


def test_find_increasing_path_errors():
    g = complete_graph(10, "uniform-random", seed=1)
    t = build_height_table(g)
    e = t.max_height_edge()
    with pytest.raises(PreconditionError, match=r"h\(e\) > a"):
        find_increasing_path(g, e, t.height(e), 2)
    with pytest.raises(PreconditionError, match="t >= 1"):
        find_increasing_path(g, e, 1, 0)
    with pytest.raises(ValueError):
        find_increasing_path(g, e, 1, 2, mode="greedy")


@pytest.mark.parametrize("mode", [STRICT, BEST_EFFORT])
def test_find_increasing_path_window(mode):
    for seed in range(10):
        g = complete_graph(32, "uniform-random", seed=seed)
        t = build_height_table(g)
        e = t.max_height_edge()
        a = t.height(e) - 1
        rep = find_increasing_path(g, e, a, 2, mode=mode)
        assert reference_path_ok(g, rep.path)
        assert as_view(g).edge_between(rep.path[0], rep.path[1]) == e
        view = as_view(g)
        for u, v in zip(rep.path, rep.path[1:]):
            assert t.height(view.edge_between(u, v)) >= t.height(e) - a
        assert rep.log_lines()[-1].startswith("path ")


def test_strict_mode_is_trivial_at_desk_scale():
    g = complete_graph(32, "uniform-random", seed=0)
    t = build_height_table(g)
    e = t.max_height_edge()
    rep = find_increasing_path(g, e, t.height(e) - 1, 3, mode=STRICT)
    assert guarantee_bound(t.height(e) - 1, 3, 70, 32) < 1
    assert rep.length == 1 and rep.guarantee_satisfied


def test_small_constant_engages_recursion():
    g = complete_graph(24, "uniform-random", seed=2)
    t = build_height_table(g)
    e = t.max_height_edge()
    rep = find_increasing_path(g, e, t.height(e) - 1, 2, C=0.05, mode=BEST_EFFORT)
    assert reference_path_ok(g, rep.path)
    assert rep.iterations


def test_best_effort_below_oracle():
    for seed in range(15):
        g = complete_graph(9, "uniform-random", seed=seed)
        t = build_height_table(g)
        e = t.max_height_edge()
        rep = find_increasing_path(g, e, t.height(e) - 1, 2)
        assert rep.length <= longest_increasing_from(g, e).length


def test_lower_bound_wrapper():
    g = complete_graph(16, "uniform-random", seed=4)
    rep = longest_path_lower_bound(g)
    assert reference_path_ok(g, rep.path)
    a, t = altitude_parameters(g)
    assert a == 15 // 2 - 1 and t >= 1
    with pytest.raises(PreconditionError):
        longest_path_lower_bound(OrderedGraph(4, [(0, 1, 1)]))


def test_greedy_k3():
    res = greedy_locally_sparse(k3(), 0.25)
    assert res.path == [0, 1, 2]


def test_greedy_paths_valid():
    rng = random.Random(12)
    for _ in range(150):
        n = rng.randint(2, 50)
        g = random_ordering(gnp(n, rng.random(), rng.random()), rng.random())
        path = greedy_descent(g)
        if g.m:
            assert reference_path_ok(g, path)
        else:
            assert path == []


def test_local_sparsity_detects_dense_set():
    g = complete_graph(8, "uniform-random", seed=1)
    rep = check_local_sparsity(g, 0.4)
    assert rep.holds is False and rep.exact


def test_local_sparsity_sampled_is_not_exact():
    g = random_ordering(gnp(120, 0.2, 1), 1)
    rep = check_local_sparsity(g, 0.3, exact_limit=10, samples=50)
    assert rep.exact is False or rep.holds is False


def test_greedy_sparse_random_graph():
    n = 400
    for seed in range(5):
        g = random_ordering(gnp(n, n**-0.6, seed), seed)
        res = greedy_locally_sparse(g, 0.1, samples=200)
        assert reference_path_ok(g, res.path)
        if res.condition_verified:
            assert res.bound_met, (res.length, res.bound)
