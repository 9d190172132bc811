"""Command-line driver: ``verify``, ``paths``, ``altitude``, ``gen`` and ``table``.

Settings come from built-in defaults, then an optional INI file
(``--config``; a ``[general]`` section plus one section per command), then
command-line flags, later sources winning. The default output directory is
taken from ``MONOPATH_OUT`` when set.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import GraphFormatError, InvariantViolation, PreconditionError
from .generators import AppendixAParams, appendix_a_graph, gnp, write_layer_metadata
from .graph import GraphView, OrderedGraph, as_view, complete_graph, format_graph, load_graph, random_ordering
from .height_table import (
    build_height_table,
    check_laws,
    check_subgraph_monotonicity,
    edge_drop,
    parse_dump,
)
from .oracle import altitude_search, longest_increasing_from, longest_monotone_path, shape_from_name
from .pathfinder import (
    BEST_EFFORT,
    MODES,
    find_increasing_path,
    greedy_locally_sparse,
    longest_path_lower_bound,
    path_problem,
    sequence_ranks,
)
from .regularise import regularise

log = logging.getLogger("monopath")

OUT_ENV = "MONOPATH_OUT"
STRATEGIES = ("greedy", "find_increasing_path", "lower_bound")
ORACLE_LIMIT = 10

DEFAULTS = {
    "general": {"out": "monopath-out", "workers": "1", "c-constant": "70", "mode": BEST_EFFORT},
    "verify": {"n": "8,12,16,24", "seeds": "50"},
    "paths": {"n": "8,10,16,32", "seeds": "20", "strategy": ",".join(STRATEGIES), "oracle": "on",
              "epsilon": "0.25"},
    "altitude": {"shapes": "K3,P2,K4", "max-edges": "8"},
}

PATH_COLUMNS = [
    "instance", "n", "m", "seed", "strategy", "mode", "start_edge", "a", "t", "length",
    "start_height", "height_floor", "window_ok", "guarantee", "oracle_from_start", "oracle_global",
    "ratio", "path",
]
TIMING_COLUMNS = ["instance", "strategy", "wall_ms"]
ALTITUDE_COLUMNS = ["shape", "n", "m", "altitude", "orderings", "worst_ranks"]


# -- configuration -----------------------------------------------------------------------------


def parse_int_list(text: str) -> list[int]:
    """``"8,12"`` or ``"10-19"`` or a mixture; empty text gives an empty list."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in str(text).split(","))):
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_seeds(text: str) -> list[int]:
    """A bare count ``N`` means seeds ``0..N-1``; otherwise a list as in :func:`parse_int_list`."""
    text = str(text).strip()
    if text.isdigit():
        return list(range(int(text)))
    return parse_int_list(text)


def parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "on", "yes", "true"):
        return True
    if low in ("0", "off", "no", "false"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    command: str
    n: list[int] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    strategies: list[str] = field(default_factory=list)
    oracle: bool = True
    out: str = "monopath-out"
    c_constant: float = 70.0
    mode: str = BEST_EFFORT
    workers: int = 1
    epsilon: float = 0.25
    shapes: list[str] = field(default_factory=list)
    max_edges: int = 8
    graph: str | None = None
    table_dump: str | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"--mode must be one of {MODES}")
        bad = [s for s in self.strategies if s not in STRATEGIES]
        if bad:
            raise ValueError(f"unknown strategy {bad[0]!r}; choose from {STRATEGIES}")
        if any(n < 2 for n in self.n):
            raise ValueError("every n must be at least 2")
        if self.workers < 1:
            raise ValueError("--workers must be positive")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.c_constant <= 0:
            raise ValueError("--c-constant must be positive")


def merged_settings(command: str, flags: dict, config_path: str | None) -> dict[str, str]:
    settings = dict(DEFAULTS["general"])
    if os.environ.get(OUT_ENV):
        settings["out"] = os.environ[OUT_ENV]
    settings.update(DEFAULTS.get(command, {}))
    if config_path:
        parser = configparser.ConfigParser()
        if not parser.read(config_path):
            raise FileNotFoundError(f"config file {config_path} not found")
        for section in ("general", command):
            if parser.has_section(section):
                settings.update(parser[section])
    settings.update({k: str(v) for k, v in flags.items() if v is not None})
    return settings


def build_config(command: str, flags: dict, config_path: str | None = None) -> RunConfig:
    s = merged_settings(command, flags, config_path)
    cfg = RunConfig(
        command=command,
        n=parse_int_list(s.get("n", "")),
        seeds=parse_seeds(s.get("seeds", "0")),
        strategies=[x.strip() for x in s.get("strategy", "").split(",") if x.strip()],
        oracle=parse_bool(s.get("oracle", "on")),
        out=s["out"],
        c_constant=float(s["c-constant"]),
        mode=s["mode"],
        workers=int(s["workers"]),
        epsilon=float(s.get("epsilon", "0.25")),
        shapes=[x.strip() for x in s.get("shapes", "").split(",") if x.strip()],
        max_edges=int(s.get("max-edges", "8")),
        graph=s.get("graph"),
        table_dump=s.get("table-dump"),
    )
    cfg.validate()
    return cfg


def write_manifest(cfg: RunConfig, out: Path, extra: dict | None = None) -> None:
    data = {"version": __version__, "config": asdict(cfg)}
    if extra:
        data.update(extra)
    (out / "manifest.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _pool_map(fn, items: list, workers: int) -> list:
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -- paths ---------------------------------------------------------------------------------------


def paths_instance(n: int, seed: int) -> OrderedGraph:
    return complete_graph(n, "uniform-random", seed)


def _height_window(table, view, path, floor) -> bool:
    if floor is None:
        return True
    return min(table.height(r) for r in sequence_ranks(view, path)) >= floor


def instance_rows(job: tuple) -> tuple[list[dict], list[dict]]:
    """CSV rows and timing rows for one ``paths`` instance."""
    n, seed, strategies, mode, C, oracle, epsilon = job
    g = paths_instance(n, seed)
    view = as_view(g)
    table = build_height_table(view)
    name = f"K{n}-s{seed}"
    use_oracle = oracle and n <= ORACLE_LIMIT
    global_opt = longest_monotone_path(view).length if use_oracle else None
    rows, timings = [], []
    for strategy in strategies:
        t0 = time.perf_counter()
        a = t = floor = guarantee = ""
        if strategy == "greedy":
            res = greedy_locally_sparse(view, epsilon, check=False)
            path = res.path
            floor = None
        elif strategy == "find_increasing_path":
            e = table.max_height_edge()
            he = table.height(e)
            a_val = he - 1 if he > 1 else 0.5
            rep = find_increasing_path(view, e, a_val, 2, C, mode)
            path, a, t, floor, guarantee = rep.path, a_val, 2, rep.window_floor, rep.guarantee_satisfied
        elif strategy == "lower_bound":
            rep = longest_path_lower_bound(view, mode, C)
            path, a, t, floor, guarantee = rep.path, rep.a, rep.t, rep.window_floor, rep.guarantee_satisfied
        else:
            raise ValueError(f"unknown strategy {strategy}")
        wall = (time.perf_counter() - t0) * 1000
        problem = path_problem(view, path)
        if problem:
            raise InvariantViolation(f"{name} {strategy}: invalid path ({problem})")
        window_ok = _height_window(table, view, path, floor)
        start = view.edge_between(path[0], path[1])
        from_start = longest_increasing_from(view, start).length if use_oracle else None
        length = len(path) - 1
        rows.append({
            "instance": name, "n": n, "m": view.num_edges, "seed": seed, "strategy": strategy,
            "mode": mode if strategy != "greedy" else "",
            "start_edge": start, "a": _fmt(a), "t": t, "length": length,
            "start_height": table.height(start), "height_floor": "" if floor is None else _fmt(floor),
            "window_ok": int(window_ok), "guarantee": "" if guarantee == "" else int(guarantee),
            "oracle_from_start": "" if from_start is None else from_start,
            "oracle_global": "" if global_opt is None else global_opt,
            "ratio": "" if not global_opt else f"{length / global_opt:.6f}",
            "path": " ".join(map(str, path)),
        })
        timings.append({"instance": name, "strategy": strategy, "wall_ms": f"{wall:.3f}"})
    return rows, timings


def _fmt(x) -> str:
    if x == "" or x is None:
        return ""
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


def paths_rows(cfg: RunConfig) -> tuple[list[dict], list[dict]]:
    jobs = [(n, s, tuple(cfg.strategies), cfg.mode, cfg.c_constant, cfg.oracle, cfg.epsilon)
            for n in cfg.n for s in cfg.seeds]
    rows, timings = [], []
    for r, t in _pool_map(instance_rows, jobs, cfg.workers):
        rows.extend(r)
        timings.extend(t)
    return rows, timings


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def cmd_paths(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, timings = paths_rows(cfg)
    _write_csv(out / "paths.csv", PATH_COLUMNS, rows)
    _write_csv(out / "timings.csv", TIMING_COLUMNS, timings)
    write_manifest(cfg, out, {"seeds": cfg.seeds, "outputs": ["paths.csv", "timings.csv"]})
    print(f"wrote {len(rows)} rows to {out / 'paths.csv'}")
    return 0


# -- verify --------------------------------------------------------------------------------------


def verify_graph(g: OrderedGraph | GraphView, seed: int = 0) -> list[str]:
    """Run every invariant suite on one graph; returns failure descriptions."""
    view = as_view(g)
    rng = random.Random(seed)
    failures = []
    table = build_height_table(view)
    failures += [f"{r.name}: {r.detail}" for r in check_laws(table) if not r]
    ranks = list(view.edge_ranks)
    if ranks:
        dropped = rng.sample(ranks, rng.randint(0, len(ranks)))
        rep = check_subgraph_monotonicity(view, view.without_edges(dropped), table)
        if not rep:
            failures.append(f"{rep.name}: {rep.detail}")
        k = rng.randint(0, (len(ranks) - 1) // 2)
        T = rng.sample(ranks, k)
        S = rng.sample(ranks, k + 1)
        try:
            res = edge_drop(view, S, T, table)
            aux = res.digraph.check(max_path_ends=len(T))
            if not aux:
                failures.append(f"{aux.name}: {aux.detail}")
        except InvariantViolation as exc:
            failures.append(f"edge-drop: {exc}")
    if view.num_vertices >= 2 and view.average_degree >= 4:
        try:
            reg = regularise(view)
            if not reg.degree_band_ok():
                failures.append("regularise: degree band violated")
            failures += [f"matching-chain: {p}" for p in reg.chain.problems(reg.core)]
        except InvariantViolation as exc:
            failures.append(f"regularise: {exc}")
    if ranks:
        path = greedy_locally_sparse(view, 0.25, check=False).path
        problem = path_problem(view, path)
        if problem:
            failures.append(f"greedy path: {problem}")
    return failures


def verify_instances(cfg: RunConfig) -> list[tuple[str, OrderedGraph, int]]:
    out = []
    for n in cfg.n:
        for s in cfg.seeds:
            out.append((f"K{n}-s{s}", complete_graph(n, "uniform-random", s), s))
            out.append((f"G{n}-s{s}", random_ordering(gnp(n, 0.5, s), s), s))
    return out


def _dump_reproducer(out: Path, name: str, g, failures: list[str], extra: str = "") -> Path:
    rdir = out / "reproducers"
    rdir.mkdir(parents=True, exist_ok=True)
    gpath = rdir / f"{name}.eog"
    gpath.write_text(format_graph(g, [f"reproducer for {name}"]))
    (rdir / f"{name}.txt").write_text("\n".join(failures + ([extra] if extra else [])) + "\n")
    return gpath


def _verify_job(job):
    name, g, seed = job
    return name, verify_graph(g, seed)


def cmd_verify(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.graph:
        g = load_graph(cfg.graph)
        failures = verify_graph(g)
        if cfg.table_dump:
            text = Path(cfg.table_dump).read_text()
            try:
                supplied = parse_dump(g, text)
                failures += [f"supplied table {r.name}: {r.detail}" for r in check_laws(supplied) if not r]
                if supplied != build_height_table(g):
                    failures.append("supplied table differs from the height table of the graph")
            except (ValueError, InvariantViolation) as exc:
                failures.append(f"supplied table unreadable: {exc}")
        if failures:
            path = _dump_reproducer(out, Path(cfg.graph).stem, g, failures)
            for f in failures:
                print(f"FAIL {cfg.graph}: {f}")
            print(f"reproducer written to {path}")
            return 1
        print(f"ok {cfg.graph}")
        return 0
    jobs = [(name, g, s) for name, g, s in verify_instances(cfg)]
    if not jobs:
        log.warning("empty instance matrix: nothing to verify")
        print("warning: empty instance matrix, nothing verified")
        write_manifest(cfg, out, {"instances": 0})
        return 0
    graphs = {name: g for name, g, _ in jobs}
    bad = 0
    for name, failures in _pool_map(_verify_job, jobs, cfg.workers):
        if failures:
            bad += 1
            path = _dump_reproducer(out, name, graphs[name], failures)
            print(f"FAIL {name}: {failures[0]} (reproducer {path})")
    write_manifest(cfg, out, {"instances": len(jobs), "failures": bad})
    print(f"verified {len(jobs)} instances, {bad} failing")
    return 1 if bad else 0


# -- altitude / gen / table ----------------------------------------------------------------------


def cmd_altitude(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    rows = []
    for name in cfg.shapes:
        shape = shape_from_name(name)
        try:
            res = altitude_search(shape, cfg.max_edges, cfg.workers)
        except PreconditionError as exc:
            print(f"refusing {name}: {exc}", file=sys.stderr)
            return 2
        rows.append({"shape": name, "n": shape.n, "m": shape.m, "altitude": res.value,
                     "orderings": res.orderings, "worst_ranks": " ".join(map(str, res.worst_ranks))})
        print(f"{name}: altitude {res.value} over {res.orderings} orderings")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "altitude.csv", ALTITUDE_COLUMNS, rows)
    write_manifest(cfg, out, {"outputs": ["altitude.csv"]})
    return 0


def cmd_gen(args) -> int:
    out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULTS["general"]["out"])
    out.mkdir(parents=True, exist_ok=True)
    seeds = parse_seeds(args.seeds or "1")
    written = []
    for n in parse_int_list(args.n or "8"):
        for s in seeds:
            comments = [f"kind={args.kind} n={n} seed={s}"]
            if args.kind == "complete":
                g = complete_graph(n, args.ordering, s)
            elif args.kind == "gnp":
                g = random_ordering(gnp(n, args.p, s), s)
                comments[0] += f" p={args.p}"
            else:
                ag = appendix_a_graph(AppendixAParams(n, args.epsilon, s, args.pad))
                g = ag.ordered(s)
                comments[0] += f" epsilon={ag.params.epsilon}"
                write_layer_metadata(ag, out / f"{args.kind}-n{n}-s{s}.layers")
            path = out / f"{args.kind}-n{n}-s{s}.eog"
            path.write_text(format_graph(g, comments))
            written.append(path)
    print(f"wrote {len(written)} graph files to {out}")
    return 0


def cmd_table(args) -> int:
    g = load_graph(args.graph)
    text = build_height_table(g).dump()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- entry point ---------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file with [general] and per-command sections")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or monopath-out)")
    p.add_argument("--workers", type=int, help="worker processes")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monopath", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the invariant suites over an instance matrix or a file")
    _common(p)
    p.add_argument("--n", help="vertex counts, e.g. 8,12,16")
    p.add_argument("--seeds", help="seed count N (0..N-1) or a list such as 3,5 or 10-19")
    p.add_argument("--graph", help="verify this graph file instead of the matrix")
    p.add_argument("--table-dump", dest="table_dump", help="height-table dump to check against --graph")

    p = sub.add_parser("paths", help="run path strategies and write paths.csv")
    _common(p)
    p.add_argument("--n")
    p.add_argument("--seeds")
    p.add_argument("--strategy", help=f"comma list from {','.join(STRATEGIES)}")
    p.add_argument("--oracle", choices=["on", "off"])
    p.add_argument("--mode", choices=list(MODES))
    p.add_argument("--c-constant", dest="c_constant", type=float)
    p.add_argument("--epsilon", type=float)

    p = sub.add_parser("altitude", help="exact altitudes of tiny shapes (K<n>, P<k>, C<n>, S<k>)")
    _common(p)
    p.add_argument("shapes", nargs="*", help="shape names")
    p.add_argument("--max-edges", dest="max_edges", type=int)

    p = sub.add_parser("gen", help="write instances in the text graph format")
    p.add_argument("kind", choices=["complete", "gnp", "appendix"])
    p.add_argument("--n")
    p.add_argument("--seeds")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--ordering", default="uniform-random", choices=["lexicographic", "uniform-random"])
    p.add_argument("--pad", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("table", help="dump the height table of a graph file")
    p.add_argument("graph")
    p.add_argument("--out")
    return parser


_FLAG_KEYS = {
    "n": "n", "seeds": "seeds", "strategy": "strategy", "oracle": "oracle", "out": "out",
    "mode": "mode", "c_constant": "c-constant", "workers": "workers", "epsilon": "epsilon",
    "max_edges": "max-edges", "graph": "graph", "table_dump": "table-dump",
}


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "table":
            return cmd_table(args)
        flags = {key: getattr(args, attr) for attr, key in _FLAG_KEYS.items() if hasattr(args, attr)}
        if args.command == "altitude" and args.shapes:
            flags["shapes"] = ",".join(args.shapes)
        cfg = build_config(args.command, flags, args.config)
        return {"verify": cmd_verify, "paths": cmd_paths, "altitude": cmd_altitude}[args.command](cfg)
    except (GraphFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
