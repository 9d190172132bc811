"""Monotone paths in edge-ordered graphs."""

from .errors import GraphFormatError, InvariantViolation, PreconditionError
from .graph import (
    Edge,
    GraphShape,
    GraphView,
    OrderedGraph,
    as_view,
    complete_graph,
    complete_shape,
    delete,
    format_graph,
    load_graph,
    parse_graph,
    random_ordering,
    save_graph,
)
from .height_table import (
    HeightTable,
    build_height_table,
    check_laws,
    check_lex_implies_rank,
    check_subgraph_monotonicity,
    edge_drop,
    edge_drop_witness,
    length3_extension,
)
from .oracle import altitude, longest_increasing_from, longest_monotone_path
from .pathfinder import (
    find_increasing_path,
    greedy_locally_sparse,
    join_trail_path,
    longest_path_lower_bound,
    reachable_dense_subgraph,
)
from .regularise import bipartite_half, min_degree_core, pyber_chain, regularise

__version__ = "0.1.0"

__all__ = [
    "Edge", "GraphShape", "GraphView", "OrderedGraph", "as_view", "complete_graph", "complete_shape",
    "delete", "format_graph", "load_graph", "parse_graph", "random_ordering", "save_graph",
    "HeightTable", "build_height_table", "check_laws", "check_lex_implies_rank",
    "check_subgraph_monotonicity", "edge_drop", "edge_drop_witness", "length3_extension",
    "altitude", "longest_increasing_from", "longest_monotone_path",
    "find_increasing_path", "greedy_locally_sparse", "join_trail_path", "longest_path_lower_bound",
    "reachable_dense_subgraph", "bipartite_half", "min_degree_core", "pyber_chain", "regularise",
    "GraphFormatError", "InvariantViolation", "PreconditionError", "__version__",
]
