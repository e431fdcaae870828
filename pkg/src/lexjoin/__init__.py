"""Lexicographic direct access to join query answers.

Parse a join query and a variable order, build the order-induced
decomposition, materialize its bags with a worst-case-optimal join, and
serve the sorted answer array through an index: count, the j-th answer,
ranks, slices, uniform samples and quantiles, each in logarithmic time per
variable after preprocessing bounded by the pair's incompatibility number.
"""

from .access import AccessIndex, build_index
from .decomposition import (
    Decomposition,
    check_decomposition,
    decompose,
    disruption_free_closed_form,
    disruption_free_iterative,
    fractional_edge_cover,
    fractional_independent_set,
    incompatibility_number,
    join_forest,
)
from .errors import (
    InputError,
    InternalError,
    LexjoinError,
    NotAnAnswerError,
    OutOfBoundsError,
    ParseError,
)
from .hypergraph import Hypergraph, component_from, gyo_reduce, induced, neighbors
from .index_io import load_index, save_index
from .oracle import materialize_sorted
from .query import (
    JoinQuery,
    VariableOrder,
    disruptive_trios,
    format_query,
    hypergraph_of,
    parse_query,
)
from .storage import Database, Relation, ValueDictionary, build_database, load, project, semijoin
from .wcoj import SubQuery, agm_bound_holds, generic_join, naive_join

__version__ = "0.1.0"

__all__ = [
    "AccessIndex",
    "Database",
    "Decomposition",
    "Hypergraph",
    "InputError",
    "InternalError",
    "JoinQuery",
    "LexjoinError",
    "NotAnAnswerError",
    "OutOfBoundsError",
    "ParseError",
    "Relation",
    "SubQuery",
    "ValueDictionary",
    "VariableOrder",
    "agm_bound_holds",
    "build_database",
    "build_index",
    "check_decomposition",
    "component_from",
    "decompose",
    "disruption_free_closed_form",
    "disruption_free_iterative",
    "disruptive_trios",
    "format_query",
    "fractional_edge_cover",
    "fractional_independent_set",
    "generic_join",
    "gyo_reduce",
    "hypergraph_of",
    "incompatibility_number",
    "induced",
    "join_forest",
    "load",
    "load_index",
    "materialize_sorted",
    "naive_join",
    "neighbors",
    "parse_query",
    "project",
    "save_index",
    "semijoin",
]
