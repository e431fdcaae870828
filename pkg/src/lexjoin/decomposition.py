"""Order-induced decompositions and exact fractional cover machinery.

Given a query and a variable order, the engine adds one bag per variable:
walking the order backwards, each variable contributes the bag of itself
plus its earlier neighbors in the graph accumulated so far.  The resulting
bag hypergraph is acyclic, has no disruptive trio, and each bag's exact
fractional edge cover number (over the original atom scopes) bounds how
expensive that bag is to materialize.  The maximum of those numbers is the
incompatibility number of the (query, order) pair: 1 exactly in the easy
cases, larger as the order fights the query shape.

All cover arithmetic is exact (``fractions.Fraction``); nothing here ever
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import hypergraph as hg
from . import simplex
from .errors import InputError, InternalError
from .hypergraph import Hypergraph
from .query import JoinQuery, VariableOrder, hypergraph_of


@dataclass(frozen=True)
class FractionalCover:
    """Edge weights in [0, 1] giving every vertex total incident weight >= 1."""

    weights: dict[frozenset[str], Fraction]
    total: Fraction

    def positive_edges(self) -> list[frozenset[str]]:
        return [e for e, w in self.weights.items() if w > 0]


def fractional_edge_cover(h: Hypergraph) -> FractionalCover:
    """Optimal fractional edge cover of ``h``, solved exactly.

    Minimizes the total edge weight subject to: each vertex is covered with
    weight at least one, each edge carries weight at most one.  A vertex in
    no edge makes the program infeasible and is reported as an input error.
    """
    edges = list(h.edges)
    n = len(edges)
    constraints: list[tuple[list[Fraction], str, Fraction]] = []
    for v in h.vertices:
        row = [Fraction(1 if v in e else 0) for e in edges]
        constraints.append((row, ">=", Fraction(1)))
    for j in range(n):
        row = [Fraction(0)] * n
        row[j] = Fraction(1)
        constraints.append((row, "<=", Fraction(1)))
    try:
        value, x = simplex.solve_min([Fraction(1)] * n, constraints)
    except simplex.Infeasible:
        uncovered = [v for v in h.vertices if not any(v in e for e in edges)]
        raise InputError(f"vertices {uncovered} are in no edge; no cover exists") from None
    weights = {e: x[j] for j, e in enumerate(edges)}
    return FractionalCover(weights, value)


def fractional_independent_set(h: Hypergraph) -> tuple[Fraction, dict[str, Fraction]]:
    """Optimal fractional independent set; by LP duality equals the cover total."""
    verts = list(h.vertices)
    n = len(verts)
    pos = {v: i for i, v in enumerate(verts)}
    constraints: list[tuple[list[Fraction], str, Fraction]] = []
    for e in h.edges:
        row = [Fraction(0)] * n
        for v in e:
            row[pos[v]] = Fraction(1)
        constraints.append((row, "<=", Fraction(1)))
    for j in range(n):
        row = [Fraction(0)] * n
        row[j] = Fraction(1)
        constraints.append((row, "<=", Fraction(1)))
    value, x = simplex.solve_max([Fraction(1)] * n, constraints)
    return value, {v: x[pos[v]] for v in verts}


def _check_pair(q: JoinQuery, order: VariableOrder) -> None:
    order.check_against(q)


def disruption_free_iterative(q: JoinQuery, order: VariableOrder) -> list[frozenset[str]]:
    """Bags by the backward sweep: each variable joins its earlier neighbors.

    Walking i from last to first, bag i is the variable plus its preceding
    neighbors in the hypergraph accumulated so far (original edges plus the
    bags already added).  Returns bags indexed by order position.
    """
    _check_pair(q, order)
    return _disruption_free_of_hypergraph(hypergraph_of(q), order)


def disruption_free_closed_form(q: JoinQuery, order: VariableOrder) -> list[frozenset[str]]:
    """Same bags, computed directly from the original hypergraph.

    Bag i is the variable plus every earlier neighbor of the connected
    component of the variable among the order's suffix.
    """
    _check_pair(q, order)
    h = hypergraph_of(q)
    vs = order.variables
    bags: list[frozenset[str]] = []
    for i, v in enumerate(vs):
        suffix = set(vs[i:])
        component = hg.component_from(h, v, suffix)
        reach = hg.neighbors(h, component)
        bags.append(frozenset({v} | {u for u in reach if order.position(u) < i}))
    return bags


def incompatibility_number(q: JoinQuery, order: VariableOrder) -> tuple[Fraction, int]:
    """Max over bags of the exact cover number of the induced original graph.

    Returns the value and the 0-based index of the first bag attaining it.
    """
    h = hypergraph_of(q)
    bags = disruption_free_iterative(q, order)
    best = Fraction(0)
    witness = 0
    for i, bag in enumerate(bags):
        rho = fractional_edge_cover(hg.induced(h, bag)).total
        if rho > best:
            best = rho
            witness = i
    return best, witness


def join_forest(bags: Sequence[frozenset[str]], order: VariableOrder) -> dict[int, int | None]:
    """Parent pointers: each bag hangs under the bag of its latest other member.

    Bag i owns variable i of the order; its parent is the position of the
    order-maximal member besides its own variable, or None for singleton
    bags.  The parent bag always contains the child's interface; a violation
    means the bags did not come from the decomposition and is an internal
    error.
    """
    parents: dict[int, int | None] = {}
    for i, bag in enumerate(bags):
        own = order.variables[i]
        if own not in bag:
            raise InternalError(f"bag {i} does not contain its own variable {own!r}")
        rest = [order.position(u) for u in bag if u != own]
        if any(p >= i for p in rest):
            raise InternalError(f"bag {i} contains variables after {own!r}")
        if not rest:
            parents[i] = None
            continue
        p = max(rest)
        parents[i] = p
        if not (bag - {own}) <= bags[p]:
            raise InternalError(f"running intersection violated between bags {i} and {p}")
    return parents


@dataclass(frozen=True)
class Decomposition:
    """The order-induced decomposition bundled with its covers and forest."""

    order: VariableOrder
    bags: tuple[frozenset[str], ...]
    parent: dict[int, int | None]
    bag_cover: tuple[FractionalCover, ...]
    iota: Fraction
    witness: int

    def children(self, i: int) -> list[int]:
        return [c for c in range(len(self.bags)) if self.parent[c] == i]


def decompose(q: JoinQuery, order: VariableOrder) -> Decomposition:
    """Bags, parents, per-bag exact covers and the incompatibility number."""
    h = hypergraph_of(q)
    bags = disruption_free_iterative(q, order)
    parent = join_forest(bags, order)
    covers = []
    iota = Fraction(0)
    witness = 0
    for i, bag in enumerate(bags):
        cover = fractional_edge_cover(hg.induced(h, bag))
        covers.append(cover)
        if cover.total > iota:
            iota = cover.total
            witness = i
    return Decomposition(order, tuple(bags), parent, tuple(covers), iota, witness)


@dataclass(frozen=True)
class DecompositionReport:
    """What :func:`check_decomposition` found about a user-supplied bag set."""

    covers_all_edges: bool
    acyclic: bool
    trio_free: bool
    width: Fraction
    contains_disruption_free: bool


def check_decomposition(
    h: Hypergraph, bags: Sequence[frozenset[str]], order: VariableOrder
) -> DecompositionReport:
    """Evaluate an arbitrary decomposition of ``h`` against ``order``.

    Checks edge coverage, acyclicity of the bag hypergraph, absence of
    disruptive trios, the exact fractional width, and whether every bag of
    the order-induced decomposition fits inside some given bag (it must, for
    any trio-free decomposition).
    """
    if sorted(order.variables) != sorted(h.vertices):
        raise InputError("order must be a permutation of the hypergraph vertices")
    bag_list = [frozenset(b) for b in bags]
    covers_all = all(any(e <= b for b in bag_list) for e in h.edges)
    bag_h = Hypergraph.build(
        [h.sorted_vertices(b) for b in bag_list], vertices=h.vertices
    )
    acyclic = hg.gyo_reduce(bag_h).acyclic
    trio_free = not hg.disruptive_trios(bag_h, order.variables)
    width = Fraction(0)
    for b in bag_list:
        width = max(width, fractional_edge_cover(hg.induced(h, b)).total)
    reference = _disruption_free_of_hypergraph(h, order)
    contains = all(any(e <= b for b in bag_list) for e in reference)
    return DecompositionReport(covers_all, acyclic, trio_free, width, contains)


def _disruption_free_of_hypergraph(h: Hypergraph, order: VariableOrder) -> list[frozenset[str]]:
    # Same backward sweep as the query version, working on a bare hypergraph.
    vs = order.variables
    pos = {v: i for i, v in enumerate(vs)}
    edges = list(h.edges)
    out: list[frozenset[str]] = [frozenset()] * len(vs)
    for i in range(len(vs) - 1, -1, -1):
        v = vs[i]
        members = {v}
        for e in edges:
            if v in e:
                members.update(u for u in e if pos[u] < i)
        bag = frozenset(members)
        out[i] = bag
        edges.append(bag)
    return out
