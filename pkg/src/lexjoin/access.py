"""The direct-access index: preprocessing once, then answers on demand.

Build phase, driven by the order-induced decomposition:

1. one relation per bag, materialized with the generic join over the
   projections of the atoms that carry positive weight in the bag's optimal
   fractional cover (a single projection when one atom already covers the
   bag, which is exactly the cheap case);
2. each bag is semijoined with every atom whose scope it contains;
3. a full reducer sweep over the join forest (children into parents bottom
   up, parents into children top down) so that every surviving tuple extends
   to a full answer;
4. a counting pass from the last bag backwards: grouping each bag relation
   by its interface (all columns except the bag's own variable), keeping the
   candidate values sorted with prefix sums of completion counts, where a
   tuple's completion count is the product of its children's group totals.

An access then walks the variables in order.  At each variable the pending
groups (one per bag whose interface is fully assigned but whose variable is
not) partition the remaining answers into a product; choosing the value
block containing the residual index is one binary search over the group's
prefix sums, scaled by the product of the other pending group totals.
Counts are arbitrary-precision throughout: answer counts reach |D|^(number
of variables) and would overflow any fixed width.

Indices are 0-based everywhere.
"""

from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Iterator, Sequence

from . import storage
from .decomposition import Decomposition, decompose
from .errors import InputError, InternalError, NotAnAnswerError, OutOfBoundsError
from .query import JoinQuery, VariableOrder
from .storage import Database, Relation
from .wcoj import SubQuery, generic_join


@dataclass
class GroupTable:
    """Per-interface sorted candidates with inclusive prefix sums of weights."""

    groups: dict[tuple[int, ...], tuple[list[int], list[int]]]

    def total(self, key: tuple[int, ...]) -> int:
        entry = self.groups.get(key)
        return entry[1][-1] if entry else 0


@dataclass
class AccessIndex:
    """Everything needed to serve access calls; immutable once built."""

    query: JoinQuery
    order: VariableOrder
    dictionary: storage.ValueDictionary
    var_types: dict[str, str]
    bags: tuple[tuple[str, ...], ...]  # bag variables, order-sorted, own var last
    parent: dict[int, int | None]
    tables: tuple[GroupTable, ...]
    total_count: int
    database: Database | None = None
    stats: dict = field(default_factory=dict)

    # Derived navigation, filled in __post_init__.
    children: tuple[tuple[int, ...], ...] = ()
    iface_pos: tuple[tuple[int, ...], ...] = ()
    roots: tuple[int, ...] = ()
    head_cols: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.bags)
        kids: list[list[int]] = [[] for _ in range(n)]
        for c, p in self.parent.items():
            if p is not None:
                kids[p].append(c)
        self.children = tuple(tuple(sorted(k)) for k in kids)
        self.iface_pos = tuple(
            tuple(self.order.position(v) for v in bag[:-1]) for bag in self.bags
        )
        self.roots = tuple(i for i in range(n) if self.parent[i] is None)
        self.head_cols = tuple(self.order.position(v) for v in self.query.variables)

    # ------------------------------------------------------------------ #
    # counting / access / rank

    def count(self) -> int:
        return self.total_count

    def access_codes(self, j: int) -> tuple[int, ...]:
        """The j-th answer as a code tuple in order positions."""
        if not isinstance(j, int):
            raise InputError("answer index must be an integer")
        if j < 0 or j >= self.total_count:
            raise OutOfBoundsError(f"index {j} out of bounds for {self.total_count} answers")
        r = j
        live = self.total_count
        n = len(self.bags)
        keys: list[tuple[int, ...] | None] = [None] * n
        for root in self.roots:
            keys[root] = ()
        assignment = [0] * n
        for i in range(n):
            values, prefix = self.tables[i].groups[keys[i]]
            block = live // prefix[-1]
            idx = bisect_right(prefix, r // block)
            below = prefix[idx - 1] if idx else 0
            r -= block * below
            assignment[i] = values[idx]
            live = block * (prefix[idx] - below)
            for c in self.children[i]:
                keys[c] = tuple(assignment[p] for p in self.iface_pos[c])
        return tuple(assignment)

    def access(self, j: int) -> tuple:
        """The j-th answer (0-based) in lexicographic order, head columns."""
        codes = self.access_codes(j)
        decode = self.dictionary.decode
        return tuple(decode(codes[c]) for c in self.head_cols)

    def rank_codes(self, codes: Sequence[int]) -> int:
        """Position of an encoded answer (order positions); inverse of access_codes."""
        n = len(self.bags)
        if len(codes) != n:
            raise InputError(f"expected {n} values, got {len(codes)}")
        r = 0
        live = self.total_count
        if live == 0:
            raise NotAnAnswerError("query has no answers")
        keys: list[tuple[int, ...] | None] = [None] * n
        for root in self.roots:
            keys[root] = ()
        for i in range(n):
            entry = self.tables[i].groups.get(keys[i])
            if entry is None:
                raise NotAnAnswerError(f"no completion at variable {self.order.variables[i]}")
            values, prefix = entry
            idx = bisect_left(values, codes[i])
            if idx == len(values) or values[idx] != codes[i]:
                raise NotAnAnswerError(f"value at variable {self.order.variables[i]} not present")
            block = live // prefix[-1]
            below = prefix[idx - 1] if idx else 0
            r += block * below
            live = block * (prefix[idx] - below)
            for c in self.children[i]:
                keys[c] = tuple(codes[p] for p in self.iface_pos[c])
        return r

    def _encode_head_tuple(self, t: Sequence) -> list[int] | None:
        if len(t) != len(self.order.variables):
            raise InputError(f"expected {len(self.order.variables)} values, got {len(t)}")
        codes = [0] * len(t)
        for value, v in zip(t, self.query.variables):
            code = self.dictionary.try_encode(self.var_types[v], value)
            if code is None:
                return None
            codes[self.order.position(v)] = code
        return codes

    def rank(self, t: Sequence) -> int:
        """Index j with access(j) == t; NotAnAnswerError when t is no answer."""
        codes = self._encode_head_tuple(t)
        if codes is None:
            raise NotAnAnswerError("tuple contains a value absent from the database")
        return self.rank_codes(codes)

    # ------------------------------------------------------------------ #
    # order-sensitive conveniences built on access

    def enumerate_range(self, start: int, stop: int) -> Iterator[tuple]:
        """Stream access(j) for j in [start, stop)."""
        if not (0 <= start <= stop <= self.total_count):
            raise InputError(
                f"range [{start}, {stop}) out of bounds for {self.total_count} answers"
            )
        for j in range(start, stop):
            yield self.access(j)

    def sample_without_replacement(self, n: int, seed) -> list[tuple]:
        """n distinct answers, uniform over n-subsets (Floyd), sorted by index."""
        if n < 0 or n > self.total_count:
            raise InputError(f"cannot sample {n} of {self.total_count} answers")
        rng = random.Random(seed)
        chosen: set[int] = set()
        for j in range(self.total_count - n, self.total_count):
            t = rng.randrange(j + 1)
            chosen.add(t if t not in chosen else j)
        return [self.access(j) for j in sorted(chosen)]

    def quantile(self, q) -> tuple:
        """The answer at index floor(q * (count - 1)) for rational q in [0, 1]."""
        q = Fraction(q)
        if q < 0 or q > 1:
            raise InputError("quantile argument must be in [0, 1]")
        if self.total_count == 0:
            raise OutOfBoundsError("quantile of an empty result")
        return self.access(floor(q * (self.total_count - 1)))

    def test_membership(self, t: Sequence) -> bool:
        """True iff every atom's projection of t is in its relation.

        Runs the direct per-atom check when the source database is attached;
        an index loaded from disk without it falls back to checking the bag
        projections, which accepts exactly the same tuples.
        """
        codes = self._encode_head_tuple(t)
        if codes is None:
            return False
        if self.database is not None:
            by_var = {v: codes[self.order.position(v)] for v in self.order.variables}
            for sym, vs in self.query.atoms:
                rel = self.database.relation(sym)
                if tuple(by_var[v] for v in vs) not in rel.row_set:
                    return False
            return True
        try:
            self.rank_codes(codes)
        except NotAnAnswerError:
            return False
        return True


# ---------------------------------------------------------------------- #
# build


def _atom_projection(rel: Relation, vs: tuple[str, ...], keep: Sequence[str]) -> Relation:
    # Project onto keep (by first occurrence), honoring repeated variables.
    first: dict[str, int] = {}
    for idx, v in enumerate(vs):
        first.setdefault(v, idx)
    cols = [first[v] for v in keep]
    if len(first) == len(vs):
        return storage.project(rel, cols)
    rows = []
    for row in rel.rows:
        if all(row[i] == row[first[v]] for i, v in enumerate(vs)):
            rows.append(tuple(row[c] for c in cols))
    return Relation(len(cols), rows)


def _variable_types(q: JoinQuery, db: Database) -> dict[str, str]:
    types: dict[str, str] = {}
    for sym, vs in q.atoms:
        rel = db.relation(sym)
        if rel.arity != len(vs):
            raise InputError(f"atom {sym}({', '.join(vs)}) vs relation arity {rel.arity}")
        declared = db.column_types[sym]
        for col, v in enumerate(vs):
            t = declared[col]
            if types.setdefault(v, t) != t:
                raise InputError(f"variable {v} spans columns of types {types[v]} and {t}")
    return types


def build_index(q: JoinQuery, order: VariableOrder, db: Database) -> AccessIndex:
    """Preprocess the database for direct access under ``order``."""
    order.check_against(q)
    var_types = _variable_types(q, db)
    decomp: Decomposition = decompose(q, order)
    n = len(order.variables)
    bag_vars = tuple(
        tuple(sorted(decomp.bags[i], key=order.position)) for i in range(n)
    )
    multiatom_joins = 0

    atoms = [(sym, vs, db.relation(sym)) for sym, vs in q.atoms]

    relations: list[Relation] = []
    for i in range(n):
        bag = decomp.bags[i]
        keep = bag_vars[i]
        covering = next(((sym, vs, rel) for sym, vs, rel in atoms if bag <= set(vs)), None)
        if covering is not None:
            _, vs, rel = covering
            b = _atom_projection(rel, vs, keep)
        else:
            views = []
            for edge in decomp.bag_cover[i].positive_edges():
                owner = next(
                    ((vs, rel) for _, vs, rel in atoms if (set(vs) & bag) == edge), None
                )
                if owner is None:
                    raise InternalError(f"no atom generates cover edge {sorted(edge)}")
                vs, rel = owner
                edge_keep = tuple(sorted(edge, key=order.position))
                views.append((_atom_projection(rel, vs, edge_keep), edge_keep))
            if len(views) < 2:
                raise InternalError("multi-atom path reached with fewer than two views")
            sq = SubQuery(keep, tuple(views))
            b = generic_join(sq, None, keep)
            multiatom_joins += 1
        col_of = {v: c for c, v in enumerate(keep)}
        for sym, vs, rel in atoms:
            if set(vs) <= bag:
                pairs = [(col_of[v], c) for c, v in enumerate(vs)]
                b = storage.semijoin(b, rel, pairs)
        relations.append(b)

    children: list[list[int]] = [[] for _ in range(n)]
    for c, p in decomp.parent.items():
        if p is not None:
            children[p].append(c)

    # Full reducer: pull each child's interface into its parent from the
    # leaves down to bag 0, then push parents back into children.
    for i in range(n - 1, -1, -1):
        keep = bag_vars[i]
        col_of = {v: c for c, v in enumerate(keep)}
        for c in sorted(children[i]):
            iface = bag_vars[c][:-1]
            proj = storage.project(relations[c], list(range(len(iface))))
            relations[i] = storage.semijoin(
                relations[i], proj, [(col_of[v], k) for k, v in enumerate(iface)]
            )
    for i in range(n):
        col_of = {v: c for c, v in enumerate(bag_vars[i])}
        for c in sorted(children[i]):
            iface = bag_vars[c][:-1]
            relations[c] = storage.semijoin(
                relations[c], relations[i], [(k, col_of[v]) for k, v in enumerate(iface)]
            )

    # Counting pass: group each bag by interface; weight of a tuple is the
    # product of its children's group totals.
    tables: list[GroupTable | None] = [None] * n
    pos_in_bag: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(n)]
    for i in range(n):
        col_of = {v: c for c, v in enumerate(bag_vars[i])}
        for c in children[i]:
            pos_in_bag[i].append((c, tuple(col_of[v] for v in bag_vars[c][:-1])))
    for i in range(n - 1, -1, -1):
        groups: dict[tuple[int, ...], tuple[list[int], list[int]]] = {}
        cur_key: tuple[int, ...] | None = None
        values: list[int] = []
        prefix: list[int] = []
        running = 0
        for row in relations[i].rows:
            key = row[:-1]
            if key != cur_key:
                if cur_key is not None:
                    groups[cur_key] = (values, prefix)
                cur_key, values, prefix, running = key, [], [], 0
            w = 1
            for c, cols in pos_in_bag[i]:
                child_total = tables[c].total(tuple(row[k] for k in cols))
                if child_total == 0:
                    raise InternalError("full reduction left a dead tuple")
                w *= child_total
            running += w
            values.append(row[-1])
            prefix.append(running)
        if cur_key is not None:
            groups[cur_key] = (values, prefix)
        tables[i] = GroupTable(groups)

    total = 1
    for i in range(n):
        if decomp.parent[i] is None:
            total *= tables[i].total(())

    ix = AccessIndex(
        query=q,
        order=order,
        dictionary=db.dictionary,
        var_types=var_types,
        bags=bag_vars,
        parent=dict(decomp.parent),
        tables=tuple(tables),
        total_count=total,
        database=db,
        stats={
            "multiatom_joins": multiatom_joins,
            "bag_rows": [len(r) for r in relations],
            "iota": str(decomp.iota),
        },
    )
    return ix
