"""Multiway joins: a generic worst-case-optimal join and a brute-force oracle.

``generic_join`` recurses over the variables in a caller-chosen order.  At
each level it intersects, across all atoms containing the current variable,
the candidate values consistent with the partial assignment so far: it
iterates the atom with the fewest remaining rows and probes the others by
binary search on sorted views.  ``naive_join`` computes the same answer set
by filtering the product of the per-variable candidate domains; it exists
purely as a test oracle.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Sequence, Union

from .errors import InputError
from .storage import Database, Relation


@dataclass(frozen=True)
class SubQuery:
    """Output variables plus atoms; atoms may carry symbols or relation views."""

    output: tuple[str, ...]
    atoms: tuple[tuple[Union[str, Relation], tuple[str, ...]], ...]

    def __post_init__(self):
        if not self.output:
            raise InputError("subquery has no output variables")
        covered = set()
        for _, vs in self.atoms:
            covered.update(vs)
        missing = set(self.output) - covered
        if missing:
            raise InputError(f"output variables {sorted(missing)} appear in no atom")
        stray = covered - set(self.output)
        if stray:
            raise InputError(f"atom variables {sorted(stray)} missing from the output")


def _resolve(sq: SubQuery, db: Database | None) -> list[tuple[Relation, tuple[str, ...]]]:
    out = []
    for ref, vs in sq.atoms:
        if isinstance(ref, Relation):
            rel = ref
        else:
            if db is None:
                raise InputError(f"symbol {ref!r} given without a database")
            rel = db.relation(ref)
        if rel.arity != len(vs):
            raise InputError(f"atom over {vs} does not match relation arity {rel.arity}")
        out.append((rel, vs))
    return out


def _collapse_repeats(rel: Relation, vs: tuple[str, ...]) -> tuple[Relation, tuple[str, ...]]:
    # R(x, x, y) becomes a view over distinct variables, keeping only rows
    # where the repeated columns agree.
    first: dict[str, int] = {}
    for idx, v in enumerate(vs):
        first.setdefault(v, idx)
    if len(first) == len(vs):
        return rel, vs
    cols = list(first.values())
    keep = []
    for row in rel.rows:
        if all(row[idx] == row[first[v]] for idx, v in enumerate(vs)):
            keep.append(tuple(row[c] for c in cols))
    return Relation(len(cols), keep), tuple(first.keys())


def generic_join(sq: SubQuery, db: Database | None, order: Sequence[str]) -> Relation:
    """All assignments satisfying every atom, in worst-case-optimal time.

    ``order`` must enumerate the subquery variables; it controls the
    recursion (and which sorted views get built).
    """
    order = tuple(order)
    if sorted(order) != sorted(sq.output):
        raise InputError("join order must be a permutation of the output variables")
    pos = {v: i for i, v in enumerate(order)}

    atoms = []
    for rel, vs in _resolve(sq, db):
        rel, vs = _collapse_repeats(rel, vs)
        if len(rel) == 0:
            return Relation(len(sq.output), [])
        by_order = sorted(vs, key=lambda v: pos[v])
        perm = tuple(vs.index(v) for v in by_order)
        view = rel.sorted_view(perm)
        atoms.append({"vars": by_order, "view": view})

    # For each variable, the atoms that constrain it and the column at which
    # it appears in their views.
    per_var: list[list[tuple[int, int]]] = [[] for _ in order]
    for ai, atom in enumerate(atoms):
        for col, v in enumerate(atom["vars"]):
            per_var[pos[v]].append((ai, col))

    ranges = [(0, len(atom["view"])) for atom in atoms]
    assignment: list[int] = [0] * len(order)
    out: list[tuple[int, ...]] = []
    out_cols = [pos[v] for v in sq.output]

    def recurse(depth: int):
        if depth == len(order):
            out.append(tuple(assignment[c] for c in out_cols))
            return
        users = per_var[depth]
        if not users:
            raise InputError(f"variable {order[depth]!r} unconstrained")
        lead_ai, lead_col = min(users, key=lambda ac: ranges[ac[0]][1] - ranges[ac[0]][0])
        view = atoms[lead_ai]["view"]
        lo, hi = ranges[lead_ai]
        saved = list(ranges)
        i = lo
        while i < hi:
            value = view[i][lead_col]
            prefix = view[i][:lead_col]
            i_end = bisect_left(view, prefix + (value + 1,), i, hi)
            ok = True
            for ai, col in users:
                if ai == lead_ai:
                    ranges[ai] = (i, i_end)
                    continue
                aview = atoms[ai]["view"]
                alo, ahi = saved[ai]
                apfx = aview[alo][:col] if alo < ahi else ()
                nlo = bisect_left(aview, apfx + (value,), alo, ahi)
                nhi = bisect_left(aview, apfx + (value + 1,), alo, ahi)
                if nlo == nhi:
                    ok = False
                    break
                ranges[ai] = (nlo, nhi)
            if ok:
                assignment[depth] = value
                recurse(depth + 1)
            for ai, _ in users:
                ranges[ai] = saved[ai]
            i = i_end

    recurse(0)
    return Relation(len(sq.output), out)


def naive_join(sq: SubQuery, db: Database | None = None) -> Relation:
    """Oracle: filter the product of per-variable candidate domains."""
    atoms = _resolve(sq, db)
    domains: dict[str, set[int] | None] = {v: None for v in sq.output}
    for rel, vs in atoms:
        for col, v in enumerate(vs):
            values = {row[col] for row in rel.rows}
            domains[v] = values if domains[v] is None else domains[v] & values
    var_list = list(sq.output)
    pools = []
    for v in var_list:
        dom = domains[v]
        if not dom:
            return Relation(len(sq.output), [])
        pools.append(sorted(dom))
    rows = []
    row_sets = [(rel.row_set, vs) for rel, vs in atoms]
    for combo in product(*pools):
        binding = dict(zip(var_list, combo))
        if all(tuple(binding[v] for v in vs) in rs for rs, vs in row_sets):
            rows.append(combo)
    return Relation(len(sq.output), rows)


def agm_bound_holds(out_size: int, cover_weights: Sequence[Fraction], sizes: Sequence[int]) -> bool:
    """Exact check of ``out_size <= prod(sizes[i] ** weights[i])``.

    Raised to the common denominator of the weights so both sides are
    integers; no floating point is involved.
    """
    weights = [Fraction(w) for w in cover_weights]
    if len(weights) != len(sizes):
        raise InputError("one weight per relation size is required")
    denom = lcm(*(w.denominator for w in weights)) if weights else 1
    lhs = out_size**denom
    rhs = 1
    for w, s in zip(weights, sizes):
        rhs *= s ** int(w * denom)
    return lhs <= rhs
