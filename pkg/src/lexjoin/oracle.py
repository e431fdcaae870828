"""Brute-force reference results, used as ground truth by the test suites.

Materializes the full answer set with pairwise hash joins (a code path
deliberately independent from the generic join) and sorts it under the
requested variable order.  Strictly a testing device: a hard cap aborts
loudly if the answer set or any intermediate grows beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .query import JoinQuery, VariableOrder
from .storage import Database

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class MaterializedResult:
    """Answers in head-tuple column order, sorted under the variable order."""

    rows: tuple[tuple, ...]
    count: int


def materialize_codes(
    q: JoinQuery, order: VariableOrder, db: Database, cap: int = DEFAULT_CAP
) -> list[tuple[int, ...]]:
    """Encoded answers sorted under ``order``, columns in order positions."""
    order.check_against(q)
    bound: list[str] = []
    rows: list[tuple[int, ...]] = [()]
    for sym, vs in q.atoms:
        rel = db.relation(sym)
        if rel.arity != len(vs):
            raise InputError(f"atom {sym}{vs} does not match relation arity {rel.arity}")
        shared = [v for v in vs if v in bound]
        shared_pos = [bound.index(v) for v in shared]
        table: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        new_vars = []
        seen = set(bound)
        for v in vs:
            if v not in seen:
                new_vars.append(v)
                seen.add(v)
        new_cols = [vs.index(v) for v in new_vars]
        for row in rel.rows:
            # Atoms with repeated variables constrain their columns to agree.
            binding = {}
            ok = True
            for col, v in enumerate(vs):
                if v in binding and binding[v] != row[col]:
                    ok = False
                    break
                binding[v] = row[col]
            if not ok:
                continue
            key = tuple(binding[v] for v in shared)
            table.setdefault(key, []).append(tuple(row[c] for c in new_cols))
        joined: list[tuple[int, ...]] = []
        for partial in rows:
            key = tuple(partial[p] for p in shared_pos)
            for ext in table.get(key, ()):
                joined.append(partial + ext)
                if len(joined) > cap:
                    raise InputError(f"oracle cap of {cap} answers exceeded")
        rows = joined
        bound.extend(new_vars)
        if not rows:
            return []
    col_of = {v: i for i, v in enumerate(bound)}
    out_cols = [col_of[v] for v in order.variables]
    final = sorted({tuple(row[c] for c in out_cols) for row in rows})
    if len(final) > cap:
        raise InputError(f"oracle cap of {cap} answers exceeded")
    return final


def materialize_sorted(
    q: JoinQuery, order: VariableOrder, db: Database, cap: int = DEFAULT_CAP
) -> MaterializedResult:
    """Decoded answers in head order, sorted lexicographically under ``order``."""
    codes = materialize_codes(q, order, db, cap)
    head_from_order = [order.variables.index(v) for v in q.variables]
    decode = db.dictionary.decode
    rows = tuple(tuple(decode(row[c]) for c in head_from_order) for row in codes)
    return MaterializedResult(rows, len(rows))
