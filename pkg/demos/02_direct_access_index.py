#!/usr/bin/env python3
"""Build a direct-access index and use it like a sorted array of answers.

A small who-watched-what schema: ratings join users and films.  The index
pretends the full sorted join result is materialized; none of it is.
"""

import tempfile
from fractions import Fraction
from pathlib import Path

from lexjoin import build_database, build_index, load_index, parse_query, save_index
from lexjoin.errors import OutOfBoundsError

query, order = parse_query(
    "Watch(user, film, score) :- Rating(user, film, score), User(user), Film(film)."
)

db = build_database(
    {
        "Rating": (
            ["string", "string", "int"],
            [
                ("ada", "arrival", 9),
                ("ada", "brazil", 7),
                ("bob", "arrival", 6),
                ("bob", "clue", 8),
                ("cyd", "brazil", 9),
                ("cyd", "clue", 5),
                ("dan", "dune", 10),  # dan is not a registered user
            ],
        ),
        "User": (["string"], [("ada",), ("bob",), ("cyd",)]),
        "Film": (["string"], [("arrival",), ("brazil",), ("clue",), ("dune",)]),
    }
)

ix = build_index(query, order, db)
n = ix.count()
print("answers:", n)

print("\nthe simulated sorted array:")
for j in range(n):
    print(f"  [{j}] {ix.access(j)}")

print("\nrank is the inverse of access:")
print("  rank(('bob', 'clue', 8)) =", ix.rank(("bob", "clue", 8)))

print("\nmedian and quartiles without materializing anything:")
for q in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
    print(f"  q={q}: {ix.quantile(q)}")

print("\nthree uniform answers without replacement (seed 7):")
for row in ix.sample_without_replacement(3, seed=7):
    print("  ", row)

print("\nmembership tests:")
print("  ('ada', 'brazil', 7) ->", ix.test_membership(("ada", "brazil", 7)))
print("  ('dan', 'dune', 10) ->", ix.test_membership(("dan", "dune", 10)))

try:
    ix.access(n)
except OutOfBoundsError as exc:
    print("\nasking past the end:", exc)

# Preprocessing persists; a loaded index serves the same answers with no
# database attached.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "watch.idx"
    save_index(ix, path)
    again = load_index(path)
    print("\nreloaded from", path.name, "->", list(again.enumerate_range(0, 2)), "...")
    print("index file size:", path.stat().st_size, "bytes")
