"""Hard-instance constructions: star queries, set families, weighted cliques.

This module is the executable counterpart of the engine's cost story.  It
can encode set-disjointness workloads as star-query databases, answer
k-wise intersection queries either by brute force or through the
direct-access index, and run the randomized reduction that turns a
zero-clique search over a complete multipartite graph into a stream of
set-intersection instances.  Everything is driven by explicit ``Random``
instances, so runs are reproducible from a seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .access import AccessIndex, build_index
from .errors import InputError
from .query import JoinQuery, VariableOrder
from .storage import Database, build_database

# --------------------------------------------------------------------- #
# query templates


def star_query(k: int) -> tuple[JoinQuery, VariableOrder]:
    """The k-armed star R_1(x_1, z), ..., R_k(x_k, z) with its worst order.

    The returned order puts the shared variable z last, which makes every
    arm's variable pairwise independent ahead of it; the incompatibility
    number of the pair is exactly k.
    """
    if k < 1:
        raise InputError("a star needs at least one arm")
    xs = [f"x{i}" for i in range(1, k + 1)]
    atoms = tuple((f"R{i}", (f"x{i}", "z")) for i in range(1, k + 1))
    q = JoinQuery(f"Star{k}", atoms, tuple(xs) + ("z",))
    return q, VariableOrder(tuple(xs) + ("z",))


def lw_query(k: int) -> JoinQuery:
    """The k-variable join with one atom omitting each variable.

    For k = 3 this is the triangle R_1(x2, x3), R_2(x1, x3), R_3(x1, x2);
    its optimal fractional cover totals 1 + 1/(k - 1).
    """
    if k < 2:
        raise InputError("needs at least two variables")
    xs = [f"x{i}" for i in range(1, k + 1)]
    atoms = tuple(
        (f"R{i}", tuple(x for j, x in enumerate(xs, start=1) if j != i))
        for i in range(1, k + 1)
    )
    return JoinQuery(f"LW{k}", atoms, tuple(xs))


# --------------------------------------------------------------------- #
# set families


@dataclass(frozen=True)
class SetFamilyInstance:
    """k families of subsets of a universe, plus the queries to ask of them.

    A query names one set per family (1-based indices, matching positions in
    the family).  ``n`` counts the sets, ``input_size`` their total weight.
    """

    universe: tuple[int, ...]
    families: tuple[tuple[frozenset[int], ...], ...]
    queries: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        uni = set(self.universe)
        for fam in self.families:
            for s in fam:
                if not s <= uni:
                    raise InputError("set element outside the universe")
        for query in self.queries:
            if len(query) != len(self.families):
                raise InputError("query must name one set per family")
            for i, j in enumerate(query):
                if not 1 <= j <= len(self.families[i]):
                    raise InputError(f"query index {j} out of range for family {i + 1}")

    @property
    def k(self) -> int:
        return len(self.families)

    @property
    def n(self) -> int:
        return sum(len(fam) for fam in self.families)

    @property
    def input_size(self) -> int:
        return sum(len(s) for fam in self.families for s in fam)

    def intersection(self, query: Sequence[int]) -> set[int]:
        sets = sorted(
            (self.families[i][j - 1] for i, j in enumerate(query)), key=len
        )
        out = set(sets[0])
        for s in sets[1:]:
            out &= s
            if not out:
                break
        return out

    def disjoint(self, query: Sequence[int]) -> bool:
        return not self.intersection(query)


def encode_set_disjointness(inst: SetFamilyInstance) -> Database:
    """Database for the k-star: relation i holds (set index, element) pairs.

    A query (j_1, ..., j_k) has a non-empty intersection exactly when some z
    completes it to a star answer; the database size equals the instance's
    input size.
    """
    raw = {}
    for i, fam in enumerate(inst.families, start=1):
        rows = [(j, v) for j, s in enumerate(fam, start=1) for v in sorted(s)]
        raw[f"R{i}"] = (("int", "int"), rows)
    return build_database(raw)


def prefix_block(ix: AccessIndex, values: Sequence) -> tuple[int, int]:
    """Index range [lo, hi) of answers whose first order positions equal ``values``.

    Answers sharing a fixed prefix on the leading variables of the order are
    contiguous, so two binary searches over direct-access calls locate the
    block.
    """
    codes = []
    for i, v in enumerate(values):
        var = ix.order.variables[i]
        code = ix.dictionary.try_encode(ix.var_types[var], v)
        if code is None:
            return (0, 0)
        codes.append(code)
    target = tuple(codes)
    width = len(target)
    total = ix.count()

    lo, hi = 0, total
    while lo < hi:
        mid = (lo + hi) // 2
        if ix.access_codes(mid)[:width] < target:
            lo = mid + 1
        else:
            hi = mid
    start = lo
    lo, hi = start, total
    while lo < hi:
        mid = (lo + hi) // 2
        if ix.access_codes(mid)[:width] <= target:
            lo = mid + 1
        else:
            hi = mid
    return (start, lo)


def projected_star_test(ix: AccessIndex, indices: Sequence[int]) -> bool:
    """Does some z complete (j_1, ..., j_k)?  Binary search over access calls."""
    if len(indices) != len(ix.order.variables) - 1:
        raise InputError("expected one index per star arm")
    lo, hi = prefix_block(ix, indices)
    return hi > lo


# --------------------------------------------------------------------- #
# weighted multipartite cliques


@dataclass(frozen=True)
class WeightedCliqueInstance:
    """Complete multipartite graph with integer or residue edge weights.

    ``weights`` maps every cross pair (u, v) with u < v; ``p`` is None for
    plain integer weights, otherwise all weights are residues in [0, p).
    """

    parts: tuple[tuple[int, ...], ...]
    weights: dict[tuple[int, int], int]
    p: int | None = None
    part_index: dict[int, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        idx: dict[int, int] = {}
        for pi, part in enumerate(self.parts, start=1):
            for v in part:
                if v in idx:
                    raise InputError(f"vertex {v} in two parts")
                idx[v] = pi
        object.__setattr__(self, "part_index", idx)
        for a_part, b_part in product(range(len(self.parts)), repeat=2):
            if a_part >= b_part:
                continue
            for u in self.parts[a_part]:
                for v in self.parts[b_part]:
                    if (min(u, v), max(u, v)) not in self.weights:
                        raise InputError(f"missing cross edge ({u}, {v})")
        if self.p is not None:
            for w in self.weights.values():
                if not 0 <= w < self.p:
                    raise InputError("field-mode weights must be residues in [0, p)")

    @property
    def n(self) -> int:
        return sum(len(part) for part in self.parts)

    def weight(self, u: int, v: int) -> int:
        return self.weights[(min(u, v), max(u, v))]

    def clique_weight(self, vertices: Sequence[int]) -> int:
        total = 0
        vs = list(vertices)
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                total += self.weight(vs[a], vs[b])
        return total % self.p if self.p is not None else total

    def is_zero_clique(self, vertices: Sequence[int]) -> bool:
        return self.clique_weight(vertices) == 0


def brute_zero_clique(g: WeightedCliqueInstance) -> tuple[int, ...] | None:
    """Exhaustive scan of one vertex per part; test oracle only."""
    for combo in product(*g.parts):
        if g.is_zero_clique(combo):
            return combo
    return None


def count_zero_cliques(g: WeightedCliqueInstance) -> int:
    return sum(1 for combo in product(*g.parts) if g.is_zero_clique(combo))


def to_complete_k_partite(
    n_vertices: int, edge_weights: dict[tuple[int, int], int], parts: int
) -> WeightedCliqueInstance:
    """Spread a graph on vertices 1..n over ``parts`` copies of its vertex set.

    Copies of a real edge keep its weight; pairs without an edge (including
    both copies of one vertex) get a weight too large for any zero sum to
    absorb, so zero cliques correspond exactly to zero cliques of the input.
    """
    if parts < 2:
        raise InputError("need at least two parts")
    for (u, v) in edge_weights:
        if not (1 <= u <= n_vertices and 1 <= v <= n_vertices and u != v):
            raise InputError(f"bad edge ({u}, {v})")
    norm = {(min(u, v), max(u, v)): w for (u, v), w in edge_weights.items()}
    max_w = max((abs(w) for w in norm.values()), default=0)
    big = parts * parts * (max_w + 1)
    part_lists = tuple(
        tuple(c * n_vertices + i for i in range(1, n_vertices + 1)) for c in range(parts)
    )
    weights: dict[tuple[int, int], int] = {}
    for a_part in range(parts):
        for b_part in range(a_part + 1, parts):
            for i in range(1, n_vertices + 1):
                for j in range(1, n_vertices + 1):
                    u = a_part * n_vertices + i
                    v = b_part * n_vertices + j
                    if i == j:
                        w = big
                    else:
                        w = norm.get((min(i, j), max(i, j)), big)
                    weights[(u, v)] = w
    return WeightedCliqueInstance(part_lists, weights)


# --------------------------------------------------------------------- #
# randomized weight machinery


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin; the witness set is exact below 3.3e24."""
    if m < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for sp in small:
        if m % sp == 0:
            return m == sp
    d = m - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(r - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def sample_prime(lo: int, hi: int, rng: random.Random) -> int:
    """A prime in [lo, hi] by rejection sampling; error if the range has none."""
    if hi < lo:
        raise InputError("empty prime range")
    span = hi - lo + 1
    for _ in range(200 * max(1, span.bit_length())):
        candidate = lo + rng.randrange(span)
        if is_prime(candidate):
            return candidate
    for candidate in range(lo, hi + 1):  # tiny ranges: fall back to a scan
        if is_prime(candidate):
            return candidate
    raise InputError(f"no prime in [{lo}, {hi}]")


VARIANT_INTERSECTION = "intersection"
VARIANT_ENUMERATION = "enumeration"


@dataclass(frozen=True)
class WeightRandomness:
    """The sampled multiplier and offsets behind a re-randomized instance."""

    x: int
    y_last: dict[tuple[int, int], int]
    y_first: dict[int, int]
    variant: str


def apply_weight_randomization(
    g: WeightedCliqueInstance,
    p: int,
    x: int,
    y_last: dict[tuple[int, int], int],
    y_first: dict[int, int],
    variant: str = VARIANT_INTERSECTION,
) -> WeightedCliqueInstance:
    """Rescale by x and add telescoping offsets; every clique weight becomes x times its old value (mod p).

    For an edge from part i to the last part the offset telescopes through
    y values attached to the last-part endpoint; the enumeration variant
    additionally shifts first-part vertices, moving their offset onto the
    edge into part 2.  Cross-clique sums cancel every offset exactly.
    """
    k = len(g.parts) - 1
    if k < 2:
        raise InputError("weight randomization needs at least three parts")
    if variant not in (VARIANT_INTERSECTION, VARIANT_ENUMERATION):
        raise InputError(f"unknown randomization variant {variant!r}")
    new_weights: dict[tuple[int, int], int] = {}
    for (u, v), w in g.weights.items():
        i = g.part_index[u]
        j = g.part_index[v]
        if i > j:
            i, j = j, i
            u, v = v, u
        total = x * w
        if j == k + 1:
            if i == 1:
                total += y_last[(v, 1)]
            elif i < k:
                total += y_last[(v, i)] - y_last[(v, i - 1)]
            else:
                total -= y_last[(v, k - 1)]
        if variant == VARIANT_ENUMERATION and i == 1:
            if j == k + 1:
                total -= y_first[u]
            elif j == 2:
                total += y_first[u]
        new_weights[(min(u, v), max(u, v))] = total % p
    return WeightedCliqueInstance(g.parts, new_weights, p)


def randomize_weights(
    g: WeightedCliqueInstance,
    p: int,
    rng: random.Random,
    variant: str = VARIANT_INTERSECTION,
) -> tuple[WeightedCliqueInstance, WeightRandomness]:
    """Sample x != 0 and all offsets uniformly from the field, then apply them."""
    k = len(g.parts) - 1
    if k < 2:
        raise InputError("weight randomization needs at least three parts")
    x = 0
    while x == 0:
        x = rng.randrange(p)
    y_last = {
        (v, j): rng.randrange(p) for v in g.parts[k] for j in range(1, k)
    }
    y_first = {}
    if variant == VARIANT_ENUMERATION:
        y_first = {v: rng.randrange(p) for v in g.parts[0]}
    randomness = WeightRandomness(x, y_last, y_first, variant)
    return apply_weight_randomization(g, p, x, y_last, y_first, variant), randomness


# --------------------------------------------------------------------- #
# interval tuples


@dataclass(frozen=True)
class IntervalTuple:
    """k+1 cells of an equal split of [0, p), one per partial weight."""

    intervals: tuple[tuple[int, int], ...]  # half-open (start, stop)
    p: int

    def sum_contains_zero(self) -> bool:
        lo = sum(start for start, _ in self.intervals)
        hi = sum(stop - 1 for _, stop in self.intervals)
        return (-lo) % self.p <= hi - lo


def interval_partition(p: int, pieces: int) -> list[tuple[int, int]]:
    """Split [0, p) into ``pieces`` near-equal half-open cells."""
    if pieces < 1 or pieces > p:
        raise InputError(f"cannot split a field of size {p} into {pieces} cells")
    q, rem = divmod(p, pieces)
    cells = []
    start = 0
    for i in range(pieces):
        size = q + 1 if i < rem else q
        cells.append((start, start + size))
        start += size
    return cells


def interval_tuples(p: int, n: int, rho: float, k: int) -> Iterator[IntervalTuple]:
    """All (k+1)-tuples of cells whose interval sum can hit 0 mod p.

    The field is split into about n**rho cells.  For each choice of the
    first k cells, the candidate last cells cover a single arc, so only a
    handful of completions are scanned per prefix.
    """
    pieces = max(1, math.ceil(n**rho))
    cells = interval_partition(p, min(pieces, p))

    def cell_index(x: int) -> int:
        q, rem = divmod(p, len(cells))
        wide = rem * (q + 1)
        return x // (q + 1) if x < wide else rem + (x - wide) // q

    for combo in product(range(len(cells)), repeat=k):
        chosen = [cells[c] for c in combo]
        lo_sum = sum(start for start, _ in chosen)
        hi_sum = sum(stop - 1 for _, stop in chosen)
        arc_len = hi_sum - lo_sum + 1
        # Candidate last cells: those meeting the arc of values -s mod p.
        if arc_len >= p:
            candidates = range(len(cells))
        else:
            arc_start = (-hi_sum) % p
            candidates = []
            pos = arc_start
            remaining = arc_len
            seen: set[int] = set()
            while remaining > 0:
                ci = cell_index(pos)
                if ci in seen:
                    break
                seen.add(ci)
                candidates.append(ci)
                start, stop = cells[ci]
                step = stop - pos
                remaining -= step
                pos = stop % p
        for last in candidates:
            tup = IntervalTuple(tuple(chosen) + (cells[last],), p)
            if tup.sum_contains_zero():
                yield tup


# --------------------------------------------------------------------- #
# the reduction to set intersection


def query_cap(k: int, n: int, rho: float) -> int:
    """How many witnesses to request per intersection query."""
    return math.ceil(100 * 3**k * n ** (1 - k * rho))


def build_intersection_instances(
    g: WeightedCliqueInstance, rho: float
) -> Iterator[tuple[SetFamilyInstance, int]]:
    """One set-intersection instance per viable interval tuple.

    Family i holds one set per vertex of part i: the last-part vertices whose
    connecting edge weight falls in the tuple's cell i.  Queries are the
    first-k vertex combinations whose mutual weight falls in cell 0.
    """
    if g.p is None:
        raise InputError("instance must be in field mode (weights mod p)")
    k = len(g.parts) - 1
    if k < 1:
        raise InputError("need at least two parts")
    n = g.n
    cap = query_cap(k, n, rho)
    last = g.parts[k]
    firsts = g.parts[:k]
    for tup in interval_tuples(g.p, n, rho, k):
        inner = tup.intervals[0]
        arm = tup.intervals[1:]
        families = []
        for i in range(k):
            fam = []
            for v in firsts[i]:
                lo, hi = arm[i]
                fam.append(frozenset(u for u in last if lo <= g.weight(v, u) < hi))
            families.append(tuple(fam))
        queries = []
        lo0, hi0 = inner
        for combo in product(*(range(1, len(part) + 1) for part in firsts)):
            vertices = [firsts[i][j - 1] for i, j in enumerate(combo)]
            if lo0 <= g.clique_weight(vertices) < hi0:
                queries.append(tuple(combo))
        yield SetFamilyInstance(tuple(last), tuple(families), tuple(queries)), cap


class BruteForceBackend:
    """Answers intersection queries straight off the set families."""

    def prepare(self, inst: SetFamilyInstance) -> SetFamilyInstance:
        return inst

    def intersect(self, handle: SetFamilyInstance, query: Sequence[int], limit: int) -> list[int]:
        return sorted(handle.intersection(query))[:limit]


class DirectAccessBackend:
    """Answers intersection queries through the direct-access engine.

    The instance is encoded as a star-query database; a query's witnesses
    are the contiguous block of answers sharing the index prefix, read off
    with direct-access calls.
    """

    def prepare(self, inst: SetFamilyInstance) -> AccessIndex:
        q, order = star_query(inst.k)
        return build_index(q, order, encode_set_disjointness(inst))

    def intersect(self, handle: AccessIndex, query: Sequence[int], limit: int) -> list[int]:
        lo, hi = prefix_block(handle, tuple(query))
        return [handle.access(j)[-1] for j in range(lo, min(hi, lo + limit))]


def find_zero_clique_via_reduction(
    g: WeightedCliqueInstance,
    rho: float | None = None,
    rng: random.Random | None = None,
    backend=None,
) -> tuple[int, ...] | None:
    """Search for a zero clique through the set-intersection reduction.

    Any returned clique is re-verified against the original integer weights,
    so the answer is one-sided: 'found' is always correct, while a present
    zero clique is missed only with small probability.  rho defaults to
    1 / (2k).
    """
    if g.p is not None:
        raise InputError("reduction expects integer weights")
    k = len(g.parts) - 1
    if k < 2:
        raise InputError("reduction needs at least three parts")
    if rho is None:
        rho = 1.0 / (2 * k)
    if rng is None:
        rng = random.Random(0)
    if backend is None:
        backend = BruteForceBackend()
    bound = max(1, max((abs(w) for w in g.weights.values()), default=1))
    p = sample_prime(10 * (k + 1) ** 2 * bound, 100 * (k + 1) ** 2 * bound, rng)
    reduced = WeightedCliqueInstance(
        g.parts, {e: w % p for e, w in g.weights.items()}, p
    )
    randomized, _ = randomize_weights(reduced, p, rng, VARIANT_INTERSECTION)
    firsts = g.parts[:k]
    for inst, cap in build_intersection_instances(randomized, rho):
        handle = backend.prepare(inst)
        for query in inst.queries:
            vertices = [firsts[i][j - 1] for i, j in enumerate(query)]
            for u in backend.intersect(handle, query, cap):
                candidate = tuple(vertices) + (u,)
                if g.is_zero_clique(candidate):
                    return candidate
    return None


# --------------------------------------------------------------------- #
# unique recovery by bit probing


def bit_slice(inst: SetFamilyInstance, bit: int) -> SetFamilyInstance:
    """Drop every universe element whose given bit is zero."""
    keep = {u for u in inst.universe if (u >> bit) & 1}
    return SetFamilyInstance(
        tuple(u for u in inst.universe if u in keep),
        tuple(tuple(s & keep for s in fam) for fam in inst.families),
        inst.queries,
    )


def brute_disjointness_oracle(inst: SetFamilyInstance, query: Sequence[int]) -> bool:
    return inst.disjoint(query)


def unique_via_bit_probing(
    oracle: Callable[[SetFamilyInstance, Sequence[int]], bool],
    inst: SetFamilyInstance,
    query: Sequence[int],
):
    """Recover the element of a singleton intersection from disjointness bits.

    One sliced sub-instance per bit of the universe keeps only elements with
    that bit set; the oracle's answers spell out the element.  The assembled
    value is verified before being returned, so a non-singleton intersection
    yields either a true member or None, never garbage.
    """
    if any(u < 0 for u in inst.universe):
        raise InputError("bit probing needs a non-negative integer universe")
    bits = max((u.bit_length() for u in inst.universe), default=1)
    value = 0
    for j in range(bits):
        if not oracle(bit_slice(inst, j), query):
            value |= 1 << j
    member = all(value in inst.families[i][j - 1] for i, j in enumerate(query))
    return value if member else None


# --------------------------------------------------------------------- #
# instance generators and graph file IO


def random_set_family(
    rng: random.Random,
    k: int,
    sets_per_family: int,
    universe_size: int,
    max_set_size: int,
    queries: int | None = None,
) -> SetFamilyInstance:
    """Random instance; queries default to every index combination."""
    universe = tuple(range(universe_size))
    families = tuple(
        tuple(
            frozenset(rng.sample(universe, rng.randint(0, min(max_set_size, universe_size))))
            for _ in range(sets_per_family)
        )
        for _ in range(k)
    )
    if queries is None:
        qs = tuple(product(*(range(1, sets_per_family + 1) for _ in range(k))))
    else:
        qs = tuple(
            tuple(rng.randint(1, sets_per_family) for _ in range(k)) for _ in range(queries)
        )
    return SetFamilyInstance(universe, families, qs)


def random_partite_instance(
    rng: random.Random,
    parts: int,
    part_size: int,
    weight_bound: int,
    plant: bool = False,
) -> tuple[WeightedCliqueInstance, tuple[int, ...] | None]:
    """Complete multipartite instance with uniform weights, optionally planted.

    Planting picks one vertex per part and rewrites a single edge so the
    clique sums to zero.
    """
    part_lists = tuple(
        tuple(c * part_size + i for i in range(1, part_size + 1)) for c in range(parts)
    )
    weights: dict[tuple[int, int], int] = {}
    for a in range(parts):
        for b in range(a + 1, parts):
            for u in part_lists[a]:
                for v in part_lists[b]:
                    weights[(u, v)] = rng.randint(-weight_bound, weight_bound)
    planted = None
    if plant:
        planted = tuple(part[rng.randrange(part_size)] for part in part_lists)
        pairs = [
            (min(planted[a], planted[b]), max(planted[a], planted[b]))
            for a in range(parts)
            for b in range(a + 1, parts)
        ]
        rest = sum(weights[e] for e in pairs[:-1])
        weights[pairs[-1]] = -rest
    return WeightedCliqueInstance(part_lists, weights), planted


def write_partite_graph(path: str | Path, g: WeightedCliqueInstance) -> None:
    """Text form: a ``parts`` header with part sizes, then ``u v w`` lines."""
    lines = ["parts " + " ".join(str(len(part)) for part in g.parts)]
    for (u, v) in sorted(g.weights):
        lines.append(f"{u} {v} {g.weights[(u, v)]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_partite_graph(path: str | Path) -> WeightedCliqueInstance:
    text = Path(path).read_text(encoding="utf-8")
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("parts "):
        raise InputError(f"{path}: expected a 'parts' header line")
    try:
        sizes = [int(tok) for tok in lines[0].split()[1:]]
    except ValueError:
        raise InputError(f"{path}: bad parts header") from None
    part_lists = []
    start = 1
    for size in sizes:
        part_lists.append(tuple(range(start, start + size)))
        start += size
    weights: dict[tuple[int, int], int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        toks = line.split()
        if len(toks) != 3:
            raise InputError(f"{path}:{lineno}: expected 'u v w'")
        try:
            u, v, w = int(toks[0]), int(toks[1]), int(toks[2])
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected integers") from None
        weights[(min(u, v), max(u, v))] = w
    return WeightedCliqueInstance(tuple(part_lists), weights)
