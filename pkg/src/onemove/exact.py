"""Exhaustive oracles: minimum clearing numbers with replayable witnesses.

Every specialized solver in this package is validated against these
routines, so they stay deliberately independent of each other: the three
process oracles simulate their own process definitions and share no
shortcuts beyond the graph representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .deduction import Layout, run_deduction
from .engines import Strategy, cfms_run, complete_with_slides, czf_run
from .graphs import Graph, adjacency_masks, connected_components, induced_subgraph

CZF_EXACT_CEILING = 24
MU_EXACT_CEILING = 16

# Below this class size the scalar subset loop beats the numpy setup cost.
_VECTOR_CUTOFF = 4096


@dataclass(frozen=True)
class ParameterResult:
    """A computed parameter value with its certificate.

    witness depends on the parameter: a vertex list for forcing sets and
    independent sets, a Layout for the deduction number, a Strategy for
    the sliding number, a UniquenessWitness for matchings.
    """

    value: int
    witness: object
    method: str


@dataclass(frozen=True)
class UniquenessWitness:
    """A matching plus the bipartition certifying its uniqueness property.

    matching[i] joins v1[i] to v2[i]; the matching must be the unique
    perfect matching of the bipartite subgraph of all edges between v1
    and v2.
    """

    matching: tuple[tuple[int, int], ...]
    v1: tuple[int, ...]
    v2: tuple[int, ...]


# ---------------------------------------------------------------------------
# Constrained zero forcing.
# ---------------------------------------------------------------------------


def _czf_closure_mask(nbrs: list[int], start: int) -> int:
    """Bitset forcing closure from the initial colored mask."""
    colored = start
    active = start
    progress = True
    while progress:
        progress = False
        m = active
        while m:
            b = m & -m
            m ^= b
            unc = nbrs[b.bit_length() - 1] & ~colored
            if unc and unc & (unc - 1) == 0:
                colored |= unc
                active ^= b
                progress = True
    return colored


@lru_cache(maxsize=128)
def _combo_masks_small(n: int, k: int) -> tuple[int, ...]:
    return tuple(
        sum(1 << v for v in combo) for combo in itertools.combinations(range(n), k)
    )


def _combo_masks(n: int, k: int) -> np.ndarray:
    gen = (sum(1 << v for v in combo) for combo in itertools.combinations(range(n), k))
    return np.fromiter(gen, dtype=np.uint32, count=comb(n, k))


def _closure_sweep_numpy(nbrs: list[int], n: int, masks: np.ndarray) -> np.ndarray:
    """Forcing closure for many initial masks at once; returns colored."""
    full = np.uint32((1 << n) - 1)
    colored = masks.copy()
    fired = np.zeros_like(masks)
    one = np.uint32(1)
    while True:
        changed = False
        for v in range(n):
            bit = np.uint32(1 << v)
            nb = np.uint32(nbrs[v])
            unc = nb & ~colored
            can = ((masks & bit) != 0) & ((fired & bit) == 0)
            single = (unc != 0) & ((unc & (unc - one)) == 0)
            do = can & single
            if do.any():
                colored[do] |= unc[do]
                fired[do] |= bit
                changed = True
        if not changed or bool((colored == full).all()):
            return colored


def _min_forcing_set(nbrs: list[int], n: int, lower: int) -> tuple[int, int]:
    """Smallest mask whose forcing closure colors everything.

    Returns (size, mask); ties break by combination enumeration order.
    """
    full = (1 << n) - 1
    for k in range(max(lower, 1), n + 1):
        count = comb(n, k)
        if count >= _VECTOR_CUTOFF:
            masks = _combo_masks(n, k)
            colored = _closure_sweep_numpy(nbrs, n, masks)
            hits = np.nonzero(colored == np.uint32(full))[0]
            if hits.size:
                return k, int(masks[hits[0]])
        else:
            for mask in _combo_masks_small(n, k):
                if _czf_closure_mask(nbrs, mask) == full:
                    return k, mask
    raise AssertionError("the full vertex set always forces itself")


def czf_exact(g: Graph, *, force: bool = False) -> ParameterResult:
    """Minimum size of a successful forcing set, by exhaustive search.

    Works componentwise; within a component with an edge the search starts
    at the ceil(n/2) lower bound.  Refuses graphs above the practicality
    ceiling unless force is given.
    """
    if g.n > CZF_EXACT_CEILING and not force:
        raise ValueError(
            f"exhaustive forcing search refused for n={g.n} > {CZF_EXACT_CEILING}; "
            "pass force=True to insist"
        )
    total = 0
    witness: list[int] = []
    for comp in connected_components(g):
        if len(comp) == 1:
            total += 1
            witness.extend(comp)
            continue
        sub, relabel = induced_subgraph(g, comp)
        back = {new: old for old, new in relabel.items()}
        nbrs = adjacency_masks(sub)
        lower = (sub.n + 1) // 2 if sub.m else 1
        size, mask = _min_forcing_set(nbrs, sub.n, lower)
        total += size
        witness.extend(back[v] for v in range(sub.n) if mask >> v & 1)
    return ParameterResult(total, sorted(witness), "exact")


_TABLE_CACHE: dict[int, np.ndarray] = {}


def pair_bit_index(n: int) -> dict[tuple[int, int], int]:
    """Bit position of each vertex pair in the edge-mask encoding."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return {pair: idx for idx, pair in enumerate(pairs)}


def czf_value_table(n: int) -> np.ndarray:
    """Forcing number of every labeled graph on n vertices, n <= 7.

    Entry g of the returned array is the value for the graph whose edge
    set is the bit pattern of g under pair_bit_index(n).
    """
    if not 1 <= n <= 7:
        raise ValueError("value table supported for 1 <= n <= 7 only")
    if n in _TABLE_CACHE:
        return _TABLE_CACHE[n]
    bits = pair_bit_index(n)
    count = 1 << len(bits)
    masks = np.arange(count, dtype=np.uint32)
    nbr = [np.zeros(count, dtype=np.uint8) for _ in range(n)]
    for (i, j), b in bits.items():
        present = ((masks >> np.uint32(b)) & 1).astype(np.uint8)
        nbr[i] |= present << np.uint8(j)
        nbr[j] |= present << np.uint8(i)
    full = np.uint8((1 << n) - 1)
    values = np.zeros(count, dtype=np.uint8)
    solved = np.zeros(count, dtype=bool)
    one = np.uint8(1)
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            start = np.uint8(sum(1 << v for v in combo))
            colored = np.full(count, start, dtype=np.uint8)
            fired_any = np.zeros(count, dtype=np.uint8)
            while True:
                changed = False
                for v in combo:
                    bit = np.uint8(1 << v)
                    unc = nbr[v] & ~colored
                    can = (fired_any & bit) == 0
                    single = (unc != 0) & ((unc & (unc - one)) == 0)
                    do = can & single
                    if do.any():
                        colored[do] |= unc[do]
                        fired_any[do] |= bit
                        changed = True
                if not changed:
                    break
            newly = ~solved & (colored == full)
            values[newly] = k
            solved |= newly
        if bool(solved.all()):
            break
    _TABLE_CACHE[n] = values
    return values


# ---------------------------------------------------------------------------
# Deduction number.
# ---------------------------------------------------------------------------


def d_exact(g: Graph) -> ParameterResult:
    """Minimum total searchers over all layouts, including repeats.

    Enumerates layouts by ascending total, so the result does not assume
    that one searcher per vertex suffices; that fact comes out of the
    equivalence checks instead.
    """
    if g.n == 0:
        return ParameterResult(0, Layout({}), "exact")
    for total in range(1, g.n + 1):
        for spots in itertools.combinations_with_replacement(range(g.n), total):
            counts: dict[int, int] = {}
            for v in spots:
                counts[v] = counts.get(v, 0) + 1
            layout = Layout(counts)
            if len(run_deduction(g, layout).protected) == g.n:
                return ParameterResult(total, layout, "exact")
    raise AssertionError("placing a searcher on every vertex always succeeds")


# ---------------------------------------------------------------------------
# Sliding search number.
# ---------------------------------------------------------------------------


def cfms_exact(g: Graph, preoccupied=frozenset()) -> ParameterResult:
    """Minimum searchers whose placements extend to a clearing strategy.

    A candidate placement set is completed greedily with slides and
    accepted when all edges clear and every vertex was occupied at some
    point (a searcher must visit even an edgeless vertex).  Pre-occupied
    vertices contribute free searchers and are excluded from placement.
    With no pre-occupation the value is cross-checked against the
    deduction oracle and a mismatch raises RuntimeError.
    """
    pre = frozenset(preoccupied)
    free = sorted(set(range(g.n)) - pre)
    found: ParameterResult | None = None
    for s in range(len(free) + 1):
        for combo in itertools.combinations(free, s):
            strategy = complete_with_slides(g, combo, preoccupied=pre)
            state = cfms_run(g, strategy, preoccupied=pre)
            if state.success and state.ever_occupied == frozenset(range(g.n)):
                found = ParameterResult(s, strategy, "exact")
                break
        if found:
            break
    if found is None:
        raise AssertionError("placing searchers everywhere always clears the graph")
    if not pre:
        dd = d_exact(g)
        if dd.value != found.value:
            raise RuntimeError(
                f"oracle divergence: sliding search gives {found.value}, "
                f"deduction gives {dd.value}"
            )
    return found


# ---------------------------------------------------------------------------
# Matchings with the uniqueness property.
# ---------------------------------------------------------------------------


def _count_perfect_matchings(v1: list[int], nbr_masks: list[int], limit: int = 2) -> int:
    """Count perfect matchings of a bipartite graph, stopping at limit.

    nbr_masks[i] is the bitmask over v2 positions adjacent to v1[i].
    """

    def rec(i: int, used: int) -> int:
        if i == len(v1):
            return 1
        total = 0
        m = nbr_masks[i] & ~used
        while m:
            b = m & -m
            m ^= b
            total += rec(i + 1, used | b)
            if total >= limit:
                return total
        return total

    return rec(0, 0)


def _matchings_of_size(edges: list[tuple[int, int]], s: int):
    """All matchings of exactly s edges, edge indices ascending."""

    chosen: list[tuple[int, int]] = []

    def rec(start: int, used: set[int]):
        if len(chosen) == s:
            yield list(chosen)
            return
        remaining = s - len(chosen)
        for i in range(start, len(edges) - remaining + 1):
            u, v = edges[i]
            if u in used or v in used:
                continue
            chosen.append((u, v))
            used |= {u, v}
            yield from rec(i + 1, used)
            chosen.pop()
            used -= {u, v}

    yield from rec(0, set())


def validate_uniqueness_witness(g: Graph, w: UniquenessWitness) -> bool:
    """Replay a uniqueness certificate against the graph."""
    k = len(w.matching)
    if len(w.v1) != k or len(w.v2) != k:
        return False
    if set(w.v1) & set(w.v2):
        return False
    verts = set(w.v1) | set(w.v2)
    if len(verts) != 2 * k:
        return False
    for i, (a, b) in enumerate(w.matching):
        if {a, b} != {w.v1[i], w.v2[i]}:
            return False
        if not g.has_edge(a, b):
            return False
    pos = {y: j for j, y in enumerate(w.v2)}
    nbr_masks = [
        sum(1 << pos[y] for y in w.v2 if g.has_edge(x, y)) for x in w.v1
    ]
    return _count_perfect_matchings(list(w.v1), nbr_masks) == 1


def mu_exact(g: Graph, *, force: bool = False) -> ParameterResult:
    """Largest matching with the uniqueness property, by descending size.

    For each matching, every assignment of its edges' endpoints to the two
    sides is tried; a side assignment certifies the matching when the
    bipartite subgraph of all edges between the sides has no second
    perfect matching.
    """
    if g.n > MU_EXACT_CEILING and not force:
        raise ValueError(
            f"matching enumeration refused for n={g.n} > {MU_EXACT_CEILING}; "
            "pass force=True to insist"
        )
    edges = g.sorted_edges()
    for s in range(len(edges) and g.n // 2, 0, -1):
        for matching in _matchings_of_size(edges, s):
            # orient the first edge once; swapping the sides is symmetric
            for flips in itertools.product((False, True), repeat=s - 1):
                v1, v2 = [], []
                for idx, (u, v) in enumerate(matching):
                    flip = idx > 0 and flips[idx - 1]
                    v1.append(v if flip else u)
                    v2.append(u if flip else v)
                pos = {y: j for j, y in enumerate(v2)}
                nbr_masks = [
                    sum(1 << pos[y] for y in v2 if g.has_edge(x, y)) for x in v1
                ]
                if _count_perfect_matchings(v1, nbr_masks) == 1:
                    witness = UniquenessWitness(
                        tuple(edge for edge in matching), tuple(v1), tuple(v2)
                    )
                    return ParameterResult(s, witness, "exact")
    return ParameterResult(0, UniquenessWitness((), (), ()), "exact")


# ---------------------------------------------------------------------------
# Independence number and vertex cover.
# ---------------------------------------------------------------------------


def alpha_exact(g: Graph) -> ParameterResult:
    """Maximum independent set via branch and bound on bitsets."""
    nbrs = adjacency_masks(g)
    best_mask = 0
    # greedy seed: repeatedly take the lowest-degree remaining vertex
    remaining = (1 << g.n) - 1
    while remaining:
        v = min(
            (w for w in range(g.n) if remaining >> w & 1),
            key=lambda w: (nbrs[w] & remaining).bit_count(),
        )
        best_mask |= 1 << v
        remaining &= ~(nbrs[v] | 1 << v)
    best = [best_mask.bit_count(), best_mask]

    def expand(candidates: int, chosen: int, size: int) -> None:
        if size + candidates.bit_count() <= best[0]:
            return
        if candidates == 0:
            if size > best[0]:
                best[0] = size
                best[1] = chosen
            return
        v = (candidates & -candidates).bit_length() - 1
        bit = 1 << v
        expand(candidates & ~(nbrs[v] | bit), chosen | bit, size + 1)
        expand(candidates & ~bit, chosen, size)

    expand((1 << g.n) - 1, 0, 0)
    witness = [v for v in range(g.n) if best[1] >> v & 1]
    return ParameterResult(best[0], witness, "exact")


def vertex_cover_decide(g: Graph, l: int) -> tuple[bool, list[int] | None]:
    """Whether g has a vertex cover of size at most l; returns one if so."""
    if l < 0:
        return False, None
    alpha = alpha_exact(g)
    if g.n - alpha.value > l:
        return False, None
    cover = sorted(set(range(g.n)) - set(alpha.witness))
    return True, cover
