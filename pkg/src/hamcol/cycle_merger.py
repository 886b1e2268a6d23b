"""Turning a 1-factor plus two sparse random arc pools into one Hamilton
cycle: two-arc exchanges merge factor cycles while pool arcs allow it,
then a rotation search absorbs each leftover cycle into the big one.

All existential choices are resolved lexicographically (cycle size,
vertex label, arc label), so the whole stage is deterministic given its
inputs; the only randomness lives in the pool split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidInput, InvalidMerge, InvalidRotation
from .frontier import PathFrontier  # noqa: F401  (public working-set type)
from .one_factor import OneFactor
from .rng import SplitMix64


def default_rounds(n: int) -> int:
    """Rotation-round budget: floor(ln n / ln ln n) + 2, or n for n < 16
    where the formula degenerates."""
    if n < 16:
        return n
    return int(math.log(n) / math.log(math.log(n))) + 2


class ArcPool:
    """A frozen arc set with sorted adjacency and a CSR view for kernels."""

    def __init__(self, n: int, arcs):
        self.n = n
        seen = set()
        adj: dict[int, list[int]] = {}
        for u, v in arcs:
            u, v = int(u), int(v)
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"bad pool arc ({u}, {v}) for n={n}")
            if (u, v) in seen:
                continue
            seen.add((u, v))
            adj.setdefault(u, []).append(v)
        for row in adj.values():
            row.sort()
        self.arc_set = seen
        self.adj = adj
        self._in_adj = None
        self._csr = None

    def __len__(self):
        return len(self.arc_set)

    @property
    def in_adj(self) -> dict:
        if self._in_adj is None:
            radj: dict[int, list[int]] = {}
            for u, v in self.arc_set:
                radj.setdefault(v, []).append(u)
            for row in radj.values():
                row.sort()
            self._in_adj = radj
        return self._in_adj

    def __contains__(self, arc):
        return arc in self.arc_set

    def csr(self):
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for u, row in self.adj.items():
                indptr[u + 1] = len(row)
            np.cumsum(indptr, out=indptr)
            flat = np.zeros(int(indptr[-1]), dtype=np.int32)
            for u, row in self.adj.items():
                flat[indptr[u] : indptr[u] + len(row)] = row
            self._csr = (indptr, flat)
        return self._csr

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arc_set)


def split_pools(arcs, rng: SplitMix64):
    """Assign each arc independently to one of two pools with probability
    1/2 (draw 0 -> first pool), in input order."""
    first, second = [], []
    for arc in arcs:
        (first if rng.below(2) == 0 else second).append(tuple(arc))
    return first, second


def merge_step(factor: OneFactor, a: int, b: int) -> OneFactor:
    """Two-arc exchange joining the cycles of a and b: the new successor
    of a is b and the old predecessor of b continues to a's old
    successor.  Cycle count drops by exactly one."""
    succ = factor.succ
    n = len(succ)
    if not (0 <= a < n and 0 <= b < n):
        raise InvalidInput(f"vertices ({a}, {b}) out of range")
    w = int(succ[a])
    while w != a and w != b:
        w = int(succ[w])
    if w == b:
        raise InvalidMerge(f"{a} and {b} lie on the same cycle")
    pb = int(factor.pred[b])
    new_succ = succ.copy()
    new_succ[a] = b
    new_succ[pb] = succ[a]
    return OneFactor(new_succ)


def merge_cycles(factor: OneFactor, pool) -> tuple[OneFactor, list[tuple[int, int]]]:
    """Apply merge_step while some admissible pair exists.

    Scan order: cycles smallest first (ties by smallest label), vertices
    in label order, pool out-arcs in label order; after each merge the
    scan restarts.  Returns the final factor and the merges performed.
    """
    pool = pool if isinstance(pool, ArcPool) else ArcPool(len(factor), pool)
    merges: list[tuple[int, int]] = []
    current = factor
    while True:
        cycles = current.cycles()
        if len(cycles) == 1:
            break
        cid = np.empty(len(current), dtype=np.int64)
        for i, cyc in enumerate(cycles):
            for v in cyc:
                cid[v] = i
        succ = current.succ
        pred = current.pred
        found = None
        for cyc in sorted(cycles, key=lambda c: (len(c), c[0])):
            for a in sorted(cyc):
                for b in pool.adj.get(a, ()):
                    if cid[b] != cid[a] and (int(pred[b]), int(succ[a])) in pool.arc_set:
                        found = (a, b)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            break
        current = merge_step(current, *found)
        merges.append(found)
    return current, merges


def double_rotation(path, k: int, l: int) -> list[int]:
    """Rearrange (p1..ps) into (p1..p_{k-1}, p_l..p_s, p_k..p_{l-1}).

    k and l are 1-based positions with 2 <= k < l <= s; the caller is
    responsible for the two arcs (p_s, p_k) and (p_{k-1}, p_l) existing
    in whatever pool it is working from.  The start is preserved and the
    new endpoint is p_{l-1}.
    """
    path = list(path)
    s = len(path)
    if not 2 <= k < l <= s:
        raise InvalidRotation(f"need 2 <= k < l <= {s}, got k={k} l={l}")
    return path[: k - 1] + path[l - 1 :] + path[k - 1 : l - 1]


@dataclass
class FindCycleResult:
    ok: bool
    cycle: list[int] | None
    rounds_used: int
    frontier_peak: int
    n_seeds: int
    trace: list[int]


def find_cycle(prev_cycle, small_cycle, pool, rounds: int, max_paths: int, n: int | None = None) -> FindCycleResult:
    """Absorb ``small_cycle`` (listed so that its last vertex is the
    seeding tail) into ``prev_cycle`` using only pool arcs: seed one
    spanning path per pool arc from the tail into ``prev_cycle``, grow
    the path set by double rotations for up to ``rounds`` rounds, and
    test closure (endpoint -> start) after seeding and after each round.
    """
    prev_cycle = [int(v) for v in prev_cycle]
    small_cycle = [int(v) for v in small_cycle]
    if set(prev_cycle) & set(small_cycle):
        raise InvalidInput("cycles are not vertex-disjoint")
    pool = pool if isinstance(pool, ArcPool) else ArcPool(
        (max(max(prev_cycle), max(small_cycle)) + 1) if n is None else n, pool
    )
    indptr, flat = pool.csr()
    cycle, rounds_used, peak, n_seeds, trace = _backend.find_cycle_core(
        np.asarray(prev_cycle, dtype=np.int32),
        np.asarray(small_cycle, dtype=np.int32),
        indptr,
        flat,
        pool.n,
        rounds,
        max_paths,
    )
    if cycle is None:
        return FindCycleResult(False, None, rounds_used, peak, n_seeds, list(trace))
    cycle = [int(v) for v in cycle]
    _check_merged_cycle(cycle, prev_cycle, small_cycle, pool)
    return FindCycleResult(True, cycle, rounds_used, peak, n_seeds, list(trace))


def _check_merged_cycle(cycle, prev_cycle, small_cycle, pool):
    want = set(prev_cycle) | set(small_cycle)
    if len(cycle) != len(want) or set(cycle) != want:
        raise AssertionError("rotation search returned a non-spanning cycle")
    allowed = set(pool.arc_set)
    for seq in (prev_cycle, small_cycle):
        allowed.update(zip(seq, seq[1:] + seq[:1]))
    for arc in zip(cycle, cycle[1:] + cycle[:1]):
        if arc not in allowed:
            raise AssertionError(f"rotation search used a foreign arc {arc}")


@dataclass
class PatchworkInput:
    """Inputs of the cycle-patching engine.  Pools must already exclude
    the forbidden arcs; use ``build`` to filter and apply defaults."""

    factor: OneFactor
    e2: ArcPool
    e3: ArcPool
    forbidden: set = field(default_factory=set)
    rounds: int = 0
    max_paths: int = 0

    @classmethod
    def build(cls, factor, e2_arcs, e3_arcs, forbidden_arcs=(), rounds=None, max_paths=None):
        n = len(factor)
        forb = {(int(u), int(v)) for u, v in forbidden_arcs}
        e2 = ArcPool(n, [a for a in e2_arcs if tuple(a) not in forb])
        e3 = ArcPool(n, [a for a in e3_arcs if tuple(a) not in forb])
        return cls(
            factor=factor,
            e2=e2,
            e3=e3,
            forbidden=forb,
            rounds=default_rounds(n) if rounds is None else rounds,
            max_paths=4 * n if max_paths is None else max_paths,
        )


@dataclass
class PatchworkResult:
    ok: bool
    cycle: list[int] | None
    merges: list[tuple[int, int]]
    phase2_cycles: int
    phase2_largest: int
    find_cycle_stats: list[FindCycleResult]
    failure_index: int | None = None  # 1-based cycle index that failed

    @property
    def rounds_used(self) -> int:
        return max((s.rounds_used for s in self.find_cycle_stats), default=0)

    @property
    def frontier_peak(self) -> int:
        return max((s.frontier_peak for s in self.find_cycle_stats), default=0)


def patchwork_hamilton(pinput: PatchworkInput, rng=None) -> PatchworkResult:
    """Merge the factor's cycles into one Hamilton cycle.

    Phase order: exchanges over the first pool until exhausted, then one
    rotation-search absorption per leftover cycle, largest first.  The
    search itself is deterministic; ``rng`` is accepted for interface
    symmetry but never drawn from.
    """
    factor2, merges = merge_cycles(pinput.factor, pinput.e2)
    cycles = factor2.cycles()
    stats: list[FindCycleResult] = []
    result = PatchworkResult(
        ok=True,
        cycle=cycles[0],
        merges=merges,
        phase2_cycles=len(cycles),
        phase2_largest=len(cycles[0]),
        find_cycle_stats=stats,
    )
    current = cycles[0]
    for i, ci in enumerate(cycles[1:], start=2):
        listing = _viable_listing(ci, current, pinput.e3)
        if listing is None:
            stats.append(FindCycleResult(False, None, 0, 0, 0, [0]))
            result.ok = False
            result.cycle = None
            result.failure_index = i
            return result
        res = find_cycle(current, listing, pinput.e3, pinput.rounds, pinput.max_paths)
        stats.append(res)
        if not res.ok:
            result.ok = False
            result.cycle = None
            result.failure_index = i
            return result
        current = res.cycle
    result.cycle = current
    _check_patchwork_cycle(current, pinput)
    return result


def _viable_listing(ci, current, pool):
    """Listing rotation of ``ci`` for the rotation search.

    The tail (last vertex) seeds paths via its pool arcs into the current
    cycle; the start (first vertex, the tail's cycle successor) is where
    closure arcs must land.  Both are fixed by the cut point, which the
    underlying algorithm leaves free, so resolve it deterministically:
    require at least one seed arc, then maximize (closure in-arcs from
    the merged span, seed arcs), ties to the smallest tail label.
    """
    current_set = set(current)
    span = current_set | set(ci)
    in_adj = pool.in_adj
    best = None
    best_key = None
    m = len(ci)
    for idx, tail in enumerate(ci):
        seeds = sum(1 for h in pool.adj.get(tail, ()) if h in current_set)
        if seeds == 0:
            continue
        start = ci[(idx + 1) % m]
        closure = sum(1 for u in in_adj.get(start, ()) if u in span and u != start)
        key = (closure, seeds, -tail)
        if best_key is None or key > best_key:
            best_key = key
            best = idx
    if best is None:
        return None
    return ci[best + 1 :] + ci[: best + 1]


def _check_patchwork_cycle(cycle, pinput):
    n = len(pinput.factor)
    if sorted(cycle) != list(range(n)):
        raise AssertionError("patchwork produced a non-spanning cycle")
    allowed = set(pinput.factor.arcs()) | pinput.e2.arc_set | pinput.e3.arc_set
    for arc in zip(cycle, cycle[1:] + cycle[:1]):
        if arc not in allowed:
            raise AssertionError(f"patchwork used a foreign arc {arc}")
