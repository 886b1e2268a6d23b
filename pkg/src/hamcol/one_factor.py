"""Candidate arcs and the spanning 1-factor of the minor.

Each minor vertex contributes up to k out-arcs from the first reveal
window and up to k in-arcs from the second, restricted to safe heads and
tails (outside the flagged set and its neighborhood).  A perfect matching
of out-copies to in-copies over those arcs is a fixed-point-free
permutation, i.e. a spanning union of directed cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coloring import ColoringResult
from .errors import InvalidInput
from .minor import ContractionMap


class OneFactor:
    """Successor form of a fixed-point-free permutation."""

    def __init__(self, succ):
        succ = np.asarray(succ, dtype=np.int64)
        n = len(succ)
        if n == 0 or len(np.unique(succ)) != n or succ.min() < 0 or succ.max() >= n:
            raise InvalidInput("successor array is not a permutation")
        if (succ == np.arange(n)).any():
            raise InvalidInput("permutation has a fixed point")
        self.succ = succ
        self._pred = None
        self._cycles = None

    def __len__(self) -> int:
        return len(self.succ)

    def __eq__(self, other) -> bool:
        return isinstance(other, OneFactor) and np.array_equal(self.succ, other.succ)

    @property
    def pred(self) -> np.ndarray:
        if self._pred is None:
            inv = np.empty_like(self.succ)
            inv[self.succ] = np.arange(len(self.succ))
            self._pred = inv
        return self._pred

    def cycles(self) -> list[list[int]]:
        """Cycle decomposition, largest first (ties by smallest label),
        each cycle rotated to start at its smallest label."""
        if self._cycles is None:
            succ = self.succ.tolist()
            seen = [False] * len(succ)
            cycles = []
            for v in range(len(succ)):
                if seen[v]:
                    continue
                cyc = [v]
                seen[v] = True
                w = succ[v]
                while w != v:
                    seen[w] = True
                    cyc.append(w)
                    w = succ[w]
                cycles.append(cyc)
            cycles.sort(key=lambda c: (-len(c), c[0]))
            self._cycles = cycles
        return self._cycles

    def cycle_count(self) -> int:
        return len(self.cycles())

    def arcs(self) -> list[tuple[int, int]]:
        return [(v, int(s)) for v, s in enumerate(self.succ.tolist())]


def cycle_count(factor: OneFactor) -> int:
    return factor.cycle_count()


@dataclass
class MatchingFailure:
    witness: list[int]  # out-copy set whose candidate neighborhood is smaller

    ok = False


@dataclass
class CandidateArcs:
    """Per-vertex candidate arcs, reveal-ordered, at most k per side."""

    n: int
    k: int
    out_cands: list[list[tuple[int, int]]]  # v -> [(head, reveal), ...]
    in_cands: list[list[tuple[int, int]]]  # v -> [(tail, reveal), ...]

    @property
    def deficient_out(self) -> list[int]:
        return [v for v, row in enumerate(self.out_cands) if len(row) < self.k]

    @property
    def deficient_in(self) -> list[int]:
        return [v for v, row in enumerate(self.in_cands) if len(row) < self.k]

    @property
    def deficient(self) -> list[int]:
        return sorted(set(self.deficient_out) | set(self.deficient_in))

    def bipartite_adjacency(self) -> list[list[int]]:
        """Out-copy -> sorted in-copy neighbors over both candidate sides."""
        adj = [set() for _ in range(self.n)]
        for v, row in enumerate(self.out_cands):
            for head, _ in row:
                adj[v].add(head)
        for v, row in enumerate(self.in_cands):
            for tail, _ in row:
                adj[tail].add(v)
        return [sorted(s) for s in adj]

    @classmethod
    def from_arcs(cls, n: int, arcs, k: int | None = None) -> "CandidateArcs":
        """Build from explicit (tail, head) pairs; reveal = listing order."""
        outs = [[] for _ in range(n)]
        for r, (u, v) in enumerate(arcs):
            if k is None or len(outs[u]) < k:
                outs[u].append((v, r))
        return cls(n=n, k=k if k is not None else max(1, len(arcs)), out_cands=outs,
                   in_cands=[[] for _ in range(n)])


def vstar_mask(result: ColoringResult) -> np.ndarray:
    """Vertices outside the flagged set and its (undirected) neighborhood
    in the whole revealed prefix."""
    bad = result.bad
    t, h = result.oriented_arcs()
    nbr = np.zeros(result.n, dtype=bool)
    np.logical_or.at(nbr, h, bad[t])
    np.logical_or.at(nbr, t, bad[h])
    return ~bad & ~nbr


def select_candidates(
    result: ColoringResult, cmap: ContractionMap, c: int, k: int
) -> CandidateArcs:
    """First k minor arcs per vertex and side: out-arcs revealed in
    (m1, m2] with head in the safe set, in-arcs revealed in (m2, m3] with
    tail in the safe set.  Vertices with shorter lists are deficient;
    that is data, not an error."""
    vstar = vstar_mask(result)
    nc = cmap.n_minor
    outs: list[list[tuple[int, int]]] = [[] for _ in range(nc)]
    ins: list[list[tuple[int, int]]] = [[] for _ in range(nc)]
    starts = cmap.starts
    ends = cmap.ends
    for mu, mv, r in zip(
        cmap.minor_tails.tolist(), cmap.minor_heads.tolist(), cmap.minor_reveal.tolist()
    ):
        t1 = r + 1  # reveal times are 1-based
        if result.m1 < t1 <= result.m2:
            if vstar[starts[mv]] and len(outs[mu]) < k:
                outs[mu].append((mv, r))
        elif result.m2 < t1 <= result.m3:
            if vstar[ends[mu]] and len(ins[mv]) < k:
                ins[mv].append((mu, r))
    return CandidateArcs(n=nc, k=k, out_cands=outs, in_cands=ins)


def find_one_factor(cands: CandidateArcs):
    """Perfect matching of out-copies to in-copies (Hopcroft-Karp),
    returned as a OneFactor; on infeasibility returns MatchingFailure
    with a Hall-violator witness.

    Deterministic given the candidate order: adjacency is scanned sorted,
    free vertices in label order.
    """
    n = cands.n
    adj = cands.bipartite_adjacency()
    INF = n + 1
    match_left = [-1] * n
    match_right = [-1] * n
    dist = [INF] * n

    from collections import deque

    def bfs() -> bool:
        queue = deque()
        for u in range(n):
            if match_left[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                u2 = match_right[w]
                if u2 == -1:
                    found = True
                elif dist[u2] == INF:
                    dist[u2] = dist[u] + 1
                    queue.append(u2)
        return found

    def dfs(u) -> bool:
        for w in adj[u]:
            u2 = match_right[w]
            if u2 == -1 or (dist[u2] == dist[u] + 1 and dfs(u2)):
                match_left[u] = w
                match_right[w] = u
                return True
        dist[u] = INF
        return False

    matched = 0
    while bfs():
        for u in range(n):
            if match_left[u] == -1 and dfs(u):
                matched += 1
    if matched == n:
        return OneFactor(match_left)

    # Hall violator: out-copies reachable from any free one by
    # alternating (non-matching, matching) steps.
    reach = [False] * n
    queue = deque(u for u in range(n) if match_left[u] == -1)
    for u in queue:
        reach[u] = True
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            u2 = match_right[w]
            if u2 != -1 and not reach[u2]:
                reach[u2] = True
                queue.append(u2)
    witness = [u for u in range(n) if reach[u]]
    return MatchingFailure(witness=witness)


# ---------------------------------------------------------------------------
# factor file: "v phi(v)" per line, 1-based; cycles appended as comments


def factor_to_text(factor: OneFactor) -> str:
    lines = [f"{v + 1} {w + 1}" for v, w in factor.arcs()]
    for cyc in factor.cycles():
        lines.append("# cycle: " + " ".join(str(v + 1) for v in cyc))
    return "\n".join(lines) + "\n"


def write_factor(factor: OneFactor, path) -> None:
    with open(path, "w") as fh:
        fh.write(factor_to_text(factor))


def read_factor(path) -> OneFactor:
    pairs = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            v, w = line.split()
            pairs[int(v) - 1] = int(w) - 1
    if sorted(pairs) != list(range(len(pairs))):
        raise InvalidInput("factor file does not cover 1..n")
    return OneFactor([pairs[v] for v in range(len(pairs))])
