"""Online edge coloring of a revealed schedule.

The directed run assigns each arriving arc one of q colors, irrevocably,
in four regimes: an initial greedy stretch, two cyclic balancing
stretches (out-side then in-side) for saturated vertices, and a late
stretch that balances low-growth ("bad") vertices and records the fully
random remainder into the pool ``eprime``.  The undirected run
additionally orients every edge.  Colors are 1-based.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidInput, InvalidParameter
from .process import DIRECTED, UNDIRECTED, ArcSchedule, ProcessParams, hitting_time
from .rng import SplitMix64


class PhaseDegenerateWarning(UserWarning):
    """tau fell inside the phase windows; run colored greedily throughout."""


# ---------------------------------------------------------------------------
# incremental per-vertex state (object layer; bulk runs go through kernels)


class ColorState:
    """Per-vertex, per-color in/out counters plus saturation tracking.

    A vertex is out-full when every color appears on at least one of its
    out-arcs; ``missing_out`` lists the colors still absent (1-based).
    Single-owner during a run; not thread-safe.
    """

    def __init__(self, n: int, q: int, mode: str = DIRECTED):
        self.n = n
        self.q = q
        self.mode = mode
        self.out_by_color = np.zeros((n, q), dtype=np.int32)
        self.in_by_color = np.zeros((n, q), dtype=np.int32)
        self.out_degree = np.zeros(n, dtype=np.int64)
        self.in_degree = np.zeros(n, dtype=np.int64)
        self.c_plus = np.ones(n, dtype=np.int64)
        self.c_minus = np.ones(n, dtype=np.int64)
        self.t = 0

    def missing_out(self, v: int) -> list[int]:
        return [c + 1 for c in range(self.q) if self.out_by_color[v, c] == 0]

    def missing_in(self, v: int) -> list[int]:
        return [c + 1 for c in range(self.q) if self.in_by_color[v, c] == 0]

    def is_full_out(self, v: int) -> bool:
        return not self.missing_out(v)

    def is_full_in(self, v: int) -> bool:
        return not self.missing_in(v)

    def is_full(self, v: int) -> bool:
        # joint saturation used by the undirected run
        return self.is_full_out(v) and self.is_full_in(v)

    def apply(self, tail: int, head: int, color: int) -> None:
        c = color - 1
        self.out_by_color[tail, c] += 1
        self.in_by_color[head, c] += 1
        self.out_degree[tail] += 1
        self.in_degree[head] += 1
        self.t += 1


def color_greedy(state: ColorState, u: int, v: int, rng: SplitMix64) -> int:
    """Color arc (u, v): uniform over the missing-color union of u's
    out-side and v's in-side while one of them is unsaturated, else
    uniform over [q].  Updates the state."""
    missing = sorted(set(state.missing_out(u)) | set(state.missing_in(v)))
    if missing:
        color = missing[rng.below(len(missing))]
    else:
        color = rng.below(state.q) + 1
    state.apply(u, v, color)
    return color


def orient_color_greedy(state: ColorState, u: int, v: int, rng: SplitMix64):
    """Orient and color edge {u, v}: uniform over the (orientation, color)
    pairs that would fill an empty slot of either endpoint while one
    endpoint is unsaturated, else both uniform.  Returns (tail, head,
    color) and updates the state."""
    q = state.q
    if not (state.is_full(u) and state.is_full(v)):
        pairs = []
        for c in range(q):
            if state.out_by_color[u, c] == 0 or state.in_by_color[v, c] == 0:
                pairs.append(c)
        for c in range(q):
            if state.in_by_color[u, c] == 0 or state.out_by_color[v, c] == 0:
                pairs.append(q + c)
        p = pairs[rng.below(len(pairs))]
    else:
        p = rng.below(2) * q + rng.below(q)
    tail, head, color = (u, v, p + 1) if p < q else (v, u, p - q + 1)
    state.apply(tail, head, color)
    return tail, head, color


# ---------------------------------------------------------------------------
# results


@dataclass
class ColoringResult:
    """Everything the downstream stages consume, all aligned to reveal order."""

    schedule: ArcSchedule | None
    params: ProcessParams | None
    n: int
    q: int
    mode: str
    tau: int
    m1: int
    m2: int
    m3: int
    tails: np.ndarray  # revealed pairs; undirected rows have tail < head
    heads: np.ndarray
    colors: np.ndarray  # 1..q
    orient: np.ndarray | None  # +1 = as-listed, -1 = reversed (undirected only)
    bad: np.ndarray  # bool mask over vertices
    small: np.ndarray  # bool mask over vertices
    eprime: np.ndarray  # reveal indices of the late fully random pool
    phase_degenerate: bool = False
    _oriented: tuple | None = field(default=None, repr=False, compare=False)

    def oriented_arcs(self):
        """(tails, heads) with orientations applied."""
        if self._oriented is None:
            if self.orient is None:
                self._oriented = (self.tails, self.heads)
            else:
                flip = self.orient < 0
                t = np.where(flip, self.heads, self.tails)
                h = np.where(flip, self.tails, self.heads)
                self._oriented = (t.astype(np.int32), h.astype(np.int32))
        return self._oriented

    def color_degree_tables(self):
        """Per-vertex per-color out/in counts at tau, recomputed from arcs."""
        t, h = self.oriented_arcs()
        out = np.zeros((self.n, self.q), dtype=np.int64)
        in_ = np.zeros((self.n, self.q), dtype=np.int64)
        np.add.at(out, (t, self.colors - 1), 1)
        np.add.at(in_, (h, self.colors - 1), 1)
        return out, in_

    @property
    def success(self) -> bool:
        """True when every vertex has every color on both sides at tau."""
        out, in_ = self.color_degree_tables()
        return bool((out >= 1).all() and (in_ >= 1).all())

    def arc_table(self) -> dict:
        """(tail, head) -> (reveal index, color) over oriented arcs."""
        t, h = self.oriented_arcs()
        return {
            (int(u), int(v)): (i, int(c))
            for i, (u, v, c) in enumerate(zip(t.tolist(), h.tolist(), self.colors.tolist()))
        }


@dataclass
class ColorClass:
    """Arcs of one color, oriented, with their reveal indices."""

    n: int
    color: int
    tails: np.ndarray
    heads: np.ndarray
    reveal: np.ndarray
    _arc_set: set | None = field(default=None, repr=False, compare=False)
    _out_adj: dict | None = field(default=None, repr=False, compare=False)
    _in_adj: dict | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.tails)

    @property
    def arc_set(self) -> set:
        if self._arc_set is None:
            self._arc_set = set(zip(self.tails.tolist(), self.heads.tolist()))
        return self._arc_set

    def _adj(self, out: bool) -> dict:
        adj: dict[int, list[int]] = {}
        a, b = (self.tails, self.heads) if out else (self.heads, self.tails)
        for x, y in zip(a.tolist(), b.tolist()):
            adj.setdefault(x, []).append(y)
        for row in adj.values():
            row.sort()
        return adj

    @property
    def out_adj(self) -> dict:
        if self._out_adj is None:
            self._out_adj = self._adj(True)
        return self._out_adj

    @property
    def in_adj(self) -> dict:
        if self._in_adj is None:
            self._in_adj = self._adj(False)
        return self._in_adj

    def min_degrees(self) -> tuple[int, int]:
        out = np.bincount(self.tails, minlength=self.n)
        in_ = np.bincount(self.heads, minlength=self.n)
        return int(out.min()), int(in_.min())


# ---------------------------------------------------------------------------
# runs


def run_col(
    schedule: ArcSchedule,
    params: ProcessParams,
    rng: SplitMix64,
    tau: int | None = None,
) -> ColoringResult:
    """Color the directed schedule online up to the hitting time.

    ``tau`` overrides the hitting time (replay/truncation support).  The
    rng is consumed and left at its post-run state.
    """
    if schedule.mode != DIRECTED:
        raise InvalidParameter("run_col needs a directed schedule")
    return _run(schedule, params, rng, tau, orient=False)


def run_col_orient(
    schedule: ArcSchedule,
    params: ProcessParams,
    rng: SplitMix64,
    tau: int | None = None,
) -> ColoringResult:
    """Orient and color the undirected schedule online up to the first
    time minimum degree reaches 2q."""
    if schedule.mode != UNDIRECTED:
        raise InvalidParameter("run_col_orient needs an undirected schedule")
    return _run(schedule, params, rng, tau, orient=True)


def _run(schedule, params, rng, tau, orient):
    n = schedule.n
    q = params.q
    m1, m2, m3 = params.phase_marks(n)
    if tau is None:
        tau = hitting_time(schedule, q)
    degenerate = tau <= m3
    if degenerate:
        warnings.warn(
            f"tau={tau} <= m3={m3}: phases degenerate, coloring greedily throughout",
            PhaseDegenerateWarning,
            stacklevel=3,
        )
    eps_threshold = params.eps_frac * math.log(n)
    tails, heads = schedule.pairs(0, tau)
    if orient:
        colors, orient_arr, eprime_mask, bad, state = _backend.col_orient_run(
            tails, heads, n, q, m1, m2, m3, eps_threshold, rng.state, degenerate
        )
    else:
        colors, eprime_mask, bad, state = _backend.col_run(
            tails, heads, n, q, m1, m2, m3, eps_threshold, rng.state, degenerate
        )
        orient_arr = None
    rng.state = int(state)

    result = ColoringResult(
        schedule=schedule,
        params=params,
        n=n,
        q=q,
        mode=schedule.mode,
        tau=tau,
        m1=m1,
        m2=m2,
        m3=m3,
        tails=tails,
        heads=heads,
        colors=colors,
        orient=orient_arr,
        bad=bad.astype(bool),
        small=np.zeros(n, dtype=bool),
        eprime=np.flatnonzero(eprime_mask).astype(np.int64),
        phase_degenerate=degenerate,
    )
    result.small = compute_small(result)
    return result


def compute_small(result: ColoringResult, small_frac: float | None = None) -> np.ndarray:
    """Vertices whose final oriented out- or in-degree is at most
    small_frac * ln n."""
    if small_frac is None:
        small_frac = result.params.small_frac if result.params else 0.01
    threshold = small_frac * math.log(result.n)
    t, h = result.oriented_arcs()
    out = np.bincount(t, minlength=result.n)
    in_ = np.bincount(h, minlength=result.n)
    return (out <= threshold) | (in_ <= threshold)


def color_class(result: ColoringResult, c: int) -> ColorClass:
    """The oriented arcs of color c among the revealed prefix."""
    if not 1 <= c <= result.q:
        raise InvalidParameter(f"color {c} outside 1..{result.q}")
    t, h = result.oriented_arcs()
    mask = result.colors == c
    return ColorClass(
        n=result.n,
        color=c,
        tails=t[mask],
        heads=h[mask],
        reveal=np.flatnonzero(mask).astype(np.int64),
    )


def rainbow_relabel(result: ColoringResult) -> np.ndarray:
    """Per-edge color in [n]: an edge oriented out of vertex i (1-based)
    gets color i.  A directed cycle then has pairwise distinct colors."""
    if result.orient is None:
        raise InvalidInput("rainbow relabeling needs an oriented (undirected-mode) result")
    t, _ = result.oriented_arcs()
    return (t.astype(np.int64) + 1).astype(np.int32)


# ---------------------------------------------------------------------------
# coloring file format


def coloring_to_bytes(result: ColoringResult) -> bytes:
    lines = [f"{result.n} {result.q} {result.tau} {result.m1} {result.m2} {result.m3}"]
    orient = result.orient
    for i in range(result.tau):
        u = int(result.tails[i]) + 1
        v = int(result.heads[i]) + 1
        c = int(result.colors[i])
        if orient is None:
            lines.append(f"{u} {v} {c}")
        else:
            lines.append(f"{u} {v} {c} {'+' if orient[i] > 0 else '-'}")
    lines.append("#BAD " + " ".join(str(v + 1) for v in np.flatnonzero(result.bad)))
    lines.append("#SMALL " + " ".join(str(v + 1) for v in np.flatnonzero(result.small)))
    return ("\n".join(lines) + "\n").encode()


def write_coloring(result: ColoringResult, path) -> None:
    with open(path, "wb") as fh:
        fh.write(coloring_to_bytes(result))


def read_coloring(path) -> ColoringResult:
    """Rebuild a result from its file form (schedule/params refs and the
    pool indices are not part of the format)."""
    with open(path) as fh:
        header = fh.readline().split()
        n, q, tau, m1, m2, m3 = (int(x) for x in header)
        tails = np.zeros(tau, dtype=np.int32)
        heads = np.zeros(tau, dtype=np.int32)
        colors = np.zeros(tau, dtype=np.int32)
        orient = None
        bad = np.zeros(n, dtype=bool)
        small = np.zeros(n, dtype=bool)
        i = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#BAD"):
                for tok in line.split()[1:]:
                    bad[int(tok) - 1] = True
                continue
            if line.startswith("#SMALL"):
                for tok in line.split()[1:]:
                    small[int(tok) - 1] = True
                continue
            parts = line.split()
            tails[i] = int(parts[0]) - 1
            heads[i] = int(parts[1]) - 1
            colors[i] = int(parts[2])
            if len(parts) == 4:
                if orient is None:
                    orient = np.zeros(tau, dtype=np.int8)
                orient[i] = 1 if parts[3] == "+" else -1
            i += 1
    if i != tau:
        raise InvalidInput(f"expected {tau} arcs, found {i}")
    return ColoringResult(
        schedule=None,
        params=None,
        n=n,
        q=q,
        mode=UNDIRECTED if orient is not None else DIRECTED,
        tau=tau,
        m1=m1,
        m2=m2,
        m3=m3,
        tails=tails,
        heads=heads,
        colors=colors,
        orient=orient,
        bad=bad,
        small=small,
        eprime=np.zeros(0, dtype=np.int64),
    )
