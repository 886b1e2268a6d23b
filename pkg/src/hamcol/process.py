"""Seeded random (di)graph processes and hitting-time detection.

A schedule is a uniformly random ordering of all ordered vertex pairs
(directed mode) or unordered pairs (undirected mode), no self-loops, no
repeats.  Pairs are stored as single integer codes and permuted with a
Philox-backed Fisher-Yates shuffle, so schedules for n in the thousands
stay compact; decoding to (tail, head) happens lazily per chunk.

Vertices are 0-based integers in memory and 1-based in text files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidInput, InvalidParameter

CHUNK = 1 << 16

DIRECTED = "directed"
UNDIRECTED = "undirected"


def pair_count(n: int, mode: str) -> int:
    return n * (n - 1) if mode == DIRECTED else n * (n - 1) // 2


def _row_starts(n: int) -> np.ndarray:
    # undirected code layout: row u holds pairs (u, u+1..n-1)
    u = np.arange(n, dtype=np.int64)
    return u * n - (u * (u + 1)) // 2


@dataclass
class ArcSchedule:
    """A reveal order over vertex pairs.

    ``codes[t]`` is the integer code of the pair revealed at time t+1.
    Generated schedules cover every pair exactly once; schedules loaded
    from files or built by tests may be partial prefixes.
    """

    n: int
    mode: str
    codes: np.ndarray
    seed: int | None = None
    _rowstarts: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.codes)

    def is_complete(self) -> bool:
        return len(self.codes) == pair_count(self.n, self.mode)

    def pairs(self, start: int = 0, stop: int | None = None):
        """Decode codes[start:stop] to (tails, heads) int32 arrays.

        Undirected pairs come out with tail < head.
        """
        stop = len(self.codes) if stop is None else stop
        c = self.codes[start:stop].astype(np.int64, copy=False)
        if self.mode == DIRECTED:
            tails = c // (self.n - 1)
            j = c - tails * (self.n - 1)
            heads = np.where(j < tails, j, j + 1)
        else:
            if self._rowstarts is None:
                self._rowstarts = _row_starts(self.n)
            tails = np.searchsorted(self._rowstarts, c, side="right") - 1
            heads = c - self._rowstarts[tails] + tails + 1
        return tails.astype(np.int32), heads.astype(np.int32)

    def iter_chunks(self, upto: int | None = None, chunk: int = CHUNK):
        upto = len(self.codes) if upto is None else upto
        for start in range(0, upto, chunk):
            yield start, self.pairs(start, min(start + chunk, upto))

    @classmethod
    def from_arcs(cls, n: int, mode: str, arcs, seed: int | None = None) -> "ArcSchedule":
        """Build a schedule from explicit (tail, head) pairs (0-based)."""
        if n < 2:
            raise InvalidParameter(f"need n >= 2, got {n}")
        if mode not in (DIRECTED, UNDIRECTED):
            raise InvalidParameter(f"unknown mode {mode!r}")
        codes = np.empty(len(arcs), dtype=np.int64)
        rowstarts = _row_starts(n) if mode == UNDIRECTED else None
        for i, (u, v) in enumerate(arcs):
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise InvalidInput(f"bad pair ({u}, {v}) for n={n}")
            if mode == DIRECTED:
                codes[i] = u * (n - 1) + (v if v < u else v - 1)
            else:
                a, b = (u, v) if u < v else (v, u)
                codes[i] = rowstarts[a] + (b - a - 1)
        if len(np.unique(codes)) != len(codes):
            raise InvalidInput("repeated pair in schedule")
        return cls(n=n, mode=mode, codes=codes, seed=seed)


def generate_schedule(n: int, mode: str, seed: int) -> ArcSchedule:
    """Uniform random reveal order of all pairs (Fisher-Yates over codes)."""
    if n < 2:
        raise InvalidParameter(f"need n >= 2, got {n}")
    if mode not in (DIRECTED, UNDIRECTED):
        raise InvalidParameter(f"unknown mode {mode!r}")
    from .rng import philox_generator

    m = pair_count(n, mode)
    gen = philox_generator(seed)
    codes = gen.permutation(m)
    if m < 2**31:
        codes = codes.astype(np.int32)
    return ArcSchedule(n=n, mode=mode, codes=codes, seed=int(seed))


def hitting_time(schedule: ArcSchedule, q: int) -> int:
    """Smallest t such that the length-t prefix has min in/out degree >= q
    (directed) or min total degree >= 2q (undirected)."""
    if q < 1:
        raise InvalidParameter(f"need q >= 1, got {q}")
    n = schedule.n
    if schedule.mode == DIRECTED:
        if n <= q:
            raise InvalidParameter(f"min degree {q} unreachable with n={n}")
        deg_out = np.zeros(n, dtype=np.int32)
        deg_in = np.zeros(n, dtype=np.int32)
        deficient = n
        for start, (tails, heads) in schedule.iter_chunks():
            hit, deficient = _backend.hitting_chunk_directed(
                tails, heads, deg_out, deg_in, q, deficient
            )
            if hit >= 0:
                return start + hit + 1
    else:
        if n - 1 < 2 * q:
            raise InvalidParameter(f"min degree {2 * q} unreachable with n={n}")
        deg = np.zeros(n, dtype=np.int32)
        deficient = n
        for start, (us, vs) in schedule.iter_chunks():
            hit, deficient = _backend.hitting_chunk_undirected(us, vs, deg, 2 * q, deficient)
            if hit >= 0:
                return start + hit + 1
    raise InvalidInput("schedule ends before reaching the degree condition")


def prefix_degrees(schedule: ArcSchedule, t: int):
    """Degrees after the first t reveals.

    Directed mode returns (out_degree, in_degree); undirected mode returns
    the total degree array.
    """
    if not 0 <= t <= len(schedule):
        raise InvalidParameter(f"t={t} out of range [0, {len(schedule)}]")
    n = schedule.n
    tails, heads = schedule.pairs(0, t)
    if schedule.mode == DIRECTED:
        out = np.bincount(tails, minlength=n).astype(np.int64)
        in_ = np.bincount(heads, minlength=n).astype(np.int64)
        return out, in_
    return (np.bincount(tails, minlength=n) + np.bincount(heads, minlength=n)).astype(np.int64)


@dataclass(frozen=True)
class ProcessParams:
    """Run parameters.

    ``alpha`` sets the phase marks m_i = i * ceil(alpha * n * ln n); the
    three early windows feed the low-growth vertex set.  ``eps_frac``
    scales the window threshold (eps_frac * ln n), ``small_frac`` the
    final-degree threshold for priority handling during contraction.
    ``k`` is the per-vertex candidate-arc budget of the factor stage.
    """

    q: int = 1
    alpha: float = 0.05
    eps_frac: float = 0.02
    small_frac: float = 0.01
    k: int = 6
    rotation_rounds_override: int | None = None
    max_paths: int | None = None

    def __post_init__(self):
        if self.q < 1:
            raise InvalidParameter(f"need q >= 1, got {self.q}")
        if not 0 < self.alpha < 1 / 3:
            raise InvalidParameter(f"need 0 < alpha < 1/3, got {self.alpha}")
        if self.eps_frac <= 0:
            raise InvalidParameter(f"need eps_frac > 0, got {self.eps_frac}")
        if self.k < 1:
            raise InvalidParameter(f"need k >= 1, got {self.k}")

    def phase_marks(self, n: int) -> tuple[int, int, int]:
        import math

        m1 = math.ceil(self.alpha * n * math.log(n))
        if 3 * m1 >= n * (n - 1):
            raise InvalidParameter(f"phase marks exceed the pair count for n={n}")
        return m1, 2 * m1, 3 * m1

    def validate_for(self, n: int) -> None:
        self.phase_marks(n)
        if self.max_paths is not None and self.max_paths < n:
            raise InvalidParameter(f"need max_paths >= n, got {self.max_paths}")


# ---------------------------------------------------------------------------
# text format: header "n q mode seed", then one pair per line, 1-based


def write_schedule(schedule: ArcSchedule, q: int, path) -> None:
    with open(path, "w") as fh:
        seed = schedule.seed if schedule.seed is not None else 0
        fh.write(f"{schedule.n} {q} {schedule.mode} {seed}\n")
        for _, (tails, heads) in schedule.iter_chunks():
            for u, v in zip(tails.tolist(), heads.tolist()):
                fh.write(f"{u + 1} {v + 1}\n")


def read_schedule(path) -> tuple[ArcSchedule, int]:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise InvalidInput(f"bad schedule header in {path}")
        n, q, mode, seed = int(header[0]), int(header[1]), header[2], int(header[3])
        arcs = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            u, v = line.split()
            arcs.append((int(u) - 1, int(v) - 1))
    return ArcSchedule.from_arcs(n, mode, arcs, seed=seed), q
