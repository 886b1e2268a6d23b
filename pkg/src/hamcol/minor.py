"""Hiding low-growth vertices by threading them into contraction paths.

Every flagged vertex is made interior to a directed path whose endpoints
still have a free out-side (path end) or in-side (path start); the paths
are then contracted to single vertices and arcs incompatible with the
surviving endpoint sets are deleted.  A minor arc (u, v) exists exactly
when the original graph has the arc end(u) -> start(v), which is what
makes lifting a Hamilton cycle of the minor back to the original color
class purely mechanical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coloring import ColorClass
from .errors import InvalidInput


@dataclass
class HideBadFailure:
    blocker: int  # vertex whose turn could not be completed
    reason: str

    ok = False


@dataclass
class ContractionMap:
    """Result of a successful threading run.

    ``paths[i]`` is the ordered original-vertex path of minor vertex i,
    from its in-side endpoint (start) to its out-side endpoint (end);
    singletons have length 1.  Minor ids are assigned by ascending start
    label.  Minor arcs carry the reveal index of their originating arc.
    """

    n: int
    paths: list[list[int]]
    minor_of: np.ndarray  # original vertex -> minor id
    starts: np.ndarray  # minor id -> original start vertex (in-side)
    ends: np.ndarray  # minor id -> original end vertex (out-side)
    contr_arcs: list[tuple[int, int]]
    removed_arcs: list[tuple[int, int]]
    minor_tails: np.ndarray
    minor_heads: np.ndarray
    minor_reveal: np.ndarray
    _arc_set: set | None = field(default=None, repr=False, compare=False)

    ok = True

    @property
    def n_minor(self) -> int:
        return len(self.paths)

    @property
    def arc_set(self) -> set:
        if self._arc_set is None:
            self._arc_set = set(zip(self.minor_tails.tolist(), self.minor_heads.tolist()))
        return self._arc_set

    def is_identity(self) -> bool:
        return self.n_minor == self.n and all(len(p) == 1 for p in self.paths)


def hide_bad(dc: ColorClass, bad: np.ndarray, small: np.ndarray):
    """Thread every ``bad`` vertex into a contraction path of ``dc``.

    ``bad``/``small`` are boolean masks; vertices in both are processed
    first, in label order, with a full two-sided thread.  Returns a
    ContractionMap, or HideBadFailure naming the vertex whose turn
    starved (or whose thread would have corrupted the path structure,
    which finite instances can produce).
    """
    n = dc.n
    in_adj = dc.in_adj
    out_adj = dc.out_adj
    v_plus = np.ones(n, dtype=bool)  # may still gain an out-arc
    v_minus = np.ones(n, dtype=bool)  # may still gain an in-arc
    succ = np.full(n, -1, dtype=np.int64)
    pred = np.full(n, -1, dtype=np.int64)

    def add_arc(x, y, z):
        # x -> y joins x's chain end to y's chain start; closing a cycle
        # would leave a contraction with no usable endpoints.
        if succ[x] != -1 or pred[y] != -1:
            return HideBadFailure(z, "contraction path collision")
        w = x
        while pred[w] != -1:
            w = pred[w]
        if w == y:
            return HideBadFailure(z, "contraction cycle")
        succ[x] = y
        pred[y] = x
        v_plus[x] = False
        v_minus[y] = False
        return None

    def min_in_neighbor(z, exclude=-1):
        for x in in_adj.get(z, ()):
            if v_plus[x] and x != exclude:
                return x
        return None

    def min_out_neighbor(z, exclude=-1):
        for y in out_adj.get(z, ()):
            if v_minus[y] and y != exclude:
                return y
        return None

    prio = sorted(np.flatnonzero(bad & small).tolist())
    rest = sorted(np.flatnonzero(bad & ~small).tolist())

    for z in prio:
        fail = _thread_both(z, min_in_neighbor, min_out_neighbor, add_arc)
        if fail is not None:
            return fail
    for z in rest:
        if not v_plus[z]:
            vj = min_in_neighbor(z)
            if vj is None:
                return HideBadFailure(z, "no admissible in-neighbor")
            fail = add_arc(vj, z, z)
        elif not v_minus[z]:
            vk = min_out_neighbor(z)
            if vk is None:
                return HideBadFailure(z, "no admissible out-neighbor")
            fail = add_arc(z, vk, z)
        else:
            fail = _thread_both(z, min_in_neighbor, min_out_neighbor, add_arc)
        if fail is not None:
            return fail

    # assemble contraction paths (chain starts have no predecessor)
    order = [v for v in range(n) if pred[v] == -1]
    paths = []
    for s in order:
        path = [s]
        w = s
        while succ[w] != -1:
            w = int(succ[w])
            path.append(w)
        paths.append(path)
    minor_of = np.full(n, -1, dtype=np.int64)
    for i, path in enumerate(paths):
        for v in path:
            minor_of[v] = i
    starts = np.array([p[0] for p in paths], dtype=np.int64)
    ends = np.array([p[-1] for p in paths], dtype=np.int64)

    contr_set = {(int(x), int(succ[x])) for x in np.flatnonzero(succ != -1)}
    contr_arcs = sorted(contr_set)

    minor_tails, minor_heads, minor_reveal, removed = [], [], [], []
    for x, y, r in zip(dc.tails.tolist(), dc.heads.tolist(), dc.reveal.tolist()):
        if (x, y) in contr_set:
            continue
        if v_plus[x] and v_minus[y] and minor_of[x] != minor_of[y]:
            minor_tails.append(minor_of[x])
            minor_heads.append(minor_of[y])
            minor_reveal.append(r)
        else:
            removed.append((x, y))

    return ContractionMap(
        n=n,
        paths=paths,
        minor_of=minor_of,
        starts=starts,
        ends=ends,
        contr_arcs=contr_arcs,
        removed_arcs=removed,
        minor_tails=np.array(minor_tails, dtype=np.int64),
        minor_heads=np.array(minor_heads, dtype=np.int64),
        minor_reveal=np.array(minor_reveal, dtype=np.int64),
    )


def _thread_both(z, min_in_neighbor, min_out_neighbor, add_arc):
    vj = min_in_neighbor(z)
    if vj is None:
        return HideBadFailure(z, "no admissible in-neighbor")
    vk = min_out_neighbor(z, exclude=vj)
    if vk is None:
        return HideBadFailure(z, "no admissible out-neighbor")
    fail = add_arc(vj, z, z)
    if fail is not None:
        return fail
    return add_arc(z, vk, z)


def lift_hamilton_cycle(cmap: ContractionMap, minor_cycle) -> list[int]:
    """Expand a Hamilton cycle of the minor to one of the color class.

    Each minor vertex is replaced by its contraction path (start to end);
    consecutive minor arcs become end->next-start arcs, which exist in
    the original graph by the minor's arc criterion.
    """
    cyc = [int(v) for v in minor_cycle]
    nc = cmap.n_minor
    if len(cyc) != nc or len(set(cyc)) != nc or not all(0 <= v < nc for v in cyc):
        raise InvalidInput("not a Hamilton cycle of the minor (vertex cover)")
    arc_set = cmap.arc_set
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if (a, b) not in arc_set:
            raise InvalidInput(f"minor arc ({a}, {b}) missing")
    lifted: list[int] = []
    for u in cyc:
        lifted.extend(cmap.paths[u])
    return lifted


# ---------------------------------------------------------------------------
# serialization: one line per minor vertex, "id : start .. end", 1-based


def contraction_to_text(cmap: ContractionMap) -> str:
    lines = []
    for i, path in enumerate(cmap.paths):
        lines.append(f"{i + 1} : " + " ".join(str(v + 1) for v in path))
    return "\n".join(lines) + "\n"


def write_contraction(cmap: ContractionMap, path) -> None:
    with open(path, "w") as fh:
        fh.write(contraction_to_text(cmap))


def read_contraction_paths(path) -> list[list[int]]:
    paths = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            _, verts = line.split(":")
            paths.append([int(tok) - 1 for tok in verts.split()])
    return paths
