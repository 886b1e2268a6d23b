"""Independent validators - the trust anchor for all tests and reports.

Everything here re-derives its answer from raw arc and color tables; no
validator consults algorithm-internal state.  Failures report the first
violated predicate with a smallest-index witness so diffs are stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coloring import ColoringResult


@dataclass(frozen=True)
class Verdict:
    ok: bool
    predicate: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {
            "pass": self.ok,
            "predicate": self.predicate,
            "witness": self.witness,
        }


PASS = Verdict(True)


def is_hamilton_cycle(cycle, n: int, arc_oracle) -> Verdict:
    """Length n, all vertices distinct and in range, every consecutive arc
    (including the wraparound) present per the oracle.  The oracle is a
    callable (u, v) -> bool or a container of (u, v) pairs."""
    has = arc_oracle if callable(arc_oracle) else lambda u, v: (u, v) in arc_oracle
    cyc = [int(v) for v in cycle]
    if len(cyc) != n:
        return Verdict(False, "length", {"expected": n, "got": len(cyc)})
    seen = set()
    for i, v in enumerate(cyc):
        if not 0 <= v < n:
            return Verdict(False, "vertex-out-of-range", {"index": i, "vertex": v})
        if v in seen:
            return Verdict(False, "duplicate-vertex", {"index": i, "vertex": v})
        seen.add(v)
    for i in range(n):
        u, v = cyc[i], cyc[(i + 1) % n]
        if not has(u, v):
            return Verdict(False, "missing-arc", {"index": i, "arc": (u, v)})
    return PASS


def verify_monochromatic(cycle, result: ColoringResult, c: int) -> Verdict:
    """Every cycle arc was revealed by tau and carries color c."""
    table = result.arc_table()
    cyc = [int(v) for v in cycle]
    n = len(cyc)
    for i in range(n):
        arc = (cyc[i], cyc[(i + 1) % n])
        hit = table.get(arc)
        if hit is None:
            return Verdict(False, "arc-not-revealed", {"index": i, "arc": arc})
        if hit[1] != c:
            return Verdict(
                False, "wrong-color", {"index": i, "arc": arc, "color": hit[1], "expected": c}
            )
    return PASS


def verify_rainbow(cycle, colors: dict) -> Verdict:
    """No two cycle arcs share a color; ``colors`` maps oriented arcs to
    their relabeled color."""
    cyc = [int(v) for v in cycle]
    n = len(cyc)
    seen: dict[int, int] = {}
    for i in range(n):
        arc = (cyc[i], cyc[(i + 1) % n])
        col = colors.get(arc)
        if col is None:
            return Verdict(False, "arc-without-color", {"index": i, "arc": arc})
        col = int(col)
        if col in seen:
            return Verdict(
                False, "repeated-color", {"color": col, "indices": (seen[col], i)}
            )
        seen[col] = i
    return PASS


def rainbow_color_table(result: ColoringResult, relabel: np.ndarray) -> dict:
    """Oriented arc -> relabeled color, for feeding verify_rainbow."""
    t, h = result.oriented_arcs()
    return {
        (int(u), int(v)): int(c)
        for u, v, c in zip(t.tolist(), h.tolist(), relabel.tolist())
    }


def verify_color_degree(result: ColoringResult) -> Verdict:
    """Every vertex has every color on both its out- and in-side at tau."""
    out, in_ = result.color_degree_tables()
    for table, direction in ((out, "out"), (in_, "in")):
        bad = np.argwhere(table < 1)
        if len(bad):
            v, c = bad[0]
            return Verdict(
                False,
                "missing-color-degree",
                {"vertex": int(v), "color": int(c) + 1, "direction": direction},
            )
    return PASS


def verify_factor(factor, allowed_arcs) -> Verdict:
    """Bijectivity, no fixed points, and membership of every (v, phi(v))
    arc in the allowed set."""
    succ = np.asarray(factor.succ if hasattr(factor, "succ") else factor, dtype=np.int64)
    n = len(succ)
    if len(np.unique(succ)) != n or succ.min() < 0 or succ.max() >= n:
        return Verdict(False, "not-a-bijection", None)
    fixed = np.flatnonzero(succ == np.arange(n))
    if len(fixed):
        return Verdict(False, "fixed-point", {"vertex": int(fixed[0])})
    allowed = allowed_arcs if callable(allowed_arcs) else lambda u, v: (u, v) in allowed_arcs
    for v in range(n):
        if not allowed(v, int(succ[v])):
            return Verdict(False, "arc-not-allowed", {"arc": (v, int(succ[v]))})
    return PASS


def verify_contraction_equivalence(cmap, original_arcs) -> Verdict:
    """Both directions of the minor arc criterion, all minor pairs:
    (u, v) is a minor arc iff the original graph has end(u) -> start(v)."""
    orig = original_arcs if isinstance(original_arcs, set) else set(original_arcs)
    minor_arcs = cmap.arc_set
    nc = cmap.n_minor
    for u in range(nc):
        eu = int(cmap.ends[u])
        for v in range(nc):
            if u == v:
                continue
            expected = (eu, int(cmap.starts[v])) in orig
            got = (u, v) in minor_arcs
            if expected != got:
                return Verdict(
                    False,
                    "minor-arc-mismatch",
                    {"pair": (u, v), "minor": got, "original": expected},
                )
    return PASS
