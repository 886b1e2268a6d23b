"""Pure-Python kernels.

These are the reference implementations of the hot loops; the compiled
twins in ``_speedups.pyx`` must reproduce them result-for-result,
including the order and number of splitmix64 draws.  Keep both files in
sync -- ``tests/test_backends.py`` enforces equality on random inputs.
"""

from __future__ import annotations

import numpy as np

from .frontier import PathFrontier
from .rng import MASK64, SplitMix64

BACKEND_NAME = "python"


# ---------------------------------------------------------------------------
# hitting-time scan


def hitting_chunk_directed(tails, heads, deg_out, deg_in, q, deficient):
    """Scan one decoded chunk; returns (offset_of_hit or -1, deficient).

    ``deficient`` counts vertices still missing out- or in-degree q; the
    numpy degree arrays are updated in place up to and including the hit.
    """
    do = deg_out.tolist()
    di = deg_in.tolist()
    t_list = tails.tolist()
    h_list = heads.tolist()
    hit = -1
    for i in range(len(t_list)):
        u = t_list[i]
        v = h_list[i]
        do[u] += 1
        if do[u] == q and di[u] >= q:
            deficient -= 1
        di[v] += 1
        if di[v] == q and do[v] >= q:
            deficient -= 1
        if deficient == 0:
            hit = i
            break
    deg_out[:] = do
    deg_in[:] = di
    return hit, deficient


def hitting_chunk_undirected(us, vs, deg, threshold, deficient):
    d = deg.tolist()
    u_list = us.tolist()
    v_list = vs.tolist()
    hit = -1
    for i in range(len(u_list)):
        for w in (u_list[i], v_list[i]):
            d[w] += 1
            if d[w] == threshold:
                deficient -= 1
        if deficient == 0:
            hit = i
            break
    deg[:] = d
    return hit, deficient


# ---------------------------------------------------------------------------
# online coloring runs


def col_run(tails, heads, n, q, m1, m2, m3, eps_threshold, seed, degenerate):
    """Color the directed prefix online; returns (colors, eprime, bad, rng_state).

    colors are 1-based; ``eprime`` flags arcs recorded into the late fully
    random pool; ``bad`` flags vertices whose windowed degree growth fell
    at or below ``eps_threshold``.
    """
    tau = len(tails)
    rng = SplitMix64(seed)
    outc = [0] * (n * q)
    inc_ = [0] * (n * q)
    miss_out = [q] * n
    miss_in = [q] * n
    deg_out = [0] * n
    deg_in = [0] * n
    c_plus = [1] * n
    c_minus = [1] * n
    bad = [0] * n
    colors = np.zeros(tau, dtype=np.int32)
    eprime = np.zeros(tau, dtype=np.uint8)
    snap1 = snap2 = None

    t_list = tails.tolist()
    h_list = heads.tolist()
    for t1 in range(1, tau + 1):
        u = t_list[t1 - 1]
        v = h_list[t1 - 1]
        guard = miss_out[u] > 0 or miss_in[v] > 0
        if degenerate or t1 <= m1 or guard:
            c = _greedy_draw(rng, outc, inc_, u, v, q, guard)
            if (not degenerate) and t1 > m3 and not guard and not (bad[u] or bad[v]):
                eprime[t1 - 1] = 1
        elif t1 <= m2:
            c = (c_plus[u] - 1) % q
            c_plus[u] += 1
        elif t1 <= m3:
            c = (c_minus[v] - 1) % q
            c_minus[v] += 1
        elif bad[u] or bad[v]:
            c = _badmin_draw(rng, outc, inc_, u, v, q, bad)
        else:
            c = _greedy_draw(rng, outc, inc_, u, v, q, False)
            eprime[t1 - 1] = 1

        colors[t1 - 1] = c + 1
        if outc[u * q + c] == 0:
            miss_out[u] -= 1
        outc[u * q + c] += 1
        deg_out[u] += 1
        if inc_[v * q + c] == 0:
            miss_in[v] -= 1
        inc_[v * q + c] += 1
        deg_in[v] += 1

        if not degenerate:
            if t1 == m1:
                snap1 = (deg_out.copy(), deg_in.copy())
            elif t1 == m2:
                snap2 = (deg_out.copy(), deg_in.copy())
            elif t1 == m3:
                for w in range(n):
                    if (
                        snap1[0][w] <= eps_threshold
                        or snap1[1][w] <= eps_threshold
                        or snap2[0][w] - snap1[0][w] <= eps_threshold
                        or deg_in[w] - snap2[1][w] <= eps_threshold
                    ):
                        bad[w] = 1

    return colors, eprime, np.array(bad, dtype=np.uint8), rng.state


def _greedy_draw(rng, outc, inc_, u, v, q, guard):
    if guard:
        union = [c for c in range(q) if outc[u * q + c] == 0 or inc_[v * q + c] == 0]
        return union[rng.below(len(union))]
    return rng.below(q)


def _badmin_draw(rng, outc, inc_, u, v, q, bad):
    best = None
    mins = []
    for c in range(q):
        score = outc[u * q + c] * bad[u] + inc_[v * q + c] * bad[v]
        if best is None or score < best:
            best = score
            mins = [c]
        elif score == best:
            mins.append(c)
    if len(mins) == 1:
        return mins[0]
    return mins[rng.below(len(mins))]


def col_orient_run(us, vs, n, q, m1, m2, m3, eps_threshold, seed, degenerate):
    """Orient and color the undirected prefix online.

    Returns (colors 1-based, orient int8 (+1 = as-listed u->v), eprime,
    bad, rng_state).  Decision branches mirror ``col_run`` with joint
    (orientation, color) draws.
    """
    tau = len(us)
    rng = SplitMix64(seed)
    outc = [0] * (n * q)
    inc_ = [0] * (n * q)
    miss = [2 * q] * n
    deg_out = [0] * n
    deg_in = [0] * n
    c_plus = [1] * n
    c_minus = [1] * n
    bad = [0] * n
    colors = np.zeros(tau, dtype=np.int32)
    orient = np.zeros(tau, dtype=np.int8)
    eprime = np.zeros(tau, dtype=np.uint8)
    snap1 = snap2 = None

    u_list = us.tolist()
    v_list = vs.tolist()
    for t1 in range(1, tau + 1):
        u = u_list[t1 - 1]
        v = v_list[t1 - 1]
        guard = miss[u] > 0 or miss[v] > 0
        record = False
        if degenerate or t1 <= m1 or guard:
            tail, head, c = _greedy2_draw(rng, outc, inc_, u, v, q, guard)
            record = (not degenerate) and t1 > m3 and not guard and not (bad[u] or bad[v])
        elif t1 <= m2:
            w, other = (u, v) if rng.below(2) == 0 else (v, u)
            tail, head = w, other
            c = (c_plus[w] - 1) % q
            c_plus[w] += 1
        elif t1 <= m3:
            w, other = (u, v) if rng.below(2) == 0 else (v, u)
            tail, head = other, w
            c = (c_minus[w] - 1) % q
            c_minus[w] += 1
        elif bad[u] or bad[v]:
            tail, head, c = _badmin2_draw(rng, outc, inc_, u, v, q, bad)
        else:
            tail, head, c = _greedy2_draw(rng, outc, inc_, u, v, q, False)
            record = True

        colors[t1 - 1] = c + 1
        orient[t1 - 1] = 1 if tail == u else -1
        if record:
            eprime[t1 - 1] = 1
        if outc[tail * q + c] == 0:
            miss[tail] -= 1
        outc[tail * q + c] += 1
        deg_out[tail] += 1
        if inc_[head * q + c] == 0:
            miss[head] -= 1
        inc_[head * q + c] += 1
        deg_in[head] += 1

        if not degenerate:
            if t1 == m1:
                snap1 = (deg_out.copy(), deg_in.copy())
            elif t1 == m2:
                snap2 = (deg_out.copy(), deg_in.copy())
            elif t1 == m3:
                for w in range(n):
                    if (
                        snap1[0][w] <= eps_threshold
                        or snap1[1][w] <= eps_threshold
                        or snap2[0][w] - snap1[0][w] <= eps_threshold
                        or deg_in[w] - snap2[1][w] <= eps_threshold
                    ):
                        bad[w] = 1

    return colors, orient, eprime, np.array(bad, dtype=np.uint8), rng.state


def _greedy2_draw(rng, outc, inc_, u, v, q, guard):
    """Pick (tail, head, color). Pair index p < q encodes u->v with color p,
    p >= q encodes v->u with color p - q."""
    if guard:
        pairs = []
        for c in range(q):
            if outc[u * q + c] == 0 or inc_[v * q + c] == 0:
                pairs.append(c)
        for c in range(q):
            if inc_[u * q + c] == 0 or outc[v * q + c] == 0:
                pairs.append(q + c)
        p = pairs[rng.below(len(pairs))]
    else:
        x = rng.below(2)
        c = rng.below(q)
        p = x * q + c
    if p < q:
        return u, v, p
    return v, u, p - q


def _badmin2_draw(rng, outc, inc_, u, v, q, bad):
    best = None
    mins = []
    for p in range(2 * q):
        c = p % q
        if p < q:
            score = outc[u * q + c] * bad[u] + inc_[v * q + c] * bad[v]
        else:
            score = inc_[u * q + c] * bad[u] + outc[v * q + c] * bad[v]
        if best is None or score < best:
            best = score
            mins = [p]
        elif score == best:
            mins.append(p)
    p = mins[0] if len(mins) == 1 else mins[rng.below(len(mins))]
    if p < q:
        return u, v, p
    return v, u, p - q


# ---------------------------------------------------------------------------
# rotation search


def find_cycle_core(prev_cycle, small_cycle, indptr, adj, n_vertices, rounds, max_paths):
    """Absorb ``small_cycle`` into ``prev_cycle`` using pool arcs.

    The frontier is seeded by every pool arc from the tail of
    ``small_cycle`` into ``prev_cycle``; each round applies every
    two-arc path rearrangement to the paths added in the previous round
    and then tests closure arcs (endpoint -> start).

    Returns (cycle | None, rounds_used, frontier_size, n_seeds, trace)
    where trace lists the frontier size after seeding and after each
    expansion round.
    """
    prev_cycle = list(prev_cycle)
    small_cycle = list(small_cycle)
    adj_rows = [adj[indptr[i] : indptr[i + 1]].tolist() for i in range(n_vertices)]
    arc_set = set()
    for u in range(n_vertices):
        for w in adj_rows[u]:
            arc_set.add(u * n_vertices + w)

    start = small_cycle[0]
    tail = small_cycle[-1]
    gamma = len(prev_cycle)
    frontier = PathFrontier(start, max_paths)

    head_set = set(adj_rows[tail])
    for j in range(gamma):
        if prev_cycle[j] in head_set:
            frontier.add_seed(small_cycle + prev_cycle[j:] + prev_cycle[:j])
    n_seeds = len(frontier)
    trace = [n_seeds]
    if n_seeds == 0:
        return None, 0, 0, 0, trace

    checked = 0

    def closure_scan():
        nonlocal checked
        for i in range(checked, len(frontier)):
            if frontier.endpoint(i) * n_vertices + start in arc_set:
                return frontier.materialize(i)
        checked = len(frontier)
        return None

    cyc = closure_scan()
    if cyc is not None:
        return cyc, 0, len(frontier), n_seeds, trace

    pos = [-1] * n_vertices
    cursor = 0
    rounds_done = 0
    for t in range(1, rounds + 1):
        stop = len(frontier)
        if cursor == stop:
            break
        for idx in range(cursor, stop):
            seq = frontier.materialize(idx)
            for i, w in enumerate(seq):
                pos[w] = i
            end = seq[-1]
            for x in adj_rows[end]:
                k0 = pos[x]
                if k0 < 1:
                    continue
                pred = seq[k0 - 1]
                for y in adj_rows[pred]:
                    l0 = pos[y]
                    if l0 > k0:
                        frontier.add_rotation(idx, k0, l0, seq[l0 - 1])
            for w in seq:
                pos[w] = -1
        cursor = stop
        rounds_done = t
        trace.append(len(frontier))
        cyc = closure_scan()
        if cyc is not None:
            return cyc, t, len(frontier), n_seeds, trace

    return None, rounds_done, len(frontier), n_seeds, trace
