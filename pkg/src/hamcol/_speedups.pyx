# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels.

Twin of ``_kernels_py``: identical results, identical splitmix64 draw
order.  Any change here must be mirrored there (and vice versa);
``tests/test_backends.py`` compares the two on random inputs.
"""

import numpy as np

BACKEND_NAME = "compiled"

ctypedef unsigned long long u64

cdef u64 GOLDEN = <u64>0x9E3779B97F4A7C15
cdef u64 MASK = <u64>0xFFFFFFFFFFFFFFFF


cdef inline u64 _mix(u64 z) nogil:
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline u64 _next(u64* s) nogil:
    s[0] = s[0] + GOLDEN
    return _mix(s[0])


cdef inline u64 _below(u64* s, u64 k) nogil:
    cdef u64 r, x
    if k <= 1:
        return 0
    r = (MASK % k + 1) % k  # 2^64 mod k
    while True:
        x = _next(s)
        if r == 0 or x <= MASK - r:
            return x % k


# ---------------------------------------------------------------------------
# hitting-time scan


def hitting_chunk_directed(int[:] tails, int[:] heads, deg_out_arr, deg_in_arr,
                           int q, long deficient):
    cdef int[:] deg_out = deg_out_arr
    cdef int[:] deg_in = deg_in_arr
    cdef long i, m = tails.shape[0]
    cdef int u, v
    cdef long hit = -1
    for i in range(m):
        u = tails[i]
        v = heads[i]
        deg_out[u] += 1
        if deg_out[u] == q and deg_in[u] >= q:
            deficient -= 1
        deg_in[v] += 1
        if deg_in[v] == q and deg_out[v] >= q:
            deficient -= 1
        if deficient == 0:
            hit = i
            break
    return hit, deficient


def hitting_chunk_undirected(int[:] us, int[:] vs, deg_arr, int threshold, long deficient):
    cdef int[:] deg = deg_arr
    cdef long i, m = us.shape[0]
    cdef long hit = -1
    cdef int w, j
    for i in range(m):
        for j in range(2):
            w = us[i] if j == 0 else vs[i]
            deg[w] += 1
            if deg[w] == threshold:
                deficient -= 1
        if deficient == 0:
            hit = i
            break
    return hit, deficient


# ---------------------------------------------------------------------------
# online coloring


def col_run(int[:] tails, int[:] heads, int n, int q, long m1, long m2, long m3,
            double eps_threshold, object seed, bint degenerate):
    cdef long tau = tails.shape[0]
    colors_np = np.zeros(tau, dtype=np.int32)
    eprime_np = np.zeros(tau, dtype=np.uint8)
    bad_np = np.zeros(n, dtype=np.uint8)
    cdef int[:] colors = colors_np
    cdef unsigned char[:] eprime = eprime_np
    cdef unsigned char[:] bad = bad_np

    cdef int[:, :] outc = np.zeros((n, q), dtype=np.int32)
    cdef int[:, :] inc_ = np.zeros((n, q), dtype=np.int32)
    cdef int[:] miss_out = np.full(n, q, dtype=np.int32)
    cdef int[:] miss_in = np.full(n, q, dtype=np.int32)
    cdef long[:] deg_out = np.zeros(n, dtype=np.int64)
    cdef long[:] deg_in = np.zeros(n, dtype=np.int64)
    cdef long[:] c_plus = np.ones(n, dtype=np.int64)
    cdef long[:] c_minus = np.ones(n, dtype=np.int64)
    cdef long[:] snap1o = np.zeros(n, dtype=np.int64)
    cdef long[:] snap1i = np.zeros(n, dtype=np.int64)
    cdef long[:] snap2o = np.zeros(n, dtype=np.int64)
    cdef long[:] snap2i = np.zeros(n, dtype=np.int64)
    cdef int[:] buf = np.zeros(q, dtype=np.int32)

    cdef u64 state = <u64>(seed)
    cdef long t1
    cdef int u, v, c, w
    cdef bint guard, record

    for t1 in range(1, tau + 1):
        u = tails[t1 - 1]
        v = heads[t1 - 1]
        guard = miss_out[u] > 0 or miss_in[v] > 0
        record = False
        if degenerate or t1 <= m1 or guard:
            c = _greedy(&state, outc, inc_, u, v, q, guard, buf)
            record = (not degenerate) and t1 > m3 and not guard and not (bad[u] or bad[v])
        elif t1 <= m2:
            c = <int>((c_plus[u] - 1) % q)
            c_plus[u] += 1
        elif t1 <= m3:
            c = <int>((c_minus[v] - 1) % q)
            c_minus[v] += 1
        elif bad[u] or bad[v]:
            c = _badmin(&state, outc, inc_, u, v, q, bad, buf)
        else:
            c = _greedy(&state, outc, inc_, u, v, q, False, buf)
            record = True

        colors[t1 - 1] = c + 1
        if record:
            eprime[t1 - 1] = 1
        if outc[u, c] == 0:
            miss_out[u] -= 1
        outc[u, c] += 1
        deg_out[u] += 1
        if inc_[v, c] == 0:
            miss_in[v] -= 1
        inc_[v, c] += 1
        deg_in[v] += 1

        if not degenerate:
            if t1 == m1:
                for w in range(n):
                    snap1o[w] = deg_out[w]
                    snap1i[w] = deg_in[w]
            elif t1 == m2:
                for w in range(n):
                    snap2o[w] = deg_out[w]
                    snap2i[w] = deg_in[w]
            elif t1 == m3:
                for w in range(n):
                    if (snap1o[w] <= eps_threshold
                            or snap1i[w] <= eps_threshold
                            or snap2o[w] - snap1o[w] <= eps_threshold
                            or deg_in[w] - snap2i[w] <= eps_threshold):
                        bad[w] = 1

    return colors_np, eprime_np, bad_np, int(state)


cdef inline int _greedy(u64* state, int[:, :] outc, int[:, :] inc_, int u, int v,
                        int q, bint guard, int[:] buf) nogil:
    cdef int c, m
    if guard:
        m = 0
        for c in range(q):
            if outc[u, c] == 0 or inc_[v, c] == 0:
                buf[m] = c
                m += 1
        return buf[<long>_below(state, <u64>m)]
    return <int>_below(state, <u64>q)


cdef inline int _badmin(u64* state, int[:, :] outc, int[:, :] inc_, int u, int v,
                        int q, unsigned char[:] bad, int[:] buf) nogil:
    cdef int c, m = 0
    cdef long score, best = -1
    for c in range(q):
        score = <long>outc[u, c] * bad[u] + <long>inc_[v, c] * bad[v]
        if best < 0 or score < best:
            best = score
            buf[0] = c
            m = 1
        elif score == best:
            buf[m] = c
            m += 1
    if m == 1:
        return buf[0]
    return buf[<long>_below(state, <u64>m)]


def col_orient_run(int[:] us, int[:] vs, int n, int q, long m1, long m2, long m3,
                   double eps_threshold, object seed, bint degenerate):
    cdef long tau = us.shape[0]
    colors_np = np.zeros(tau, dtype=np.int32)
    orient_np = np.zeros(tau, dtype=np.int8)
    eprime_np = np.zeros(tau, dtype=np.uint8)
    bad_np = np.zeros(n, dtype=np.uint8)
    cdef int[:] colors = colors_np
    cdef signed char[:] orient = orient_np
    cdef unsigned char[:] eprime = eprime_np
    cdef unsigned char[:] bad = bad_np

    cdef int[:, :] outc = np.zeros((n, q), dtype=np.int32)
    cdef int[:, :] inc_ = np.zeros((n, q), dtype=np.int32)
    cdef int[:] miss = np.full(n, 2 * q, dtype=np.int32)
    cdef long[:] deg_out = np.zeros(n, dtype=np.int64)
    cdef long[:] deg_in = np.zeros(n, dtype=np.int64)
    cdef long[:] c_plus = np.ones(n, dtype=np.int64)
    cdef long[:] c_minus = np.ones(n, dtype=np.int64)
    cdef long[:] snap1o = np.zeros(n, dtype=np.int64)
    cdef long[:] snap1i = np.zeros(n, dtype=np.int64)
    cdef long[:] snap2o = np.zeros(n, dtype=np.int64)
    cdef long[:] snap2i = np.zeros(n, dtype=np.int64)
    cdef int[:] buf = np.zeros(2 * q, dtype=np.int32)

    cdef u64 state = <u64>(seed)
    cdef long t1
    cdef int u, v, w, other, c, p, tail, head
    cdef bint guard, record

    for t1 in range(1, tau + 1):
        u = us[t1 - 1]
        v = vs[t1 - 1]
        guard = miss[u] > 0 or miss[v] > 0
        record = False
        if degenerate or t1 <= m1 or guard:
            p = _greedy2(&state, outc, inc_, u, v, q, guard, buf)
            record = (not degenerate) and t1 > m3 and not guard and not (bad[u] or bad[v])
        elif t1 <= m2:
            if _below(&state, 2) == 0:
                w = u
                other = v
            else:
                w = v
                other = u
            c = <int>((c_plus[w] - 1) % q)
            c_plus[w] += 1
            p = c if w == u else q + c
        elif t1 <= m3:
            if _below(&state, 2) == 0:
                w = u
                other = v
            else:
                w = v
                other = u
            c = <int>((c_minus[w] - 1) % q)
            c_minus[w] += 1
            # oriented into w: tail is the other endpoint
            p = c if other == u else q + c
        elif bad[u] or bad[v]:
            p = _badmin2(&state, outc, inc_, u, v, q, bad, buf)
        else:
            p = _greedy2(&state, outc, inc_, u, v, q, False, buf)
            record = True

        if p < q:
            tail = u
            head = v
            c = p
        else:
            tail = v
            head = u
            c = p - q
        colors[t1 - 1] = c + 1
        orient[t1 - 1] = 1 if tail == u else -1
        if record:
            eprime[t1 - 1] = 1
        if outc[tail, c] == 0:
            miss[tail] -= 1
        outc[tail, c] += 1
        deg_out[tail] += 1
        if inc_[head, c] == 0:
            miss[head] -= 1
        inc_[head, c] += 1
        deg_in[head] += 1

        if not degenerate:
            if t1 == m1:
                for w in range(n):
                    snap1o[w] = deg_out[w]
                    snap1i[w] = deg_in[w]
            elif t1 == m2:
                for w in range(n):
                    snap2o[w] = deg_out[w]
                    snap2i[w] = deg_in[w]
            elif t1 == m3:
                for w in range(n):
                    if (snap1o[w] <= eps_threshold
                            or snap1i[w] <= eps_threshold
                            or snap2o[w] - snap1o[w] <= eps_threshold
                            or deg_in[w] - snap2i[w] <= eps_threshold):
                        bad[w] = 1

    return colors_np, orient_np, eprime_np, bad_np, int(state)


cdef inline int _greedy2(u64* state, int[:, :] outc, int[:, :] inc_, int u, int v,
                         int q, bint guard, int[:] buf) nogil:
    cdef int c, m
    if guard:
        m = 0
        for c in range(q):
            if outc[u, c] == 0 or inc_[v, c] == 0:
                buf[m] = c
                m += 1
        for c in range(q):
            if inc_[u, c] == 0 or outc[v, c] == 0:
                buf[m] = q + c
                m += 1
        return buf[<long>_below(state, <u64>m)]
    return <int>(_below(state, 2) * q + _below(state, <u64>q))


cdef inline int _badmin2(u64* state, int[:, :] outc, int[:, :] inc_, int u, int v,
                         int q, unsigned char[:] bad, int[:] buf) nogil:
    cdef int p, c, m = 0
    cdef long score, best = -1
    for p in range(2 * q):
        c = p % q
        if p < q:
            score = <long>outc[u, c] * bad[u] + <long>inc_[v, c] * bad[v]
        else:
            score = <long>inc_[u, c] * bad[u] + <long>outc[v, c] * bad[v]
        if best < 0 or score < best:
            best = score
            buf[0] = p
            m = 1
        elif score == best:
            buf[m] = p
            m += 1
    if m == 1:
        return buf[0]
    return buf[<long>_below(state, <u64>m)]


# ---------------------------------------------------------------------------
# rotation search


cdef inline bint _has_arc(long[:] indptr, int[:] adj, int u, int v) nogil:
    cdef long lo = indptr[u], hi = indptr[u + 1], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if adj[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and adj[lo] == v


def find_cycle_core(int[:] prev, int[:] ci, long[:] indptr, int[:] adj,
                    int n_vertices, int rounds, long max_paths):
    cdef long gamma = prev.shape[0]
    cdef long nci = ci.shape[0]
    cdef long L = gamma + nci
    cdef int start = ci[0]
    cdef int tail = ci[nci - 1]

    cdef long cap = 64
    if cap > max_paths:
        cap = max_paths
    mat_np = np.empty((cap, L), dtype=np.int32)
    end_np = np.empty(cap, dtype=np.int32)
    cdef int[:, :] mat = mat_np
    cdef int[:] endv = end_np
    seen_np = np.zeros(n_vertices, dtype=np.uint8)
    cdef unsigned char[:] seen = seen_np
    pos_np = np.full(n_vertices, -1, dtype=np.int64)
    cdef long[:] pos = pos_np

    cdef long size = 0, checked = 0, cursor = 0
    cdef long i, j, idx, stop, k0, l0, ptr, ptr2
    cdef int x, y, e, e2, pred, rounds_done = 0

    # seeding: one path per pool arc from the tail into the big cycle
    for j in range(gamma):
        if _has_arc(indptr, adj, tail, prev[j]):
            e = prev[j - 1] if j > 0 else prev[gamma - 1]
            if seen[e] or size >= max_paths:
                continue
            if size == cap:
                mat_np, end_np = _grow(mat_np, end_np, max_paths)
                mat = mat_np
                endv = end_np
                cap = mat_np.shape[0]
            for i in range(nci):
                mat[size, i] = ci[i]
            for i in range(gamma):
                mat[size, nci + i] = prev[(j + i) % gamma]
            endv[size] = e
            seen[e] = 1
            size += 1
    cdef long n_seeds = size
    trace = [int(n_seeds)]
    if n_seeds == 0:
        return None, 0, 0, 0, trace

    # closure test over the seeds
    for i in range(checked, size):
        if _has_arc(indptr, adj, endv[i], start):
            return _row(mat_np, i, L), 0, int(size), int(n_seeds), trace
    checked = size

    cdef int t
    for t in range(1, rounds + 1):
        stop = size
        if cursor == stop:
            break
        for idx in range(cursor, stop):
            for i in range(L):
                pos[mat[idx, i]] = i
            e = mat[idx, L - 1]
            for ptr in range(indptr[e], indptr[e + 1]):
                x = adj[ptr]
                k0 = pos[x]
                if k0 < 1:
                    continue
                pred = mat[idx, k0 - 1]
                for ptr2 in range(indptr[pred], indptr[pred + 1]):
                    y = adj[ptr2]
                    l0 = pos[y]
                    if l0 <= k0:
                        continue
                    e2 = mat[idx, l0 - 1]
                    if seen[e2] or size >= max_paths:
                        continue
                    if size == cap:
                        mat_np, end_np = _grow(mat_np, end_np, max_paths)
                        mat = mat_np
                        endv = end_np
                        cap = mat_np.shape[0]
                    for i in range(k0):
                        mat[size, i] = mat[idx, i]
                    for i in range(l0, L):
                        mat[size, k0 + i - l0] = mat[idx, i]
                    for i in range(k0, l0):
                        mat[size, i + L - l0] = mat[idx, i]
                    endv[size] = e2
                    seen[e2] = 1
                    size += 1
            for i in range(L):
                pos[mat[idx, i]] = -1
        cursor = stop
        rounds_done = t
        trace.append(int(size))
        for i in range(checked, size):
            if _has_arc(indptr, adj, endv[i], start):
                return _row(mat_np, i, L), int(t), int(size), int(n_seeds), trace
        checked = size

    return None, int(rounds_done), int(size), int(n_seeds), trace


cdef _grow(mat_np, end_np, long max_paths):
    cdef long cap = mat_np.shape[0]
    cdef long new_cap = cap * 2
    if new_cap > max_paths:
        new_cap = max_paths
    new_mat = np.empty((new_cap, mat_np.shape[1]), dtype=np.int32)
    new_mat[:cap] = mat_np
    new_end = np.empty(new_cap, dtype=np.int32)
    new_end[:cap] = end_np
    return new_mat, new_end


cdef _row(mat_np, long i, long L):
    return [int(v) for v in mat_np[i, :L]]
