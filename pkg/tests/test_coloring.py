import math
import warnings

import numpy as np
import pytest

from hamcol import (
    ColorState,
    color_class,
    color_greedy,
    compute_small,
    generate_schedule,
    orient_color_greedy,
    rainbow_relabel,
    run_col,
    run_col_orient,
)
from hamcol.coloring import (
    PhaseDegenerateWarning,
    coloring_to_bytes,
    read_coloring,
    write_coloring,
)
from hamcol.errors import InvalidInput, InvalidParameter
from hamcol.process import ArcSchedule, ProcessParams
from hamcol.rng import SplitMix64


def small_run(n=60, q=2, seed=5, mode="directed"):
    s = generate_schedule(n, mode, seed)
    params = ProcessParams(q=q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PhaseDegenerateWarning)
        if mode == "directed":
            return run_col(s, params, SplitMix64(seed + 1))
        return run_col_orient(s, params, SplitMix64(seed + 1))


# ---------------------------------------------------------------------------
# greedy draws


def test_color_greedy_single_color():
    state = ColorState(2, 1)
    assert color_greedy(state, 0, 1, SplitMix64(0)) == 1


def test_color_greedy_union_draw_is_uniform_over_union():
    # u missing out-color 2 only, v missing in-color 3 only (q=3):
    # union {2, 3}, each should appear ~1/2; 4 sigma band at N=10^4
    rng = SplitMix64(77)
    counts = {2: 0, 3: 0}
    for _ in range(10_000):
        state = ColorState(4, 3)
        state.apply(0, 2, 1)
        state.apply(0, 2, 3)  # u=0 out-colors {1,3}, missing {2}
        state.apply(3, 1, 1)
        state.apply(3, 1, 2)  # v=1 in-colors {1,2}, missing {3}
        c = color_greedy(state, 0, 1, rng)
        assert c in (2, 3)
        counts[c] += 1
    sigma = math.sqrt(10_000 * 0.25)
    assert abs(counts[2] - 5000) <= 4 * sigma


def test_color_greedy_full_case_uniform_chi_square():
    # both endpoints saturated, q=4: ~uniform over [4]; chi^2(3) < 21.11
    # (the 0.9999 quantile)
    q = 4
    state = ColorState(2, q)
    for c in range(1, q + 1):
        state.apply(0, 1, c)
        state.apply(1, 0, c)
    rng = SplitMix64(3)
    counts = [0] * q
    n = 10_000
    for _ in range(n):
        counts[color_greedy(state, 0, 1, rng) - 1] += 1
    chi2 = sum((c - n / q) ** 2 / (n / q) for c in counts)
    assert chi2 < 21.11


def test_orient_color_greedy_guard_set_membership():
    # u missing out-color 2 only (everything else at u and all of v is
    # served): the only slot-filling pair is orient u->v with color 2
    q = 2
    seen = set()
    for trial in range(100):
        state = ColorState(3, q)
        state.apply(0, 1, 1)  # u out {1}; v in {1}
        state.apply(1, 0, 1)  # v out {1}; u in {1}
        state.apply(1, 0, 2)  # v out {1,2}; u in {1,2}
        state.apply(2, 1, 2)  # v in {1,2}
        tail, head, color = orient_color_greedy(state, 0, 1, SplitMix64(trial))
        seen.add((tail, head, color))
    assert seen == {(0, 1, 2)}


def test_orient_color_greedy_guard_set_two_sided():
    # u missing out 2; v missing in 1: both one-sided fills are allowed,
    # in either orientation where they land on an empty slot
    q = 2
    seen = set()
    for trial in range(400):
        state = ColorState(4, q)
        state.apply(0, 2, 1)  # u out {1}
        state.apply(2, 0, 1)
        state.apply(2, 0, 2)  # u in {1,2}
        state.apply(1, 3, 1)
        state.apply(1, 3, 2)  # v out {1,2}
        state.apply(3, 1, 2)  # v in {2}
        tail, head, color = orient_color_greedy(state, 0, 1, SplitMix64(trial))
        seen.add((tail, head, color))
    # (+u, 2) fills u's out 2; (+u, 1) fills v's in 1; (-u, c) fills nothing
    assert seen == {(0, 1, 2), (0, 1, 1)}


def test_run_col_requires_directed():
    s = generate_schedule(4, "undirected", 0)
    with pytest.raises(InvalidParameter):
        run_col(s, ProcessParams(q=1), SplitMix64(0))


def test_run_col_q1_colors_everything_one():
    res = small_run(q=1)
    assert (res.colors == 1).all()
    # pool contents: late arcs, both endpoints saturated, neither flagged
    assert (res.eprime >= res.m3).all()
    for idx in res.eprime.tolist():
        u, v = int(res.tails[idx]), int(res.heads[idx])
        assert not res.bad[u] and not res.bad[v]


def test_run_col_truncation_replays_prefix():
    n, seed = 50, 9
    s = generate_schedule(n, "directed", seed)
    params = ProcessParams(q=2)
    full = run_col(s, params, SplitMix64(4))
    t = full.tau // 2
    partial = run_col(s, params, SplitMix64(4), tau=t)
    assert np.array_equal(full.colors[:t], partial.colors[:t])


def test_run_col_deterministic():
    a = small_run(seed=12)
    b = small_run(seed=12)
    assert np.array_equal(a.colors, b.colors)
    assert np.array_equal(a.bad, b.bad)


def replay_branches(res):
    """Re-derive every branch decision from the output and check the
    guard/cyclic/balance contracts."""
    n, q = res.n, res.q
    out = np.zeros((n, q), dtype=int)
    in_ = np.zeros((n, q), dtype=int)
    cyc_plus = np.ones(n, dtype=int)
    cyc_minus = np.ones(n, dtype=int)
    for t1 in range(1, res.tau + 1):
        u, v = int(res.tails[t1 - 1]), int(res.heads[t1 - 1])
        c = int(res.colors[t1 - 1])
        guard = (out[u] == 0).any() or (in_[v] == 0).any()
        if guard:
            union = set(np.flatnonzero(out[u] == 0) + 1) | set(np.flatnonzero(in_[v] == 0) + 1)
            assert c in union, f"guarded arc {t1} got color outside the union"
        elif res.m1 < t1 <= res.m2:
            assert c == (cyc_plus[u] - 1) % q + 1, f"cyclic out arc {t1}"
            cyc_plus[u] += 1
        elif res.m2 < t1 <= res.m3:
            assert c == (cyc_minus[v] - 1) % q + 1, f"cyclic in arc {t1}"
            cyc_minus[v] += 1
        elif res.bad[u] or res.bad[v]:
            score = out[u] * res.bad[u] + in_[v] * res.bad[v]
            assert score[c - 1] == score.min(), f"balance arc {t1} not minimizing"
        out[u, c - 1] += 1
        in_[v, c - 1] += 1


def test_run_col_branch_contracts_hold():
    replay_branches(small_run(n=80, q=2, seed=21))
    replay_branches(small_run(n=80, q=3, seed=22))


def test_run_col_orient_branch_sanity():
    res = small_run(n=60, q=2, seed=31, mode="undirected")
    assert res.orient is not None and set(np.unique(res.orient)) <= {-1, 1}
    # guarded safety: while an endpoint is unsaturated the pair must fill
    # an empty slot of one of the endpoints
    n, q = res.n, res.q
    out = np.zeros((n, q), dtype=int)
    in_ = np.zeros((n, q), dtype=int)
    t_arr, h_arr = res.oriented_arcs()
    for t1 in range(1, res.tau + 1):
        tail, head = int(t_arr[t1 - 1]), int(h_arr[t1 - 1])
        c = int(res.colors[t1 - 1])
        unsat = (
            (out[tail] == 0).any() or (in_[tail] == 0).any()
            or (out[head] == 0).any() or (in_[head] == 0).any()
        )
        if unsat:
            assert out[tail, c - 1] == 0 or in_[head, c - 1] == 0
        out[tail, c - 1] += 1
        in_[head, c - 1] += 1


def test_run_col_orient_orientation_marginal():
    # first edge of a fresh pair is a guard draw; over seeds both
    # orientations appear roughly equally (binomial 4 sigma at N=400)
    n_trials = 400
    ups = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PhaseDegenerateWarning)
        for seed in range(n_trials):
            s = ArcSchedule.from_arcs(3, "undirected", [(0, 1), (1, 2), (0, 2)])
            res = run_col_orient(s, ProcessParams(q=1, alpha=0.01), SplitMix64(seed), tau=3)
            ups += res.orient[0] > 0
    sigma = math.sqrt(n_trials * 0.25)
    assert abs(ups - n_trials / 2) <= 4 * sigma


def test_phase_degenerate_warning_and_flag():
    s = ArcSchedule.from_arcs(3, "directed", [(0, 1), (1, 2), (2, 0)])
    with pytest.warns(PhaseDegenerateWarning):
        res = run_col(s, ProcessParams(q=1), SplitMix64(0), tau=3)
    assert res.phase_degenerate
    assert not res.bad.any() and len(res.eprime) == 0


# ---------------------------------------------------------------------------
# derived views


def test_color_class_partitions_the_prefix():
    res = small_run(n=50, q=3, seed=41)
    sizes = 0
    seen = set()
    for c in range(1, 4):
        dc = color_class(res, c)
        sizes += len(dc)
        arcs = set(zip(dc.tails.tolist(), dc.heads.tolist()))
        assert not (arcs & seen)
        seen |= arcs
    assert sizes == res.tau
    with pytest.raises(InvalidParameter):
        color_class(res, 4)


def test_compute_small_threshold():
    res = small_run(n=50, q=1, seed=3)
    # small_frac * ln 50 < 1 = q: final degrees are >= q, so nothing is small
    assert compute_small(res).sum() == 0
    # a huge threshold marks everyone
    assert compute_small(res, small_frac=100.0).all()


def test_rainbow_relabel_examples():
    res = small_run(n=30, q=1, seed=8, mode="undirected")
    colors = rainbow_relabel(res)
    t, _ = res.oriented_arcs()
    # edge oriented out of vertex i (0-based) gets color i+1
    assert (colors == t + 1).all()
    # any directed triangle has three distinct tails, hence three colors
    directed = small_run(n=30, q=1, seed=8, mode="directed")
    with pytest.raises(InvalidInput):
        rainbow_relabel(directed)


def test_coloring_file_roundtrip(tmp_path):
    for mode in ("directed", "undirected"):
        res = small_run(n=40, q=2, seed=14, mode=mode)
        path = tmp_path / f"{mode}.coloring"
        write_coloring(res, path)
        loaded = read_coloring(path)
        assert loaded.n == res.n and loaded.q == res.q and loaded.tau == res.tau
        assert np.array_equal(loaded.colors, res.colors)
        assert np.array_equal(loaded.tails, res.tails)
        assert np.array_equal(loaded.bad, res.bad)
        assert np.array_equal(loaded.small, res.small)
        if mode == "undirected":
            assert np.array_equal(loaded.orient, res.orient)
        # byte-stable writer
        assert coloring_to_bytes(res) == coloring_to_bytes(small_run(n=40, q=2, seed=14, mode=mode))
