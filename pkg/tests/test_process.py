import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamcol import generate_schedule, hitting_time, prefix_degrees
from hamcol.errors import InvalidInput, InvalidParameter
from hamcol.process import ArcSchedule, ProcessParams, pair_count, read_schedule, write_schedule


def all_pairs(n, mode):
    if mode == "directed":
        return sorted((u, v) for u in range(n) for v in range(n) if u != v)
    return sorted((u, v) for u in range(n) for v in range(n) if u < v)


def test_n2_directed_contains_both_arcs():
    s = generate_schedule(2, "directed", 1)
    t, h = s.pairs()
    assert sorted(zip(t.tolist(), h.tolist())) == [(0, 1), (1, 0)]


@pytest.mark.parametrize("mode", ["directed", "undirected"])
@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_schedule_is_permutation_of_all_pairs(n, mode):
    s = generate_schedule(n, mode, 99 + n)
    t, h = s.pairs()
    assert sorted(zip(t.tolist(), h.tolist())) == all_pairs(n, mode)
    assert len(s) == pair_count(n, mode)


def test_same_seed_same_sequence():
    a = generate_schedule(17, "directed", 123)
    b = generate_schedule(17, "directed", 123)
    assert np.array_equal(a.codes, b.codes)
    c = generate_schedule(17, "directed", 124)
    assert not np.array_equal(a.codes, c.codes)


def test_first_position_frequency_matches_binomial():
    # frequency of a fixed arc in position 1 over many seeds; binomial
    # oracle: N=600 draws at p=1/(n(n-1)), assert within 4 sigma
    n, trials = 100, 600
    m = n * (n - 1)
    hits = 0
    for seed in range(trials):
        s = generate_schedule(n, "directed", seed)
        t, h = s.pairs(0, 1)
        hits += (t[0], h[0]) == (0, 1)
    p = 1.0 / m
    sigma = math.sqrt(trials * p * (1 - p))
    assert abs(hits - trials * p) <= 4 * sigma


def test_generate_schedule_rejects_small_n():
    with pytest.raises(InvalidParameter):
        generate_schedule(1, "directed", 0)
    with pytest.raises(InvalidParameter):
        generate_schedule(5, "mixed", 0)


def test_hitting_time_n2():
    s = generate_schedule(2, "directed", 7)
    assert hitting_time(s, 1) == 2


def test_hitting_time_explicit_triangle():
    s = ArcSchedule.from_arcs(3, "directed", [(0, 1), (1, 2), (2, 0)])
    assert hitting_time(s, 1) == 3


def test_hitting_time_undirected_uses_total_degree():
    # path edges (0,1), (1,2): vertex degrees 1,2,1 -> min degree 2 needs
    # the third edge
    s = ArcSchedule.from_arcs(3, "undirected", [(0, 1), (1, 2), (0, 2)])
    assert hitting_time(s, 1) == 3


def test_hitting_time_errors():
    s = generate_schedule(3, "directed", 0)
    with pytest.raises(InvalidParameter):
        hitting_time(s, 3)
    with pytest.raises(InvalidParameter):
        hitting_time(s, 0)
    partial = ArcSchedule.from_arcs(3, "directed", [(0, 1)])
    with pytest.raises(InvalidInput):
        hitting_time(partial, 1)


@given(st.integers(0, 2**32), st.integers(4, 24))
@settings(max_examples=30, deadline=None)
def test_hitting_time_monotone_in_q(seed, n):
    s = generate_schedule(n, "directed", seed)
    taus = [hitting_time(s, q) for q in range(1, min(n - 1, 4) + 1)]
    assert taus == sorted(taus)


@given(st.integers(0, 2**32))
@settings(max_examples=20, deadline=None)
def test_hitting_time_is_first_good_prefix(seed):
    n, q = 12, 2
    s = generate_schedule(n, "directed", seed)
    tau = hitting_time(s, q)
    out, in_ = prefix_degrees(s, tau)
    assert out.min() >= q and in_.min() >= q
    out, in_ = prefix_degrees(s, tau - 1)
    assert min(out.min(), in_.min()) < q


def test_prefix_degrees_zero_and_one():
    s = ArcSchedule.from_arcs(3, "directed", [(0, 1), (1, 0)])
    out, in_ = prefix_degrees(s, 0)
    assert out.sum() == 0 and in_.sum() == 0
    out, in_ = prefix_degrees(s, 1)
    assert out.tolist() == [1, 0, 0] and in_.tolist() == [0, 1, 0]
    with pytest.raises(InvalidParameter):
        prefix_degrees(s, 3)


def test_schedule_file_roundtrip(tmp_path):
    s = generate_schedule(6, "undirected", 31)
    path = tmp_path / "sched.txt"
    write_schedule(s, 2, path)
    loaded, q = read_schedule(path)
    assert q == 2
    assert loaded.n == s.n and loaded.mode == s.mode and loaded.seed == s.seed
    assert np.array_equal(loaded.codes, s.codes)


def test_params_validation():
    with pytest.raises(InvalidParameter):
        ProcessParams(q=0)
    with pytest.raises(InvalidParameter):
        ProcessParams(alpha=0.4)
    with pytest.raises(InvalidParameter):
        ProcessParams(eps_frac=0.0)
    with pytest.raises(InvalidParameter):
        ProcessParams(k=0)
    p = ProcessParams(q=2, max_paths=10)
    with pytest.raises(InvalidParameter):
        p.validate_for(100)
    m1, m2, m3 = ProcessParams(alpha=0.05).phase_marks(500)
    assert (m1, m2, m3) == (m1, 2 * m1, 3 * m1)
    assert m1 == math.ceil(0.05 * 500 * math.log(500))
