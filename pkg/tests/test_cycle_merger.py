import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamcol import (
    OneFactor,
    PatchworkInput,
    double_rotation,
    find_cycle,
    merge_cycles,
    merge_step,
    patchwork_hamilton,
    split_pools,
)
from hamcol.cycle_merger import ArcPool, default_rounds
from hamcol.errors import InvalidMerge, InvalidRotation
from hamcol.frontier import PathFrontier
from hamcol.rng import SplitMix64, philox_generator, stable_seed


def random_factor(n, gen):
    while True:
        p = gen.permutation(n)
        if not (p == np.arange(n)).any():
            return OneFactor(p)


def bernoulli_pool(n, density, gen):
    mask = gen.random((n, n)) < density
    np.fill_diagonal(mask, False)
    t, h = np.nonzero(mask)
    return list(zip(t.tolist(), h.tolist()))


# ---------------------------------------------------------------------------
# split_pools


def test_split_pools_empty():
    assert split_pools([], SplitMix64(0)) == ([], [])


def test_split_pools_partitions():
    arcs = [(u, v) for u in range(40) for v in range(40) if u != v]
    a, b = split_pools(arcs, SplitMix64(5))
    assert sorted(a + b) == sorted(arcs)
    assert not (set(a) & set(b))


def test_split_pools_binomial_balance():
    n_arcs = 10_000
    arcs = [(0, i) for i in range(1, n_arcs + 1)]
    a, _ = split_pools(arcs, SplitMix64(9))
    sigma = math.sqrt(n_arcs * 0.25)
    assert abs(len(a) - n_arcs / 2) <= 4 * sigma


# ---------------------------------------------------------------------------
# merge_step / merge_cycles


def test_merge_step_two_transpositions():
    f = OneFactor([1, 0, 3, 2])  # (0 1)(2 3)
    f2 = merge_step(f, 0, 2)
    assert f2.succ.tolist() == [2, 0, 3, 1]  # 0->2->3->1->0
    assert f2.cycle_count() == 1


def test_merge_step_cycle_count_drops_by_one():
    gen = philox_generator(1)
    for _ in range(200):
        f = random_factor(10, gen)
        cycles = f.cycles()
        if len(cycles) < 2:
            continue
        a, b = cycles[0][0], cycles[1][0]
        f2 = merge_step(f, a, b)
        assert f2.cycle_count() == f.cycle_count() - 1
        # two-arc exchange: arcs(f2) = arcs(f) - {(a,fa),(pb,b)} + {(a,b),(pb,fa)}
        fa, pb = int(f.succ[a]), int(f.pred[b])
        want = (set(f.arcs()) - {(a, fa), (pb, b)}) | {(a, b), (pb, fa)}
        assert set(f2.arcs()) == want


def test_merge_step_same_cycle_rejected():
    f = OneFactor([1, 2, 0, 4, 3])
    with pytest.raises(InvalidMerge):
        merge_step(f, 0, 1)


def test_merge_cycles_single_cycle_unchanged():
    f = OneFactor([1, 2, 0])
    f2, merges = merge_cycles(f, [(0, 1), (1, 2)])
    assert f2 == f and merges == []


def test_merge_cycles_worked_example():
    f = OneFactor([1, 0, 3, 2])
    f2, merges = merge_cycles(f, [(0, 2), (3, 1)])
    assert f2.cycle_count() == 1
    assert merges == [(0, 2)]
    assert f2.succ.tolist() == [2, 0, 3, 1]


def test_merge_cycles_terminates_and_uses_pool_arcs():
    gen = philox_generator(17)
    for seed in range(30):
        n = 20
        f = random_factor(n, gen)
        pool = bernoulli_pool(n, 0.2, gen)
        f2, merges = merge_cycles(f, pool)
        assert f2.cycle_count() + len(merges) == f.cycle_count()
        allowed = set(pool) | set(f.arcs())
        assert all(arc in allowed for arc in f2.arcs())


# ---------------------------------------------------------------------------
# double_rotation


def test_double_rotation_formula():
    p = ["p1", "p2", "p3", "p4", "p5", "p6"]
    assert double_rotation(p, 2, 4) == ["p1", "p4", "p5", "p6", "p2", "p3"]
    assert double_rotation(["p1", "p2", "p3"], 2, 3) == ["p1", "p3", "p2"]


def test_double_rotation_rejects_bad_indices():
    p = list(range(5))
    for k, l in [(1, 3), (3, 3), (4, 2), (2, 6), (0, 1)]:
        with pytest.raises(InvalidRotation):
            double_rotation(p, k, l)


@given(st.integers(3, 40), st.integers(0, 10**9))
@settings(max_examples=200, deadline=None)
def test_double_rotation_properties(s, seed):
    gen = philox_generator(seed)
    path = gen.permutation(1000)[:s].tolist()
    k = int(gen.integers(2, s))
    l = int(gen.integers(k + 1, s + 1))
    out = double_rotation(path, k, l)
    assert sorted(out) == sorted(path)
    assert out[0] == path[0]
    assert out[-1] == path[l - 2]  # endpoint is p_{l-1}
    # consecutive pairs are old path arcs or one of the two new arcs
    old = set(zip(path, path[1:]))
    new = {(path[-1], path[k - 1]), (path[k - 2], path[l - 1])}
    for arc in zip(out, out[1:]):
        assert arc in old | new


# ---------------------------------------------------------------------------
# find_cycle


def test_find_cycle_worked_example():
    res = find_cycle([0, 1, 2], [3, 4], [(4, 0), (2, 3)], rounds=5, max_paths=20, n=5)
    assert res.ok and res.cycle == [3, 4, 0, 1, 2]
    assert res.rounds_used == 0 and res.n_seeds == 1


def test_find_cycle_no_seed_fails_immediately():
    res = find_cycle([0, 1, 2], [3, 4], [(0, 3)], rounds=5, max_paths=20, n=5)
    assert not res.ok and res.n_seeds == 0 and res.frontier_peak == 0


def test_find_cycle_needs_a_rotation():
    # single seed (3,4,0,1,2) with no closure arc; the rotation using
    # (2,1) [k=4] and (0,2) [l=5] yields (3,4,0,2,1), closed by (1,3)
    pool = [(4, 0), (2, 1), (0, 2), (1, 3)]
    res = find_cycle([0, 1, 2], [3, 4], pool, rounds=3, max_paths=10, n=5)
    assert res.ok
    assert res.cycle == [3, 4, 0, 2, 1]
    assert res.rounds_used == 1 and res.n_seeds == 1


def test_find_cycle_random_instances_validate():
    gen = philox_generator(23)
    successes = 0
    for seed in range(150):
        n = int(gen.integers(8, 30))
        cut = int(gen.integers(2, n - 2))
        perm = gen.permutation(n).tolist()
        prev, small = perm[cut:], perm[:cut]
        pool = bernoulli_pool(n, float(gen.uniform(0.05, 0.4)), gen)
        res = find_cycle(prev, small, pool, rounds=default_rounds(n), max_paths=4 * n, n=n)
        if res.ok:
            successes += 1  # internal validator raises on any bad output
            assert sorted(res.cycle) == sorted(perm)
    assert successes > 30


def test_frontier_dedup_and_materialize():
    fr = PathFrontier(start=0, max_paths=3)
    assert fr.add_seed((0, 1, 2, 3))
    assert not fr.add_seed((0, 2, 1, 3))  # duplicate endpoint dropped
    assert fr.add_rotation(0, 1, 3, endpoint=2)
    # replay: (0,1,2,3) with k0=1,l0=3 -> prefix [0], suffix [3], middle [1,2]
    assert fr.materialize(1) == [0, 3, 1, 2]
    assert fr.add_seed((0, 3, 2, 1))
    assert not fr.add_seed((0, 2, 3, 4))  # cap reached
    assert len(fr) == 3


# ---------------------------------------------------------------------------
# patchwork


def test_patchwork_single_cycle_returns_factor():
    f = OneFactor([1, 2, 3, 0])
    pin = PatchworkInput.build(f, [], [])
    res = patchwork_hamilton(pin)
    assert res.ok and res.cycle == [0, 1, 2, 3]
    assert res.merges == [] and res.find_cycle_stats == []


def test_patchwork_worked_example():
    pin = PatchworkInput.build(OneFactor([1, 2, 0, 4, 3]), [], [(4, 0), (2, 3)])
    res = patchwork_hamilton(pin)
    assert res.ok and res.cycle == [3, 4, 0, 1, 2]


def test_patchwork_failure_reports_index():
    pin = PatchworkInput.build(OneFactor([1, 2, 0, 4, 3]), [], [])
    res = patchwork_hamilton(pin)
    assert not res.ok and res.failure_index == 2


def test_patchwork_forbidden_arcs_are_filtered():
    pin = PatchworkInput.build(
        OneFactor([1, 2, 0, 4, 3]), [], [(4, 0), (2, 3)], forbidden_arcs=[(2, 3)]
    )
    assert (2, 3) not in pin.e3.arc_set
    res = patchwork_hamilton(pin)
    assert not res.ok


def test_patchwork_random_validates_and_uses_allowed_arcs():
    wins = 0
    for seed in range(40):
        gen = philox_generator(stable_seed(4711, seed))
        n = 60
        f = random_factor(n, gen)
        density = math.log(n) / (2 * n) * 2  # a bit denser at tiny n
        pin = PatchworkInput.build(
            f, bernoulli_pool(n, density, gen), bernoulli_pool(n, density, gen)
        )
        res = patchwork_hamilton(pin)  # raises internally on invalid output
        wins += res.ok
    assert wins > 10


def test_arcpool_rejects_junk():
    from hamcol.errors import InvalidInput

    with pytest.raises(InvalidInput):
        ArcPool(3, [(0, 0)])
    with pytest.raises(InvalidInput):
        ArcPool(3, [(0, 5)])


def test_default_rounds():
    assert default_rounds(8) == 8
    assert default_rounds(1000) == int(math.log(1000) / math.log(math.log(1000))) + 2
