import numpy as np
import pytest

from hamcol import hide_bad, lift_hamilton_cycle
from hamcol.coloring import ColorClass
from hamcol.errors import InvalidInput
from hamcol.minor import contraction_to_text, read_contraction_paths, write_contraction
from hamcol.rng import philox_generator, stable_seed
from hamcol.verify import verify_contraction_equivalence


def make_class(n, arcs):
    return ColorClass(
        n=n,
        color=1,
        tails=np.array([a for a, _ in arcs], dtype=np.int32),
        heads=np.array([b for _, b in arcs], dtype=np.int32),
        reveal=np.arange(len(arcs), dtype=np.int64),
    )


def masks(n, bad=(), small=()):
    b = np.zeros(n, dtype=bool)
    s = np.zeros(n, dtype=bool)
    b[list(bad)] = True
    s[list(small)] = True
    return b, s


def random_instance(n, n_arcs, n_bad, seed):
    gen = philox_generator(stable_seed(7135, n, n_arcs, n_bad, seed))
    arcs = set()
    while len(arcs) < n_arcs:
        u, v = (int(x) for x in gen.integers(0, n, size=2))
        if u != v:
            arcs.add((u, v))
    arcs = sorted(arcs)
    bad_verts = gen.choice(n, size=n_bad, replace=False).tolist()
    return make_class(n, arcs), masks(n, bad=bad_verts)


def test_no_bad_vertices_gives_identity_map():
    dc = make_class(3, [(0, 1), (1, 2), (2, 0)])
    bad, small = masks(3)
    cm = hide_bad(dc, bad, small)
    assert cm.ok and cm.is_identity()
    assert cm.paths == [[0], [1], [2]]
    assert cm.removed_arcs == [] and cm.contr_arcs == []
    assert sorted(zip(cm.minor_tails.tolist(), cm.minor_heads.tolist())) == [
        (0, 1), (1, 2), (2, 0)]


def test_hand_instance_threads_vertex_two():
    # 0-based version of the worked 4-vertex instance: hiding vertex 2
    # contracts the path 0 -> 2 -> 1 and leaves a 2-vertex minor
    arcs = [(0, 2), (2, 1), (1, 0), (1, 3), (3, 0), (2, 3), (3, 1), (0, 1)]
    dc = make_class(4, arcs)
    bad, small = masks(4, bad=[2])
    cm = hide_bad(dc, bad, small)
    assert cm.ok
    assert cm.paths == [[0, 2, 1], [3]]
    assert cm.contr_arcs == [(0, 2), (2, 1)]
    assert cm.starts.tolist() == [0, 3] and cm.ends.tolist() == [1, 3]
    assert sorted(cm.removed_arcs) == [(0, 1), (1, 0), (2, 3), (3, 1)]
    assert sorted(zip(cm.minor_tails.tolist(), cm.minor_heads.tolist())) == [(0, 1), (1, 0)]
    lifted = lift_hamilton_cycle(cm, [0, 1])
    assert lifted == [0, 2, 1, 3]


def test_starved_bad_vertex_reports_failure():
    # both flagged vertices depend on vertex 0 as their only in-neighbor
    arcs = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 0)]
    dc = make_class(4, arcs)
    bad, small = masks(4, bad=[1, 2])
    cm = hide_bad(dc, bad, small)
    assert not cm.ok
    assert cm.blocker == 2
    assert "in-neighbor" in cm.reason


def test_small_priority_processed_first():
    # vertex 3 (small+bad) grabs in-neighbor 0 before bad vertex 1 runs
    arcs = [(0, 3), (3, 2), (0, 1), (1, 2), (2, 0)]
    dc = make_class(4, arcs)
    bad, small = masks(4, bad=[1, 3], small=[3])
    cm = hide_bad(dc, bad, small)
    assert not cm.ok and cm.blocker == 1  # 1's only in-neighbor 0 was taken


def test_equivalence_and_partition_on_random_instances():
    checked = 0
    for seed in range(300):
        dc, (bad, small) = random_instance(n=12, n_arcs=60, n_bad=3, seed=seed)
        cm = hide_bad(dc, bad, small)
        if not cm.ok:
            continue
        checked += 1
        # contraction paths partition the vertex set
        flat = sorted(v for p in cm.paths for v in p)
        assert flat == list(range(12))
        # flagged vertices are interior, endpoints unflagged
        for p in cm.paths:
            assert not bad[p[0]] and not bad[p[-1]]
        assert verify_contraction_equivalence(cm, dc.arc_set).ok
        # consecutive path pairs are arcs of the input
        for p in cm.paths:
            for x, y in zip(p, p[1:]):
                assert (x, y) in dc.arc_set
    assert checked > 100


def exhaustive_hamilton(arc_set, n):
    import itertools

    for perm in itertools.permutations(range(1, n)):
        cyc = (0,) + perm
        if all((cyc[i], cyc[(i + 1) % n]) in arc_set for i in range(n)):
            return list(cyc)
    return None


def test_lift_of_found_minor_cycles_is_hamiltonian():
    from hamcol.verify import is_hamilton_cycle

    lifted_count = 0
    for seed in range(400):
        dc, (bad, small) = random_instance(n=8, n_arcs=34, n_bad=2, seed=seed)
        cm = hide_bad(dc, bad, small)
        if not cm.ok or cm.n_minor < 2:
            continue
        mc = exhaustive_hamilton(cm.arc_set, cm.n_minor)
        if mc is None:
            continue
        lifted = lift_hamilton_cycle(cm, mc)
        assert is_hamilton_cycle(lifted, 8, dc.arc_set).ok
        lifted_count += 1
    assert lifted_count > 30


def test_lift_rejects_bad_cycles():
    dc = make_class(4, [(0, 2), (2, 1), (1, 0), (1, 3), (3, 0), (2, 3), (3, 1), (0, 1)])
    bad, small = masks(4, bad=[2])
    cm = hide_bad(dc, bad, small)
    with pytest.raises(InvalidInput):
        lift_hamilton_cycle(cm, [0, 0])
    with pytest.raises(InvalidInput):
        lift_hamilton_cycle(cm, [0])
    identity = hide_bad(dc, *masks(4))
    # (0,2) is an arc but (2,0) is not: wrong order must be rejected
    with pytest.raises(InvalidInput):
        lift_hamilton_cycle(identity, [2, 0, 1, 3])


def test_contraction_serialization_roundtrip(tmp_path):
    dc = make_class(4, [(0, 2), (2, 1), (1, 0), (1, 3), (3, 0), (2, 3), (3, 1), (0, 1)])
    bad, small = masks(4, bad=[2])
    cm = hide_bad(dc, bad, small)
    text = contraction_to_text(cm)
    assert text == "1 : 1 3 2\n2 : 4\n"
    path = tmp_path / "map.txt"
    write_contraction(cm, path)
    assert read_contraction_paths(path) == cm.paths
