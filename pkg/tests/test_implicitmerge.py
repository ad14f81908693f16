"""Equivalent-tree backend against the oracle, pair for pair."""

import random

import pytest

from mergetree.core import NaiveForest, UnsupportedOperationError
from mergetree.implicitmerge import ImplicitForest


def replay(ops, dsu_root=False):
    fo, fi = NaiveForest(), ImplicitForest(dsu_root=dsu_root)
    ho, hi = [], []
    for op in ops:
        if op[0] == "insert":
            ho.append(fo.insert(op[1]))
            hi.append(fi.insert(op[1]))
        else:
            _, a, b = op
            fo.merge(ho[a], ho[b])
            fi.merge(hi[a], hi[b])
    return fo, fi, ho, hi


def assert_equivalent(fo, fi, ho, hi):
    """Every pair's nca and every node's root, engine versus oracle."""
    idx = {h: i for i, h in enumerate(ho)}
    for i, h in enumerate(ho):
        if not fo.alive[h]:
            continue
        assert fi.root(hi[i]) == hi[idx[fo.root(h)]]
        for j, g in enumerate(ho[i:], start=i):
            if not fo.alive[g]:
                continue
            u = fo.nca(h, g)
            got = fi.nca(hi[i], hi[j])
            if u is None:
                assert got is None
            else:
                assert got == hi[idx[u]]


def test_star_stores_chain_as_star():
    # Three merges into the same node: the true tree is the chain
    # 4 -> 3 -> 2 -> 1 but the stored tree is a star around 4.
    fi = ImplicitForest()
    h = {lab: fi.insert(lab) for lab in (1, 2, 3, 4)}
    for lab in (1, 2, 3):
        fi.merge(h[lab], h[4])
    assert fi.edges == {fi._edge(h[lab], h[4]) for lab in (1, 2, 3)}
    assert fi.root(h[4]) == h[1]
    assert fi.nca(h[2], h[3]) == h[2]
    assert fi.nca(h[3], h[4]) == h[3]
    assert fi.counters.merges == 3
    assert fi.counters.structural_merges == 3
    fi.audit()


def test_unsupported_operations():
    fi = ImplicitForest()
    v = fi.insert(1)
    w = fi.insert(2)
    assert not fi.caps.supports_parent
    assert not fi.caps.supports_cut
    with pytest.raises(UnsupportedOperationError):
        fi.parent(v)
    with pytest.raises(UnsupportedOperationError):
        fi.cut(v)
    with pytest.raises(UnsupportedOperationError):
        fi.link(v, w)


@pytest.mark.parametrize("dsu_root", [False, True])
def test_exhaustive_equivalence_small(dsu_root):
    rng = random.Random(4242)
    for _ in range(30):
        n = rng.randrange(2, 25)
        ops = [("insert", rng.random()) for _ in range(n)]
        for _ in range(rng.randrange(1, 2 * n)):
            ops.append(("merge", rng.randrange(n), rng.randrange(n)))
        fo, fi, ho, hi = replay(ops, dsu_root=dsu_root)
        assert_equivalent(fo, fi, ho, hi)
        fi.audit()
        # stored tree never gains or loses an edge it should not have:
        # one edge per live node outside the root of its tree
        trees = {fo.root(h) for h in ho}
        assert len(fi.edges) == n - len(trees)
        assert fi.counters.structural_merges == fo.counters.structural_merges


@pytest.mark.parametrize("dsu_root", [False, True])
def test_differential_with_deletes(dsu_root):
    rng = random.Random(97)
    fo, fi = NaiveForest(), ImplicitForest(dsu_root=dsu_root)
    ho, hi = [], []
    live = []
    for step in range(600):
        r = rng.random()
        if r < 0.30 or len(live) < 2:
            lab = rng.random()
            ho.append(fo.insert(lab))
            hi.append(fi.insert(lab))
            live.append(len(ho) - 1)
        elif r < 0.72:
            a, b = rng.choice(live), rng.choice(live)
            fo.merge(ho[a], ho[b])
            fi.merge(hi[a], hi[b])
        elif r < 0.82 and len(live) > 2:
            a = rng.choice(live)
            if fo.nkids[ho[a]] == 0:
                fo.delete(ho[a])
                fi.delete(hi[a])
                live.remove(a)
        else:
            a, b = rng.choice(live), rng.choice(live)
            u = fo.nca(ho[a], ho[b])
            got = fi.nca(hi[a], hi[b])
            if u is None:
                assert got is None
            else:
                assert got == hi[ho.index(u)]
            assert fi.root(hi[a]) == hi[ho.index(fo.root(ho[a]))]
        if step % 50 == 49:
            fi.audit()
    assert fi.counters.merges == fo.counters.merges
    assert fi.counters.structural_merges == fo.counters.structural_merges


def test_delete_rejects_internal_node():
    fi = ImplicitForest()
    a, b, c = (fi.insert(lab) for lab in (1, 2, 3))
    fi.merge(c, b)
    fi.merge(b, a)       # true tree is the chain c -> b -> a
    with pytest.raises(ValueError):
        fi.delete(b)
    with pytest.raises(ValueError):
        fi.delete(a)
    fi.delete(c)         # deepest node is a leaf
    assert fi.root(b) == a


def test_rebuild_drops_ghosts_and_preserves_queries():
    rng = random.Random(5)
    fo, fi = NaiveForest(), ImplicitForest()
    ho = [fo.insert(lab) for lab in range(40)]
    hi = [fi.insert(lab) for lab in range(40)]
    for _ in range(60):
        a, b = rng.randrange(40), rng.randrange(40)
        fo.merge(ho[a], ho[b])
        fi.merge(hi[a], hi[b])
    removed = set()
    while len(removed) < 25:
        a = rng.randrange(40)
        if a in removed or fo.nkids[ho[a]] != 0:
            continue
        fo.delete(ho[a])
        fi.delete(hi[a])
        removed.add(a)
        fi.audit()
    # more than half the nodes are gone, so a rebuild must have fired,
    # resetting the high-water mark and sweeping the tombstones to date
    assert fi._high_water < 40
    assert len(fi._ghosts) < len(removed)
    assert_equivalent(fo, fi, ho, hi)
    # handles stay valid across the rebuild
    lab = 99.5
    ho.append(fo.insert(lab))
    hi.append(fi.insert(lab))
    keep = next(i for i in range(40) if i not in removed)
    fo.merge(ho[-1], ho[keep])
    fi.merge(hi[-1], hi[keep])
    assert_equivalent(fo, fi, ho, hi)


def test_dsu_and_treemin_routes_agree():
    rng = random.Random(11)
    fa = ImplicitForest(dsu_root=False)
    fb = ImplicitForest(dsu_root=True)
    ha, hb = [], []
    for _ in range(300):
        if rng.random() < 0.4 or len(ha) < 2:
            lab = rng.random()
            ha.append(fa.insert(lab))
            hb.append(fb.insert(lab))
        else:
            i, j = rng.randrange(len(ha)), rng.randrange(len(ha))
            fa.merge(ha[i], ha[j])
            fb.merge(hb[i], hb[j])
        k = rng.randrange(len(ha))
        assert fa.root(ha[k]) == fb.root(hb[k])
