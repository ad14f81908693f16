"""Path-interleaving backend against the oracle, op for op."""

import random

import pytest

from mergetree.core import InvalidHandleError, NaiveForest
from mergetree.dynmerge import DynMergeForest

COMPARED = ("merges", "structural_merges", "parent_changes",
            "merge_steps", "shorter_path_nodes")


def both():
    return NaiveForest(), DynMergeForest()


def test_chain_merge_matches_oracle_counters():
    fo, fd = both()
    for f in (fo, fd):
        r = [f.insert(lab) for lab in (1, 2, 3, 4, 5)]
        f.link(r[2], r[0])
        f.link(r[4], r[2])
        f.link(r[3], r[1])
        f.merge(r[4], r[3])
        assert [f.parent(x) for x in r] == [None, r[0], r[1], r[2], r[3]]
    for name in COMPARED:
        assert getattr(fo.counters, name) == getattr(fd.counters, name)
    assert fd.counters.topmost_queries > 0


def test_merge_below_common_ancestor():
    fd = DynMergeForest()
    r = [fd.insert(lab) for lab in (1, 2, 3, 4, 5)]
    fd.link(r[1], r[0])
    fd.link(r[2], r[0])
    fd.link(r[3], r[1])
    fd.link(r[4], r[2])
    base = fd.counters.snapshot()
    fd.merge(r[3], r[4])
    assert [fd.parent(r[i]) for i in (1, 2, 3, 4)] == [r[0], r[1], r[2], r[3]]
    d = fd.counters.delta_from(base)
    assert d.parent_changes == 3
    assert d.merge_steps == 2
    assert d.shorter_path_nodes == 3


def test_nested_merge_is_noop():
    fd = DynMergeForest()
    r = [fd.insert(lab) for lab in (1, 2, 3)]
    fd.link(r[1], r[0])
    fd.link(r[2], r[1])
    base = fd.counters.snapshot()
    fd.merge(r[2], r[0])
    fd.merge(r[0], r[2])
    d = fd.counters.delta_from(base)
    assert d.structural_merges == 0 and d.parent_changes == 0


def test_interleaved_rounds_parent_change_total():
    # Pairing up singletons, then pairs, then quadruples: the change
    # total for 8 nodes must come to 8*3 - 8 + 1.
    for cls in (NaiveForest, DynMergeForest):
        f = cls()
        refs = [f.insert(lab) for lab in range(8)]
        top = {x: refs[x] for x in range(8)}   # deepest handle per tree
        for half in (4, 2, 1):
            for x in range(half):
                f.merge(top[x], top[x + half])
                top[x] = max(top[x], top[x + half],
                             key=lambda h: f.key(h))
        assert f.counters.parent_changes == 17, cls.__name__


def test_cut_link_delete_roundtrip():
    fd = DynMergeForest()
    a, b, c = (fd.insert(lab) for lab in (1, 2, 3))
    fd.link(b, a)
    fd.link(c, b)
    assert fd.cut(c) is True
    assert fd.root(c) == c and fd.nca(a, c) is None
    fd.link(c, a)
    assert fd.parent(c) == a
    fd.cut(c)
    fd.delete(c)
    with pytest.raises(InvalidHandleError):
        fd.parent(c)
    with pytest.raises(ValueError):
        fd.delete(a)            # still has child b
    fd.delete(b)
    fd.delete(a)
    assert len(fd) == 0


def live_parents(f):
    return {v: f.parent(v) for v in f.handles()}


def random_op(rng, fo, fd, n_labels):
    hs = fo.handles()
    roll = rng.random()
    if not hs or roll < 0.15:
        lab = rng.randrange(n_labels)
        assert fo.insert(lab) == fd.insert(lab)
        return
    v = rng.choice(hs)
    w = rng.choice(hs)
    if roll < 0.60:
        fo.merge(v, w)
        fd.merge(v, w)
    elif roll < 0.70:
        assert fo.cut(v) == fd.cut(v)
    elif roll < 0.78:
        ok_o = ok_d = True
        try:
            fo.link(v, w)
        except ValueError:
            ok_o = False
        try:
            fd.link(v, w)
        except ValueError:
            ok_d = False
        assert ok_o == ok_d
    elif roll < 0.86:
        leaves = [x for x in hs if fo.nkids[x] == 0]
        if leaves:
            x = rng.choice(leaves)
            fo.delete(x)
            fd.delete(x)
    else:
        assert fo.root(v) == fd.root(v)
        assert fo.nca(v, w) == fd.nca(v, w)


def test_differential_random_ops():
    for seed in (101, 202, 303):
        rng = random.Random(seed)
        fo, fd = both()
        for _ in range(400):
            random_op(rng, fo, fd, n_labels=40)
            assert live_parents(fo) == live_parents(fd)
        for name in COMPARED:
            assert getattr(fo.counters, name) == getattr(fd.counters, name)
