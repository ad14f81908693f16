"""Heap-ordered forests with a mergeable path structure.

A forest here is a set of rooted trees whose nodes carry distinct keys,
with the keys increasing away from the roots: key(v) > key(parent(v))
for every non-root v.  Besides the usual link/cut operations the forests
support merge(v, w), which takes the two paths from v and from w to
their respective roots and replaces them by a single path containing
the union of their nodes in key order.  Subtrees hanging off either
path keep their attachment points.

Keys are pairs (label, serial) where the serial is the insertion index,
so equal labels never produce equal keys and every comparison is a
plain tuple comparison.  BOTTOM compares below every real key.

Node handles are dense integers issued by insert().  Deleted nodes
leave a tombstone behind; their handles become invalid and every
operation checks liveness before touching the structure.

This module holds the shared pieces (keys, capability flags, operation
counters, the base class) and NaiveForest, a deliberately slow oracle
that stores an explicit parent array and merges by sorting.  The
clever backends live in their own modules and are checked against
this one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

Key = tuple[float, int]

# Compares strictly below any real key; used as a sentinel threshold.
BOTTOM: Key = (float("-inf"), -1)


class InvalidHandleError(ValueError):
    """Raised when an operation is given a dead or unknown node handle."""


class UnsupportedOperationError(RuntimeError):
    """Raised when a backend is asked for an operation it cannot serve."""


@dataclass(frozen=True)
class Capability:
    """What a backend can answer.  Violations raise, never silently degrade."""

    supports_parent: bool
    supports_cut: bool


@dataclass
class OpCounters:
    """Work accounting shared by every backend.

    parent_changes counts re-homings: a node's parent pointer taking a
    new value.  One merge step moves one node once even when the engine
    underneath realizes it as a cut plus a link.  A public cut() of a
    non-root counts one, as does a public link().
    """

    parent_changes: int = 0
    merges: int = 0
    structural_merges: int = 0
    merge_steps: int = 0
    topmost_queries: int = 0
    topmost_cost: int = 0
    solid_insertions: int = 0
    solid_deletions: int = 0
    rank_increases: int = 0
    shorter_path_nodes: int = 0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def snapshot(self) -> "OpCounters":
        return OpCounters(**self.as_dict())

    def delta_from(self, earlier: "OpCounters") -> "OpCounters":
        return OpCounters(**{
            f.name: getattr(self, f.name) - getattr(earlier, f.name)
            for f in fields(self)
        })


class Forest:
    """Common surface of every backend.

    Subclasses must implement insert/root/nca/merge and may implement
    parent/cut/link/delete according to their capability flags.
    """

    caps = Capability(supports_parent=False, supports_cut=False)

    def __init__(self):
        self.keys: list[Key] = []
        self.alive: list[bool] = []
        self.counters = OpCounters()

    # -- handle bookkeeping ------------------------------------------------

    def _new_ref(self, label) -> int:
        ref = len(self.keys)
        self.keys.append((label, ref))
        self.alive.append(True)
        return ref

    def _check(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < len(self.keys)):
            raise InvalidHandleError(f"unknown handle {v!r}")
        if not self.alive[v]:
            raise InvalidHandleError(f"handle {v} refers to a deleted node")

    def key(self, v: int) -> Key:
        self._check(v)
        return self.keys[v]

    def label(self, v: int):
        return self.key(v)[0]

    def handles(self) -> list[int]:
        return [i for i, a in enumerate(self.alive) if a]

    def __len__(self) -> int:
        return sum(self.alive)

    # -- structure ---------------------------------------------------------

    def insert(self, label) -> int:
        raise NotImplementedError

    def root(self, v: int) -> int:
        raise NotImplementedError

    def nca(self, v: int, w: int):
        raise NotImplementedError

    def merge(self, v: int, w: int) -> None:
        raise NotImplementedError

    def parent(self, v: int):
        raise UnsupportedOperationError(
            f"{type(self).__name__} does not answer parent queries")

    def cut(self, v: int) -> bool:
        raise UnsupportedOperationError(
            f"{type(self).__name__} does not support cut")

    def link(self, v: int, w: int) -> None:
        raise NotImplementedError

    def delete(self, v: int) -> None:
        raise NotImplementedError


class NaiveForest(Forest):
    """Parent-array oracle.  Every operation is a bare walk.

    merge() gathers both root paths, sorts their union by key and
    relinks consecutive nodes.  Counter updates are derived from the
    before/after parent maps, which makes this backend the ground truth
    the instrumented backends are compared against: parent_changes here
    is exactly the number of nodes whose parent pointer differs across
    the merge, and that number provably equals the number of merge
    relinks the path-walking algorithms perform.
    """

    caps = Capability(supports_parent=True, supports_cut=True)

    def __init__(self):
        super().__init__()
        self.par: list = []
        self.nkids: list[int] = []

    def insert(self, label) -> int:
        ref = self._new_ref(label)
        self.par.append(None)
        self.nkids.append(0)
        return ref

    def parent(self, v: int):
        self._check(v)
        return self.par[v]

    def root(self, v: int) -> int:
        self._check(v)
        while self.par[v] is not None:
            v = self.par[v]
        return v

    def root_path(self, v: int) -> list[int]:
        """Nodes from v to its root, inclusive, bottom up."""
        self._check(v)
        path = [v]
        while self.par[path[-1]] is not None:
            path.append(self.par[path[-1]])
        return path

    def nca(self, v: int, w: int):
        self._check(v)
        self._check(w)
        above_v = set(self.root_path(v))
        x = w
        while x is not None:
            if x in above_v:
                return x
            x = self.par[x]
        return None

    def link(self, v: int, w: int) -> None:
        self._check(v)
        self._check(w)
        if self.par[v] is not None:
            raise ValueError(f"link: {v} is not a root")
        if self.root(w) == v:
            raise ValueError(f"link: {w} is in the tree rooted at {v}")
        if self.keys[v] <= self.keys[w]:
            raise ValueError("link: child key must exceed parent key")
        self.par[v] = w
        self.nkids[w] += 1
        self.counters.parent_changes += 1

    def cut(self, v: int) -> bool:
        self._check(v)
        if self.par[v] is None:
            return False
        self.nkids[self.par[v]] -= 1
        self.par[v] = None
        self.counters.parent_changes += 1
        return True

    def delete(self, v: int) -> None:
        self._check(v)
        if self.nkids[v] != 0:
            raise ValueError(f"delete: {v} is not a leaf")
        if self.par[v] is not None:
            self.nkids[self.par[v]] -= 1
            self.par[v] = None
        self.alive[v] = False

    def merge(self, v: int, w: int) -> None:
        self._check(v)
        self._check(w)
        self.counters.merges += 1
        u = self.nca(v, w)
        if u == v or u == w:
            # One path contains the other; the union is already a path.
            return

        if u is None:
            seg_v = self.root_path(v)
            seg_w = self.root_path(w)
        else:
            seg_v = self._path_below(v, u)
            seg_w = self._path_below(w, u)
        # Relinking only ever touches path nodes, so the net change is
        # measured over those.
        before = {x: self.par[x] for x in seg_v + seg_w}

        tagged = [(self.keys[x], x, 0) for x in seg_v]
        tagged += [(self.keys[x], x, 1) for x in seg_w]
        tagged.sort()

        above = u
        boundaries = 0
        prev_tag = None
        for _, x, tag in tagged:
            if prev_tag is not None and tag != prev_tag:
                boundaries += 1
            prev_tag = tag
            if self.par[x] != above:
                if self.par[x] is not None:
                    self.nkids[self.par[x]] -= 1
                self.par[x] = above
                if above is not None:
                    self.nkids[above] += 1
            above = x

        net = sum(1 for i, p in before.items() if self.par[i] != p)
        # Side changes along the sorted order are exactly the relinks a
        # path-interleaving merge performs; anything else is a bug here.
        assert net == boundaries, (net, boundaries)

        self.counters.structural_merges += 1
        self.counters.parent_changes += boundaries
        self.counters.merge_steps += boundaries - 1
        shorter = min(len(seg_v), len(seg_w))
        if u is not None:
            shorter += 1
        self.counters.shorter_path_nodes += shorter

    def _path_below(self, v: int, u: int) -> list[int]:
        """Nodes from v up to but excluding the ancestor u."""
        path = []
        x = v
        while x != u:
            path.append(x)
            x = self.par[x]
        return path
