"""Merging by path interleaving on top of link-cut trees.

merge(v, w) locates the meeting point u of the two root paths, detaches
the side whose top node is larger, and then alternately splices: find
the deepest prefix of the attached side that exceeds the carried node,
cut there, link the carried piece, and carry on with the detached
remainder.  Every splice re-homes exactly one node, so parent_changes
grows by the number of side alternations in the merged key order, the
same quantity the oracle reads off its before/after parent maps.

topmost queries are charged ceil(lg d) where d is the number of path
positions between the answer and the node the search started from;
consecutive positions cost nothing.  A mirror parent array keeps
parent() at O(1) and double-checks every engine mutation.
"""

from __future__ import annotations

from .core import BOTTOM, Capability, Forest
from .linkcut import LinkCutForest


class DynMergeForest(Forest):
    caps = Capability(supports_parent=True, supports_cut=True)

    def __init__(self):
        super().__init__()
        self.eng = LinkCutForest()
        self.nodes = []
        self.par: list = []
        self.nkids: list[int] = []

    def insert(self, label) -> int:
        ref = self._new_ref(label)
        self.nodes.append(self.eng.make_node(self.keys[ref], ref))
        self.par.append(None)
        self.nkids.append(0)
        return ref

    # -- queries -----------------------------------------------------------

    def parent(self, v: int):
        self._check(v)
        return self.par[v]

    def root(self, v: int) -> int:
        self._check(v)
        return self.eng.root(self.nodes[v]).ref

    def nca(self, v: int, w: int):
        self._check(v)
        self._check(w)
        u = self.eng.nca(self.nodes[v], self.nodes[w])
        return None if u is None else u.ref

    # -- structure ---------------------------------------------------------

    def _set_parent(self, ref: int, newp, count: bool) -> None:
        old = self.par[ref]
        if old is not None:
            self.nkids[old] -= 1
        if newp is not None:
            self.nkids[newp] += 1
        self.par[ref] = newp
        if count:
            self.counters.parent_changes += 1

    def link(self, v: int, w: int) -> None:
        self._check(v)
        self._check(w)
        if self.par[v] is not None:
            raise ValueError(f"link: {v} is not a root")
        if self.eng.root(self.nodes[w]).ref == v:
            raise ValueError(f"link: {w} is in the tree rooted at {v}")
        if self.keys[v] <= self.keys[w]:
            raise ValueError("link: child key must exceed parent key")
        self.eng.link(self.nodes[v], self.nodes[w])
        self._set_parent(v, w, count=True)

    def cut(self, v: int) -> bool:
        self._check(v)
        if self.par[v] is None:
            return False
        did = self.eng.cut(self.nodes[v])
        assert did
        self._set_parent(v, None, count=True)
        return True

    def delete(self, v: int) -> None:
        self._check(v)
        if self.nkids[v] != 0:
            raise ValueError(f"delete: {v} is not a leaf")
        # Tombstone only.  The engine keeps the dangling edge; a dead
        # leaf is never on a live node's root path, so no query sees it.
        if self.par[v] is not None:
            self._set_parent(v, None, count=False)
        self.alive[v] = False

    def _topmost(self, qref: int, thr, ref_node):
        """Counted topmost query starting the charge at ref_node."""
        eng = self.eng
        t = eng.topmost(self.nodes[qref], thr)
        self.counters.topmost_queries += 1
        if t is not None:
            if ref_node is None:
                d = eng.inorder_index(t) + 1
            else:
                d = eng.inorder_index(t) - eng.inorder_index(ref_node)
            assert d >= 1
            self.counters.topmost_cost += (d - 1).bit_length()
        return t

    def merge(self, v: int, w: int) -> None:
        self._check(v)
        self._check(w)
        self.counters.merges += 1
        eng = self.eng
        u_node = eng.nca(self.nodes[v], self.nodes[w])
        u = None if u_node is None else u_node.ref
        if u == v or u == w:
            return

        if u is None:
            shorter = min(eng.path_len(self.nodes[v]),
                          eng.path_len(self.nodes[w]))
            thr = BOTTOM
        else:
            below_v = eng.path_len(self.nodes[v]) - eng.inorder_index(u_node) - 1
            below_w = eng.path_len(self.nodes[w]) - eng.inorder_index(u_node) - 1
            shorter = min(below_v, below_w) + 1
            thr = self.keys[u]
        self.counters.structural_merges += 1
        self.counters.shorter_path_nodes += shorter

        xn = self._topmost(v, thr, u_node)
        yn = self._topmost(w, thr, u_node)
        qv, qw = v, w
        if xn.key < yn.key:
            xn, yn = yn, xn
            qv, qw = qw, qv
        if u is not None:
            # First half of x's re-homing; the link that completes it
            # does the counting.
            eng.cut(xn)
            self._set_parent(xn.ref, None, count=False)

        while xn.key < self.keys[qw]:
            tn = self._topmost(qw, xn.key, yn)
            ptn = eng.parent(tn)   # read before the cut below
            assert ptn is not None
            eng.cut(tn)
            eng.link(xn, ptn)
            self._set_parent(tn.ref, None, count=False)
            self._set_parent(xn.ref, ptn.ref, count=True)
            self.counters.merge_steps += 1
            xn, yn = tn, xn
            qv, qw = qw, qv
        eng.link(xn, self.nodes[qw])
        self._set_parent(xn.ref, qw, count=True)
