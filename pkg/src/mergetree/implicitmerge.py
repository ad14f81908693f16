"""Merging in an equivalent tree, one cut and one link per merge.

The forest is stored only up to query equivalence: the engine keeps
some tree on the same vertex set in which, for every pair (x, y), the
smallest key on the x..y path equals the true nearest common ancestor,
and the smallest key overall equals the true root.  Both promised
queries are then single engine operations, and merge collapses to a
constant number of them: re-root at v, read the meeting point
u = pathmin(w), and unless u is an endpoint detach u from its parent
and hang v below w.  The stored tree drifts away from the true tree
(three merges into a common node leave a star where the true tree is a
chain) but the minima agree everywhere, which is all root and nca see.

The price is everything parent shaped: equivalent trees share minima,
not edges, so parent() and cut() raise.  Deleted leaves are
tombstoned in place; a dead leaf is never the smallest key on a live
pair's path, so queries cannot see it, and a rebuild on halving
re-derives the live true forest from pairwise meeting points.
"""

from __future__ import annotations

from .core import Capability, Forest, UnsupportedOperationError
from .linkcut import LinkCutForest


class ImplicitForest(Forest):
    """Mergeable forest with root/nca only, no parent access.

    ``dsu_root`` switches root() and the same-tree test from the
    engine's tree-minimum aggregate to a disjoint-set structure with
    per-set minima (merges only ever join sets, so union-find fits).
    Both routes are maintained; the flag picks which one answers.

    Counters: merges and structural_merges carry the same meaning as
    in the other backends (a merge is structural when it changes some
    true parent, which here is exactly when the engine is edited).
    parent_changes stays 0: the stored tree re-homes nodes on its own
    schedule and cannot attribute true re-homings.
    """

    caps = Capability(supports_parent=False, supports_cut=False)

    def __init__(self, dsu_root: bool = False,
                 rebuild_on_halving: bool = True):
        super().__init__()
        self.eng = LinkCutForest()
        self.nodes: list = []
        # mirror of the engine's undirected edge set, as ordered ref
        # pairs; lets tests and audit() see the stored tree's shape
        self.edges: set[tuple[int, int]] = set()
        self.dsu_root = dsu_root
        self._dpar: list[int] = []
        self._dsz: list[int] = []
        self._dmin: list[int] = []
        self._ghosts: set[int] = set()
        self._live = 0
        self._high_water = 0
        self._rebuild_on_halving = rebuild_on_halving

    def insert(self, label) -> int:
        ref = self._new_ref(label)
        self.nodes.append(self.eng.make_node(self.keys[ref], ref))
        self._dpar.append(ref)
        self._dsz.append(1)
        self._dmin.append(ref)
        self._live += 1
        if self._live > self._high_water:
            self._high_water = self._live
        return ref

    # -- disjoint sets with per-set minimum --------------------------------

    def _dfind(self, a: int) -> int:
        while self._dpar[a] != a:
            self._dpar[a] = self._dpar[self._dpar[a]]
            a = self._dpar[a]
        return a

    def _dunion(self, a: int, b: int) -> None:
        ra, rb = self._dfind(a), self._dfind(b)
        if ra == rb:
            return
        if self._dsz[ra] < self._dsz[rb]:
            ra, rb = rb, ra
        self._dpar[rb] = ra
        self._dsz[ra] += self._dsz[rb]
        if self.keys[self._dmin[rb]] < self.keys[self._dmin[ra]]:
            self._dmin[ra] = self._dmin[rb]

    # -- queries -----------------------------------------------------------

    def _same_tree(self, v: int, w: int) -> bool:
        if self.dsu_root:
            return self._dfind(v) == self._dfind(w)
        return self.eng.root(self.nodes[v]) is self.eng.root(self.nodes[w])

    def root(self, v: int) -> int:
        self._check(v)
        if self.dsu_root:
            return self._dmin[self._dfind(v)]
        return self.eng.treemin(self.nodes[v]).ref

    def nca(self, v: int, w: int):
        self._check(v)
        self._check(w)
        if not self._same_tree(v, w):
            return None
        self.eng.evert(self.nodes[v])
        return self.eng.pathmin(self.nodes[w]).ref

    # -- structure ---------------------------------------------------------

    @staticmethod
    def _edge(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def merge(self, v: int, w: int) -> None:
        self._check(v)
        self._check(w)
        c = self.counters
        c.merges += 1
        eng = self.eng
        vn, wn = self.nodes[v], self.nodes[w]
        if not self._same_tree(v, w):
            eng.evert(vn)
            eng.link(vn, wn)
            self.edges.add(self._edge(v, w))
            self._dunion(v, w)
            c.structural_merges += 1
            return
        eng.evert(vn)
        u = eng.pathmin(wn)
        if u is vn or u is wn:
            # the meeting point is an endpoint, so one root path already
            # contains the other and the union changes nothing
            return
        pu = eng.parent(u)
        eng.cut(u)
        self.edges.remove(self._edge(u.ref, pu.ref))
        eng.link(vn, wn)
        self.edges.add(self._edge(v, w))
        c.structural_merges += 1

    def link(self, v: int, w: int) -> None:
        raise UnsupportedOperationError(
            "ImplicitForest does not support link")

    def delete(self, v: int) -> None:
        self._check(v)
        # There is no child count to consult, so leafness is checked the
        # one way an equivalent tree allows: v is internal exactly when
        # it is the meeting point of itself and some other live node.
        self.eng.evert(self.nodes[v])
        for x in self.handles():
            if x != v and self.eng.pathmin(self.nodes[x]) is self.nodes[v]:
                raise ValueError(f"delete: {v} is not a leaf")
        self.alive[v] = False
        self._ghosts.add(v)
        self._live -= 1
        if self._rebuild_on_halving and self._live * 2 <= self._high_water:
            self._rebuild()

    def _rebuild(self) -> None:
        """Extract the live true forest and store it as itself.

        Ghosts finally leave the structure here.  The true parent of v
        is its deepest proper ancestor, recovered as the largest key
        among the meeting points of v with every other live node in its
        tree (v's ancestor a is nca(v, a), so all ancestors appear).
        Quadratic in the survivors, but rebuilds only fire after the
        structure has halved.  Handles, keys and counters are kept.
        """
        eng = self.eng
        live = self.handles()
        comp = {}
        for v in live:
            comp[v] = eng.root(self.nodes[v]).ref
        parmap: dict[int, int | None] = {}
        for v in live:
            eng.evert(self.nodes[v])
            best = None
            for x in live:
                if x == v or comp[x] != comp[v]:
                    continue
                m = eng.pathmin(self.nodes[x])
                if m is not self.nodes[v]:
                    assert m.ref not in self._ghosts
                    if best is None or self.keys[m.ref] > self.keys[best]:
                        best = m.ref
            parmap[v] = best

        self.eng = LinkCutForest()
        self.nodes = [None] * len(self.keys)
        for v in live:
            self.nodes[v] = self.eng.make_node(self.keys[v], v)
        self.edges = set()
        self._dpar = list(range(len(self.keys)))
        self._dsz = [1] * len(self.keys)
        self._dmin = list(range(len(self.keys)))
        for v in live:
            p = parmap[v]
            if p is not None:
                self.eng.link(self.nodes[v], self.nodes[p])
                self.edges.add(self._edge(v, p))
                self._dunion(v, p)
        self._ghosts.clear()
        self._high_water = self._live

    # -- verification ------------------------------------------------------

    def audit(self) -> None:
        """Check the edge mirror, tree count and both root routes."""
        eng = self.eng
        present = [i for i in range(len(self.keys))
                   if self.nodes[i] is not None]
        for a, b in self.edges:
            eng.evert(self.nodes[a])
            assert eng.parent(self.nodes[b]) is self.nodes[a], \
                f"mirrored edge ({a}, {b}) is not an engine edge"
        roots = {eng.root(self.nodes[i]).ref for i in present}
        assert len(self.edges) == len(present) - len(roots), \
            "edge count does not match nodes minus trees"
        for v in self.handles():
            want = eng.treemin(self.nodes[v]).ref
            got = self._dmin[self._dfind(v)]
            assert got == want, \
                f"set minimum {got} disagrees with tree minimum {want}"
