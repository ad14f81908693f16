"""Merge forest that partitions trees into solid paths by subtree rank.

Every node x has rank(x) = floor(lg size(x)), where size counts the
nodes of x's subtree.  An arc to a parent is solid when the two ends
have equal rank, otherwise dashed.  Since two children of equal rank
would force their parent's rank higher, a node has at most one solid
child, so the solid arcs partition each tree into vertical paths.
Ranks never decrease: merges move whole subtrees upward, growing the
sizes of the nodes they pass.  That monotonicity is what makes the
repair work cheap enough to account for: every restructuring of a
solid path is charged to some node whose rank just went up, and each
node can go up at most lg n times.

Representation.  Per node we keep its parent, its solid child, the
number of live children, and d(x) = 1 + total size of the subtrees of
x's dashed children.  Subtree sizes are stored only at the top node of
each solid path; inside a path they follow from
    size(solid_child(p)) = size(p) - d(p)
by walking down.  Each path's nodes sit in a balanced search tree (a
treap with parent pointers) ordered by key, smallest (topmost) first.
The treap root carries the path header: top node, common rank, and the
top's size.  Resolving a node's header is a walk to its treap root, so
splitting or joining paths never re-points per-node header fields.

merge(v, w) walks both root paths bottom-up in lockstep to find the
meeting point, remembering for each side the node where it entered
each path.  It then repeatedly takes the larger of the two current
nodes and reattaches it one path segment deeper on the other side,
locating the attachment point either from the remembered entries (no
search) or by a successor lookup in one path's treap (a counted
topmost query).  Reattaching a subtree grows the sizes along the new
ancestor route; the repair walks the affected paths top-down, peels
off the maximal prefix whose ranks changed, and reattaches those nodes
to neighbouring paths of their new rank.

delete() only tombstones a leaf.  Dead nodes stay in the structure,
invisible to queries, until fewer than half the nodes ever seen alive
remain; then the forest is rebuilt from the live parent map.

cut and link are not supported; the rank bookkeeping has no way to
shrink sizes.
"""

from __future__ import annotations

import math
import random

from .core import Capability, Forest, UnsupportedOperationError

# -- path sequences ---------------------------------------------------------
#
# A treap node per forest node, keyed by the forest key (path order),
# heap-ordered on a random priority, with parent pointers and subtree
# counts.  All operations keep .par and .size exact; the root of each
# treap carries the path header in .hdr.


class _TNode:
    __slots__ = ("ref", "prio", "left", "right", "par", "size", "hdr")

    def __init__(self, ref: int, prio: float):
        self.ref = ref
        self.prio = prio
        self.left = None
        self.right = None
        self.par = None
        self.size = 1
        self.hdr = None


class _Header:
    __slots__ = ("top", "rank", "size_top", "bst")

    def __init__(self, top: int, rank: int, size_top: int):
        self.top = top
        self.rank = rank
        self.size_top = size_top
        self.bst = None


def _bind(hdr: _Header, root) -> None:
    hdr.bst = root
    if root is not None:
        root.hdr = hdr


def _tupd(n) -> None:
    s = 1
    if n.left is not None:
        s += n.left.size
    if n.right is not None:
        s += n.right.size
    n.size = s


def _troot(n):
    while n.par is not None:
        n = n.par
    return n


def _tmerge(a, b):
    """Concatenate two treaps; every key in a precedes every key in b."""
    if a is None:
        return b
    if b is None:
        return a
    if a.prio < b.prio:
        r = _tmerge(a.right, b)
        a.right = r
        r.par = a
        _tupd(a)
        a.par = None
        return a
    r = _tmerge(a, b.left)
    b.left = r
    r.par = b
    _tupd(b)
    b.par = None
    return b


def _tsplit(root, bound, keys):
    """Split into (keys <= bound, keys > bound); both roots unparented."""
    if root is None:
        return None, None
    if keys[root.ref] <= bound:
        a, b = _tsplit(root.right, bound, keys)
        root.right = a
        if a is not None:
            a.par = root
        _tupd(root)
        root.par = None
        if b is not None:
            b.par = None
        return root, b
    a, b = _tsplit(root.left, bound, keys)
    root.left = b
    if b is not None:
        b.par = root
    _tupd(root)
    root.par = None
    if a is not None:
        a.par = None
    return a, root


def _tsucc(root, bound, keys):
    """Smallest node with key strictly above bound, or None."""
    best = None
    cur = root
    while cur is not None:
        if keys[cur.ref] > bound:
            best = cur
            cur = cur.left
        else:
            cur = cur.right
    return best


def _tindex(n) -> int:
    """Number of path nodes strictly above n (0 for the top)."""
    idx = n.left.size if n.left is not None else 0
    cur = n
    while cur.par is not None:
        p = cur.par
        if cur is p.right:
            idx += (p.left.size if p.left is not None else 0) + 1
        cur = p
    return idx


def _tleftmost(root):
    while root.left is not None:
        root = root.left
    return root


def _tinorder(root, out):
    if root is None:
        return
    _tinorder(root.left, out)
    out.append(root.ref)
    _tinorder(root.right, out)


class _Side:
    """Per-argument traversal record used by merge.

    regions[i] = (entry, below): entry is the first node the bottom-up
    walk visited on the i-th solid path, below is the previously
    visited path top (so parent(below) == entry), None for the first
    region.  The merge consults regions strictly from the last one
    down, tracked by cursor.
    """

    __slots__ = ("qnode", "regions", "cursor")

    def __init__(self, qnode, regions):
        self.qnode = qnode
        self.regions = regions
        self.cursor = len(regions) - 1


class RankMergeForest(Forest):
    """Solid-path forest with subtree-rank partitioning."""

    caps = Capability(supports_parent=True, supports_cut=False)

    def __init__(self, rebuild_on_halving: bool = True):
        super().__init__()
        self.par: list = []
        self.solid_child: list = []
        self.dsize: list[int] = []    # 1 + sizes of dashed children
        self.nkids: list[int] = []    # live children
        self.tnode: list = []
        self._ghosts: set[int] = set()
        self._live = 0
        self._high_water = 0
        self._rebuild_on_halving = rebuild_on_halving
        self._rng = random.Random(0x5EED)
        # steps taken by the most recent root()/nca() traversal
        self.last_query_steps = 0
        # arc-type changes per dashed-detach reattachment: nominally at
        # most three (two arcs can turn solid, one dashed), but both
        # dash cases can fire together; overruns are counted, not fatal
        self.case2_flips_max = 0
        self.case2_overruns = 0

    # -- basic operations --------------------------------------------------

    def insert(self, label) -> int:
        ref = self._new_ref(label)
        self.par.append(None)
        self.solid_child.append(None)
        self.dsize.append(1)
        self.nkids.append(0)
        tn = _TNode(ref, self._rng.random())
        self.tnode.append(tn)
        _bind(_Header(ref, 0, 1), tn)
        self._live += 1
        if self._live > self._high_water:
            self._high_water = self._live
        return ref

    def parent(self, v: int):
        self._check(v)
        return self.par[v]

    def link(self, v: int, w: int) -> None:
        raise UnsupportedOperationError(
            "RankMergeForest cannot link; sizes only ever grow")

    def _header_of(self, ref: int) -> _Header:
        return _troot(self.tnode[ref]).hdr

    def root(self, v: int) -> int:
        self._check(v)
        steps = 0
        cur = v
        while True:
            h = self._header_of(cur)
            if h.top != cur:
                cur = h.top
            else:
                p = self.par[cur]
                if p is None:
                    break
                cur = p
            steps += 1
        self.last_query_steps = steps
        return cur

    def nca(self, v: int, w: int):
        u, _, _ = self._trace(v, w)
        return u

    def _trace(self, v: int, w: int):
        """Concurrent bottom-up walk of both root paths.

        Steps along solid paths jump straight to the path top.  The
        deeper (larger-key) side moves; the walk stops when both sides
        stand on the same path (their entries' minimum is the nearest
        common ancestor) or both are rooted on different paths.
        """
        self._check(v)
        self._check(w)
        steps = 0
        a, ha = v, self._header_of(v)
        b, hb = w, self._header_of(w)
        ra = [(v, None)]
        rb = [(w, None)]
        u = None
        while True:
            if ha is hb:
                ea = ra[-1][0]
                eb = rb[-1][0]
                u = ea if self.keys[ea] <= self.keys[eb] else eb
                break
            a_can = a != ha.top or self.par[a] is not None
            b_can = b != hb.top or self.par[b] is not None
            if not a_can and not b_can:
                u = None
                break
            if a_can and (not b_can or self.keys[a] > self.keys[b]):
                a, ha = self._trace_step(a, ha, ra)
            else:
                b, hb = self._trace_step(b, hb, rb)
            steps += 1
        self.last_query_steps = steps
        return u, _Side(v, ra), _Side(w, rb)

    def _trace_step(self, cur, h, regions):
        if cur != h.top:
            return h.top, h
        p = self.par[cur]
        regions.append((p, cur))
        return p, self._header_of(p)

    # -- size arithmetic ---------------------------------------------------

    def _size_walk(self, start: int, size_start: int, target: int) -> int:
        """Size of target, given an ancestor on the same solid path."""
        size = size_start
        cur = start
        while cur != target:
            size -= self.dsize[cur]
            cur = self.solid_child[cur]
            assert cur is not None
        return size

    # -- merge -------------------------------------------------------------

    def merge(self, v: int, w: int) -> None:
        self.counters.merges += 1
        u, sv, sw = self._trace(v, w)
        if u == v or u == w:
            return
        self.counters.structural_merges += 1

        x, size_x = self._merge_init(sv, u)
        y, size_y = self._merge_init(sw, u)
        side_x, side_y = sv, sw
        if u is not None:
            assert self.par[x] == u and self.par[y] == u
            assert x != y
        if self.keys[x] < self.keys[y]:
            x, y = y, x
            size_x, size_y = size_y, size_x
            side_x, side_y = side_y, side_x

        while self.keys[x] < self.keys[side_y.qnode]:
            t, z, size_t = self._consult(side_y, x, y, size_y)
            self._reattach(x, size_x, z)
            self.counters.merge_steps += 1
            y, size_y = t, size_t
            if self.keys[x] < self.keys[y]:
                x, y = y, x
                size_x, size_y = size_y, size_x
                side_x, side_y = side_y, side_x
        self._reattach(x, size_x, side_y.qnode)

    def _merge_init(self, side: _Side, u):
        """First node this side contributes, and its subtree size.

        With no common ancestor that is the side's root.  Otherwise it
        is the child of u the side's path came through: the top of the
        path below u when the walk entered u's path at u itself, or
        u's solid child when the walk entered strictly below u.
        """
        entry, below = side.regions[-1]
        if u is None:
            h = self._header_of(entry)
            assert self.par[h.top] is None
            return h.top, h.size_top
        if entry == u:
            assert below is not None
            side.cursor = len(side.regions) - 2
            h = self._header_of(below)
            assert h.top == below
            return below, h.size_top
        # the walk entered u's path below u, so u keeps a solid child
        # of its own rank and that child is on this side's root path
        c = self.solid_child[u]
        assert c is not None
        hstar = self._header_of(u)
        size_u = self._size_walk(hstar.top, hstar.size_top, u)
        return c, size_u - self.dsize[u]

    def _consult(self, side: _Side, x: int, y: int, size_y: int):
        """Next placement on this side: (node t, new parent z, size of t).

        If x belongs above the remembered entry s of the current
        region, the boundary is found by a successor search in s's
        path, a counted topmost query charged ceil(lg of the distance
        from the finger y).  Otherwise x belongs below s and above the
        recorded top underneath it, which costs nothing.
        """
        s, below = side.regions[side.cursor]
        assert side.cursor >= 0
        if self.keys[x] < self.keys[s]:
            h = self._header_of(s)
            tn = _tsucc(h.bst, self.keys[x], self.keys)
            assert tn is not None
            t = tn.ref
            z = self.par[t]
            yn = self.tnode[y]
            assert _troot(yn) is _troot(tn)
            d = _tindex(tn) - _tindex(yn)
            assert d >= 1
            self.counters.topmost_queries += 1
            self.counters.topmost_cost += (d - 1).bit_length()
            size_z = self._size_walk(y, size_y, z)
            assert self.solid_child[z] == t
            return t, z, size_z - self.dsize[z]
        assert below is not None
        assert self.par[below] == s
        h = self._header_of(below)
        assert h.top == below
        side.cursor -= 1
        return below, s, h.size_top

    # -- reattachment and rank repair --------------------------------------

    def _reattach(self, x: int, size_x: int, z: int) -> None:
        """Move the subtree of x from under its parent to under z.

        Everything on the route from z up to (excluding) x's old
        parent gains size_x; stored sizes live only at path tops and
        in d-values, so the walk touches one header per crossed path
        plus the dashed arc bridging to the next.  Ranks along those
        paths can only rise; each crossed path is then repaired
        top-down.
        """
        q = self.par[x]
        assert z != q and z != x
        case1 = q is not None and self.solid_child[q] == x
        if q is not None:
            if case1:
                self._split_below(q, x, size_x)
                self.solid_child[q] = None
            else:
                self.dsize[q] -= size_x
            self.nkids[q] -= 1
        self.par[x] = z
        self.dsize[z] += size_x
        self.nkids[z] += 1
        self.counters.parent_changes += 1

        crossed = []
        cur = z
        while True:
            h = self._header_of(cur)
            if q is not None and self._header_of(q) is h:
                # route capped inside one path: no stored size moves,
                # and no rank can change below q
                break
            crossed.append(h)
            h.size_top += size_x
            top = h.top
            pq = self.par[top]
            if pq is None:
                assert q is None
                break
            self.dsize[pq] += size_x
            if pq == q:
                break
            cur = pq

        flips_z_path = 0
        last = len(crossed) - 1
        for i, h in enumerate(reversed(crossed)):
            flips = self._fix_ranks(h)
            if i == last:
                flips_z_path = flips

        zh = self._header_of(z)
        xh = self._header_of(x)
        assert zh is not xh
        assert xh.top == x and xh.rank == size_x.bit_length() - 1
        if zh.rank == xh.rank:
            assert self.solid_child[z] is None
            self.solid_child[z] = x
            self.dsize[z] -= size_x
            _bind(zh, _tmerge(zh.bst, xh.bst))
            flips_z_path += 1
        if not case1:
            # Usually at most 3 arcs change type here.  When the grown
            # segment splits into two runs while z also sheds its old
            # solid child, both dash cases fire and the count hits 4.
            if flips_z_path > self.case2_flips_max:
                self.case2_flips_max = flips_z_path
            if flips_z_path > 3:
                self.case2_overruns += 1

    def _split_below(self, q: int, x: int, size_x: int) -> None:
        """Detach a solid child: split q's path between q and x."""
        h = self._header_of(q)
        a, b = _tsplit(h.bst, self.keys[q], self.keys)
        _bind(h, a)
        assert b is not None and _tleftmost(b).ref == x
        nh = _Header(x, h.rank, size_x)
        _bind(nh, b)

    def _fix_ranks(self, h: _Header) -> int:
        """Restore the partition of one grown path; returns arc flips.

        Sizes on this path only increased, so the nodes whose rank
        changed form a prefix from the top.  They are peeled off and
        regrouped into runs of equal new rank: the topmost run may
        continue its parent's path, the rest become fresh paths, and
        arcs between runs go dashed.  Every peeled node's rank rose,
        which is what pays for its deletion and reinsertion.
        """
        size = h.size_top
        base = h.rank
        cur = h.top
        changers = []  # (ref, new rank, new size), top down
        while cur is not None:
            r = size.bit_length() - 1
            if r == base:
                break
            assert r > base
            changers.append((cur, r, size))
            size -= self.dsize[cur]
            cur = self.solid_child[cur]
        if not changers:
            return 0

        flips = 0
        self.counters.solid_deletions += len(changers)
        self.counters.solid_insertions += len(changers)
        self.counters.rank_increases += sum(r - base for _, r, _ in changers)

        deep = changers[-1][0]
        moved, remnant = _tsplit(h.bst, self.keys[deep], self.keys)
        if cur is not None:
            # unchanged suffix keeps the header, with a new top
            h.top = cur
            h.size_top = size
            _bind(h, remnant)
            self.solid_child[deep] = None
            self.dsize[deep] += size
            flips += 1
        else:
            assert remnant is None

        runs = []
        for item in changers:
            if runs and runs[-1][0][1] == item[1]:
                runs[-1].append(item)
            else:
                runs.append([item])
        assert all(runs[i][0][1] > runs[i + 1][0][1]
                   for i in range(len(runs) - 1))

        pieces = []
        seg = moved
        for run in runs[:-1]:
            a, seg = _tsplit(seg, self.keys[run[-1][0]], self.keys)
            pieces.append(a)
        pieces.append(seg)

        prev_bottom = None
        for i, (run, piece) in enumerate(zip(runs, pieces)):
            top_ref, run_rank, top_size = run[0]
            absorbed = False
            if i == 0:
                pq = self.par[top_ref]
                if pq is not None:
                    qh = self._header_of(pq)
                    if qh.rank == run_rank:
                        # the old top now matches its parent's rank
                        assert self.solid_child[pq] is None
                        self.solid_child[pq] = top_ref
                        self.dsize[pq] -= top_size
                        _bind(qh, _tmerge(qh.bst, piece))
                        flips += 1
                        absorbed = True
            else:
                assert self.solid_child[prev_bottom] == top_ref
                self.solid_child[prev_bottom] = None
                self.dsize[prev_bottom] += top_size
                flips += 1
            if not absorbed:
                nh = _Header(top_ref, run_rank, top_size)
                _bind(nh, piece)
            prev_bottom = run[-1][0]
        # absorb + remnant dash + one dash per run boundary
        assert flips <= len(runs) + 1
        return flips

    # -- queries on solid paths --------------------------------------------

    def topmost_solid(self, v: int, w):
        """Topmost node on v's solid path with label strictly above w.

        Cost is charged as ceil(lg of the path distance searched over),
        matching the merge-internal accounting.
        """
        self._check(v)
        h = self._header_of(v)
        tn = _tsucc(h.bst, (w, math.inf), self.keys)
        self.counters.topmost_queries += 1
        vi = _tindex(self.tnode[v])
        if tn is None:
            self.counters.topmost_cost += max(vi, 0).bit_length()
            return None
        d = abs(_tindex(tn) - vi)
        if d > 1:
            self.counters.topmost_cost += (d - 1).bit_length()
        return tn.ref

    # -- deletion ----------------------------------------------------------

    def delete(self, v: int) -> None:
        self._check(v)
        if self.nkids[v] != 0:
            raise ValueError(f"delete: {v} is not a leaf")
        self.alive[v] = False
        self._ghosts.add(v)
        p = self.par[v]
        if p is not None:
            self.nkids[p] -= 1
        self._live -= 1
        if self._rebuild_on_halving and self._live * 2 <= self._high_water:
            self._rebuild()

    def _rebuild(self) -> None:
        """Re-derive the whole partition from the live parent map.

        Dead nodes finally leave the structure here.  Handles, keys
        and counters are untouched; sizes, ranks, solid paths and
        d-values are recomputed from scratch.
        """
        n = len(self.keys)
        live = [i for i in range(n) if self.alive[i]]
        par_live = {}
        for i in live:
            p = self.par[i]
            assert p is None or self.alive[p]
            par_live[i] = p

        self.par = [None] * n
        self.solid_child = [None] * n
        self.dsize = [1] * n
        self.nkids = [0] * n
        self.tnode = [None] * n
        self._ghosts.clear()

        kids = {i: [] for i in live}
        roots = []
        for i in live:
            p = par_live[i]
            self.par[i] = p
            if p is None:
                roots.append(i)
            else:
                kids[p].append(i)
                self.nkids[p] += 1

        size = {i: 1 for i in live}
        order = []
        stack = list(roots)
        while stack:
            i = stack.pop()
            order.append(i)
            stack.extend(kids[i])
        for i in reversed(order):
            p = par_live[i]
            if p is not None:
                size[p] += size[i]
        rank = {i: size[i].bit_length() - 1 for i in live}

        for i in live:
            sc = None
            d = 1
            for c in kids[i]:
                if rank[c] == rank[i]:
                    assert sc is None
                    sc = c
                else:
                    d += size[c]
            self.solid_child[i] = sc
            self.dsize[i] = d

        for i in live:
            p = par_live[i]
            if p is None or rank[i] != rank[p]:
                chain = [i]
                while self.solid_child[chain[-1]] is not None:
                    chain.append(self.solid_child[chain[-1]])
                bst = None
                for c in chain:
                    tn = _TNode(c, self._rng.random())
                    self.tnode[c] = tn
                    bst = _tmerge(bst, tn)
                _bind(_Header(i, rank[i], size[i]), bst)

        self._high_water = self._live

    # -- consistency audit -------------------------------------------------

    def audit(self) -> None:
        """Recompute everything from the parent map and compare.

        Covers subtree sizes, ranks, the solid/dashed classification
        (including at most one solid child per node), d-values, stored
        top sizes, header reachability and path sequence order.  Any
        mismatch is an assertion failure.
        """
        n = len(self.keys)
        present = [i for i in range(n)
                   if self.alive[i] or i in self._ghosts]
        kids = {i: [] for i in present}
        roots = []
        for i in present:
            p = self.par[i]
            if p is None:
                roots.append(i)
            else:
                kids[p].append(i)

        size = {i: 1 for i in present}
        order = []
        stack = list(roots)
        while stack:
            i = stack.pop()
            order.append(i)
            stack.extend(kids[i])
        assert len(order) == len(present)
        for i in reversed(order):
            p = self.par[i]
            if p is not None:
                size[p] += size[i]
        rank = {i: size[i].bit_length() - 1 for i in present}

        for i in present:
            p = self.par[i]
            if p is not None:
                assert self.keys[i] > self.keys[p]
                assert rank[i] <= rank[p]
            solid_kids = [c for c in kids[i] if rank[c] == rank[i]]
            assert len(solid_kids) <= 1
            expect = solid_kids[0] if solid_kids else None
            assert self.solid_child[i] == expect, (i, expect)
            d = 1 + sum(size[c] for c in kids[i] if rank[c] != rank[i])
            assert self.dsize[i] == d, (i, d, self.dsize[i])
            assert self.nkids[i] == sum(1 for c in kids[i] if self.alive[c])

        covered = 0
        for i in present:
            p = self.par[i]
            if p is not None and rank[i] == rank[p]:
                continue
            h = self._header_of(i)
            assert h.top == i
            assert h.rank == rank[i]
            assert h.size_top == size[i]
            chain = [i]
            while self.solid_child[chain[-1]] is not None:
                chain.append(self.solid_child[chain[-1]])
            inorder = []
            _tinorder(h.bst, inorder)
            assert inorder == chain, (inorder, chain)
            assert h.bst.size == len(chain)
            self._audit_treap(h.bst, None)
            covered += len(chain)
        assert covered == len(present)

    def _audit_treap(self, node, parent) -> int:
        if node is None:
            return 0
        assert node.par is parent
        if parent is not None:
            assert parent.prio <= node.prio
        s = 1 + self._audit_treap(node.left, node)
        s += self._audit_treap(node.right, node)
        assert node.size == s
        return s
