"""Splay-based link-cut trees with subtree minima and order statistics.

Represented trees are stored as preferred paths, each path a splay tree
whose in-order runs from the node nearest the root to the deepest node.
A splay root's par pointer is its path parent; splay children recognize
themselves by being their parent's left or right child.

Per splay subtree each node maintains
  size  - number of path nodes,
  pmin  - the path node with the smallest key,
  tmin  - the node with the smallest key in the path nodes plus every
          virtual subtree hanging off them.
Virtual minima are aggregated through a lazy heap per node: demoting a
preferred child pushes (subtree min key, entry serial, min node), and
promoting marks that key dead.  A virtual subtree is never restructured
while it stays virtual, so its min key at promotion time still equals
the pushed one; key uniqueness makes the dead-count bookkeeping exact.

evert() flips a path lazily; all aggregates are symmetric under
reversal, so only child pointers swap.  topmost() assumes the accessed
path is sorted by key (true for heap-ordered represented trees) and is
a plain successor descent.  inorder_index() splays its argument, which
keeps repeated index probes cheap.
"""

from __future__ import annotations

import heapq


class Node:
    __slots__ = ("key", "ref", "left", "right", "par", "flip",
                 "size", "pmin", "tmin", "vheap", "vdead")

    def __init__(self, key, ref):
        self.key = key
        self.ref = ref
        self.left = None
        self.right = None
        self.par = None
        self.flip = False
        self.size = 1
        self.pmin = self
        self.tmin = self
        self.vheap = []
        self.vdead = {}

    def __repr__(self):
        return f"<Node {self.ref} key={self.key}>"


class LinkCutForest:
    def __init__(self):
        self._serial = 0

    def make_node(self, key, ref=None) -> Node:
        return Node(key, ref)

    # -- splay machinery ---------------------------------------------------

    @staticmethod
    def _is_sroot(x: Node) -> bool:
        p = x.par
        return p is None or (p.left is not x and p.right is not x)

    @staticmethod
    def _push(x: Node) -> None:
        if x.flip:
            x.left, x.right = x.right, x.left
            for c in (x.left, x.right):
                if c is not None:
                    c.flip = not c.flip
            x.flip = False

    def _vpeek(self, x: Node):
        h, dead = x.vheap, x.vdead
        while h:
            k = h[0][0]
            c = dead.get(k, 0)
            if not c:
                return h[0]
            heapq.heappop(h)
            if c == 1:
                del dead[k]
            else:
                dead[k] = c - 1
        return None

    def _update(self, x: Node) -> None:
        size = 1
        pm = x
        tm = x
        for c in (x.left, x.right):
            if c is not None:
                size += c.size
                if c.pmin.key < pm.key:
                    pm = c.pmin
                if c.tmin.key < tm.key:
                    tm = c.tmin
        e = self._vpeek(x)
        if e is not None and e[0] < tm.key:
            tm = e[2]
        x.size = size
        x.pmin = pm
        x.tmin = tm

    def _rotate(self, x: Node) -> None:
        p = x.par
        g = p.par
        if p.left is x:
            p.left = x.right
            if x.right is not None:
                x.right.par = p
            x.right = p
        else:
            p.right = x.left
            if x.left is not None:
                x.left.par = p
            x.left = p
        p.par = x
        x.par = g
        if g is not None:
            if g.left is p:
                g.left = x
            elif g.right is p:
                g.right = x
        self._update(p)
        self._update(x)

    def splay(self, x: Node) -> None:
        path = [x]
        while not self._is_sroot(path[-1]):
            path.append(path[-1].par)
        for node in reversed(path):
            self._push(node)
        while not self._is_sroot(x):
            p = x.par
            if self._is_sroot(p):
                self._rotate(x)
            else:
                g = p.par
                if (g.left is p) == (p.left is x):
                    self._rotate(p)
                    self._rotate(x)
                else:
                    self._rotate(x)
                    self._rotate(x)

    # -- preferred-path maintenance ---------------------------------------

    def _virtualize(self, parent: Node, child: Node) -> None:
        # child keeps par=parent as a path-parent pointer.
        self._serial += 1
        heapq.heappush(parent.vheap, (child.tmin.key, self._serial, child.tmin))

    def _devirtualize(self, parent: Node, child: Node) -> None:
        k = child.tmin.key
        parent.vdead[k] = parent.vdead.get(k, 0) + 1

    def access(self, v: Node) -> Node:
        self.splay(v)
        if v.right is not None:
            self._virtualize(v, v.right)
            v.right = None
            self._update(v)
        last = v
        while v.par is not None:
            w = v.par
            self.splay(w)
            if w.right is not None:
                self._virtualize(w, w.right)
            self._devirtualize(w, v)
            w.right = v
            self._update(w)
            last = w
            self.splay(v)
        return last

    # -- represented-tree operations ---------------------------------------

    def root(self, v: Node) -> Node:
        self.access(v)
        x = v
        self._push(x)
        while x.left is not None:
            x = x.left
            self._push(x)
        self.splay(x)
        return x

    def parent(self, v: Node):
        """Represented parent, or None when v is a represented root."""
        self.access(v)
        if v.left is None:
            return None
        x = v.left
        self._push(x)
        while x.right is not None:
            x = x.right
            self._push(x)
        self.splay(x)
        return x

    def link(self, v: Node, w: Node) -> None:
        """Attach represented root v below w.  Trees must differ."""
        assert self.root(v) is not self.root(w), "link would close a cycle"
        self.access(v)
        assert v.left is None, "link argument is not a represented root"
        self.access(w)
        w.right = v
        v.par = w
        self._update(w)

    def cut(self, v: Node) -> bool:
        """Detach v from its represented parent.  False when v is a root."""
        self.access(v)
        if v.left is None:
            return False
        l = v.left
        v.left = None
        l.par = None
        self._update(v)
        return True

    def evert(self, v: Node) -> None:
        """Make v the represented root of its tree."""
        self.access(v)
        v.flip = not v.flip

    def nca(self, v: Node, w: Node):
        if self.root(v) is not self.root(w):
            return None
        self.access(v)
        return self.access(w)

    def pathmin(self, v: Node) -> Node:
        """Node with the smallest key on the path from v to its root."""
        self.access(v)
        return v.pmin

    def treemin(self, v: Node) -> Node:
        """Node with the smallest key anywhere in v's represented tree."""
        self.access(v)
        return v.tmin

    def path_len(self, v: Node) -> int:
        """Number of nodes on the path from v to its root."""
        self.access(v)
        return v.size

    def topmost(self, v: Node, threshold):
        """Nearest-root node on v's root path with key above threshold.

        Requires the represented tree to be heap ordered (keys increase
        away from the root), so the accessed path is key sorted and
        this is a successor descent.  Returns None when every path node
        is at or below the threshold.
        """
        self.access(v)
        best = None
        x = v
        while x is not None:
            self._push(x)
            if x.key > threshold:
                best = x
                x = x.left
            else:
                x = x.right
        if best is not None:
            self.splay(best)
        return best

    def inorder_index(self, x: Node) -> int:
        """Position of x on its preferred path, 0 = nearest the root.

        Meaningful for nodes on a just-accessed path.
        """
        self.splay(x)
        return x.left.size if x.left is not None else 0
