"""Reeb graphs and critical-point pairing by merging sweeps.

A Reeb graph records how the level sets of a height function on a
surface split and join: vertices are critical points in increasing
height order, arcs are the cylinders between them.  Every vertex is a
source, a sink, an up-fork or a down-fork, and the pairing problem
matches them up: each down-fork with the up-fork or source where its
two incoming paths last met, each sink with the up-fork it cancels,
and each component's global minimum with its global maximum.

Three routes to the same pairing live here.  reference_pairing walks
paths backward vertex by vertex, quadratic but transparent, and is
the oracle for the other two.  pair_single_pass keeps the visited
part of the graph as a mergeable forest and reads meeting points off
root/nca queries, walking parents only to resolve sinks.
pair_two_pass drops the parent walks entirely by sweeping twice, once
up and once down the reversed graph, so backends without parent
support suffice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Forest, UnsupportedOperationError
from .implicitmerge import ImplicitForest
from .rankmerge import RankMergeForest

SOURCE = "source"
SINK = "sink"
UP_FORK = "up-fork"
DOWN_FORK = "down-fork"

_SIGNATURE = {(0, 1): SOURCE, (1, 0): SINK, (1, 2): UP_FORK,
              (2, 1): DOWN_FORK}


class InvalidReebGraph(ValueError):
    """First validation failure, with the offending vertex or arc."""


@dataclass
class ReebGraph:
    """Vertices 0..n-1 with strictly increasing labels; arc (a, b)
    runs upward, a < b.  Parallel arcs are allowed."""
    labels: list
    arcs: list

    @property
    def n(self) -> int:
        return len(self.labels)

    def degrees(self):
        indeg = [0] * self.n
        outdeg = [0] * self.n
        for a, b in self.arcs:
            outdeg[a] += 1
            indeg[b] += 1
        return indeg, outdeg

    def kinds(self) -> list:
        indeg, outdeg = self.degrees()
        return [_SIGNATURE.get((indeg[x], outdeg[x])) for x in range(self.n)]

    def in_arcs(self) -> list:
        """Tails of each vertex's incoming arcs, one list per vertex."""
        tails = [[] for _ in range(self.n)]
        for a, b in self.arcs:
            tails[b].append(a)
        return tails


def validate(g: ReebGraph) -> None:
    """Raise InvalidReebGraph on the first structural failure."""
    n = g.n
    for i in range(1, n):
        if not g.labels[i - 1] < g.labels[i]:
            raise InvalidReebGraph(
                f"labels not strictly increasing at vertex {i}: "
                f"{g.labels[i - 1]!r} then {g.labels[i]!r}")
    for k, arc in enumerate(g.arcs):
        a, b = arc
        if not (isinstance(a, int) and isinstance(b, int)
                and 0 <= a < b < n):
            raise InvalidReebGraph(f"arc {k} is not an upward pair "
                                   f"of vertex indices: {arc!r}")
    indeg, outdeg = g.degrees()
    for x in range(n):
        if (indeg[x], outdeg[x]) not in _SIGNATURE:
            raise InvalidReebGraph(
                f"vertex {x} has degree signature "
                f"(in {indeg[x]}, out {outdeg[x]}); must be one of "
                "source (0,1), sink (1,0), up-fork (1,2), down-fork (2,1)")
    # Sweeping upward, the number of open arcs (level circles) moves by
    # +1 at sources and up-forks, -1 at down-forks and sinks.  Given
    # the degree and ordering checks this count equals the number of
    # arcs crossing the sweep line, so the checks below cannot fire;
    # they document the model.
    open_arcs = 0
    for x in range(n):
        open_arcs += outdeg[x] - indeg[x]
        if open_arcs < 0:
            raise InvalidReebGraph(f"open arc count negative after {x}")
    if open_arcs != 0:
        raise InvalidReebGraph(f"{open_arcs} arcs left open at the top")


def components(g: ReebGraph) -> list:
    """Connected-component id per vertex (undirected reachability)."""
    par = list(range(g.n))

    def find(a):
        while par[a] != a:
            par[a] = par[par[a]]
            a = par[a]
        return a

    for a, b in g.arcs:
        ra, rb = find(a), find(b)
        if ra != rb:
            par[ra] = rb
    return [find(x) for x in range(g.n)]


def is_connected(g: ReebGraph) -> bool:
    return g.n <= 1 or len(set(components(g))) == 1


# -- reference sweep -------------------------------------------------------

def reference_pairing(g: ReebGraph) -> list:
    """Pair by literal backward path walking, quadratic time.

    The visited part of the graph is rewired as the sweep goes: a
    down-fork's two incoming paths are replaced by their sorted union,
    and a sink's walk skips paired vertices, marking them off as if
    deleted.  Maintains the sweep invariants (in-degree at most one
    once visited; paired exactly when in- and out-degree are both one
    or both zero, counting the virtual deletions) and checks them as
    it goes.  Oracle for both forest-based algorithms.
    """
    validate(g)
    n = g.n
    kinds = g.kinds()
    tails = g.in_arcs()
    _, outdeg0 = g.degrees()

    pred: list = [None] * n       # rewired in-neighbor, None if none
    outdeg = [0] * n              # rewired out-degree, pending arcs too
    paired = [False] * n
    deleted = [False] * n
    pairs: list = []

    def pattern_paired(z: int) -> bool:
        return ((pred[z] is not None and outdeg[z] == 1)
                or (pred[z] is None and outdeg[z] == 0))

    def check(touched) -> None:
        for z in touched:
            if not deleted[z]:
                assert paired[z] == pattern_paired(z), \
                    f"pairing flag and degrees disagree at vertex {z}"

    for x in range(n):
        kind = kinds[x]
        outdeg[x] = outdeg0[x]
        if kind == SOURCE:
            check((x,))
        elif kind == UP_FORK:
            pred[x] = tails[x][0]
            check((x,))
        elif kind == DOWN_FORK:
            v, w = tails[x]
            # walk back concurrently, stepping from the larger side,
            # until the paths meet or a step off a source is attempted
            side_a, side_b = [v], [w]
            a, b = v, w
            while a != b:
                hi = a if a > b else b
                if pred[hi] is None:
                    break
                if hi == a:
                    a = pred[a]
                    side_a.append(a)
                else:
                    b = pred[b]
                    side_b.append(b)
            if a == b:
                y, ptype = a, "a"
                assert kinds[y] == UP_FORK
            else:
                y, ptype = max(a, b), "b"
                assert kinds[y] == SOURCE
            paired[x] = paired[y] = True
            pairs.append((x, y, ptype))
            # replace the walked paths by their sorted union: the
            # bottom keeps its old in-arc, everything else chains up
            union = sorted(set(side_a) | set(side_b))
            for side in (side_a, side_b):
                for i in range(len(side) - 1):
                    outdeg[side[i + 1]] -= 1   # arc pred -> side[i]
            outdeg[v] -= 1
            outdeg[w] -= 1
            chain = union + [x]
            for i in range(len(chain) - 1):
                pred[chain[i + 1]] = chain[i]
                outdeg[chain[i]] += 1
            check(set(chain))
        else:
            v = tails[x][0]
            deleted[x] = True
            outdeg[v] -= 1            # the arc v -> x goes with x
            walked = [v]
            while paired[v]:
                assert not deleted[v]
                deleted[v] = True
                p = pred[v]
                outdeg[p] -= 1        # the arc p -> v goes with v
                v = p
                walked.append(v)
            paired[x] = paired[v] = True
            assert kinds[v] in (SOURCE, UP_FORK)
            pairs.append((x, v, "d" if kinds[v] == SOURCE else "c"))
            check(walked)

    for z in range(n):
        if not deleted[z]:
            assert paired[z] and pattern_paired(z)
    pairs.sort()
    return pairs


# -- forest-based sweeps ---------------------------------------------------

def _sweep(g: ReebGraph, forest: Forest, pair_sinks: bool):
    """Canonical-order sweep over a mergeable forest.

    Each vertex is inserted, then: up-forks merge with their tail;
    down-forks read their partner off root/nca queries before merging
    with both tails; sinks merge with their tail and, when pair_sinks
    is set, walk parents to the first unpaired vertex.  Fresh forests
    assign handle i to vertex i, which the code relies on.

    Returns (case3 pairs, case4 pairs, parent replacement count).
    """
    if len(forest) != 0:
        raise ValueError("sweep needs a fresh, empty forest")
    kinds = g.kinds()
    tails = g.in_arcs()
    paired = [False] * g.n
    case3: list = []
    case4: list = []
    walk_steps = 0
    for x in range(g.n):
        h = forest.insert(g.labels[x])
        assert h == x
        kind = kinds[x]
        if kind == SOURCE:
            pass
        elif kind == UP_FORK:
            forest.merge(x, tails[x][0])
        elif kind == DOWN_FORK:
            v, w = tails[x]
            if v == w:
                y, ptype = v, "a"
            elif forest.root(v) == forest.root(w):
                y, ptype = forest.nca(v, w), "a"
            else:
                y, ptype = max(forest.root(v), forest.root(w)), "b"
            assert kinds[y] == (UP_FORK if ptype == "a" else SOURCE)
            paired[x] = paired[y] = True
            case3.append((x, y, ptype))
            forest.merge(x, v)
            forest.merge(x, w)
        else:
            v = tails[x][0]
            forest.merge(x, v)
            if pair_sinks:
                while paired[v]:
                    v = forest.parent(v)
                    walk_steps += 1
                paired[x] = paired[v] = True
                assert kinds[v] in (SOURCE, UP_FORK)
                case4.append((x, v, "d" if kinds[v] == SOURCE else "c"))
    return case3, case4, walk_steps


def pair_single_pass(g: ReebGraph, forest: Forest = None,
                     require_connected: bool = False) -> list:
    """One sweep with a parent-capable backend."""
    validate(g)
    if require_connected and not is_connected(g):
        raise InvalidReebGraph("graph is not connected")
    if forest is None:
        forest = RankMergeForest()
    if not forest.caps.supports_parent:
        raise UnsupportedOperationError(
            "single-pass pairing walks parents; "
            f"{type(forest).__name__} cannot answer them")
    case3, case4, walk_steps = _sweep(g, forest, pair_sinks=True)
    # every parent replacement retires its vertex for good
    assert walk_steps <= g.n
    return sorted(case3 + case4)


def reverse_graph(g: ReebGraph) -> ReebGraph:
    """Upside-down copy: vertex i becomes n-1-i, labels negate, arcs
    flip.  Sources trade places with sinks, up-forks with down-forks."""
    n = g.n
    labels = [-g.labels[n - 1 - i] for i in range(n)]
    arcs = [(n - 1 - b, n - 1 - a) for a, b in g.arcs]
    return ReebGraph(labels, arcs)


def pair_two_pass(g: ReebGraph, forward_forest: Forest = None,
                  reverse_forest: Forest = None,
                  require_connected: bool = False) -> list:
    """Two parent-free sweeps, one on the graph and one on its reverse.

    Sink resolution is dropped from both sweeps; instead every pair
    involving a sink or source falls out of some down-fork's query:
    fork-fork pairs turn up in both passes (checked to agree), a
    fork-source pair only where the source really is at the bottom.
    The per-component extreme pairs are written down directly.
    """
    validate(g)
    comp = components(g)
    if require_connected and len(set(comp)) > 1:
        raise InvalidReebGraph("graph is not connected")
    if forward_forest is None:
        forward_forest = ImplicitForest()
    if reverse_forest is None:
        reverse_forest = ImplicitForest()

    found: dict = {}

    def put(x: int, y: int, t: str) -> None:
        if x in found:
            assert found[x] == (y, t), \
                f"passes disagree at {x}: {found[x]} vs {(y, t)}"
        found[x] = (y, t)

    first: dict = {}
    last: dict = {}
    for x in range(g.n):
        first.setdefault(comp[x], x)
        last[comp[x]] = x
    for c, x in last.items():
        put(x, first[c], "d")

    case3, _, _ = _sweep(g, forward_forest, pair_sinks=False)
    for x, y, t in case3:
        put(x, y, t)

    rg = reverse_graph(g)
    case3r, _, _ = _sweep(rg, reverse_forest, pair_sinks=False)
    n = g.n
    for x, y, t in case3r:
        # back to original vertex names and upward orientation; a
        # reverse-pass source is an original sink, so b turns into c
        put(n - 1 - y, n - 1 - x, "c" if t == "b" else t)

    return sorted((x, y, t) for x, (y, t) in found.items())


def check_pairing(g: ReebGraph, pairs: list) -> None:
    """Structural sanity of a pairing, independent of how it was made."""
    comp = components(g)
    kinds = g.kinds()
    seen: set = set()
    dcount: dict = {}
    for x, y, t in pairs:
        assert x > y and x not in seen and y not in seen
        seen.update((x, y))
        assert comp[x] == comp[y]
        if t == "a":
            assert {kinds[x], kinds[y]} == {DOWN_FORK, UP_FORK}
        elif t == "b":
            assert kinds[x] == DOWN_FORK and kinds[y] == SOURCE
        elif t == "c":
            assert kinds[x] == SINK and kinds[y] == UP_FORK
        else:
            assert t == "d"
            assert kinds[x] == SINK and kinds[y] == SOURCE
            dcount[comp[x]] = dcount.get(comp[x], 0) + 1
    assert len(seen) == g.n, "pairs do not cover every vertex"
    assert dcount == {c: 1 for c in set(comp)}, \
        "each component needs exactly one extreme pair"


# -- generator -------------------------------------------------------------

def generate(seed: int, n_target: int) -> ReebGraph:
    """Random valid connected Reeb graph with n_target vertices.

    Simulates a sweep over open surface components, each holding the
    set of arcs its boundary currently leaves dangling.  Every step
    spends one vertex on a move drawn uniformly from the feasible
    ones: open a new component, split a dangling arc, join two
    dangling arcs (same component makes a genus loop, different
    components fuse), or close one off.  Feasibility keeps the arc
    count finishable in the remaining budget and never strands a
    component, so the result is connected and exactly n_target long.

    Vertices split evenly into openers (sources, up-forks) and
    closers, so valid graphs have even order; odd targets round up.
    """
    if n_target < 2:
        raise ValueError("need at least a source and a sink")
    n_target += n_target & 1
    rng = random.Random(seed)
    comps: list = []            # per open component, its dangling tails
    labels: list = []
    arcs: list = []
    height = 0.0
    for x in range(n_target):
        remaining = n_target - x
        slots = sum(len(c) for c in comps)
        moves = []
        if slots + 1 <= remaining - 1:
            moves.append("open")
            if slots >= 1:
                moves.append("split")
        if slots >= 2:
            moves.append("join")
        closable = [c for c in comps if len(c) >= 2]
        if closable or (len(comps) == 1 and slots == 1 and remaining == 1):
            moves.append("close")
        move = rng.choice(moves)
        if move == "open":
            comps.append([x])
        elif move == "split":
            c = rng.choice([c for c in comps if c])
            i = rng.randrange(len(c))
            arcs.append((c[i], x))
            c[i:i + 1] = [x, x]
        elif move == "join":
            flat = [(ci, si) for ci, c in enumerate(comps)
                    for si in range(len(c))]
            (c1, s1), (c2, s2) = rng.sample(flat, 2)
            arcs.append((comps[c1][s1], x))
            arcs.append((comps[c2][s2], x))
            if c1 == c2:               # genus loop
                c = comps[c1]
                for si in sorted((s1, s2), reverse=True):
                    del c[si]
                c.append(x)
            else:
                merged = [t for si, t in enumerate(comps[c1]) if si != s1]
                merged += [t for si, t in enumerate(comps[c2]) if si != s2]
                merged.append(x)
                comps = [c for ci, c in enumerate(comps)
                         if ci not in (c1, c2)]
                comps.append(merged)
        else:
            c = rng.choice(closable) if closable else comps[0]
            i = rng.randrange(len(c))
            arcs.append((c[i], x))
            del c[i]
            comps = [cc for cc in comps if cc]
        height += rng.uniform(0.5, 1.5)
        labels.append(round(height, 6))
    assert not comps
    g = ReebGraph(labels, arcs)
    validate(g)
    assert is_connected(g)
    return g
