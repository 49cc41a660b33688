"""Undirected simple graphs on dense integer vertex ids, plus structural primitives.

Adjacency is stored as one Python ``int`` bitmask per vertex, so vertex sets
behave like bitsets throughout the package.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, DegreeExceeds, NotBipartite, WitnessNotFound

CANONICAL_CAP = 10
CHROMATIC_CAP = 12


def bits(mask: int):
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Immutable simple graph on vertices ``0..n-1``."""

    __slots__ = ("n", "adj", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)
        self._edges = None

    @classmethod
    def from_masks(cls, adj: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(adj)
        g.adj = tuple(adj)
        g._edges = None
        return g

    # -- queries -------------------------------------------------------------

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        if self._edges is None:
            self._edges = tuple(
                (u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))
            )
        return self._edges

    @property
    def m(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def is_independent(self, mask: int) -> bool:
        return all(not (self.adj[v] & mask) for v in bits(mask))

    def components(self) -> list[list[int]]:
        seen = 0
        comps = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp = 1 << s
            frontier = 1 << s
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= self.adj[v]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            comps.append(list(bits(comp)))
        return comps

    # -- derived graphs --------------------------------------------------------

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        return Graph(self.n, list(self.edges) + list(edges))

    def remove_edge(self, u: int, v: int) -> "Graph":
        adj = list(self.adj)
        adj[u] &= ~(1 << v)
        adj[v] &= ~(1 << u)
        return Graph.from_masks(adj)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with vertex ``v`` renamed ``perm[v]``."""
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"


# ---------------------------------------------------------------------------
# Named graphs and random generators
# ---------------------------------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with center 0."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with sides ``0..a-1`` and ``a..a+b-1``."""
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, edges)


def gnp_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    draws = rng.random(n * (n - 1) // 2)
    pairs = list(combinations(range(n), 2))
    return Graph(n, [e for e, x in zip(pairs, draws) if x < p])


def random_regular_bipartite(side: int, d: int, rng: np.random.Generator) -> Graph:
    """A simple d-regular bipartite graph with sides ``0..side-1`` and ``side..2side-1``.

    Circulant construction under random relabelings of both sides, so the
    result is always simple and regular.
    """
    if d > side:
        raise DegreeExceeds(f"d={d} exceeds side size {side}")
    pa = rng.permutation(side)
    pb = rng.permutation(side)
    offsets = rng.permutation(side)[:d]
    edges = [(int(pa[i]), side + int(pb[(i + int(j)) % side])) for i in range(side) for j in offsets]
    return Graph(2 * side, edges)


def random_colorable_graph(
    n: int, r: int, d: int, p: float, rng: np.random.Generator
) -> tuple[Graph, list[int]]:
    """A random graph with a planted proper r-coloring and maximum degree at most d."""
    color = [int(c) for c in rng.integers(0, r, size=n)]
    pairs = [(u, v) for u, v in combinations(range(n), 2) if color[u] != color[v]]
    order = rng.permutation(len(pairs))
    deg = [0] * n
    edges = []
    for idx in order:
        u, v = pairs[int(idx)]
        if deg[u] < d and deg[v] < d and rng.random() < p:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph(n, edges), color


# ---------------------------------------------------------------------------
# Canonical labeling
# ---------------------------------------------------------------------------

def _refine(cells: list[list[int]], adj: Sequence[int]) -> list[list[int]]:
    while True:
        masks = [to_mask(c) for c in cells]
        out = []
        changed = False
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            groups: dict[tuple, list[int]] = {}
            for v in c:
                sig = tuple((adj[v] & m).bit_count() for m in masks)
                groups.setdefault(sig, []).append(v)
            if len(groups) > 1:
                changed = True
            for sig in sorted(groups):
                out.append(groups[sig])
        cells = out
        if not changed:
            return cells


def _leaf_code(order: Sequence[int], adj: Sequence[int]) -> int:
    code = 0
    bit = 0
    for j in range(1, len(order)):
        aj = adj[order[j]]
        for i in range(j):
            if aj >> order[i] & 1:
                code |= 1 << bit
            bit += 1
    return code


@lru_cache(maxsize=1 << 18)
def canonical_labeling(adj: tuple[int, ...], colors: tuple | None = None) -> tuple[tuple, tuple[int, ...]]:
    """Canonical key and vertex order for a (vertex-colored) graph.

    Individualization-refinement: refine the color partition by neighbor
    counts, branch on the first non-singleton cell, keep the minimum leaf
    encoding. Two inputs share a key iff they are color-preserving isomorphic.
    ``order[i]`` is the original vertex placed at canonical position ``i``.
    """
    n = len(adj)
    if colors is None:
        colors = (0,) * n
    by_color: dict = {}
    for v in range(n):
        by_color.setdefault(colors[v], []).append(v)
    start = _refine([by_color[c] for c in sorted(by_color)], adj)

    best_code = None
    best_order = None
    stack = [start]
    while stack:
        cells = stack.pop()
        idx = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if idx is None:
            order = [c[0] for c in cells]
            code = _leaf_code(order, adj)
            if best_code is None or code < best_code:
                best_code, best_order = code, order
            continue
        cell = cells[idx]
        # twins (equal neighborhoods up to each other) give isomorphic subtrees
        reps = []
        for v in cell:
            if not any((adj[v] & ~(1 << u)) == (adj[u] & ~(1 << v)) for u in reps):
                reps.append(v)
        for v in reversed(reps):
            rest = [u for u in cell if u != v]
            stack.append(_refine(cells[:idx] + [[v], rest] + cells[idx + 1:], adj))
    key = (n, tuple(colors[v] for v in best_order), best_code or 0)
    return key, tuple(best_order)


def canonical_form(g: Graph, cap: int = CANONICAL_CAP) -> str:
    """String that is equal for two graphs iff they are isomorphic."""
    if g.n > cap:
        raise CapExceeded("vertex_count", g.n, cap)
    key, _ = canonical_labeling(g.adj)
    return f"{key[0]}:{key[2]:x}"


def enumerate_graphs(n: int, connected_only: bool = False) -> list[Graph]:
    """All graphs on ``n`` vertices up to isomorphism, canonically relabeled."""
    if n > 6:
        raise CapExceeded("vertex_count", n, 6)
    pairs = list(combinations(range(n), 2))
    seen = {}
    for mask in range(1 << len(pairs)):
        g = Graph(n, [pairs[i] for i in bits(mask)])
        key, order = canonical_labeling(g.adj)
        if key in seen:
            continue
        inv = [0] * n
        for pos, v in enumerate(order):
            inv[v] = pos
        seen[key] = g.relabel(inv)
    out = sorted(seen.values(), key=lambda h: (h.m, h.edges))
    if connected_only:
        out = [h for h in out if len(h.components()) <= 1]
    return out


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------

def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph induced by ``s``; new ids follow ascending old ids."""
    keep = sorted(set(s))
    for v in keep:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} not in graph")
    mapping = {v: i for i, v in enumerate(keep)}
    mask = to_mask(keep)
    edges = [(mapping[u], mapping[v]) for u in keep for v in bits(g.adj[u] & mask) if u < v]
    return Graph(len(keep), edges), mapping


def degeneracy_ordering(g: Graph) -> tuple[int, list[int]]:
    """Smallest-last ordering; every vertex has at most ``degeneracy`` later neighbors."""
    alive = g.vertex_mask
    deg = g.degrees()
    order = []
    k = 0
    for _ in range(g.n):
        v = min(bits(alive), key=lambda x: (deg[x], x))
        k = max(k, deg[v])
        order.append(v)
        alive &= ~(1 << v)
        for w in bits(g.adj[v] & alive):
            deg[w] -= 1
    return k, order


def strict_degeneracy(g: Graph) -> int:
    """sd(G) = degeneracy + 1 (1 for the empty graph on one vertex, 0 for no vertices)."""
    if g.n == 0:
        return 0
    return degeneracy_ordering(g)[0] + 1


def min_degree_core(g: Graph, k: int) -> frozenset[int]:
    """The k-core: the maximal vertex set inducing minimum degree at least k."""
    alive = g.vertex_mask
    changed = True
    while changed:
        changed = False
        for v in bits(alive):
            if (g.adj[v] & alive).bit_count() < k:
                alive &= ~(1 << v)
                changed = True
    return frozenset(bits(alive))


def bipartition(g: Graph) -> tuple[frozenset[int], frozenset[int]] | None:
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] != -1:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in bits(g.adj[v]):
                if side[w] == -1:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return None
    a = frozenset(v for v in range(g.n) if side[v] == 0)
    return a, frozenset(range(g.n)) - a


def is_proper_coloring(g: Graph, color: Sequence[int]) -> bool:
    return len(color) == g.n and all(color[u] != color[v] for u, v in g.edges)


def proper_coloring(g: Graph, r: int) -> list[int] | None:
    """Backtracking r-coloring (DSATUR branching order); None when none exists."""
    n = g.n
    if n == 0:
        return []
    if r <= 0:
        return None
    color = [-1] * n
    full = (1 << r) - 1

    def used(v):
        m = 0
        for w in bits(g.adj[v]):
            if color[w] >= 0:
                m |= 1 << color[w]
        return m

    def solve(done: int, ncolors: int) -> bool:
        if done == n:
            return True
        best, best_key, best_used = -1, None, 0
        for v in range(n):
            if color[v] < 0:
                u = used(v)
                key = (u.bit_count(), g.degree(v))
                if best_key is None or key > best_key:
                    best, best_key, best_used = v, key, u
        free = full & ~best_used
        # colors beyond the first unused one are interchangeable
        limit = min(r, ncolors + 1)
        for c in range(limit):
            if free >> c & 1:
                color[best] = c
                if solve(done + 1, max(ncolors, c + 1)):
                    return True
        color[best] = -1
        return False

    return color if solve(0, 0) else None


def chromatic_number_exact(g: Graph, cap: int = CHROMATIC_CAP) -> int:
    if g.n > cap:
        raise CapExceeded("vertex_count", g.n, cap)
    if g.n == 0:
        return 0
    k = 1
    while proper_coloring(g, k) is None:
        k += 1
    return k


def regular_bipartite_completion(g: Graph, d: int) -> tuple[Graph, list[int]]:
    """A d-regular bipartite supergraph of ``g`` and the embedding of ``g``'s vertices.

    Sides are padded to a common size of at least ``d`` and the degree
    deficits are filled greedily (largest deficit first). When the greedy
    step stalls, the current graph is doubled: a second copy with sides
    swapped is added and every deficient vertex is joined to its twin.
    """
    sides = bipartition(g)
    if sides is None:
        raise NotBipartite("input graph has an odd cycle")
    if g.max_degree() > d:
        raise DegreeExceeds(f"maximum degree {g.max_degree()} exceeds d={d}")
    a_side, b_side = sorted(sides[0]), sorted(sides[1])
    size = max(len(a_side), len(b_side), d)
    # new ids: A side 0..size-1, B side size..2size-1
    embed = [0] * g.n
    for i, v in enumerate(a_side):
        embed[v] = i
    for i, v in enumerate(b_side):
        embed[v] = size + i
    nbr = [set() for _ in range(2 * size)]
    for u, v in g.edges:
        nbr[embed[u]].add(embed[v])
        nbr[embed[v]].add(embed[u])
    left = list(range(size))
    right = list(range(size, 2 * size))

    while True:
        deficit = {v: d - len(nbr[v]) for v in left + right}
        stalled = False
        while any(deficit[v] for v in left):
            a = max(left, key=lambda v: (deficit[v], -v))
            candidates = sorted(
                (b for b in right if deficit[b] > 0 and b not in nbr[a]),
                key=lambda b: (-deficit[b], b),
            )
            if len(candidates) < deficit[a]:
                stalled = True
                break
            for b in candidates[: deficit[a]]:
                nbr[a].add(b)
                nbr[b].add(a)
                deficit[b] -= 1
            deficit[a] = 0
        if not stalled:
            break
        # doubling fallback: the twin copy has its sides swapped
        total = len(nbr)
        twin = {v: v + total for v in range(total)}
        new_nbr = [set(s) for s in nbr] + [{twin[w] for w in s} for s in nbr]
        for v in range(total):
            if len(nbr[v]) < d:
                new_nbr[v].add(twin[v])
                new_nbr[twin[v]].add(v)
        nbr = new_nbr
        old_left, old_right = left, right
        left = old_left + [twin[v] for v in old_right]
        right = old_right + [twin[v] for v in old_left]

    edges = [(u, v) for u in range(len(nbr)) for v in nbr[u] if u < v]
    return Graph(len(nbr), edges), embed


def ekt_bipartite_subgraph(g: Graph, coloring: Sequence[int], delta: int | Fraction) -> frozenset[int]:
    """An induced bipartite vertex set of minimum degree at least delta / (2r).

    Searches pairs of color classes, densest pair first, taking the
    threshold core of each. A pair whose average degree is at least
    delta / (r - 1) always exists and its core is nonempty, so the
    exhaustive fallback only guards against malformed inputs.
    """
    if not is_proper_coloring(g, coloring):
        raise ValueError("coloring is not proper")
    classes: dict[int, list[int]] = {}
    for v, c in enumerate(coloring):
        classes.setdefault(c, []).append(v)
    r = len(classes)
    if g.n == 0:
        raise WitnessNotFound("empty graph")
    threshold = _ceil(Fraction(delta) / (2 * max(r, 1)))
    if threshold <= 0:
        return frozenset([0])

    def check(vs: frozenset[int]) -> bool:
        if not vs:
            return False
        sub, _ = induced_subgraph(g, vs)
        return bipartition(sub) is not None and sub.min_degree() >= threshold

    pairs = []
    keys = sorted(classes)
    for i, j in combinations(keys, 2):
        vs = classes[i] + classes[j]
        sub, _ = induced_subgraph(g, vs)
        pairs.append((Fraction(2 * sub.m, len(vs)), i, j))
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    for _, i, j in pairs:
        sub, mapping = induced_subgraph(g, classes[i] + classes[j])
        core = min_degree_core(sub, threshold)
        if core:
            back = {new: old for old, new in mapping.items()}
            found = frozenset(back[v] for v in core)
            if check(found):
                return found
    if g.n <= 16:
        for size in range(g.n, 0, -1):
            for vs in combinations(range(g.n), size):
                if check(frozenset(vs)):
                    return frozenset(vs)
    raise WitnessNotFound(f"no induced bipartite subgraph with minimum degree >= {threshold}")


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)
