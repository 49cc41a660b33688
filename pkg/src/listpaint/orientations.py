"""Orientations: balanced Eulerian splits, Eulerian-subgraph parity, Alon-Tarsi search,
directed odd cycles, and the odd-cycle-free bounded-outdegree construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CapExceeded, VerificationFailed
from .graph import (
    Graph,
    bits,
    degeneracy_ordering,
    ekt_bipartite_subgraph,
    induced_subgraph,
    is_proper_coloring,
    min_degree_core,
)

PARITY_CAP = 64
NAIVE_PARITY_CAP = 26


class Orientation:
    """One direction for every edge of ``host``; ``out[v]`` is the out-neighbor bitmask."""

    __slots__ = ("host", "out")

    def __init__(self, host: Graph, arcs: Iterable[tuple[int, int]]):
        out = [0] * host.n
        count = 0
        for u, v in arcs:
            if not host.has_edge(u, v):
                raise ValueError(f"({u}, {v}) is not an edge of the host graph")
            if out[u] >> v & 1 or out[v] >> u & 1:
                raise ValueError(f"edge {{{u}, {v}}} oriented twice")
            out[u] |= 1 << v
            count += 1
        if count != host.m:
            raise ValueError(f"{host.m - count} host edges left unoriented")
        self.host = host
        self.out = tuple(out)

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.host.n) for v in bits(self.out[u])]

    def outdegree(self, v: int) -> int:
        return self.out[v].bit_count()

    def indegree(self, v: int) -> int:
        return self.host.degree(v) - self.outdegree(v)

    def max_outdegree(self) -> int:
        return max((o.bit_count() for o in self.out), default=0)

    def __eq__(self, other):
        return isinstance(other, Orientation) and self.host == other.host and self.out == other.out

    def __repr__(self):
        return f"Orientation({self.arcs})"


@dataclass(frozen=True)
class ParityCount:
    even: int
    odd: int

    @property
    def difference(self) -> int:
        return self.even - self.odd


# ---------------------------------------------------------------------------
# Balanced orientation
# ---------------------------------------------------------------------------

def eulerian_split_orientation(g: Graph) -> Orientation:
    """Orientation with every in-degree in {floor(deg/2), ceil(deg/2)}.

    An auxiliary vertex joined to all odd-degree vertices makes every degree
    even; orienting along Eulerian circuits and dropping the auxiliary vertex
    leaves the in/out split balanced.
    """
    n = g.n
    aux = n
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    edge_ends = []
    for u, v in list(g.edges) + [(v, aux) for v in range(n) if g.degree(v) % 2]:
        eid = len(edge_ends)
        edge_ends.append((u, v))
        nbrs[u].append((v, eid))
        nbrs[v].append((u, eid))
    for lst in nbrs:
        lst.sort()
    used = [False] * len(edge_ends)
    ptr = [0] * (n + 1)
    arcs = []
    for start in range(n + 1):
        # Hierholzer; each traversed edge is oriented in walking direction
        stack = [start]
        while stack:
            v = stack[-1]
            lst = nbrs[v]
            while ptr[v] < len(lst) and used[lst[ptr[v]][1]]:
                ptr[v] += 1
            if ptr[v] == len(lst):
                stack.pop()
                continue
            w, eid = lst[ptr[v]]
            used[eid] = True
            if v != aux and w != aux:
                arcs.append((v, w))
            stack.append(w)
    return Orientation(g, arcs)


# ---------------------------------------------------------------------------
# Directed odd cycles
# ---------------------------------------------------------------------------

def strongly_connected_components(o: Orientation) -> list[list[int]]:
    n = o.host.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, iter(bits(o.out[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(bits(o.out[w]))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def _bfs_paths(start: int, step, members: int) -> tuple[dict[int, int], dict[int, int]]:
    parent = {start: start}
    depth = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for w in bits(step(v) & members):
                if w not in parent:
                    parent[w] = v
                    depth[w] = depth[v] + 1
                    nxt.append(w)
        frontier = nxt
    return parent, depth


def _odd_cycle_in_walk(walk: list[int]) -> list[int]:
    """Split a closed walk of odd length into simple cycles and return an odd one."""
    stack: list[int] = []
    pos: dict[int, int] = {}
    for x in walk:
        if x in pos:
            p = pos[x]
            cycle = stack[p:]
            if len(cycle) % 2:
                return cycle
            for y in stack[p + 1:]:
                del pos[y]
            del stack[p + 1:]
        else:
            pos[x] = len(stack)
            stack.append(x)
    raise AssertionError("closed walk had even length")


def has_directed_odd_cycle(o: Orientation) -> tuple[bool, list[int] | None]:
    """Decide whether ``o`` has a directed odd cycle; the cycle is returned as a vertex list.

    Within a strongly connected component an odd closed walk exists iff the
    arcs admit no consistent parity labeling.
    """
    n = o.host.n
    into = [0] * n
    for u in range(n):
        for v in bits(o.out[u]):
            into[v] |= 1 << u
    for comp in strongly_connected_components(o):
        if len(comp) < 3:
            continue
        members = 0
        for v in comp:
            members |= 1 << v
        root = comp[0]
        fwd, depth = _bfs_paths(root, lambda v: o.out[v], members)
        bad = None
        for u in comp:
            for v in bits(o.out[u] & members):
                if depth[u] % 2 == depth[v] % 2:
                    bad = (u, v)
                    break
            if bad:
                break
        if bad is None:
            continue
        back, _ = _bfs_paths(root, lambda v: into[v], members)

        def down(x):  # root -> x along the forward tree
            path = [x]
            while x != root:
                x = fwd[x]
                path.append(x)
            return path[::-1]

        def up(x):  # x -> root along the reverse tree
            path = [x]
            while x != root:
                x = back[x]
                path.append(x)
            return path

        u, v = bad
        walk1 = down(u) + up(v)
        walk2 = down(v)[:-1] + up(v)
        walk = walk1 if (len(walk1) - 1) % 2 else walk2
        return True, _odd_cycle_in_walk(walk)
    return False, None


# ---------------------------------------------------------------------------
# Eulerian subgraph parity
# ---------------------------------------------------------------------------

def eulerian_parity(o: Orientation, cap: int = PARITY_CAP) -> ParityCount:
    """Count Eulerian spanning subdigraphs by arc-count parity.

    Arcs are decided one at a time while tracking each vertex's out-minus-in
    balance; a vertex must be balanced once its last arc is decided, and the
    count below each (arc index, balance vector) is memoized.
    """
    arcs = o.arcs
    m = len(arcs)
    if m > cap:
        raise CapExceeded("edge_count", m, cap)
    n = o.host.n
    remaining = [[0] * n for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        remaining[i] = remaining[i + 1][:]
        u, v = arcs[i]
        remaining[i][u] += 1
        remaining[i][v] += 1
    memo: dict = {}

    def count(i: int, bal: tuple) -> tuple[int, int]:
        if i == m:
            return (1, 0)
        key = (i, bal)
        hit = memo.get(key)
        if hit is not None:
            return hit
        u, v = arcs[i]
        rem = remaining[i + 1]
        even, odd = 0, 0
        # skip arc i
        if abs(bal[u]) <= rem[u] and abs(bal[v]) <= rem[v]:
            e, o_ = count(i + 1, bal)
            even += e
            odd += o_
        # take arc i
        nb = list(bal)
        nb[u] += 1
        nb[v] -= 1
        if abs(nb[u]) <= rem[u] and abs(nb[v]) <= rem[v]:
            e, o_ = count(i + 1, tuple(nb))
            even += o_
            odd += e
        memo[key] = (even, odd)
        return even, odd

    even, odd = count(0, (0,) * n)
    return ParityCount(even, odd)


def eulerian_parity_naive(o: Orientation, cap: int = NAIVE_PARITY_CAP) -> ParityCount:
    """Brute force over all arc subsets; the independent check for :func:`eulerian_parity`."""
    arcs = o.arcs
    m = len(arcs)
    if m > cap:
        raise CapExceeded("edge_count", m, cap)
    n = o.host.n
    even = odd = 0
    for mask in range(1 << m):
        bal = [0] * n
        for i in bits(mask):
            u, v = arcs[i]
            bal[u] += 1
            bal[v] -= 1
        if not any(bal):
            if mask.bit_count() % 2:
                odd += 1
            else:
                even += 1
    return ParityCount(even, odd)


def is_alon_tarsi_orientation(o: Orientation, cap: int = PARITY_CAP) -> bool:
    return eulerian_parity(o, cap).difference != 0


# ---------------------------------------------------------------------------
# Alon-Tarsi search
# ---------------------------------------------------------------------------

def _component_at(g: Graph, comp: list[int], f: Sequence[int], cap: int) -> list[tuple[int, int]] | None:
    sub, mapping = induced_subgraph(g, comp)
    back = {new: old for old, new in mapping.items()}
    if sub.m == 0:
        return [] if all(f[v] >= 1 for v in comp) else None
    budget = [f[back[v]] - 1 for v in range(sub.n)]
    if any(b < 0 for b in budget) or sum(budget) < sub.m:
        return None
    if sub.m > cap:
        raise CapExceeded("edge_count", sub.m, cap)
    edges = sub.edges
    chosen: list[tuple[int, int]] = []
    out = [0] * sub.n

    def search(i: int):
        if i == len(edges):
            o = Orientation(sub, chosen)
            return list(chosen) if is_alon_tarsi_orientation(o, cap) else None
        u, v = edges[i]
        for a, b in ((u, v), (v, u)):
            if out[a] < budget[a]:
                out[a] += 1
                chosen.append((a, b))
                found = search(i + 1)
                chosen.pop()
                out[a] -= 1
                if found is not None:
                    return found
        return None

    found = search(0)
    if found is None:
        return None
    return [(back[a], back[b]) for a, b in found]


def is_f_alon_tarsi(g: Graph, f: Sequence[int], cap: int = PARITY_CAP) -> Orientation | None:
    """An Alon-Tarsi orientation with out-degree below ``f(v)`` at every vertex, if any.

    Components are searched separately: the even-minus-odd Eulerian count
    of a disjoint union is the product over components.
    """
    if len(f) != g.n:
        raise ValueError("token vector length mismatch")
    arcs: list[tuple[int, int]] = []
    for comp in g.components():
        part = _component_at(g, comp, f, cap)
        if part is None:
            return None
        arcs.extend(part)
    return Orientation(g, arcs)


def at_number(g: Graph, cap: int = PARITY_CAP) -> tuple[int, Orientation | None]:
    """Alon-Tarsi number with a witness orientation (None only for the empty vertex set)."""
    if g.n == 0:
        return 0, None
    k = 1
    for comp in g.components():
        sub, _ = induced_subgraph(g, comp)
        k = max(k, 1 + math.ceil(sub.m / sub.n))
    while True:
        o = is_f_alon_tarsi(g, [k] * g.n, cap)
        if o is not None:
            return k, o
        k += 1


# ---------------------------------------------------------------------------
# Odd-cycle-free orientation with bounded out-degree
# ---------------------------------------------------------------------------

def outdegree_bound(d: int, r: int) -> int:
    """floor((1 - 1/(4r+1)) d) + 1."""
    return math.floor(Fraction(4 * r, 4 * r + 1) * d) + 1


def odd_cycle_free_bounded_orientation(
    g: Graph, d: int, coloring: Sequence[int], r: int | None = None, trace: list | None = None
) -> Orientation:
    """Orientation with out-degrees at most floor((1-eps)d)+1, eps = 1/(4r+1), and no directed odd cycle.

    Repeatedly: if the remaining graph is degenerate enough, orient it
    acyclically; otherwise take its dense core, an induced bipartite subgraph
    of the core, orient that subgraph in balanced fashion with every cut edge
    leaving it, and continue on what is left. The result is re-verified.
    """
    if not is_proper_coloring(g, coloring):
        raise ValueError("coloring is not proper")
    if g.max_degree() > d:
        raise ValueError(f"maximum degree {g.max_degree()} exceeds d={d}")
    if r is None:
        r = max(2, len(set(coloring)))
    eps = Fraction(1, 4 * r + 1)
    threshold = (1 - eps) * d + 1
    core_degree = math.floor((1 - eps) * d) + 2
    bound = outdegree_bound(d, r)

    remaining = set(range(g.n))
    arcs: list[tuple[int, int]] = []
    while remaining:
        sub, mapping = induced_subgraph(g, remaining)
        back = {new: old for old, new in mapping.items()}
        degen, order = degeneracy_ordering(sub)
        if degen <= threshold:
            pos = {v: i for i, v in enumerate(order)}
            arcs.extend(
                (back[u], back[v]) if pos[u] < pos[v] else (back[v], back[u]) for u, v in sub.edges
            )
            if trace is not None:
                trace.append({"branch": "acyclic", "vertices": len(remaining), "degeneracy": degen})
            break
        core = sorted(min_degree_core(sub, core_degree))
        core_graph, core_map = induced_subgraph(sub, core)
        core_back = {new: old for old, new in core_map.items()}
        core_colors = [coloring[back[core_back[i]]] for i in range(core_graph.n)]
        piece = ekt_bipartite_subgraph(core_graph, core_colors, core_graph.min_degree())
        piece_vertices = {back[core_back[i]] for i in piece}
        piece_graph, piece_map = induced_subgraph(g, piece_vertices)
        piece_back = {new: old for old, new in piece_map.items()}
        arcs.extend((piece_back[u], piece_back[v]) for u, v in eulerian_split_orientation(piece_graph).arcs)
        for u in piece_vertices:
            for w in bits(g.adj[u]):
                if w in remaining and w not in piece_vertices:
                    arcs.append((u, w))
        if trace is not None:
            trace.append({
                "branch": "bipartite",
                "vertices": len(remaining),
                "degeneracy": degen,
                "core": len(core),
                "piece": len(piece_vertices),
                "piece_min_degree": piece_graph.min_degree(),
            })
        remaining -= piece_vertices

    o = Orientation(g, arcs)
    if o.max_outdegree() > bound:
        raise VerificationFailed(f"max out-degree {o.max_outdegree()} exceeds bound {bound}")
    odd, cycle = has_directed_odd_cycle(o)
    if odd:
        raise VerificationFailed(f"directed odd cycle {cycle}")
    return o
