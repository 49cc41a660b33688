"""Shared state handling for the exhaustive solvers.

Solver states are pairs ``(adj, tok)``: a tuple of neighbor bitmasks on
vertices ``0..n-1`` and a tuple of token counts. ``canon`` relabels a state
into its canonical form so that isomorphic states share one memo entry.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import CapExceeded
from ..graph import Graph, bits, canonical_labeling, to_mask

State = tuple[tuple[int, ...], tuple[int, ...]]


def check_caps(g: Graph, f: Sequence[int], max_vertices: int, max_token: int | None = None) -> None:
    if len(f) != g.n:
        raise ValueError(f"expected {g.n} token values, got {len(f)}")
    if g.n > max_vertices:
        raise CapExceeded("vertex_count", g.n, max_vertices)
    if max_token is not None and f and max(f) > max_token:
        raise CapExceeded("token_value", max(f), max_token)


def sub_state(adj: Sequence[int], tok: Sequence[int], keep: int) -> tuple[State, list[int]]:
    """Restrict to the vertices in bitmask ``keep``; returns the state and the kept ids."""
    verts = list(bits(keep))
    pos = {v: i for i, v in enumerate(verts)}
    new_adj = []
    for v in verts:
        m = 0
        for w in bits(adj[v] & keep):
            m |= 1 << pos[w]
        new_adj.append(m)
    return (tuple(new_adj), tuple(tok[v] for v in verts)), verts


def canon(adj: tuple[int, ...], tok: tuple[int, ...]) -> State:
    """Canonical representative of the token-colored graph."""
    _, order = canonical_labeling(adj, tok)
    return sub_state_ordered(adj, tok, order)


def sub_state_ordered(adj, tok, order) -> State:
    pos = {v: i for i, v in enumerate(order)}
    keep = to_mask(order)
    new_adj = []
    for v in order:
        m = 0
        for w in bits(adj[v] & keep):
            m |= 1 << pos[w]
        new_adj.append(m)
    return tuple(new_adj), tuple(tok[v] for v in order)


def components(adj: Sequence[int], alive: int) -> list[int]:
    """Connected components of the graph induced by ``alive``, as bitmasks."""
    out = []
    rest = alive
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = adj[v] & alive & ~comp
            comp |= new
            frontier |= new
        out.append(comp)
        rest &= ~comp
    return out


def peel_surplus(adj: Sequence[int], tok: Sequence[int], alive: int) -> tuple[int, list[int]]:
    """Repeatedly drop vertices whose tokens exceed their remaining degree.

    Returns the surviving bitmask and the dropped vertices in drop order.
    """
    dropped = []
    changed = True
    while changed:
        changed = False
        for v in bits(alive):
            if tok[v] > (adj[v] & alive).bit_count():
                alive &= ~(1 << v)
                dropped.append(v)
                changed = True
    return alive, dropped


def density_ok(adj: Sequence[int], tok: Sequence[int], alive: int) -> bool:
    """Every induced subgraph U has sum over U of (tok - 1) at least |E(U)|.

    Necessary for removability and for elimination by ReduceValue/EdgeDelete:
    both processes spend at least one token per edge while keeping every
    count positive.
    """
    verts = list(bits(alive))
    n = len(verts)
    if n > 12:
        return sum(tok[v] - 1 for v in verts) * 2 >= sum((adj[v] & alive).bit_count() for v in verts)
    for sub in range(1, 1 << n):
        mask = 0
        budget = 0
        for i in range(n):
            if sub >> i & 1:
                mask |= 1 << verts[i]
                budget += tok[verts[i]] - 1
        edges2 = sum((adj[v] & mask).bit_count() for v in bits(mask))
        if budget * 2 < edges2:
            return False
    return True


def maximal_independent_sets(adj: Sequence[int], mask: int):
    """Maximal independent subsets of ``mask`` (Bron-Kerbosch on the complement)."""

    def rec(r: int, p: int, x: int):
        if not p and not x:
            yield r
            return
        for v in bits(p):
            b = 1 << v
            yield from rec(r | b, p & ~adj[v] & ~b, x & ~adj[v] & ~b)
            p &= ~b
            x |= b

    yield from rec(0, mask, 0)
