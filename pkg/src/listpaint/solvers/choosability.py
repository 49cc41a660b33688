"""Exhaustive list-assignment search (choosability).

A list assignment is viewed through its color classes V_c = {v : c in L(v)}.
Colors are unlabeled, so an assignment is a multiset of vertex sets that
covers every vertex v exactly f(v) times. Two reductions keep this small:

* a color class that is disconnected in G can be split into its components
  without changing colorability, so classes are connected;
* a class {v} lets v always be colored last, so if every G - v is
  f-choosable then no bad assignment has a singleton class.

The search first recurses on every G - v, then enumerates multisets of
connected classes of size at least two, grouped by their least vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ..errors import VerificationFailed
from ..graph import Graph, bits, chromatic_number_exact, strict_degeneracy
from ._common import check_caps, peel_surplus

MAX_VERTICES = 8


@dataclass(frozen=True)
class ChoosabilityResult:
    choosable: bool
    bad_lists: tuple[tuple[int, ...], ...] | None = None

    def __bool__(self):
        return self.choosable


def list_colorable(adj: Sequence[int], lists: Sequence[Sequence[int]]) -> list[int] | None:
    """Backtracking list coloring (fewest remaining options first)."""
    n = len(adj)
    color = [None] * n

    def options(v):
        used = {color[w] for w in bits(adj[v]) if color[w] is not None}
        return [c for c in lists[v] if c not in used]

    def solve(left: int) -> bool:
        if not left:
            return True
        best, best_opts = None, None
        for v in bits(left):
            opts = options(v)
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = v, opts
                if not opts:
                    return False
        for c in best_opts:
            color[best] = c
            if solve(left & ~(1 << best)):
                return True
        color[best] = None
        return False

    return list(color) if solve((1 << n) - 1) else None


def _connected_sets(adj: tuple[int, ...]) -> list[tuple[int, int]]:
    """(least vertex, mask) for every connected vertex set of size >= 2, sorted."""
    n = len(adj)
    out = []
    for mask in range(1, 1 << n):
        if mask & (mask - 1) == 0:
            continue
        seed = mask & -mask
        seen = seed
        frontier = seed
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            new = adj[v] & mask & ~seen
            seen |= new
            frontier |= new
        if seen == mask:
            out.append(((mask & -mask).bit_length() - 1, mask))
    out.sort()
    return out


def _classes_to_lists(n: int, classes: list[int]) -> tuple[tuple[int, ...], ...]:
    lists = [[] for _ in range(n)]
    for c, mask in enumerate(classes):
        for v in bits(mask):
            lists[v].append(c)
    return tuple(tuple(x) for x in lists)


@lru_cache(maxsize=1 << 14)
def _bad_assignment(adj: tuple[int, ...], tok: tuple[int, ...]) -> tuple[tuple[int, ...], ...] | None:
    """A bad f-assignment for the (connected or not) state, or None if f-choosable."""
    n = len(adj)
    if n == 0:
        return None
    if min(tok) <= 0:
        lists = [tuple(range(100 * i, 100 * i + max(t, 0))) for i, t in enumerate(tok)]
        return tuple(lists)
    full = (1 << n) - 1
    alive, _ = peel_surplus(adj, tok, full)
    if alive != full:
        if not alive:
            return None
        return _lift(adj, tok, alive)
    # vertex-critical step: a bad assignment on some G - v extends with fresh colors
    for v in range(n):
        sub = _lift(adj, tok, full & ~(1 << v))
        if sub is not None:
            return sub

    sets = _connected_sets(adj)
    demand = list(tok)
    chosen: list[int] = []
    found: list = []

    def rec(start: int) -> bool:
        v = next((i for i in range(n) if demand[i]), None)
        if v is None:
            lists = _classes_to_lists(n, chosen)
            if list_colorable(adj, lists) is None:
                found.append(lists)
                return True
            return False
        avail = 0
        for i in range(n):
            if demand[i]:
                avail |= 1 << i
        for j in range(start, len(sets)):
            least, mask = sets[j]
            if least != v:
                if least > v:
                    break
                continue
            if mask & ~avail:
                continue
            for w in bits(mask):
                demand[w] -= 1
            chosen.append(mask)
            if rec(j if demand[v] else 0):
                return True
            chosen.pop()
            for w in bits(mask):
                demand[w] += 1
        return False

    rec(0)
    return found[0] if found else None


def _lift(adj, tok, keep: int):
    """Bad assignment of the sub-state on ``keep`` extended by private colors elsewhere."""
    verts = list(bits(keep))
    pos = {v: i for i, v in enumerate(verts)}
    sub_adj = tuple(sum(1 << pos[w] for w in bits(adj[v] & keep)) for v in verts)
    sub_tok = tuple(tok[v] for v in verts)
    bad = _bad_assignment(sub_adj, sub_tok)
    if bad is None:
        return None
    palette = 1 + max((c for lst in bad for c in lst), default=-1)
    lists = []
    for v in range(len(adj)):
        if v in pos:
            lists.append(bad[pos[v]])
        else:
            lists.append(tuple(range(palette, palette + tok[v])))
            palette += tok[v]
    return tuple(lists)


def is_f_choosable(g: Graph, f: Sequence[int], cap: int = MAX_VERTICES) -> ChoosabilityResult:
    """Decide f-choosability; on failure the result carries a non-colorable assignment."""
    check_caps(g, f, cap)
    bad = _bad_assignment(g.adj, tuple(f))
    return ChoosabilityResult(bad is None, bad)


def ch(g: Graph, cap: int = MAX_VERTICES) -> int:
    """Choosability: least k such that every k-assignment is colorable."""
    if g.n == 0:
        return 0
    check_caps(g, [1] * g.n, cap)
    top = strict_degeneracy(g)
    for k in range(chromatic_number_exact(g), top + 1):
        if is_f_choosable(g, [k] * g.n, cap):
            return k
    raise VerificationFailed(f"no witness at the degeneracy bound {top}")
