"""DP-painting game search.

Lister removes g(v) tokens (0 <= g <= f, not all zero) and builds a cover:
each v gets a clique L(v) of size g(v), and every edge uv of G carries a
matching between L(u) and L(v). Painter picks an independent set of the
cover and marks the vertices it meets. Marked vertices leave the game; an
unmarked vertex must keep at least one token.

Search reductions (all exact):
* vertices with more tokens than remaining neighbors, and components, as in
  the painting solver;
* Lister only needs maximal matchings (extra cover edges never help Painter);
* along a spanning forest of the cover support each tree matching can be
  normalized by relabeling the child's list, so only C(g(p), g(c)) choices
  remain per tree edge (one when g(c) >= g(p));
* Painter only needs a minimal set X of vertices to mark whose successor
  position wins; if some such X is greedily colorable from lists of size g
  (an order where each vertex has more list entries than earlier neighbors
  in X), it is realizable in every cover and no cover needs enumerating.
"""

from __future__ import annotations

from itertools import combinations, permutations, product
from typing import Sequence

from ..errors import CapExceeded, VerificationFailed
from ..graph import Graph, bits, strict_degeneracy
from ._common import canon, check_caps, components, peel_surplus, sub_state

MAX_VERTICES = 5
MAX_TOKEN = 4
COVER_BUDGET = 5_000_000


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise CapExceeded("covers", self.used, self.limit)


_memo: dict = {}


def _paintable(adj, tok, alive: int, budget: _Budget) -> bool:
    alive, _ = peel_surplus(adj, tok, alive)
    for comp in components(adj, alive):
        (cadj, ctok), _ = sub_state(adj, tok, comp)
        if not _wins(*canon(cadj, ctok), budget):
            return False
    return True


def _lister_moves(tok: tuple[int, ...]):
    moves = [g for g in product(*(range(t + 1) for t in tok)) if any(g)]
    moves.sort(key=lambda g: (g != tok, -sum(g), g))
    return moves


def _wins(adj, tok, budget: _Budget) -> bool:
    key = (adj, tok)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    result = all(_painter_answers(adj, tok, g, budget) for g in _lister_moves(tok))
    _memo[key] = result
    return result


def greedy_colorable(adj, sizes, x: int) -> bool:
    """True when X can be colored from any cover with lists of the given sizes."""
    alive, _ = peel_surplus(adj, sizes, x)
    return alive == 0


def _painter_answers(adj, tok, g, budget: _Budget) -> bool:
    n = len(adj)
    full = (1 << n) - 1
    supp = must = 0
    for v in range(n):
        if g[v]:
            supp |= 1 << v
            if g[v] == tok[v]:
                must |= 1 << v
    rest = tuple(t - d for t, d in zip(tok, g))
    free = supp & ~must
    free_bits = list(bits(free))
    minimal: list[int] = []
    for size in range(len(free_bits) + 1):
        for extra in combinations(free_bits, size):
            x = must
            for v in extra:
                x |= 1 << v
            if any(m & x == m for m in minimal):
                continue
            if _paintable(adj, rest, full & ~x, budget):
                minimal.append(x)
    if not minimal:
        return False
    if any(greedy_colorable(adj, g, x) for x in minimal):
        return True
    for cover in covers(adj, g, supp):
        budget.spend()
        if not any(realizable(adj, cover, x, g) for x in minimal):
            return False
    return True


def _spanning_forest(adj, supp: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    tree, seen = [], 0
    for root in bits(supp):
        if seen >> root & 1:
            continue
        seen |= 1 << root
        queue = [root]
        while queue:
            p = queue.pop(0)
            for c in bits(adj[p] & supp & ~seen):
                seen |= 1 << c
                tree.append((p, c))
                queue.append(c)
    tree_set = set(tree)
    other = [
        (u, v) for u in bits(supp) for v in bits(adj[u] & supp)
        if u < v and (u, v) not in tree_set and (v, u) not in tree_set
    ]
    return tree, other


def _injections(a: int, b: int):
    """Maximal matchings between lists of sizes a and b, as tuples of pairs."""
    if a <= b:
        for image in permutations(range(b), a):
            yield tuple(zip(range(a), image))
    else:
        for image in permutations(range(a), b):
            yield tuple(zip(image, range(b)))


def covers(adj, g, supp: int):
    """Covers up to relabeling inside each list: dict (u, v) -> set of matched (i, j)."""
    tree, other = _spanning_forest(adj, supp)
    tree_choices = []
    for p, c in tree:
        if g[c] >= g[p]:
            tree_choices.append([tuple((i, i) for i in range(g[p]))])
        else:
            tree_choices.append([tuple(zip(img, range(g[c]))) for img in combinations(range(g[p]), g[c])])
    other_choices = [list(_injections(g[u], g[v])) for u, v in other]
    edges = tree + other
    for pick in product(*tree_choices, *other_choices):
        cover = {}
        for (u, v), match in zip(edges, pick):
            cover[(u, v)] = frozenset(match)
            cover[(v, u)] = frozenset((j, i) for i, j in match)
        yield cover


def realizable(adj, cover, x: int, g) -> bool:
    """Some choice of one list entry per vertex of X is independent in the cover."""
    verts = list(bits(x))
    choice = {}

    def rec(k: int) -> bool:
        if k == len(verts):
            return True
        v = verts[k]
        for a in range(g[v]):
            if all((choice[u], a) not in cover[(u, v)] for u in verts[:k] if adj[u] >> v & 1):
                choice[v] = a
                if rec(k + 1):
                    return True
        return False

    return rec(0)


def is_dp_f_paintable(
    g: Graph, f: Sequence[int], cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN, budget: int = COVER_BUDGET
) -> bool:
    check_caps(g, f, cap, token_cap)
    if any(x < 1 for x in f):
        return g.n == 0
    return _paintable(g.adj, tuple(f), g.vertex_mask, _Budget(budget))


def dp_paintability(g: Graph, cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN, budget: int = COVER_BUDGET) -> int:
    if g.n == 0:
        return 0
    top = strict_degeneracy(g)
    for k in range(1 if g.m == 0 else 2, top + 1):
        if is_dp_f_paintable(g, [k] * g.n, cap, token_cap, budget):
            return k
    raise VerificationFailed(f"no witness at the degeneracy bound {top}")


def is_dp_f_colorable(g: Graph, f: Sequence[int], budget: int = COVER_BUDGET) -> bool:
    """Single-turn game: every full cover with lists of size f has an independent transversal."""
    check_caps(g, f, MAX_VERTICES + 2)
    if any(x < 1 for x in f):
        return g.n == 0
    b = _Budget(budget)
    full = g.vertex_mask
    if greedy_colorable(g.adj, tuple(f), full):
        return True
    for cover in covers(g.adj, tuple(f), full):
        b.spend()
        if not realizable(g.adj, cover, full, f):
            return False
    return True


def clear_cache() -> None:
    _memo.clear()
