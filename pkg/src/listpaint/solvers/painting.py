"""Online list coloring (painting game) by memoized game-tree search.

A position is the uncolored part of the graph with the tokens left at each
vertex. Lister names a nonempty set S; Painter colors an independent I inside
S; the vertices of S - I each lose a token and must keep at least one.

Reductions used by the search, all exact:
* a vertex with more tokens than remaining neighbors is always colorable
  (Painter adds it whenever no neighbor is colored in the same round);
* components are played independently;
* Painter only needs maximal independent replies.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import CapExceeded, VerificationFailed
from ..graph import Graph, bits, strict_degeneracy
from ._common import canon, check_caps, components, maximal_independent_sets, peel_surplus, sub_state

MAX_VERTICES = 8
MAX_TOKEN = 6

_memo: dict = {}


def _painter_replies(adj, tok, s: int):
    must = 0
    for v in bits(s):
        if tok[v] == 1:
            must |= 1 << v
    for v in bits(must):
        if adj[v] & must:
            return
    blocked = must
    for v in bits(must):
        blocked |= adj[v]
    for extra in maximal_independent_sets(adj, s & ~blocked):
        yield must | extra


def _successor(adj, tok, alive: int, s: int, i: int) -> tuple[int, tuple[int, ...]]:
    new = list(tok)
    for v in bits(s & ~i):
        new[v] -= 1
    return alive & ~i, tuple(new)


def _paintable(adj, tok, alive: int) -> bool:
    alive, _ = peel_surplus(adj, tok, alive)
    for comp in components(adj, alive):
        (cadj, ctok), _ = sub_state(adj, tok, comp)
        if not _wins(*canon(cadj, ctok)):
            return False
    return True


def _wins(adj, tok) -> bool:
    key = (adj, tok)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    n = len(adj)
    full = (1 << n) - 1
    # big Lister moves first: they refute quickly
    result = True
    for s in sorted(range(1, full + 1), key=lambda x: -x.bit_count()):
        if not any(_paintable(adj, nt, na) for na, nt in
                   (_successor(adj, tok, full, s, i) for i in _painter_replies(adj, tok, s))):
            result = False
            break
    _memo[key] = result
    return result


def is_f_paintable(g: Graph, f: Sequence[int], cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN) -> bool:
    check_caps(g, f, cap, token_cap)
    if any(x < 1 for x in f):
        return g.n == 0
    return _paintable(g.adj, tuple(f), g.vertex_mask)


def paintability(g: Graph, cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN) -> int:
    """Least k such that Painter wins with k tokens everywhere."""
    if g.n == 0:
        return 0
    top = strict_degeneracy(g)
    for k in range(1 if g.m == 0 else 2, top + 1):
        if is_f_paintable(g, [k] * g.n, cap, token_cap):
            return k
    raise VerificationFailed(f"no witness at the degeneracy bound {top}")


# ---------------------------------------------------------------------------
# Explicit strategies
# ---------------------------------------------------------------------------

def _normalize(alive: int, tok) -> tuple[int, tuple[int, ...]]:
    return alive, tuple(t if alive >> v & 1 else 0 for v, t in enumerate(tok))


def paint_strategy(g: Graph, f: Sequence[int], max_states: int = 20000) -> list[dict] | None:
    """Full Painter policy over every reachable position, or None if Lister wins.

    Each entry maps a position (alive mask, tokens) to one reply I for every
    Lister set S. Positions are stored on the original vertex ids.
    """
    check_caps(g, f, MAX_VERTICES, MAX_TOKEN)
    adj = g.adj
    policy: dict[tuple[int, tuple[int, ...]], list] = {}
    stack = [_normalize(g.vertex_mask, tuple(f))]
    while stack:
        alive, tok = stack.pop()
        if (alive, tok) in policy or not alive:
            continue
        if len(policy) >= max_states:
            raise CapExceeded("strategy_states", len(policy), max_states)
        replies = []
        for s in range(1, alive + 1):
            if s & ~alive:
                continue
            sub_adj = [adj[v] & alive for v in range(g.n)]
            for i in _painter_replies(sub_adj, tok, s):
                nxt_alive, nxt_tok = _successor(adj, tok, alive, s, i)
                if _paintable(adj, nxt_tok, nxt_alive):
                    replies.append([s, i])
                    stack.append(_normalize(nxt_alive, nxt_tok))
                    break
            else:
                return None
        policy[(alive, tok)] = replies
    return [
        {"alive": alive, "tokens": list(tok), "replies": replies}
        for (alive, tok), replies in sorted(policy.items())
    ]


def verify_painting_strategy(g: Graph, f: Sequence[int], policy: list[dict]) -> tuple[bool, str]:
    """Check that the policy answers every Lister move from every reachable position."""
    table = {}
    for entry in policy:
        alive = entry["alive"]
        tok = tuple(entry["tokens"])
        table[(alive, tok)] = {s: i for s, i in entry["replies"]}

    start = _normalize(g.vertex_mask, tuple(f))
    stack = [start]
    seen = set()
    while stack:
        alive, tok = stack.pop()
        if not alive or (alive, tok) in seen:
            continue
        seen.add((alive, tok))
        replies = table.get((alive, tok))
        if replies is None:
            return False, f"no entry for position alive={alive} tokens={list(tok)}"
        for s in range(1, alive + 1):
            if s & ~alive:
                continue
            i = replies.get(s)
            if i is None:
                return False, f"no reply to S={sorted(bits(s))} at alive={alive}"
            if i & ~s or not g.is_independent(i):
                return False, f"reply {sorted(bits(i))} to S={sorted(bits(s))} is not an independent subset"
            nxt_alive, nxt_tok = _successor(g.adj, tok, alive, s, i)
            if any(nxt_tok[v] < 1 for v in bits(nxt_alive)):
                return False, f"reply to S={sorted(bits(s))} exhausts a vertex"
            stack.append(_normalize(nxt_alive, nxt_tok))
    return True, ""


def clear_cache() -> None:
    _memo.clear()
