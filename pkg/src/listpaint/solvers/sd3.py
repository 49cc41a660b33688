"""Search for ReduceValue/EdgeDelete elimination sequences.

Normal form used by the search: a Reduce at w only matters right before an
EdgeDelete that charges some neighbor by w's count, and postponing it to
that moment never hurts. So a move is "lower w to t, then delete uw
charging u by t" for 1 <= t <= min(f(w), f(u) - 1).

Exact reductions: isolated vertices vanish; components are independent; a
vertex whose tokens exceed the sum over its neighbors can pay for all its
edges at once, and since the property is closed under vertex deletion
(replace each charge by a dropped vertex with Reduce steps) the rest of the
graph decides. Density cut: every vertex set U needs the sum of f - 1 over U
to be at least |E(U)|.
"""

from __future__ import annotations

from typing import Sequence

from ..graph import Graph, bits, strict_degeneracy
from ..tokens import EdgeDelete, Reduce, Sd3Sequence, verify_sd3_sequence
from ..errors import VerificationFailed
from ._common import canon, check_caps, components, density_ok, sub_state

MAX_VERTICES = 7
MAX_TOKEN = 6

_memo: dict = {}


def _strip(adj, tok, alive: int) -> int:
    changed = True
    while changed:
        changed = False
        for v in bits(alive):
            nb = adj[v] & alive
            if not nb or tok[v] > sum(tok[w] for w in bits(nb)):
                alive &= ~(1 << v)
                changed = True
    return alive


def _solvable(adj, tok, alive: int) -> bool:
    alive = _strip(adj, tok, alive)
    for comp in components(adj, alive):
        (cadj, ctok), _ = sub_state(adj, tok, comp)
        if not _wins(*canon(cadj, ctok)):
            return False
    return True


def _moves(adj, tok):
    """(u, w, t, new_adj, new_tok): lower w to t, delete uw charging u."""
    n = len(adj)
    for u in range(n):
        for w in bits(adj[u]):
            for t in range(min(tok[w], tok[u] - 1), 0, -1):
                new_adj = list(adj)
                new_adj[u] &= ~(1 << w)
                new_adj[w] &= ~(1 << u)
                new_tok = list(tok)
                new_tok[w] = t
                new_tok[u] -= t
                yield u, w, t, tuple(new_adj), tuple(new_tok)


def _wins(adj, tok) -> bool:
    key = (adj, tok)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    full = (1 << len(adj)) - 1
    result = density_ok(adj, tok, full) and any(
        _solvable(a, t, full) for _, _, _, a, t in _moves(adj, tok)
    )
    _memo[key] = result
    return result


def is_sd3_degenerate(g: Graph, f: Sequence[int], cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN) -> Sd3Sequence | None:
    """An elimination sequence for (g, f), or None when none exists."""
    check_caps(g, f, cap, token_cap)
    if any(x < 1 for x in f):
        return None
    adj, tok = g.adj, tuple(f)
    if not _solvable(adj, tok, g.vertex_mask):
        return None
    ops: list = []
    while any(adj):
        for u, w, t, a, nt in _moves(adj, tok):
            if _solvable(a, nt, (1 << g.n) - 1):
                ops += [Reduce(w)] * (tok[w] - t)
                ops.append(EdgeDelete(u, w))
                adj, tok = a, nt
                break
        else:  # pragma: no cover - the memo said solvable
            raise VerificationFailed("sd3 search lost its witness")
    seq = Sd3Sequence(tuple(ops))
    verdict = verify_sd3_sequence(g, f, seq)
    if not verdict:
        raise VerificationFailed(f"sd3 witness rejected: {verdict.reason}")
    return seq


def sd3(g: Graph, cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN) -> int:
    """Least constant k admitting an elimination sequence."""
    if g.n == 0:
        return 0
    top = strict_degeneracy(g)
    for k in range(1 if g.m == 0 else 2, top + 1):
        if is_sd3_degenerate(g, [k] * g.n, cap, token_cap) is not None:
            return k
    raise VerificationFailed(f"no witness at the degeneracy bound {top}")


def clear_cache() -> None:
    _memo.clear()
