"""Search for removal schemes (DelSave sequences), unrestricted or restricted.

Exact reductions:
* more tokens help (a saved vertex holding surplus tokens can be dropped from
  the save set), so only inclusion-maximal legal save sets are tried; they
  must contain every neighbor down to its last token;
* a vertex with more tokens than neighbors can be deleted last;
* components are independent.
The density cut (sum of f - 1 over any U at least |E(U)|) is optional so the
plain edge-count bound can be tested without it.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from ..errors import CapExceeded, VerificationFailed
from ..graph import Graph, bits, strict_degeneracy
from ..tokens import DelSaveStep, RemovalScheme, verify_removal_scheme
from ._common import canon, check_caps, components, density_ok, peel_surplus, sub_state

MAX_VERTICES = 8
MAX_TOKEN = 8

_memo: dict = {}


def save_sets(adj, tok, alive: int, u: int, restricted: bool):
    """Inclusion-maximal legal save sets for deleting u."""
    nbrs = adj[u] & alive
    ones = [w for w in bits(nbrs) if tok[w] == 1]
    base = sum(tok[w] for w in ones)
    if base >= tok[u] or (restricted and len(ones) > 1):
        return
    if restricted:
        if ones:
            yield 1 << ones[0]
            return
        singles = [w for w in bits(nbrs) if tok[w] < tok[u]]
        if not singles:
            yield 0
        for w in singles:
            yield 1 << w
        return
    must = 0
    for w in ones:
        must |= 1 << w
    others = [w for w in bits(nbrs) if tok[w] > 1]
    budget = tok[u] - 1 - base
    # enumerate subsets of others within budget, keep the maximal ones
    feasible = []
    for size in range(len(others), -1, -1):
        for combo in combinations(others, size):
            if sum(tok[w] for w in combo) > budget:
                continue
            m = 0
            for w in combo:
                m |= 1 << w
            if any(f & m == m for f in feasible):
                continue
            feasible.append(m)
            yield must | m


def _after(adj, tok, alive: int, u: int, w: int) -> tuple[int, tuple[int, ...]]:
    new = list(tok)
    for v in bits(adj[u] & alive & ~w):
        new[v] -= 1
    return alive & ~(1 << u), tuple(new)


def _removable(adj, tok, alive: int, restricted: bool, prune: bool) -> bool:
    alive, _ = peel_surplus(adj, tok, alive)
    for comp in components(adj, alive):
        (cadj, ctok), _ = sub_state(adj, tok, comp)
        if not _wins(*canon(cadj, ctok), restricted, prune):
            return False
    return True


def _wins(adj, tok, restricted: bool, prune: bool) -> bool:
    key = (adj, tok, restricted, prune)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    full = (1 << len(adj)) - 1
    result = False
    if not prune or density_ok(adj, tok, full):
        result = any(
            _removable(adj, nt, na, restricted, prune)
            for u in range(len(adj))
            for w in save_sets(adj, tok, full, u, restricted)
            for na, nt in [_after(adj, tok, full, u, w)]
        )
    _memo[key] = result
    return result


def _reconstruct(adj, tok, alive: int, restricted: bool, prune: bool, out: list) -> None:
    """Append a scheme for a removable position: the core first, then the peeled
    surplus vertices in reverse peel order with nothing saved."""
    core, dropped = peel_surplus(adj, tok, alive)
    if core:
        for u in bits(core):
            move = next(
                (w for w in save_sets(adj, tok, core, u, restricted)
                 if _removable(adj, _after(adj, tok, core, u, w)[1], core & ~(1 << u), restricted, prune)),
                None,
            )
            if move is not None:
                break
        else:  # pragma: no cover - the memo said removable
            raise VerificationFailed("removal search lost its witness")
        out.append(DelSaveStep(u, frozenset(bits(move))))
        _reconstruct(adj, _after(adj, tok, core, u, move)[1], core & ~(1 << u), restricted, prune, out)
    for v in reversed(dropped):
        out.append(DelSaveStep(v, frozenset()))


def removability(
    g: Graph,
    f: Sequence[int],
    restricted: bool = False,
    cap: int = MAX_VERTICES,
    token_cap: int = MAX_TOKEN,
    prune: bool = True,
) -> RemovalScheme | None:
    """A verified removal scheme for (g, f), or None if none exists."""
    check_caps(g, f, cap, token_cap)
    if any(x < 1 for x in f):
        return None
    if not _removable(g.adj, tuple(f), g.vertex_mask, restricted, prune):
        return None
    steps: list[DelSaveStep] = []
    _reconstruct(g.adj, tuple(f), g.vertex_mask, restricted, prune, steps)
    scheme = RemovalScheme(tuple(steps))
    verdict = verify_removal_scheme(g, f, scheme, restricted)
    if not verdict:
        raise VerificationFailed(f"removal witness rejected: {verdict.reason}")
    return scheme


def removability_number(g: Graph, restricted: bool = False, cap: int = MAX_VERTICES, token_cap: int = MAX_TOKEN) -> int:
    """Least constant k with a removal scheme; the restricted value is sd^(4)."""
    if g.n == 0:
        return 0
    top = strict_degeneracy(g)
    for k in range(1 if g.m == 0 else 2, top + 1):
        if removability(g, [k] * g.n, restricted, cap, token_cap) is not None:
            return k
    raise VerificationFailed(f"no witness at the degeneracy bound {top}")


def all_schemes(g: Graph, f: Sequence[int], limit: int = 100_000):
    """Every accepted removal scheme (maximal save sets only), up to ``limit``."""
    out: list[RemovalScheme] = []

    def rec(alive, tok, steps):
        if not alive:
            out.append(RemovalScheme(tuple(steps)))
            if len(out) > limit:
                raise CapExceeded("schemes", len(out), limit)
            return
        for u in bits(alive):
            for w in save_sets(g.adj, tok, alive, u, False):
                na, nt = _after(g.adj, tok, alive, u, w)
                if _removable(g.adj, nt, na, False, True):
                    rec(na, nt, steps + [DelSaveStep(u, frozenset(bits(w)))])

    if _removable(g.adj, tuple(f), g.vertex_mask, False, True):
        rec(g.vertex_mask, tuple(f), [])
    return out


def clear_cache() -> None:
    _memo.clear()
