"""Removability of complete bipartite graphs K_{n,n} with constant tokens."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import CapExceeded
from ..graph import Graph, bits, complete_bipartite
from ..tokens import DelSaveStep, RemovalScheme, verify_removal_scheme
from .removal import _after, _removable, removability, save_sets

MAX_N = 4


def knn_lower_bound(n: int) -> float:
    """n - sqrt(2n(ln n + 1)); the minimum constant must exceed it."""
    return n - math.sqrt(2 * n * (math.log(n) + 1))


def harmonic_cap(k: int, i: int) -> Fraction:
    """Largest save size allowed at a side's deletion with i earlier same-side deletions."""
    return Fraction(k - 1, k - i)


@dataclass
class KnnStudy:
    n: int
    k: int
    lower_bound: float
    upper_bound: int
    schemes: int
    truncated: bool
    # per side: i -> largest |sv| seen at a deletion with i earlier same-side deletions
    profile: dict[str, dict[int, int]] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    sigma_max: int = 0
    sigma_bound: float = 0.0
    example: RemovalScheme | None = None

    @property
    def bound_holds(self) -> bool:
        return self.k > self.lower_bound

    @property
    def gamma(self) -> int:
        return self.n - self.k


def _side(v: int, n: int) -> str:
    return "A" if v < n else "B"


def symmetric_schemes(n: int, k: int, limit: int = 200_000):
    """Accepted schemes for K_{n,n} with f = k, one per orbit of interchangeable choices.

    Vertices on one side holding equal token counts are interchangeable, so
    each step branches on one deleted vertex per (side, tokens) class and
    one save set per multiset of saved token counts.
    """
    g = complete_bipartite(n, n)
    adj = g.adj
    out: list[RemovalScheme] = []

    def rec(alive, tok, steps):
        if not alive:
            out.append(RemovalScheme(tuple(steps)))
            if len(out) >= limit:
                raise CapExceeded("schemes", len(out), limit)
            return
        seen_u = set()
        for u in bits(alive):
            key = (_side(u, n), tok[u])
            if key in seen_u:
                continue
            seen_u.add(key)
            seen_w = set()
            for w in save_sets(adj, tok, alive, u, False):
                sig = tuple(sorted(tok[x] for x in bits(w)))
                if sig in seen_w:
                    continue
                seen_w.add(sig)
                na, nt = _after(adj, tok, alive, u, w)
                if _removable(adj, nt, na, False, True):
                    rec(na, nt, steps + [DelSaveStep(u, frozenset(bits(w)))])

    tok = (k,) * (2 * n)
    if _removable(adj, tok, g.vertex_mask, False, True):
        rec(g.vertex_mask, tok, [])
    return g, out


def harmonic_profile(g: Graph, n: int, k: int, scheme: RemovalScheme) -> tuple[dict[str, dict[int, int]], list[str]]:
    """Save sizes at each side's first k deletions, checked against (k-1)/(k-i)."""
    count = {"A": 0, "B": 0}
    profile: dict[str, dict[int, int]] = {"A": {}, "B": {}}
    bad = []
    for step in scheme.steps:
        side = _side(step.vertex, n)
        i = count[side]
        count[side] += 1
        if i >= k:
            continue
        size = len(step.save)
        profile[side][i] = max(profile[side].get(i, 0), size)
        if size > harmonic_cap(k, i):
            bad.append(f"{side} deletion {i}: |sv|={size} > {harmonic_cap(k, i)}")
    return profile, bad


def sigma(n: int, k: int, scheme: RemovalScheme) -> int:
    """Total save size over the first k deletions of the side reaching k first,
    plus the other side's deletions made by then."""
    count = {"A": 0, "B": 0}
    total = 0
    for step in scheme.steps:
        side = _side(step.vertex, n)
        count[side] += 1
        total += len(step.save)
        if count[side] == k:
            break
    return total


def knn_study(n: int, cap: int = MAX_N, limit: int = 200_000) -> KnnStudy:
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise CapExceeded("n", n, cap)
    g = complete_bipartite(n, n)
    k = next(k for k in range(1, 2 * n + 1) if removability(g, [k] * (2 * n)) is not None)
    truncated = False
    try:
        _, schemes = symmetric_schemes(n, k, limit)
    except CapExceeded:
        truncated = True
        schemes = []
    study = KnnStudy(
        n=n, k=k, lower_bound=knn_lower_bound(n), upper_bound=n + 1,
        schemes=len(schemes), truncated=truncated,
        profile={"A": {}, "B": {}},
        sigma_bound=(2 * k - 2) * (math.log(k) + 1),
    )
    for scheme in schemes:
        verdict = verify_removal_scheme(g, [k] * (2 * n), scheme)
        if not verdict:
            study.violations.append(f"enumerated scheme rejected: {verdict.reason}")
            continue
        prof, bad = harmonic_profile(g, n, k, scheme)
        for side in prof:
            for i, size in prof[side].items():
                study.profile[side][i] = max(study.profile[side].get(i, 0), size)
        study.violations.extend(bad)
        study.sigma_max = max(study.sigma_max, sigma(n, k, scheme))
    study.example = schemes[0] if schemes else removability(g, [k] * (2 * n))
    return study
