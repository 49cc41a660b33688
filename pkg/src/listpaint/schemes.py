"""Constructive removal schemes: star saturation, the H_m systems, the phased
bipartite pipeline and the chromatic recursion.

Every scheme returned here has been replayed by the verifier; anything that
does not replay is reported as PipelineFailed with the trace so far.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeExceeds,
    IllegalSave,
    Infeasible,
    PipelineFailed,
    RatioViolated,
    ResampleBudgetExceeded,
    RestrictionViolated,
    TokenExhausted,
)
from .graph import (
    Graph,
    bits,
    degeneracy_ordering,
    ekt_bipartite_subgraph,
    induced_subgraph,
    is_proper_coloring,
    min_degree_core,
    proper_coloring,
)
from .lll import STAR, PartitionPlan, check_partition, sample_partition
from .tokens import DelSaveStep, Position, RemovalScheme, apply_delsave, lift_scheme, verify_removal_scheme

# ---------------------------------------------------------------------------
# star saturation
# ---------------------------------------------------------------------------


def star_saturating_map(
    g: Graph,
    B: Iterable[int],
    S: Iterable[int],
    t: int,
    exclude: Iterable[tuple[int, int]] = (),
) -> dict[int, int]:
    """A partial map b -> s along edges giving every s exactly t preimages.

    Each s is split into t slots and slots are matched to distinct b's by
    augmenting paths, s and b in ascending order. Edges listed in ``exclude``
    as (b, s) are unavailable. On failure the set X of s explored by the last
    search satisfies |N(X)| < t|X| and is attached to the error.
    """
    B = sorted(set(B))
    S = sorted(set(S))
    if t < 0:
        raise ValueError("t must be nonnegative")
    banned = set(exclude)
    in_b = set(B)
    nbr = {s: [b for b in g.neighbors(s) if b in in_b and (b, s) not in banned] for s in S}
    owner: dict[int, int] = {}  # b -> s

    def augment(s: int, seen_b: set, seen_s: set) -> bool:
        seen_s.add(s)
        for b in nbr[s]:
            if b in seen_b:
                continue
            seen_b.add(b)
            if b not in owner or augment(owner[b], seen_b, seen_s):
                owner[b] = s
                return True
        return False

    for s in S:
        for _ in range(t):
            seen_b: set = set()
            seen_s: set = set()
            if not augment(s, seen_b, seen_s):
                hall = frozenset(seen_s)
                raise Infeasible(
                    f"|N(X)|={len(seen_b)} < t|X|={t * len(hall)} for X of size {len(hall)}", hall)
    return dict(sorted(owner.items()))


# ---------------------------------------------------------------------------
# H_m systems
# ---------------------------------------------------------------------------


@dataclass
class StarSystem:
    d_m: dict[int, int]
    edges: dict[int, frozenset[tuple[int, int]]]  # m -> {(b, s)}
    rounds: list[dict] = field(default_factory=list)

    def saves(self, b: int) -> frozenset[int]:
        return frozenset(s for es in self.edges.values() for bb, s in es if bb == b)

    def degree(self, m: int, v: int) -> int:
        return sum(1 for b, s in self.edges.get(m, ()) if v in (b, s))

    def to_payload(self) -> dict:
        return {
            "d_m": {str(m): k for m, k in self.d_m.items()},
            "edges": {str(m): sorted([b, s] for b, s in es) for m, es in self.edges.items()},
            "rounds": self.rounds,
        }


def build_star_system(g: Graph, plan: PartitionPlan) -> StarSystem:
    """For each m >= 1, union m rounds of star saturation between S and B_m.

    Round z first checks the ratio q2/q1 > c p_m / p_S on the residual graph
    (q1 the largest B_m-degree into S, q2 the smallest S-degree into B_m).
    """
    k = plan.constants
    S = sorted(plan.S)
    system = StarSystem({0: 0}, {0: frozenset()})
    for m in range(1, k.beta + 1):
        ratio = k.c * k.p[m] / k.p_S
        t = math.ceil(ratio)
        system.d_m[m] = m * t
        Bm = plan.members(m)
        in_s = set(S)
        used: set[tuple[int, int]] = set()
        if not S:
            system.edges[m] = frozenset()
            system.rounds.append({"m": m, "z": 0, "note": "S empty"})
            continue
        in_b = set(Bm)
        for z in range(1, m + 1):
            q1 = max((sum(1 for s in g.neighbors(b) if s in in_s and (b, s) not in used) for b in Bm), default=0)
            q2 = min(sum(1 for b in g.neighbors(s) if b in in_b and (b, s) not in used) for s in S)
            system.rounds.append({"m": m, "z": z, "q1": q1, "q2": q2, "t": t, "ratio_needed": ratio})
            if not q2 > ratio * q1 or q2 == 0:
                raise RatioViolated(m, z, f"q2={q2}, q1={q1}, need q2/q1 > {ratio:.4g}")
            try:
                mp = star_saturating_map(g, Bm, S, t, exclude=used)
            except Infeasible as exc:
                raise RatioViolated(m, z, f"star saturation infeasible: {exc}") from exc
            used |= set(mp.items())
        system.edges[m] = frozenset(used)
        for b in Bm:
            if system.degree(m, b) > m:
                raise RatioViolated(m, m, f"b={b} has H_m-degree above m")
        for s in S:
            if system.degree(m, s) != system.d_m[m]:
                raise RatioViolated(m, m, f"s={s} has H_m-degree {system.degree(m, s)} != {system.d_m[m]}")
    return system


# ---------------------------------------------------------------------------
# bipartite pipeline
# ---------------------------------------------------------------------------


@dataclass
class SchemePipelineTrace:
    save_budget: int
    tokens: list[int]
    plan: PartitionPlan | None = None
    resamples: int = 0
    star: StarSystem | None = None
    phases: list[dict] = field(default_factory=list)
    gate: dict[int, dict] = field(default_factory=dict)
    bstar_protection: dict = field(default_factory=dict)
    final_surplus: int | None = None
    outcome: str = "pending"

    def to_payload(self) -> dict:
        return {
            "save_budget": self.save_budget,
            "plan": self.plan.to_payload() if self.plan else None,
            "resamples": self.resamples,
            "star_system": self.star.to_payload() if self.star else None,
            "phases": self.phases,
            "gate": {str(m): v for m, v in self.gate.items()},
            "bstar_protection": self.bstar_protection,
            "final_surplus": self.final_surplus,
            "outcome": self.outcome,
        }


def _apply_phase(pos: Position, steps: list[DelSaveStep], name: str, trace) -> Position:
    for step in steps:
        try:
            pos = apply_delsave(pos, step)
        except (IllegalSave, TokenExhausted, RestrictionViolated) as exc:
            trace.outcome = "failed"
            raise PipelineFailed(name, step.vertex, str(exc), trace) from exc
    alive = list(bits(pos.alive))
    trace.phases.append({
        "phase": name,
        "deleted": len(steps),
        "min_tokens": min((pos.tokens[v] for v in alive), default=None),
    })
    return pos


def build_bipartite_scheme(
    g: Graph,
    alpha: float = 1.0,
    save_budget: int | None = None,
    seed=0,
    overrides: dict | None = None,
    sides=None,
    d: int | None = None,
    budget: int = 10_000,
) -> tuple[RemovalScheme, SchemePipelineTrace]:
    """A removal scheme for tokens deg(v) - s built phase by phase.

    Phases: B_0..B_beta (b saves its H-neighbors), then A minus S, then B*,
    then S, all with empty saves outside the B_m phases and ascending ids
    within a phase. ``s`` defaults to floor((alpha/1000) sqrt(d ln d)).
    """
    d = d if d is not None else max(g.max_degree(), 2)
    if g.max_degree() > d:
        raise DegreeExceeds(f"maximum degree {g.max_degree()} exceeds d={d}")
    a_eff = float((overrides or {}).get("alpha", alpha))
    if g.n and g.min_degree() < a_eff * d - 1e-9:
        raise DegreeExceeds(f"minimum degree {g.min_degree()} is below alpha*d={a_eff * d:g}")
    if save_budget is None:
        save_budget = math.floor(a_eff / 1000 * math.sqrt(d * math.log(d)))
    if save_budget < 0:
        raise ValueError("save budget must be nonnegative")
    f = [g.degree(v) - save_budget for v in range(g.n)]
    trace = SchemePipelineTrace(save_budget, list(f))
    low = [v for v in range(g.n) if f[v] < 1]
    if low:
        trace.outcome = "failed"
        raise PipelineFailed("tokens", low[0], f"deg - s = {f[low[0]]} < 1", trace)

    try:
        plan, ledger = sample_partition(g, alpha, seed, overrides, sides, d, budget)
    except ResampleBudgetExceeded as exc:
        trace.outcome = "failed"
        raise PipelineFailed("partition", None, str(exc), trace) from exc
    trace.plan, trace.resamples = plan, ledger.resamples
    if not check_partition(g, plan).clean:  # pragma: no cover - the sampler only returns clean plans
        raise PipelineFailed("partition", None, "plan is not clean", trace)
    try:
        star = build_star_system(g, plan)
    except RatioViolated as exc:
        trace.outcome = "failed"
        raise PipelineFailed("star-system", None, str(exc), trace) from exc
    trace.star = star
    k = plan.constants

    S = sorted(plan.S)
    pos = Position.initial(g, f)
    steps: list[DelSaveStep] = []
    for m in range(k.beta + 1):
        if m >= 1:
            top = max((pos.tokens[s] for s in S), default=0)
            bound = k.c * d / m
            trace.gate[m] = {"max_S_tokens": top, "bound": bound, "holds": top <= bound}
        phase = [DelSaveStep(b, star.saves(b)) for b in plan.members(m)]
        pos = _apply_phase(pos, phase, f"B_{m}", trace)
        steps += phase

    bstar = plan.members(STAR)
    in_s = plan.S
    unprotected = [b for b in bstar if sum(1 for a in g.neighbors(b) if a in in_s) <= g.degree(b) - f[b]]
    trace.bstar_protection = {"size": len(bstar), "unprotected": unprotected}
    phase = [DelSaveStep(a, frozenset()) for a in plan.A if a not in in_s]
    pos = _apply_phase(pos, phase, "A-S", trace)
    steps += phase
    phase = [DelSaveStep(b, frozenset()) for b in bstar]
    pos = _apply_phase(pos, phase, "B*", trace)
    steps += phase
    phase = [DelSaveStep(s, frozenset()) for s in S]
    pos = _apply_phase(pos, phase, "S", trace)
    steps += phase
    # the surplus each s keeps after the B* phase, summed over m = 1..beta
    trace.final_surplus = sum(star.d_m[m] for m in range(1, k.beta + 1)) - save_budget

    scheme = RemovalScheme(tuple(steps))
    verdict = verify_removal_scheme(g, f, scheme)
    if not verdict:
        trace.outcome = "failed"
        raise PipelineFailed("verify", None, verdict.reason, trace)
    trace.outcome = "accepted"
    return scheme, trace


# ---------------------------------------------------------------------------
# chromatic recursion
# ---------------------------------------------------------------------------


def chromatic_save_budget(d: int, r: int) -> int:
    """floor(c sqrt(d ln d)) with c = 1/(4000 r)."""
    return math.floor(math.sqrt(d * math.log(d)) / (4000 * r))


@dataclass
class ChromaticTrace:
    d: int
    r: int
    save_budget: int
    levels: list[dict] = field(default_factory=list)
    base: dict = field(default_factory=dict)
    bipartite: list[dict] = field(default_factory=list)
    outcome: str = "pending"

    def to_payload(self) -> dict:
        return {
            "d": self.d, "r": self.r, "save_budget": self.save_budget,
            "levels": self.levels, "base": self.base,
            "bipartite": self.bipartite, "outcome": self.outcome,
        }


def build_chromatic_scheme(
    g: Graph,
    d: int,
    r: int | None = None,
    coloring: Sequence[int] | None = None,
    seed: int = 0,
    save_budget: int | None = None,
    overrides: dict | None = None,
    budget: int = 10_000,
) -> tuple[RemovalScheme, ChromaticTrace]:
    """A removal scheme for the constant tokens d - s on an r-colorable graph.

    Levels peel induced bipartite pieces H (min degree >= d/(4r)) out of the
    min-degree-d/2 core until the rest has degeneracy below d/2. The rest is
    deleted greedily, then the pieces from the last one found to the first,
    each by the bipartite pipeline lifted to the tokens it actually holds.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if g.max_degree() > d:
        raise DegreeExceeds(f"maximum degree {g.max_degree()} exceeds d={d}")
    if coloring is None:
        if r is None:
            raise ValueError("give a coloring or the number of colors")
        coloring = proper_coloring(g, r)
        if coloring is None:
            raise ValueError(f"graph is not {r}-colorable")
    coloring = list(coloring)
    if not is_proper_coloring(g, coloring):
        raise ValueError("coloring is not proper")
    r = max(len(set(coloring)), 1) if r is None else r
    if len(set(coloring)) > r:
        raise ValueError(f"coloring uses more than {r} colors")
    s = chromatic_save_budget(d, r) if save_budget is None else save_budget
    f = [d - s] * g.n
    trace = ChromaticTrace(d, r, s)
    half = math.ceil(Fraction(d, 2))
    need = math.ceil(Fraction(d, 4 * r))

    remaining = set(range(g.n))
    pieces: list[list[int]] = []
    while True:
        sub, mapping = induced_subgraph(g, remaining)
        back = {i: v for v, i in mapping.items()}
        k, order = degeneracy_ordering(sub)
        if 2 * k < d:
            base = [back[v] for v in reversed(order)]
            trace.base = {"size": len(base), "degeneracy": k}
            break
        core = sorted(back[v] for v in min_degree_core(sub, half))
        core_g, cmap = induced_subgraph(g, core)
        cback = {i: v for v, i in cmap.items()}
        local = ekt_bipartite_subgraph(core_g, [coloring[v] for v in core], Fraction(d, 2))
        piece = sorted(cback[v] for v in local)
        hg, _ = induced_subgraph(g, piece)
        trace.levels.append({
            "remaining": len(remaining), "degeneracy": k, "core": len(core),
            "piece": len(piece), "piece_min_degree": hg.min_degree(), "required": need,
            "holds": hg.min_degree() >= need,
        })
        pieces.append(piece)
        remaining -= set(piece)

    pos = Position.initial(g, f)
    steps = [DelSaveStep(v, frozenset()) for v in base]
    for step in steps:
        try:
            pos = apply_delsave(pos, step)
        except (IllegalSave, TokenExhausted) as exc:
            trace.outcome = "failed"
            raise PipelineFailed("degeneracy", step.vertex, str(exc), trace) from exc

    alpha = 1 / (4 * r)
    for level in range(len(pieces) - 1, -1, -1):
        piece = pieces[level]
        hg, hmap = induced_subgraph(g, piece)
        hback = {i: v for v, i in hmap.items()}
        level_seed = np.random.SeedSequence(seed, spawn_key=(level,))
        try:
            local, btrace = build_bipartite_scheme(
                hg, alpha, s, level_seed, overrides, d=d, budget=budget)
        except (PipelineFailed, DegreeExceeds) as exc:
            inner = getattr(exc, "trace", None)
            trace.bipartite.append({"level": level, "outcome": "failed", "error": str(exc),
                                    "trace": inner.to_payload() if inner else None})
            trace.outcome = "failed"
            phase = f"level {level}: {getattr(exc, 'phase', 'precondition')}"
            vertex = getattr(exc, "vertex", None)
            raise PipelineFailed(phase, hback.get(vertex) if vertex is not None else None,
                                 getattr(exc, "message", str(exc)), trace) from exc
        nominal = btrace.tokens
        actual = [pos.tokens[hback[i]] for i in range(hg.n)]
        try:
            lifted = lift_scheme(hg, nominal, local, actual)
        except ValueError as exc:
            trace.outcome = "failed"
            raise PipelineFailed(f"level {level}: lift", None, str(exc), trace) from exc
        trace.bipartite.append({"level": level, "outcome": "accepted", "trace": btrace.to_payload()})
        for st in lifted.steps:
            step = DelSaveStep(hback[st.vertex], frozenset(hback[w] for w in st.save))
            try:
                pos = apply_delsave(pos, step)
            except (IllegalSave, TokenExhausted) as exc:
                trace.outcome = "failed"
                raise PipelineFailed(f"level {level}", step.vertex, str(exc), trace) from exc
            steps.append(step)

    scheme = RemovalScheme(tuple(steps))
    verdict = verify_removal_scheme(g, f, scheme)
    if not verdict:
        trace.outcome = "failed"
        raise PipelineFailed("verify", None, verdict.reason, trace)
    trace.outcome = "accepted"
    return scheme, trace
