"""Token calculus: DelSave and removal schemes, ReduceValue/EdgeDelete sequences,
the minus-one transform, the constant-spread gadget, and scheme bookkeeping.

Token vectors are indexed by vertex id of the host graph; entries of
deleted vertices are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    ConstantInput,
    HypothesisViolated,
    IllegalSave,
    RestrictionViolated,
    TokenExhausted,
    VerificationFailed,
)
from .graph import Graph, bits, to_mask


@dataclass(frozen=True)
class DelSaveStep:
    vertex: int
    save: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "save", frozenset(self.save))


@dataclass(frozen=True)
class RemovalScheme:
    steps: tuple[DelSaveStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Iterable[int]]]) -> "RemovalScheme":
        return cls(tuple(DelSaveStep(u, frozenset(w)) for u, w in pairs))

    @property
    def order(self) -> list[int]:
        return [s.vertex for s in self.steps]

    @property
    def sv(self) -> dict[int, frozenset[int]]:
        return {s.vertex: s.save for s in self.steps}

    def position(self) -> dict[int, int]:
        return {s.vertex: i for i, s in enumerate(self.steps)}

    def to_payload(self, tokens: Sequence[int], restricted: bool) -> dict:
        return {
            "tokens": list(tokens),
            "restricted": restricted,
            "steps": [{"vertex": s.vertex, "save": sorted(s.save)} for s in self.steps],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "RemovalScheme":
        return cls.from_pairs((s["vertex"], s["save"]) for s in payload["steps"])

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.accepted


@dataclass(frozen=True)
class Position:
    """A remaining vertex set (bitmask) of a fixed host graph with its tokens."""

    graph: Graph
    alive: int
    tokens: tuple[int, ...]

    @classmethod
    def initial(cls, g: Graph, f: Sequence[int]) -> "Position":
        if len(f) != g.n:
            raise ValueError(f"expected {g.n} token values, got {len(f)}")
        return cls(g, g.vertex_mask, tuple(f))

    def remaining_edges(self) -> int:
        return sum((self.graph.adj[v] & self.alive).bit_count() for v in bits(self.alive)) // 2


# ---------------------------------------------------------------------------
# DelSave and removal schemes
# ---------------------------------------------------------------------------

def apply_delsave(pos: Position, step: DelSaveStep, restricted: bool = False) -> Position:
    """Delete ``step.vertex`` saving ``step.save``; unsaved neighbors lose one token."""
    g, alive, f = pos.graph, pos.alive, pos.tokens
    u, w = step.vertex, step.save
    if restricted and len(w) > 1:
        raise RestrictionViolated(f"vertex {u} saves {len(w)} vertices in restricted mode")
    if not (0 <= u < g.n and alive >> u & 1):
        raise IllegalSave(f"vertex {u} is not present")
    nbrs = g.adj[u] & alive
    wmask = to_mask(w)
    if wmask & ~nbrs:
        raise IllegalSave(f"save set of {u} is not inside its current neighborhood")
    if f[u] <= sum(f[x] for x in w):
        raise IllegalSave(f"f({u})={f[u]} does not exceed saved total {sum(f[x] for x in w)}")
    new = list(f)
    for v in bits(nbrs & ~wmask):
        new[v] -= 1
        if new[v] < 1:
            raise TokenExhausted(v)
    return Position(g, alive & ~(1 << u), tuple(new))


def verify_removal_scheme(
    g: Graph, f: Sequence[int], scheme: RemovalScheme, restricted: bool = False
) -> Verdict:
    """Replay ``scheme``; accept iff every step is legal and all vertices get deleted."""
    pos = Position.initial(g, f)
    if any(x < 1 for x in f):
        return Verdict(False, None, "NonPositiveToken")
    for i, step in enumerate(scheme.steps):
        try:
            pos = apply_delsave(pos, step, restricted)
        except RestrictionViolated as exc:
            return Verdict(False, i, f"RestrictionViolated: {exc}")
        except TokenExhausted as exc:
            return Verdict(False, i, f"TokenExhausted: {exc}")
        except IllegalSave as exc:
            return Verdict(False, i, f"IllegalSave: {exc}")
    if pos.alive:
        return Verdict(False, len(scheme.steps), f"IncompleteDeletion: {sorted(bits(pos.alive))} remain")
    # every accepted scheme must satisfy the token-total bound; a miss here is a bug, not a reject
    if g.n and not edge_count_condition(g, f):
        raise VerificationFailed(f"accepted scheme with token total {sum(f)} <= {g.m} edges")
    return Verdict(True)


def replay_tokens(g: Graph, f: Sequence[int], scheme: RemovalScheme) -> list[tuple[int, ...]]:
    """Token vectors before each step (and after the last), without legality checks."""
    cur = list(f)
    alive = g.vertex_mask
    history = [tuple(cur)]
    for step in scheme.steps:
        u = step.vertex
        alive &= ~(1 << u)
        for v in bits(g.adj[u] & alive & ~to_mask(step.save)):
            cur[v] -= 1
        history.append(tuple(cur))
    return history


def edge_count_condition(g: Graph, f: Sequence[int]) -> bool:
    """Token total strictly above the edge count; necessary for removability."""
    return sum(f) > g.m


def hurts_relation(g: Graph, scheme: RemovalScheme) -> set[tuple[int, int]]:
    """Pairs (b, a): adjacent, b deleted before a, and a not saved by b."""
    pos = scheme.position()
    sv = scheme.sv
    return {
        (b, a)
        for b in scheme.order
        for a in bits(g.adj[b])
        if a in pos and pos[b] < pos[a] and a not in sv[b]
    }


def restrict_scheme(scheme: RemovalScheme, keep: Iterable[int]) -> RemovalScheme:
    """Steps deleting kept vertices, with save sets cut down to ``keep``. Not checked for legality."""
    keep = frozenset(keep)
    return RemovalScheme(
        tuple(DelSaveStep(s.vertex, s.save & keep) for s in scheme.steps if s.vertex in keep)
    )


def tokens_for_scheme(g: Graph, order: Sequence[int], saves: dict[int, Iterable[int]], extra=None) -> list[int]:
    """Smallest token vector (plus optional per-vertex ``extra``) making (order, saves) legal.

    Saved vertices are always deleted later, so tokens are fixed in reverse
    deletion order: each vertex gets one more than its saved total plus the
    hurts it receives before its own deletion.
    """
    pos = {v: i for i, v in enumerate(order)}
    saves = {v: frozenset(saves.get(v, ())) for v in order}
    for u in order:
        for w in saves[u]:
            if not g.has_edge(u, w) or pos[w] < pos[u]:
                raise ValueError(f"{u} cannot save {w}")

    def hurts_before(v: int, t: int) -> int:
        # hurts v receives from deletions strictly before position t
        return sum(1 for b in bits(g.adj[v]) if pos[b] < min(t, pos[v]) and v not in saves[b])

    f = [0] * g.n
    for u in reversed(order):
        t = pos[u]
        saved_total = sum(f[w] - hurts_before(w, t) for w in saves[u])
        f[u] = hurts_before(u, t) + saved_total + 1 + (extra[u] if extra else 0)
    return f


def lift_scheme(g: Graph, nominal: Sequence[int], scheme: RemovalScheme, actual: Sequence[int]) -> RemovalScheme:
    """Adapt a scheme legal for ``nominal`` tokens to pointwise larger ``actual`` tokens.

    A saved vertex holding more tokens than in the nominal replay is simply
    not saved; it loses one token and stays at or above its nominal count,
    so legality carries over step by step.
    """
    nom = list(nominal)
    act = list(actual)
    if any(a < b for a, b in zip(act, nom)):
        raise ValueError("actual tokens must dominate nominal tokens")
    alive = to_mask(scheme.order)
    out = []
    for step in scheme.steps:
        u = step.vertex
        keep = frozenset(w for w in step.save if act[w] == nom[w])
        alive &= ~(1 << u)
        for v in bits(g.adj[u] & alive):
            if v not in step.save:
                nom[v] -= 1
            if v not in keep:
                act[v] -= 1
        out.append(DelSaveStep(u, keep))
    return RemovalScheme(tuple(out))


# ---------------------------------------------------------------------------
# ReduceValue / EdgeDelete sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Reduce:
    v: int


@dataclass(frozen=True)
class EdgeDelete:
    """Delete edge vw, charging v the current token count of w."""

    v: int
    w: int


Sd3Op = Reduce | EdgeDelete


@dataclass(frozen=True)
class Sd3Sequence:
    ops: tuple[Sd3Op, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    def to_payload(self, tokens: Sequence[int]) -> dict:
        ops = [
            {"op": "reduce", "v": op.v} if isinstance(op, Reduce) else {"op": "edge-delete", "v": op.v, "w": op.w}
            for op in self.ops
        ]
        return {"tokens": list(tokens), "ops": ops}

    @classmethod
    def from_payload(cls, payload: dict) -> "Sd3Sequence":
        return cls(tuple(Reduce(o["v"]) if o["op"] == "reduce" else EdgeDelete(o["v"], o["w"]) for o in payload["ops"]))

    def relabel(self, mapping) -> "Sd3Sequence":
        return Sd3Sequence(tuple(
            Reduce(mapping[op.v]) if isinstance(op, Reduce) else EdgeDelete(mapping[op.v], mapping[op.w])
            for op in self.ops
        ))

    def __len__(self):
        return len(self.ops)


def verify_sd3_sequence(g: Graph, f: Sequence[int], seq: Sd3Sequence) -> Verdict:
    """Replay; tokens must stay positive after every operation and no edge may remain."""
    if len(f) != g.n:
        return Verdict(False, None, "token vector length mismatch")
    if any(x < 1 for x in f):
        return Verdict(False, None, "NonPositiveToken: initial tokens")
    tok = list(f)
    adj = list(g.adj)
    for i, op in enumerate(seq.ops):
        if isinstance(op, Reduce):
            if not 0 <= op.v < g.n:
                return Verdict(False, i, f"InvalidOp: vertex {op.v}")
            tok[op.v] -= 1
            if tok[op.v] < 1:
                return Verdict(False, i, f"NonPositiveToken: vertex {op.v}")
        else:
            v, w = op.v, op.w
            if not (0 <= v < g.n and 0 <= w < g.n and adj[v] >> w & 1):
                return Verdict(False, i, f"InvalidOp: no edge {v}{w}")
            adj[v] &= ~(1 << w)
            adj[w] &= ~(1 << v)
            tok[v] -= tok[w]
            if tok[v] < 1:
                return Verdict(False, i, f"NonPositiveToken: vertex {v}")
    if any(adj):
        return Verdict(False, len(seq.ops), "EdgesRemain")
    return Verdict(True)


# ---------------------------------------------------------------------------
# Minus-one transform
# ---------------------------------------------------------------------------

def minus_one_transform(
    g: Graph, tokens: Sequence[int], scheme: RemovalScheme, v: int
) -> tuple[Graph, list[int], RemovalScheme, dict[int, int]]:
    """Scheme for (G - v, h) with h = tokens - 1 on N(v), given the two save hypotheses at v.

    Returns the graph G - v (ids compacted in ascending order), h, the
    transformed scheme in the new ids, and the old-to-new id map. The
    output is re-verified before it is returned.
    """
    verdict = verify_removal_scheme(g, tokens, scheme)
    if not verdict:
        raise HypothesisViolated(v, f"input scheme rejected: {verdict.reason}")
    pos = scheme.position()
    sv = scheme.sv
    for u in bits(g.adj[v]):
        if pos[u] < pos[v] and v not in sv[u]:
            raise HypothesisViolated(u, f"neighbor deleted before {v} does not save it")
    for x in sv[v]:
        if pos[x] > pos[v]:
            raise HypothesisViolated(x, f"{v} saves a later neighbor")

    keep = [x for x in range(g.n) if x != v]
    mapping = {x: i for i, x in enumerate(keep)}
    h_graph = Graph(g.n - 1, [(mapping[a], mapping[b]) for a, b in g.edges if v not in (a, b)])
    h = [tokens[x] - 1 if g.has_edge(x, v) else tokens[x] for x in keep]
    steps = tuple(
        DelSaveStep(mapping[s.vertex], frozenset(mapping[w] for w in s.save if w != v))
        for s in scheme.steps
        if s.vertex != v
    )
    out = RemovalScheme(steps)
    check = verify_removal_scheme(h_graph, h, out)
    if not check:
        raise VerificationFailed(f"transformed scheme rejected at step {check.step}: {check.reason}")
    return h_graph, h, out, mapping


# ---------------------------------------------------------------------------
# Constant-spread gadget
# ---------------------------------------------------------------------------

@dataclass
class GadgetReport:
    M: int
    m: int
    D: int
    apex: int
    copies: list[list[int]]
    a_sets: list[list[int]]
    raised_copies: list[int]
    spread: int
    sequence: Sd3Sequence | None = None
    sequence_status: str = ""
    notes: dict = field(default_factory=dict)


def spread(tokens: Sequence[int]) -> int:
    return max(tokens) - min(tokens) if tokens else 0


def build_nonconstant_gadget(
    h_graph: Graph,
    h: Sequence[int],
    h_sequence: Sd3Sequence | None = None,
    raise_all_copies: bool = True,
) -> tuple[Graph, list[int], GadgetReport]:
    """Glue max(h) copies of (H, h) to a new apex and lift the minimum-token vertices by one.

    The apex carries max(h) tokens and sees the minimum-token vertices of
    every copy. With ``raise_all_copies`` every copy's minimum-token vertices
    gain a token, which lowers the spread by exactly one; otherwise only the
    first min(h) copies are lifted. When an elimination sequence for (H, h)
    is known (given, or found by the exact solver), one for the gadget is
    assembled and replay-verified.
    """
    if len(h) != h_graph.n or not h:
        raise ValueError("token vector length mismatch")
    if min(h) < 1:
        raise ValueError("tokens must be positive")
    lo, hi = min(h), max(h)
    if lo == hi:
        raise ConstantInput("token function is constant")
    size = h_graph.n
    a_local = [x for x in range(size) if h[x] == lo]
    copies = [[i * size + x for x in range(size)] for i in range(hi)]
    apex = hi * size
    edges = [(i * size + a, i * size + b) for i in range(hi) for a, b in h_graph.edges]
    a_sets = [[i * size + x for x in a_local] for i in range(hi)]
    edges += [(x, apex) for group in a_sets for x in group]
    graph = Graph(apex + 1, edges)
    raised = list(range(hi)) if raise_all_copies else list(range(lo))
    tokens = [h[x] for _ in range(hi) for x in range(size)] + [hi]
    for i in raised:
        for x in a_sets[i]:
            tokens[x] += 1
    report = GadgetReport(
        M=hi, m=lo, D=hi - lo, apex=apex, copies=copies, a_sets=a_sets,
        raised_copies=raised, spread=spread(tokens),
    )

    if h_sequence is None:
        from .solvers.sd3 import is_sd3_degenerate

        try:
            h_sequence = is_sd3_degenerate(h_graph, h)
        except Exception as exc:  # cap or other solver refusal: sequence stays unwitnessed
            report.sequence_status = f"no witness for (H, h): {exc}"
        else:
            if h_sequence is None:
                report.sequence_status = "(H, h) is not strict type 3 degenerate"
    if h_sequence is not None:
        if not verify_sd3_sequence(h_graph, h, h_sequence):
            raise ValueError("supplied sequence for (H, h) does not verify")
        ops: list = [Reduce(apex)] * (hi - 1)
        ops += [EdgeDelete(x, apex) for x in sorted(bits(graph.adj[apex]))]
        for i in range(hi):
            ops += h_sequence.relabel({x: i * size + x for x in range(size)}).ops
        seq = Sd3Sequence(tuple(ops))
        verdict = verify_sd3_sequence(graph, tokens, seq)
        if verdict:
            report.sequence = seq
            report.sequence_status = "verified"
        else:
            report.sequence_status = f"assembled sequence rejected at op {verdict.step}: {verdict.reason}"
    return graph, tokens, report
