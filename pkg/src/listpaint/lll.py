"""Random subset/partition structure for bipartite graphs and a Moser-Tardos sampler.

Side A gets a random subset S (each vertex with probability p_S); side B is
split into parts B_0..B_beta and B* with probabilities p_0..p_beta and the
remainder. A plan is clean when every neighborhood count lies within a
(1 +- eps) factor of its expectation. Logarithms are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedPartition, NotBipartite, ResampleBudgetExceeded
from .graph import Graph, bipartition

STAR = -1
OVERRIDABLE = ("alpha", "c", "beta", "eps", "p_S")


@dataclass(frozen=True)
class PlanConstants:
    alpha: float
    d: int
    c: float
    beta: int
    eps: float
    p_S: float
    p: tuple[float, ...]  # p_0 .. p_beta

    @property
    def p_star(self) -> float:
        return 1.0 - sum(self.p)

    @classmethod
    def from_degree(cls, alpha: float, d: int, overrides: dict | None = None) -> "PlanConstants":
        """Constants for max degree d, with any of alpha, c, beta, eps, p_S overridden."""
        overrides = dict(overrides or {})
        unknown = set(overrides) - set(OVERRIDABLE)
        if unknown:
            raise ValueError(f"unknown constant override(s): {sorted(unknown)}")
        alpha = float(overrides.get("alpha", alpha))
        if not 0 < alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if d < 2:
            raise ValueError("d must be at least 2")
        c = float(overrides.get("c", alpha / 2))
        beta = int(overrides.get("beta", math.floor(d ** (1 / 100))))
        eps = float(overrides.get("eps", d ** (-1 / 8)))
        p_S = float(overrides.get("p_S", math.sqrt(math.log(d) / d)))
        if beta < 0 or not 0 < p_S <= 1 or eps < 0 or not 0 < c <= 1:
            raise ValueError("constants out of range")
        p = [1 - c]
        if beta >= 1:
            p.append(2 * c / 3)
        p += [c / ((m + 1) * (m + 2)) for m in range(2, beta + 1)]
        out = cls(alpha, d, c, beta, eps, p_S, tuple(p))
        if out.p_star < -1e-12:
            raise ValueError("part probabilities exceed 1")
        return out

    def d_m(self, m: int) -> int:
        """Target S-degree in H_m: m * ceil(c p_m / p_S)."""
        return m * math.ceil(self.c * self.p[m] / self.p_S)

    def save_budget(self) -> int:
        """floor((alpha / 1000) sqrt(d ln d))."""
        return math.floor(self.alpha / 1000 * math.sqrt(self.d * math.log(self.d)))


@dataclass(frozen=True)
class PartitionPlan:
    constants: PlanConstants
    A: tuple[int, ...]
    B: tuple[int, ...]
    S: frozenset[int]
    part: dict  # b -> m in 0..beta, or STAR

    def members(self, m: int) -> list[int]:
        return [b for b in self.B if self.part[b] == m]

    def to_payload(self) -> dict:
        k = self.constants
        return {
            "constants": {"alpha": k.alpha, "d": k.d, "c": k.c, "beta": k.beta, "eps": k.eps,
                          "p_S": k.p_S, "p": list(k.p), "p_star": k.p_star},
            "S": sorted(self.S),
            "parts": {str(m): self.members(m) for m in list(range(k.beta + 1)) + [STAR]},
        }


@dataclass
class BadEventLedger:
    y: dict[int, bool] = field(default_factory=dict)  # b -> bad
    x: dict[tuple[int, int], bool] = field(default_factory=dict)  # (a, m) -> bad
    resamples: int = 0
    log: list[tuple[str, tuple, tuple[int, ...]]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not any(self.y.values()) and not any(self.x.values())

    def violated(self) -> list[tuple]:
        """Violated events in resampling priority: Y by b, then X by (a, m)."""
        return [("Y", b) for b, bad in sorted(self.y.items()) if bad] + [
            ("X", a, m) for (a, m), bad in sorted(self.x.items()) if bad
        ]


def sides_of(g: Graph, sides=None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if sides is None:
        bp = bipartition(g)
        if bp is None:
            raise NotBipartite("graph has an odd cycle")
        sides = bp
    A, B = tuple(sorted(sides[0])), tuple(sorted(sides[1]))
    inA = set(A)
    for u, v in g.edges:
        if (u in inA) == (v in inA):
            raise NotBipartite(f"edge {u}{v} lies inside one side")
    return A, B


def _matrix(g: Graph, A, B) -> np.ndarray:
    col = {b: j for j, b in enumerate(B)}
    M = np.zeros((len(A), len(B)), dtype=np.int64)
    for i, a in enumerate(A):
        for b in g.neighbors(a):
            M[i, col[b]] = 1
    return M


def _within(count: np.ndarray, expected: np.ndarray, eps: float) -> np.ndarray:
    return ((1 - eps) * expected <= count + 1e-9) & (count <= (1 + eps) * expected + 1e-9)


def _ledger(M: np.ndarray, k: PlanConstants, s_vec: np.ndarray, part_vec: np.ndarray, A, B) -> BadEventLedger:
    led = BadEventLedger()
    deg_b = M.sum(axis=0)
    deg_a = M.sum(axis=1)
    in_s = M.T @ s_vec
    ok_y = _within(in_s, k.p_S * deg_b, k.eps)
    for j, b in enumerate(B):
        led.y[b] = not ok_y[j]
    for m in range(k.beta + 1):
        cnt = M @ (part_vec == m).astype(np.int64)
        ok_x = _within(cnt, k.p[m] * deg_a, k.eps)
        for i, a in enumerate(A):
            led.x[(a, m)] = not ok_x[i]
    return led


def check_partition(g: Graph, plan: PartitionPlan) -> BadEventLedger:
    """Evaluate every concentration predicate of the plan exactly."""
    A, B = sides_of(g, (plan.A, plan.B))
    if not plan.S <= set(A):
        raise MalformedPartition("S is not inside side A")
    allowed = set(range(plan.constants.beta + 1)) | {STAR}
    if set(plan.part) != set(B) or any(m not in allowed for m in plan.part.values()):
        raise MalformedPartition("parts do not partition side B")
    M = _matrix(g, A, B)
    s_vec = np.array([a in plan.S for a in A], dtype=np.int64)
    part_vec = np.array([plan.part[b] for b in B], dtype=np.int64)
    return _ledger(M, plan.constants, s_vec, part_vec, A, B)


def _draw_parts(rng: np.random.Generator, k: PlanConstants, count: int) -> np.ndarray:
    cum = np.cumsum(k.p)
    u = rng.random(count)
    idx = np.searchsorted(cum, u, side="right")
    return np.where(idx > k.beta, STAR, idx)


def sample_partition(
    g: Graph,
    alpha: float = 1.0,
    seed: int = 0,
    overrides: dict | None = None,
    sides=None,
    d: int | None = None,
    budget: int = 10_000,
) -> tuple[PartitionPlan, BadEventLedger]:
    """Draw S and the parts of B, then resample violated events until the plan is clean.

    Each round resamples the variables of the lowest-index violated event:
    for Y_b the S-membership of N(b), for X_{a,m} the parts of N(a).
    """
    A, B = sides_of(g, sides)
    d = d if d is not None else max(g.max_degree(), 2)
    k = PlanConstants.from_degree(alpha, d, overrides)
    rng = np.random.default_rng(seed)
    M = _matrix(g, A, B)
    s_vec = (rng.random(len(A)) < k.p_S).astype(np.int64)
    part_vec = _draw_parts(rng, k, len(B))
    a_index = {a: i for i, a in enumerate(A)}
    b_index = {b: j for j, b in enumerate(B)}
    log = []
    for it in range(budget + 1):
        led = _ledger(M, k, s_vec, part_vec, A, B)
        bad = led.violated()
        if not bad:
            led.resamples = it
            led.log = log
            plan = PartitionPlan(k, A, B, frozenset(a for a, s in zip(A, s_vec) if s),
                                 {b: int(m) for b, m in zip(B, part_vec)})
            return plan, led
        if it == budget:
            break
        event = bad[0]
        if event[0] == "Y":
            scope = tuple(sorted(g.neighbors(event[1])))
            idx = [a_index[a] for a in scope]
            s_vec[idx] = (rng.random(len(idx)) < k.p_S).astype(np.int64)
        else:
            scope = tuple(sorted(g.neighbors(event[1])))
            idx = [b_index[b] for b in scope]
            part_vec[idx] = _draw_parts(rng, k, len(idx))
        log.append((event[0], event[1:], scope))
    raise ResampleBudgetExceeded(budget, led.violated())

