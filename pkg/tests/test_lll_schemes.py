import math

import numpy as np
import pytest

from listpaint.errors import (
    DegreeExceeds,
    Infeasible,
    MalformedPartition,
    PipelineFailed,
    RatioViolated,
    ResampleBudgetExceeded,
)
from listpaint.graph import (
    Graph,
    complete_bipartite,
    cycle_graph,
    path_graph,
    random_colorable_graph,
    random_regular_bipartite,
)
from listpaint.lll import STAR, PartitionPlan, PlanConstants, check_partition, sample_partition
from listpaint.schemes import (
    build_bipartite_scheme,
    build_chromatic_scheme,
    build_star_system,
    chromatic_save_budget,
    star_saturating_map,
)
from listpaint.tokens import verify_removal_scheme

# a regime where the construction goes through at desk scale
R128 = {"eps": 0.7, "c": 0.4, "p_S": 0.053}


def r128():
    return random_regular_bipartite(256, 128, np.random.default_rng(0))


# -- constants ---------------------------------------------------------------

def test_default_constants_at_256():
    k = PlanConstants.from_degree(1.0, 256)
    p_S = math.sqrt(math.log(256) / 256)
    assert k.beta == 1 and k.eps == 0.5 and k.c == 0.5
    assert k.p == (0.5, 1 / 3)
    assert k.p_S == pytest.approx(p_S)
    assert k.d_m(1) == math.ceil(0.5 / 3 / p_S) == 2
    # sqrt(256 ln 256) / 1000 is below one
    assert k.save_budget() == 0


def test_constants_reject_unknown_override():
    with pytest.raises(ValueError):
        PlanConstants.from_degree(1.0, 64, {"gamma": 1})
    with pytest.raises(ValueError):
        PlanConstants.from_degree(1.0, 64, {"p_S": 0.0})


def test_chromatic_save_budget():
    assert chromatic_save_budget(256, 2) == 0
    # sqrt(1e10 ln 1e10) = 479865.5..., over 4000
    assert chromatic_save_budget(10 ** 10, 1) == 119


# -- partitions --------------------------------------------------------------

def _k22_plan(part):
    k = PlanConstants.from_degree(1.0, 2, {"beta": 0, "eps": 0.0, "p_S": 0.5})
    return PartitionPlan(k, (0, 1), (2, 3), frozenset({0}), part)


def test_check_partition_by_hand():
    g = complete_bipartite(2, 2)
    assert check_partition(g, _k22_plan({2: 0, 3: STAR})).clean
    bad = check_partition(g, _k22_plan({2: STAR, 3: STAR}))
    assert not bad.clean and bad.violated() == [("X", 0, 0), ("X", 1, 0)]
    with pytest.raises(MalformedPartition):
        check_partition(g, _k22_plan({2: 0}))


def test_sampler_is_deterministic_and_clean():
    g = random_regular_bipartite(128, 64, np.random.default_rng(5))
    a, la = sample_partition(g, seed=11, overrides={"eps": 0.5})
    b, lb = sample_partition(g, seed=11, overrides={"eps": 0.5})
    assert a == b and la.resamples == lb.resamples
    assert check_partition(g, a).clean
    c, _ = sample_partition(g, seed=12, overrides={"eps": 0.5})
    assert c != a


def test_sampler_budget():
    g = random_regular_bipartite(64, 32, np.random.default_rng(0))
    with pytest.raises(ResampleBudgetExceeded):
        sample_partition(g, overrides={"eps": 0.0}, budget=5)


# -- star systems ------------------------------------------------------------

def test_star_map_fills_slots():
    g = Graph(3, [(0, 1), (0, 2)])
    assert star_saturating_map(g, [1, 2], [0], 2) == {1: 0, 2: 0}
    with pytest.raises(Infeasible) as exc:
        star_saturating_map(g, [1, 2], [0], 3)
    assert exc.value.hall_set == frozenset({0})


def test_star_map_hall_set_is_a_witness():
    # two s share the same two b's; t = 2 needs four
    g = complete_bipartite(2, 2)
    with pytest.raises(Infeasible) as exc:
        star_saturating_map(g, [2, 3], [0, 1], 2)
    X = exc.value.hall_set
    nbrs = {b for s in X for b in g.neighbors(s)}
    assert len(nbrs) < 2 * len(X)


def test_star_system_degrees():
    g = r128()
    plan, _ = sample_partition(g, seed=3, overrides=R128)
    star = build_star_system(g, plan)
    k = plan.constants
    for m in range(1, k.beta + 1):
        # recount the degrees from the raw edge set
        for b in plan.members(m):
            assert sum(1 for bb, _ in star.edges[m] if bb == b) <= m
        for s in plan.S:
            assert sum(1 for _, ss in star.edges[m] if ss == s) == star.d_m[m] == k.d_m(m)
        for b, s in star.edges[m]:
            assert g.has_edge(b, s) and s in plan.S and plan.part[b] == m


def test_star_system_ratio_violation_round():
    g = complete_bipartite(2, 2)
    k = PlanConstants.from_degree(1.0, 2, {"beta": 1, "eps": 1.0, "p_S": 0.5})
    # S nonempty but B_1 empty: no S vertex can be saturated
    plan = PartitionPlan(k, (0, 1), (2, 3), frozenset({0}), {2: 0, 3: 0})
    with pytest.raises(RatioViolated) as exc:
        build_star_system(g, plan)
    assert (exc.value.m, exc.value.z) == (1, 1)


# -- bipartite pipeline ------------------------------------------------------

def test_bipartite_pipeline_accepts_at_128():
    g = r128()
    scheme, trace = build_bipartite_scheme(g, save_budget=1, seed=3, overrides=R128)
    f = [g.degree(v) - 1 for v in range(g.n)]
    assert trace.outcome == "accepted"
    assert verify_removal_scheme(g, f, scheme)
    assert [p["phase"] for p in trace.phases] == ["B_0", "B_1", "A-S", "B*", "S"]
    assert trace.final_surplus == trace.star.d_m[1] - 1
    again, _ = build_bipartite_scheme(g, save_budget=1, seed=3, overrides=R128)
    assert again == scheme


def test_bipartite_pipeline_c4_fails_cleanly():
    with pytest.raises(PipelineFailed) as exc:
        build_bipartite_scheme(cycle_graph(4), save_budget=0)
    assert exc.value.trace.outcome == "failed"


def test_bipartite_preconditions():
    with pytest.raises(DegreeExceeds):
        build_bipartite_scheme(complete_bipartite(3, 3), d=2)
    with pytest.raises(DegreeExceeds):
        build_bipartite_scheme(path_graph(3), d=4)
    with pytest.raises(PipelineFailed) as exc:
        build_bipartite_scheme(complete_bipartite(3, 3), save_budget=3)
    assert exc.value.phase == "tokens"


# -- chromatic recursion -----------------------------------------------------

def test_chromatic_on_forest_uses_greedy_only():
    g = path_graph(9)
    scheme, trace = build_chromatic_scheme(g, 4, r=2)
    assert trace.levels == [] and trace.base["size"] == 9
    assert all(not step.save for step in scheme.steps)
    assert verify_removal_scheme(g, [4 - trace.save_budget] * 9, scheme)


def test_chromatic_with_one_level():
    g, color = random_colorable_graph(80, 3, 10 ** 6, 0.6, np.random.default_rng(1))
    d = g.max_degree()
    scheme, trace = build_chromatic_scheme(g, d, coloring=color, seed=0, overrides={"eps": 1.0, "c": 0.5})
    assert len(trace.levels) == 1 and trace.levels[0]["holds"]
    assert verify_removal_scheme(g, [d - trace.save_budget] * g.n, scheme)
    assert trace.bipartite[0]["outcome"] == "accepted"


def test_chromatic_rejects_bad_coloring():
    with pytest.raises(ValueError):
        build_chromatic_scheme(cycle_graph(4), 2, coloring=[0, 0, 1, 1])
    with pytest.raises(ValueError):
        build_chromatic_scheme(cycle_graph(5), 2, r=2)
