from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listpaint.errors import CapExceeded
from listpaint.graph import (
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    enumerate_graphs,
    random_colorable_graph,
)
from listpaint.orientations import (
    Orientation,
    at_number,
    eulerian_parity,
    eulerian_parity_naive,
    eulerian_split_orientation,
    has_directed_odd_cycle,
    is_alon_tarsi_orientation,
    is_f_alon_tarsi,
    odd_cycle_free_bounded_orientation,
    outdegree_bound,
    strongly_connected_components,
)
from oracles import naive_at_number, naive_parity


@st.composite
def orientations(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = list(combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    flip = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, k in zip(pairs, keep) if k]
    g = Graph(n, edges)
    arcs = [(v, u) if f else (u, v) for (u, v), k, f in zip(pairs, keep, flip) if k]
    return Orientation(g, arcs)


def _odd_closed_walk(o: Orientation) -> bool:
    n = o.host.n
    A = np.zeros((n, n), dtype=np.int64)
    for u, v in o.arcs:
        A[u, v] = 1
    P = A.copy()
    for k in range(1, n + 1):
        if k % 2 and np.trace(P) > 0:
            return True
        P = np.minimum(P @ A, 1)
    return False


def test_orientation_rejects_bad_arcs():
    g = cycle_graph(3)
    with pytest.raises(ValueError):
        Orientation(g, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        Orientation(g, [(0, 1), (1, 0), (1, 2), (2, 0)])


@given(orientations())
def test_odd_cycle_detection_matches_matrix_powers(o):
    odd, cycle = has_directed_odd_cycle(o)
    assert odd == _odd_closed_walk(o)
    if odd:
        assert len(cycle) % 2 == 1
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            assert o.out[a] >> b & 1


@given(orientations())
def test_scc_partition(o):
    comps = strongly_connected_components(o)
    assert sorted(v for c in comps for v in c) == list(range(o.host.n))


@settings(max_examples=60)
@given(orientations(5))
def test_parity_three_ways(o):
    fast = eulerian_parity(o)
    slow = eulerian_parity_naive(o)
    even, odd = naive_parity(o.host, o.arcs)
    assert (fast.even, fast.odd) == (slow.even, slow.odd) == (even, odd)
    assert fast.even >= 1  # the empty subgraph


@given(orientations(7))
def test_split_orientation_is_balanced(o):
    g = o.host
    s = eulerian_split_orientation(g)
    for v in range(g.n):
        assert abs(s.outdegree(v) - s.indegree(v)) <= 1


def test_known_at_numbers():
    assert at_number(cycle_graph(4))[0] == 2
    assert at_number(cycle_graph(3))[0] == 3
    assert at_number(complete_graph(4))[0] == 4
    assert at_number(complete_bipartite(3, 3))[0] == 3
    assert at_number(Graph(3))[0] == 1


def test_at_number_matches_brute_force():
    for n in range(1, 6):
        for g in enumerate_graphs(n):
            if g.m > 7:
                continue
            k, o = at_number(g)
            assert k == naive_at_number(g)
            assert is_alon_tarsi_orientation(o) and o.max_outdegree() < k


def test_is_f_alon_tarsi_nonconstant():
    g = Graph(3, [(0, 1), (1, 2)])
    o = is_f_alon_tarsi(g, [1, 3, 1])
    assert o is not None and o.outdegree(0) == 0 and o.outdegree(2) == 0
    assert is_f_alon_tarsi(g, [1, 2, 1]) is None


def test_parity_cap():
    g = complete_graph(13)
    o = eulerian_split_orientation(g)
    with pytest.raises(CapExceeded):
        eulerian_parity(o, cap=20)


def test_bounded_orientation_dense_bipartite_branch():
    g = complete_bipartite(12, 12)
    trace = []
    o = odd_cycle_free_bounded_orientation(g, 12, [0] * 12 + [1] * 12, 2, trace)
    assert trace[0]["branch"] == "bipartite"
    assert o.max_outdegree() <= outdegree_bound(12, 2)
    assert not has_directed_odd_cycle(o)[0]


def test_bounded_orientation_random():
    rng = np.random.default_rng(7)
    for _ in range(30):
        r = int(rng.integers(2, 5))
        d = int(rng.integers(2, 13))
        g, color = random_colorable_graph(int(rng.integers(5, 41)), r, d, 0.7, rng)
        o = odd_cycle_free_bounded_orientation(g, d, color, r)
        assert o.max_outdegree() <= outdegree_bound(d, r)
        assert not _odd_closed_walk(o)


def test_outdegree_bound_values():
    # floor((1 - 1/(4r+1)) d) + 1
    assert outdegree_bound(12, 2) == 11
    assert outdegree_bound(9, 2) == 9
    assert outdegree_bound(10, 3) == 10
