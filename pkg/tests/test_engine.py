from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mlagg import CaterpillarPolicy, DepthPolicy, simulate
from mlagg.engine import INF, AlgoState, InvariantError, classify, pending_below
from mlagg.generators import SHAPES, gen_instance
from mlagg.model import Instance, Request, tree_from_parent_list, validate_solution
from mlagg.traceio import render_trace


def run_depth(inst, theta=None):
    return simulate(inst, DepthPolicy(inst.tree, theta))


def test_empty_instance():
    inst = Instance(tree_from_parent_list([None, 0]), [])
    sol, trace = run_depth(inst)
    assert sol.transmissions == [] and sol.total_cost == 0 and trace == []


@pytest.mark.parametrize("policy", [DepthPolicy, CaterpillarPolicy])
def test_single_request_at_root(policy):
    inst = Instance(tree_from_parent_list([None, 0], [5, 1]), [Request(1, 0, 2, 3)])
    sol, trace = simulate(inst, policy(inst.tree))
    assert sol.transmissions == [(Fraction(3), frozenset({0}))]
    assert sol.total_cost == 5


def test_first_transmission_is_fully_unanticipated(example):
    _, trace = run_depth(example, 3)
    assert trace[0].anticipated == frozenset()
    assert trace[0].unanticipated == trace[0].VE


def test_example_first_three_transmissions(example):
    sol, trace = run_depth(example, 3)
    assert [sorted(T) for _, T in sol.transmissions[:3]] == [[0, 2, 3], [0, 1, 2, 5, 7], [0, 1, 5, 9]]
    assert [r.time for r in trace[:3]] == [1, 3, 5]
    assert [set(r.served) for r in trace[:3]] == [{1, 2, 7}, {3, 4, 8}, {5}]
    first = trace[0]
    assert first.next[0] == 3 and first.invest[0] == {1, 2} and first.ell[1] == 2
    second = trace[1]
    assert second.ell[9] == 5
    assert (second.next[0], second.next[1]) == (5, 4)
    assert second.invest[0] == {5, 9} and second.invest[1] == {5} and second.invest[2] == {7}
    third = trace[2]
    assert third.ell[10] == 3
    assert (third.next[0], third.next[1], third.next[5]) == (8, 8, 8)
    assert third.invest[0] == third.invest[1] == third.invest[5] == {10}


def test_example_classification(example):
    _, trace = run_depth(example, 3)
    assert trace[1].anticipated == {0} and trace[1].unanticipated == {1, 2}
    assert trace[2].anticipated == {0, 1} and trace[2].unanticipated == {5, 9}


def test_example_budgets(example):
    _, trace = run_depth(example, 3)
    assert trace[1].assigned_budget == {0: 3, 1: 12, 2: 3}
    assert trace[2].assigned_budget[5] == 42


def test_pending_below_head_at_second_transmission(example):
    state = AlgoState.initial(example.tree)
    state.VE = {0, 1, 2}
    got = pending_below(state, example, Fraction(3), 1, {3, 4, 5, 6, 8})
    assert [r.id for r in got] == [4, 5, 6]


def test_pending_below_tie_break():
    tree = tree_from_parent_list([None, 0, 0])
    inst = Instance(tree, [Request(7, 1, 0, 4), Request(3, 2, 0, 4), Request(5, 2, 3, 9)])
    st_ = AlgoState.initial(tree)
    st_.VE = {0}
    got = pending_below(st_, inst, Fraction(2), 0, {3, 5, 7})
    assert [r.id for r in got] == [3, 7]
    assert pending_below(st_, inst, Fraction(2), 2, set()) == []


def test_classify():
    A, Abar = classify({0, 1, 2}, {0: Fraction(3), 1: INF, 2: Fraction(5)}, Fraction(3))
    assert A == {0} and Abar == {1, 2}


def test_arrival_at_transmission_time_counts():
    tree = tree_from_parent_list([None, 0])
    inst = Instance(tree, [Request(1, 0, 0, 2), Request(2, 1, 2, 5)])
    sol, trace = run_depth(inst, 100)
    # the budget at t=2 is big enough to buy vertex 1 for the request arriving at t=2
    assert len(sol.transmissions) == 1 and set(trace[0].served) == {1, 2}


class _BrokenPolicy(DepthPolicy):
    def on_deadline(self, sim, t, critical):
        super().on_deadline(sim, t, critical)
        return {self.tree.root}, set()


def test_invariant_breach_is_reported(example):
    with pytest.raises(InvariantError, match="critical request"):
        simulate(example, _BrokenPolicy(example.tree, 3))


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 30), st.integers(0, 20), st.integers(0, 10**6),
       st.sampled_from(["depth", "caterpillar"]))
def test_feasible_and_deterministic(shape, n, m, seed, alg):
    inst = gen_instance(shape, n, m, seed, overlap=0.5)
    make = (lambda: DepthPolicy(inst.tree)) if alg == "depth" else (lambda: CaterpillarPolicy(inst.tree))
    sol, trace = simulate(inst, make())
    rep = validate_solution(inst, sol)
    assert rep.feasible and rep.cost_ok
    for rec in trace:
        assert rec.cost == inst.tree.set_cost(rec.VE) + inst.tree.set_cost(rec.VI)
        assert rec.anticipated | rec.unanticipated == rec.VE
        assert all(0 <= rec.ell[v] <= inst.tree.cost[v] for v in inst.tree.parent)
    sol2, trace2 = simulate(inst, make())
    vs = sorted(inst.tree.parent)
    assert render_trace(trace, vs) == render_trace(trace2, vs)
    assert sol2.transmissions == sol.transmissions
