from fractions import Fraction

import pytest

from mlagg import DepthPolicy, simulate
from mlagg.depth import default_theta
from mlagg.model import Instance, Request, tree_from_parent_list


def test_default_theta_is_depth(example):
    assert DepthPolicy(example.tree).theta == 3
    assert default_theta(0) == 1


def test_theta_must_be_positive(example):
    with pytest.raises(ValueError):
        DepthPolicy(example.tree, 0)


def test_example_fourth_transmission_follows_pseudocode(example):
    # at t=7 the budget of v_a is 3*c(v_a)=12 and the first uncovered vertex
    # towards v_j is v_e, so v_e is bought and v_j keeps ell=2 after r invests
    sol, trace = simulate(example, DepthPolicy(example.tree, 3))
    rec = trace[3]
    assert rec.time == 7 and rec.critical == 9
    assert rec.VE == {0, 1, 4, 8} and rec.VI == {5}
    assert rec.assigned_budget[1] == 12
    assert rec.ell[10] == 2 and rec.ell[5] == 14
    assert rec.invest[1] == {5} and rec.invest[0] == {5, 10}
    # I_{v_b} keeps {v_g}: v_b is not an expansion vertex at t=5 or t=7
    assert rec.invest[2] == {7}


def test_example_full_run(example):
    sol, trace = simulate(example, DepthPolicy(example.tree, 3))
    assert [r.time for r in trace] == [1, 3, 5, 7, 8]
    assert [r.cost for r in trace] == [3, 21, 25, 21, 79]
    assert sol.total_cost == 149
    assert sum(r.unanticipated_cost for r in trace) == 94
    last = trace[-1]
    assert last.VE == {0, 1, 5, 10} and last.anticipated == {0, 1, 5}


def test_partial_investment_persists():
    # root budget 1 cannot buy the child of cost 3; ell drops and stays
    tree = tree_from_parent_list([None, 0], [1, 3])
    inst = Instance(tree, [Request(1, 0, 0, 1), Request(2, 1, 0, 2)])
    _, trace = simulate(inst, DepthPolicy(tree, 1))
    assert trace[0].VI == frozenset()
    assert trace[0].ell[1] == 2
    assert trace[0].next[0] == 2


def test_expansion_uses_memory_only_after_timer(example):
    _, trace = simulate(example, DepthPolicy(example.tree, 3))
    # t=3: critical path is r-v_a; next_r = 3 has elapsed, so I_r = {v_a, v_b} adds v_b
    assert example.tree.root_path(1) == [0, 1]
    assert trace[1].pre_next[0] == 3 and trace[1].VE == {0, 1, 2}
    # t=7: next_r = next_{v_a} = 8 > 7, so only the critical path r-v_a-v_d-v_h is expanded
    assert trace[3].pre_next[0] == 8 and trace[3].VE == set(example.tree.root_path(8))
