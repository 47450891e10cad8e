import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mlagg import CaterpillarPolicy, DepthPolicy, simulate
from mlagg.generators import SHAPES, gen_instance
from mlagg.model import Instance, Request, tree_from_parent_list, validate_solution
from mlagg.opt import OptLimitError, OptLimits, available_backends, exact_opt, lemma2_check
from mlagg.opt import _kernel_py

from oracles import brute_opt, unrestricted_opt

EXAMPLE_OPT = 95  # computed by oracles.brute_opt and frozen


def as_tuples(inst):
    parents = [inst.tree.parent[v] for v in range(len(inst.tree))]
    costs = [inst.tree.cost[v] for v in range(len(inst.tree))]
    return parents, costs, [(r.vertex, r.arrival, r.deadline) for r in inst.requests]


def test_example_value_frozen(example):
    res = exact_opt(example, OptLimits(max_requests=9))
    assert res.cost == EXAMPLE_OPT
    assert validate_solution(example, res.as_solution()).feasible


@pytest.mark.slow
def test_example_value_against_oracle(example):
    assert brute_opt(*as_tuples(example)) == EXAMPLE_OPT


def test_cap(example):
    with pytest.raises(OptLimitError):
        exact_opt(example)
    with pytest.raises(OptLimitError):
        exact_opt(example, OptLimits(max_requests=20, max_vertices=5))


def test_trivial_cases():
    tree = tree_from_parent_list([None, 0, 1], [2, 3, 5])
    single = exact_opt(Instance(tree, [Request(1, 2, 0, 4)]))
    assert single.cost == 10 and single.schedule == [(4, frozenset({0, 1, 2}))]
    pair = exact_opt(Instance(tree, [Request(1, 1, 0, 4), Request(2, 1, 1, 6)]))
    assert pair.cost == 5 and [t for t, _ in pair.schedule] == [4]
    assert exact_opt(Instance(tree, [])).cost == 0


def test_lemma2_trivial_and_example(example):
    empty = Instance(tree_from_parent_list([None]), [])
    v = lemma2_check([], exact_opt(empty))
    assert v.holds and v.unanticipated_total == 0 == v.opt_cost
    _, trace = simulate(example, DepthPolicy(example.tree, 3))
    v = lemma2_check(trace, exact_opt(example, OptLimits(max_requests=9)))
    assert v.holds and v.unanticipated_total == 94


def test_fractional_costs_scale_exactly():
    tree = tree_from_parent_list([None, 0, 0], [Fraction(1, 3), Fraction(5, 7), Fraction(2, 9)])
    inst = Instance(tree, [Request(1, 1, 0, 1), Request(2, 2, 0, 2)])
    res = exact_opt(inst)
    assert res.cost == Fraction(1, 3) + Fraction(5, 7) + Fraction(2, 9)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 8), st.integers(0, 6), st.integers(0, 10**6),
       st.sampled_from([0.05, 0.3, 1.0]))
def test_matches_brute_force(shape, n, m, seed, overlap):
    inst = gen_instance(shape, n, m, seed, overlap=overlap)
    assert exact_opt(inst, backend="python").cost == brute_opt(*as_tuples(inst))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 6), st.integers(1, 4), st.integers(0, 10**6))
def test_deadline_times_suffice(shape, n, m, seed):
    inst = gen_instance(shape, n, m, seed, overlap=1.0)
    assert exact_opt(inst).cost == unrestricted_opt(*as_tuples(inst))


@pytest.mark.skipif("compiled" not in available_backends(), reason="extension not built")
@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 40), st.integers(0, 8), st.integers(0, 10**6))
def test_backends_agree(shape, n, m, seed):
    inst = gen_instance(shape, n, m, seed, overlap=0.5)
    a = exact_opt(inst, backend="python")
    b = exact_opt(inst, backend="compiled")
    assert a.cost == b.cost and a.assignment == b.assignment


def test_python_kernel_handles_wide_masks():
    # 70 vertices on one path exceed 64 bits; the fallback must take over
    tree = tree_from_parent_list([None] + list(range(69)))
    inst = Instance(tree, [Request(1, 69, 0, 2), Request(2, 30, 1, 3)])
    assert exact_opt(inst, backend="compiled").cost == 70


def test_kernel_direct():
    best, assign = _kernel_py.solve([0b11, 0b01], [[0, 1], [0]], 2, [5, 7])
    assert best == 12 and assign == [0, 0]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 12), st.integers(1, 8), st.integers(0, 10**6),
       st.sampled_from(["depth", "caterpillar"]))
def test_opt_below_alg(shape, n, m, seed, alg):
    inst = gen_instance(shape, n, m, seed, overlap=0.5)
    policy = DepthPolicy(inst.tree) if alg == "depth" else CaterpillarPolicy(inst.tree)
    sol, trace = simulate(inst, policy)
    opt = exact_opt(inst)
    assert opt.cost <= sol.total_cost
    assert lemma2_check(trace, opt).holds


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 12), st.integers(1, 8), st.integers(0, 10**6), st.data())
def test_removing_a_request_never_raises_opt(shape, n, m, seed, data):
    inst = gen_instance(shape, n, m, seed, overlap=0.5)
    drop = data.draw(st.integers(0, m - 1))
    smaller = Instance(inst.tree, [r for k, r in enumerate(inst.requests) if k != drop])
    assert exact_opt(smaller).cost <= exact_opt(inst).cost


def test_env_forces_fallback(monkeypatch, example):
    from mlagg.opt import default_backend
    monkeypatch.setenv("MLAGG_PURE_PYTHON", "1")
    assert default_backend() == "python"
