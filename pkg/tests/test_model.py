from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mlagg.generators import SHAPES, gen_instance
from mlagg.model import (
    Instance,
    InstanceFormatError,
    Request,
    RootedTree,
    Solution,
    TreeError,
    format_fraction,
    parse_instance,
    parse_solution,
    reduce_edge_weighted,
    serialize_instance,
    serialize_solution,
    to_fraction,
    tree_from_parent_list,
    validate_solution,
)

SMALL = """\
tree 3
v 0 - 1
v 1 0 2
v 2 0 3/2
r 1 1 0 1
r 2 2 1/2 2
"""


def test_parse_small():
    inst = parse_instance(SMALL)
    assert inst.tree.root == 0
    assert inst.tree.cost[2] == Fraction(3, 2)
    assert [r.id for r in inst.requests] == [1, 2]
    assert inst.requests[1].arrival == Fraction(1, 2)


def test_parse_accepts_bytes_and_comments():
    inst = parse_instance(("# header\n" + SMALL.replace("v 1 0 2", "v 1 0 2   # note")).encode())
    assert inst.tree.cost[1] == 2


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("tree 2\nv 0 - 1\nv 1 5 1\n", 3, 5, "unknown parent"),
        ("tree 2\nv 0 - 1\nv 1 - 1\n", 3, None, "exactly one root"),
        ("tree 1\nv 0 - -4\n", 2, 7, "negative cost"),
        ("tree 1\nv 0 - 1\nr 1 0 5 2\n", 3, 9, "arrival after deadline"),
        ("tree 1\nv 0 - 1\nr 1 0 0 1\nr 1 0 0 2\n", 4, 3, "duplicate request"),
        ("tree 1\nv 0 - x\n", 2, 7, "bad number"),
        ("tree 1\nv 0 - 1\nr 1 4 0 1\n", 3, 5, "unknown vertex"),
        ("graph 1\n", 1, 1, "expected 'tree"),
    ],
)
def test_parse_errors_carry_position(text, line, col, fragment):
    with pytest.raises(InstanceFormatError) as exc:
        parse_instance(text)
    assert exc.value.line == line
    assert exc.value.column == col
    assert fragment in str(exc.value)


def test_parse_rejects_cycle():
    with pytest.raises(InstanceFormatError, match="cycle"):
        parse_instance("tree 3\nv 0 - 1\nv 1 2 1\nv 2 1 1\n")


def test_tree_queries(example):
    t = example.tree
    assert t.max_depth == 3
    assert t.root_path(10) == [0, 1, 5, 10]
    assert t.path_between(1, 9) == [1, 5, 9]
    assert t.is_ancestor(1, 9) and not t.is_ancestor(9, 1)
    assert t.children[1] == (4, 5, 6)
    assert sorted(t.leaves()) == [3, 6, 7, 8, 9, 10]
    assert t.is_rooted_subtree({0, 1, 5}) and not t.is_rooted_subtree({0, 5})
    with pytest.raises(TreeError):
        t.path_between(2, 9)


def test_floats_rejected():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    assert format_fraction(Fraction(13, 4)) == "13/4"


def test_instance_validation():
    tree = tree_from_parent_list([None, 0])
    with pytest.raises(ValueError, match="unknown vertex"):
        Instance(tree, [Request(1, 7, 0, 1)])
    with pytest.raises(ValueError, match="duplicate"):
        Instance(tree, [Request(1, 1, 0, 1), Request(1, 0, 0, 1)])


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SHAPES), st.integers(1, 25), st.integers(0, 12), st.integers(0, 10**6))
def test_serialize_round_trip(shape, n, m, seed):
    inst = gen_instance(shape, n, m, seed)
    text = serialize_instance(inst)
    back = parse_instance(text)
    assert back.tree == inst.tree
    assert back.requests == inst.requests
    assert serialize_instance(back) == text


def test_solution_round_trip(example):
    sol = Solution([(Fraction(1), frozenset({0, 2, 3})), (Fraction(7, 2), frozenset({0, 1}))])
    back = parse_solution(serialize_solution(sol), example)
    assert back.transmissions == sol.transmissions
    assert back.total_cost == 3 + 5


def test_validate_flags_disconnected_and_unserved(example):
    # {0, 5} skips v_a, so it serves nothing
    sol = parse_solution("t 4 : 0 5\n", example)
    rep = validate_solution(example, sol)
    assert rep.connectivity_violations == [0]
    assert 4 in rep.unserved and not rep.feasible


def test_validate_order_and_window(example):
    sol = parse_solution("t 9 : 0 3\nt 1 : 0 3\n", example)
    rep = validate_solution(example, sol)
    assert rep.order_violations == [1]
    assert rep.served[1] == 1 and rep.served[7] == 0


def test_validate_detects_cost_mismatch(example):
    sol = parse_solution("t 1 : 0 3\n", example)
    sol.total_cost += 1
    assert not validate_solution(example, sol).cost_ok


def test_reduce_edge_weighted():
    tree = reduce_edge_weighted(9, [(9, 0, 2), (0, 1, 3), (0, 2, 5), (2, 3, 1)])
    assert tree.root == 0 and tree.cost[0] == 2
    assert tree.parent == {0: None, 1: 0, 2: 0, 3: 2}
    assert tree.cost[3] == 1
    with pytest.raises(TreeError, match="exactly one neighbour"):
        reduce_edge_weighted(0, [(0, 1, 1), (0, 2, 1)])
    with pytest.raises(TreeError, match="cycle"):
        reduce_edge_weighted(9, [(9, 0, 1), (0, 1, 1), (1, 2, 1), (2, 0, 1)])


def test_tree_rejects_bad_input():
    with pytest.raises(TreeError):
        RootedTree({0: None, 1: None}, {0: 1, 1: 1})
    with pytest.raises(TreeError):
        RootedTree({0: None, 1: 0}, {0: 1, 1: -1})
